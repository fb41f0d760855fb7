"""
larr - Labeled Multi-Dimensional Arrays

A Python library for array-valued physical quantities: named dimensions,
physical units, optional variances with uncertainty propagation, ragged
event data, coordinates and bin edges, and split-apply-combine.

Key Features:
    - Units checked and propagated at runtime (SI bases plus counts)
    - Variances propagated through every element-wise operation
    - Broadcast and transpose by dimension label, never by position
    - Event-list data with histogramming, flattening and grouping
    - Self-describing JSON files with bit-exact float round-trips

Quick Start:
    from src import DataArray, array, histogram, make_event_variable, make_event_data_array

    tof = make_event_variable([("spectrum", 2)], "us", [[1.0, 2.5], [0.5]])
    events = make_event_data_array({"tof": tof})
    edges = array(["tof"], [0.0, 1.0, 2.0, 3.0], unit="us")
    hist = histogram(events, edges)

Core Modules:
    units.py          - Unit type, unit algebra and the unit grammar
    dtypes.py         - Element types
    variable.py       - Dims, Variable, views, slicing and conversion
    transform.py      - Generic element-wise engine (broadcast, units, variances)
    ops.py            - Arithmetic, math functions and reductions
    dataset.py        - DataArray and Dataset containers
    event_storage.py  - Offsets + flat buffer storage of event lists
    events.py         - Event operations (histogram, flatten, concatenate)
    groupby.py        - Split-apply-combine
    serialization.py  - JSON save/load
    config.py         - Configuration management and loading
    utils.py          - Formatting helpers
"""

from . import ops
from .config import Config, ConfigError
from .dataset import (
    DataArray,
    Dataset,
    da_binary,
    da_mean,
    da_slice_point,
    da_slice_range,
    da_sum,
    ds_binary,
    ds_get,
    ds_mean,
    ds_set,
    ds_sum,
    identical,
    is_edges,
)
from .dtypes import DType
from .errors import (
    AlignmentError,
    CoordError,
    DimensionError,
    DTypeError,
    EdgesError,
    FormatError,
    IndexBoundsError,
    IntegerDivisionError,
    ItemNotFoundError,
    LarrError,
    ShapeError,
    UnitError,
    UnitOverflowError,
    UnitParseError,
    UnsupportedError,
    ValidationError,
    ViewError,
)
from .events import (
    event_concatenate,
    event_dense_op,
    event_variable_from_flat,
    flatten,
    histogram,
    make_event_data_array,
    make_event_variable,
)
from .groupby import GroupBy, gb_flatten, gb_mean, gb_sum, groupby
from .serialization import load, save
from .transform import Kernel, transform, transform_in_place
from .units import Unit, format_unit, parse_unit
from .variable import (
    Dims,
    Variable,
    VariableView,
    array,
    copy,
    make_variable,
    scalar,
    slice_point,
    slice_range,
    take,
    to_unit,
    transpose_to,
)

__version__ = "1.0.0"
__author__ = "larr contributors"

__all__ = [
    # Core types
    "Unit",
    "DType",
    "Dims",
    "Variable",
    "VariableView",
    "DataArray",
    "Dataset",
    "GroupBy",
    "Kernel",
    "Config",
    # Construction
    "array",
    "scalar",
    "make_variable",
    "make_event_variable",
    "event_variable_from_flat",
    "make_event_data_array",
    # Variable operations
    "ops",
    "copy",
    "slice_point",
    "slice_range",
    "take",
    "to_unit",
    "transpose_to",
    "transform",
    "transform_in_place",
    "parse_unit",
    "format_unit",
    # Containers
    "da_binary",
    "da_mean",
    "da_slice_point",
    "da_slice_range",
    "da_sum",
    "ds_binary",
    "ds_get",
    "ds_mean",
    "ds_set",
    "ds_sum",
    "identical",
    "is_edges",
    # Events and grouping
    "histogram",
    "flatten",
    "event_concatenate",
    "event_dense_op",
    "groupby",
    "gb_sum",
    "gb_mean",
    "gb_flatten",
    # Files
    "save",
    "load",
    # Errors
    "LarrError",
    "UnitError",
    "UnitOverflowError",
    "UnitParseError",
    "DimensionError",
    "ShapeError",
    "IndexBoundsError",
    "DTypeError",
    "UnsupportedError",
    "ViewError",
    "CoordError",
    "AlignmentError",
    "EdgesError",
    "ItemNotFoundError",
    "IntegerDivisionError",
    "FormatError",
    "ValidationError",
    "ConfigError",
]
