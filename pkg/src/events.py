"""
Events Module - Ragged Event Data

Event data stores one variable-length list of recorded values per dense
element. A DataArray holding event data needs at least one event coordinate
(an event-list coord with the same list lengths as the data).

Operations:
    make_event_variable     build an event-list Variable from Python lists
    make_event_data_array   weights 1 / variance 1 events from event coords
    histogram               bin events of one event coord into dense counts
    flatten                 concatenate the lists across one dense dim
    event_concatenate       append lists of one array to those of another
    event_dense_op          broadcast a dense operand into every event list

Bins are half-open: an event e falls into bin k iff edges[k] <= e < edges[k+1].
Events outside [edges[0], edges[-1]) are discarded.

Example:
    from src.events import make_event_variable, make_event_data_array, histogram
    from src.variable import array

    tof = make_event_variable([("spectrum", 2)], "us", [[0.5, 1.5], [1.7, 2.5]])
    da = make_event_data_array({"tof": tof})
    edges = array(["tof"], [0.0, 1.0, 2.0, 3.0], unit="us")
    hist = histogram(da, edges)   # counts [[1, 1], [0, 1, 1]] ...
"""

import logging
from typing import Any, Dict, Mapping, Optional, Sequence, Union

import numpy as np

from .dataset import DataArray, OpLike, _merge_attrs, _resolve_op
from .dtypes import DType, as_dtype
from .errors import (
    CoordError,
    DimensionError,
    DTypeError,
    EdgesError,
    ShapeError,
    UnitError,
    UnsupportedError,
)
from .event_storage import EventStorage
from .units import Unit, as_unit, counts, format_unit
from .variable import (
    Dims,
    DimsLike,
    Variable,
    as_dims,
    copy,
    identical as variable_identical,
    transpose_to,
)

logger = logging.getLogger(__name__)


def make_event_variable(
    dims: DimsLike,
    unit: Union[Unit, str, None],
    lists: Sequence[Sequence[Any]],
    variances: Optional[Sequence[Sequence[Any]]] = None,
    dtype: Any = DType.FLOAT64,
) -> Variable:
    """
    Build an event-list Variable.

    Args:
        dims: Dense dims; their element count is the number of lists
        unit: Unit of every event value
        lists: One sequence of values per dense element, row-major
        variances: Optional ragged variances with identical list lengths
        dtype: Scalar or event-list element type

    Raises:
        ShapeError: If the list count or variance lengths do not match
        DTypeError: If variances are given for integer events
    """
    layout = as_dims(dims)
    element = as_dtype(dtype).element
    if not (element.is_float or element.is_int):
        raise DTypeError(f"event lists must be numeric, got {element.value}")
    lists = list(lists)
    if len(lists) != layout.volume:
        raise ShapeError(f"{len(lists)} lists for dims {layout} with {layout.volume} elements")
    storage = EventStorage.from_lists(lists, dtype=element.numpy)

    var_storage = None
    if variances is not None:
        if not element.supports_variances:
            raise DTypeError(f"variances not supported for {element.event.value}")
        var_lists = list(variances)
        if len(var_lists) != len(lists):
            raise ShapeError(f"{len(var_lists)} variance lists for {len(lists)} value lists")
        candidate = EventStorage.from_lists(var_lists, dtype=element.numpy)
        if not np.array_equal(candidate.lengths(), storage.lengths()):
            raise ShapeError("variance list lengths do not match value list lengths")
        var_storage = storage.with_flat(candidate.flat)

    ids = np.arange(storage.count, dtype=np.int64).reshape(layout.shape)
    return Variable(layout, as_unit(unit), element.event, ids, None, storage, var_storage)


def event_variable_from_flat(
    dims: DimsLike,
    unit: Union[Unit, str, None],
    flat: np.ndarray,
    lengths: np.ndarray,
) -> Variable:
    """
    Build an event-list Variable from one flat buffer and per-list lengths.

    Args:
        dims: Dense dims; their element count is the number of lists
        unit: Unit of every event value
        flat: All event values, list after list in row-major order
        lengths: Number of events per list

    Raises:
        ShapeError: If the lengths do not fit dims or flat
    """
    layout = as_dims(dims)
    flat = np.asarray(flat)
    element = as_dtype(flat.dtype.name)
    if not (element.is_float or element.is_int):
        raise DTypeError(f"event lists must be numeric, got {flat.dtype.name}")
    lengths = np.asarray(lengths, dtype=np.int64).ravel()
    if lengths.size != layout.volume:
        raise ShapeError(f"{lengths.size} lists for dims {layout} with {layout.volume} elements")
    if int(lengths.sum()) != flat.size:
        raise ShapeError(f"lengths sum to {int(lengths.sum())}, flat buffer holds {flat.size}")
    storage = EventStorage.from_lengths(flat, lengths)
    ids = np.arange(storage.count, dtype=np.int64).reshape(layout.shape)
    return Variable(layout, as_unit(unit), element.event, ids, None, storage)


def make_event_data_array(
    event_coords: Mapping[str, Variable],
    dense_coords: Optional[Mapping[str, Variable]] = None,
    unit: Union[Unit, str, None] = counts,
    name: str = "",
) -> DataArray:
    """
    Event DataArray with implicit weights: every event has value 1 and variance 1.

    Args:
        event_coords: Event-list coords; the first one fixes the list layout
        dense_coords: Coords over the dense dims
        unit: Unit of the weights
        name: Display name
    """
    if not event_coords:
        raise CoordError("event data requires an event coordinate")
    first = next(iter(event_coords.values()))
    if not first.is_event:
        raise CoordError("event coordinates must hold event lists")
    lengths = first.lengths().ravel()
    total = int(lengths.sum())
    storage = EventStorage.from_lengths(np.ones(total), lengths)
    weights = Variable(
        first.layout,
        as_unit(unit),
        DType.EVENT_FLOAT64,
        np.arange(storage.count, dtype=np.int64).reshape(first.shape),
        None,
        storage,
        storage.with_flat(np.ones(total)),
    )
    coords = dict(event_coords)
    coords.update(dense_coords or {})
    return DataArray(weights, coords, name=name)


def _event_coord(da: DataArray, name: str) -> Variable:
    if name not in da.coords or not da.coords[name].is_event:
        raise CoordError(f"no event coordinate named {name!r}")
    return da.coords[name]


def _check_edges(edges: Variable) -> np.ndarray:
    if edges.ndim != 1:
        raise EdgesError(f"bin edges must be 1-D, got {edges.layout}")
    if edges.is_event or not (edges.dtype.is_float or edges.dtype.is_int):
        raise DTypeError(f"bin edges must be numeric, got {edges.dtype.value}")
    values = np.asarray(edges.values, dtype=np.float64)
    if values.size < 2 or np.any(~(np.diff(values) > 0)):
        raise EdgesError(f"bin edges along {edges.dims[0]!r} must be strictly increasing")
    return values


def histogram(da: DataArray, edges: Variable) -> DataArray:
    """
    Histogram event data along the event coord named after the edges' dim.

    Bin values are summed weights and bin variances summed weight variances.
    Weights with unit counts and no variances get Poisson variances.

    Args:
        da: Event DataArray
        edges: 1-D strictly increasing bin edges over dim d

    Returns:
        Dense DataArray over (dense dims of da) + (d,) with edges as coord d

    Raises:
        EdgesError: If edges are not strictly increasing
        UnitError: If edges and event coord units differ
        CoordError: If da has no event coord named d
    """
    edge_values = _check_edges(edges)
    dim = edges.dims[0]
    coord = _event_coord(da, dim)
    if coord.unit != edges.unit:
        raise UnitError(
            f"edges unit {format_unit(edges.unit)} differs from event coord "
            f"{dim!r} unit {format_unit(coord.unit)}"
        )
    data = da.data
    if dim in data.dims:
        raise DimensionError(f"dense dim {dim!r} clashes with the event coord name")

    nbins = edge_values.size - 1
    lengths = data.lengths().ravel()
    nlists = lengths.size
    aligned = transpose_to(coord, data.dims)
    points = aligned.event_storage.flat[aligned.event_storage.positions(aligned.list_ids)]
    data_positions = data.event_storage.positions(data.list_ids)
    weights = data.event_storage.flat[data_positions]

    bins = np.searchsorted(edge_values, points.astype(np.float64), side="right") - 1
    keep = (bins >= 0) & (bins < nbins)
    rows = np.repeat(np.arange(nlists, dtype=np.int64), lengths)
    cells = (rows * nbins + bins)[keep]
    size = nlists * nbins
    values = np.bincount(cells, weights=weights[keep], minlength=size)

    variances = None
    if data.has_variances:
        weight_variances = data.event_variance_storage.flat[data_positions]
        variances = np.bincount(cells, weights=weight_variances[keep], minlength=size)
    elif data.unit == counts:
        variances = values.copy()
    logger.debug(f"histogram: {points.size} events into {nlists} x {nbins} bins, {int(keep.sum())} in range")

    out_type = data.dtype.element if data.dtype.is_float else DType.FLOAT64
    layout = Dims(data.dims + (dim,), data.shape + (nbins,))
    hist = Variable(
        layout,
        data.unit,
        out_type,
        values.astype(out_type.numpy).reshape(layout.shape),
        None if variances is None else variances.astype(out_type.numpy).reshape(layout.shape),
    )
    coords = {k: copy(v) for k, v in da.coords.items() if not v.is_event}
    coords[dim] = copy(edges)
    attrs = {k: copy(v) for k, v in da.attrs.items()}
    return DataArray(hist, coords, attrs, name=da.name)


def _flatten_lists(v: Variable, dim: str, rest: Dims) -> Variable:
    order = rest.labels + (dim,)
    ids = transpose_to(v, order).list_ids
    extent = v.layout.extent(dim)
    groups = np.full(rest.volume, extent, dtype=np.int64)
    return v.gather_lists(ids.ravel(), rest, group_sizes=groups)


def flatten(da: DataArray, dim: str) -> DataArray:
    """
    Concatenate event lists across dim, in ascending dim order.

    Data and every event coord are flattened; dense coords and attrs that
    depend on dim are dropped.

    Raises:
        DimensionError: If dim is not a dense dim, including an event coord name
        DTypeError: If da does not hold event data
    """
    if not da.is_event:
        raise DTypeError("flatten requires event data")
    if dim not in da.dims:
        if dim in da.event_coords():
            raise DimensionError(f"cannot flatten the internal event dimension {dim!r}")
        raise DimensionError(f"dimension {dim!r} not found in {list(da.dims)}")
    rest = da.data.layout.without(dim)
    data = _flatten_lists(da.data, dim, rest)
    coords = {}
    for name, coord in da.coords.items():
        if coord.is_event:
            coords[name] = _flatten_lists(coord, dim, rest)
        elif dim not in coord.dims:
            coords[name] = copy(coord)
    attrs = {k: copy(v) for k, v in da.attrs.items() if dim not in v.dims}
    return DataArray(data, coords, attrs, name=da.name)


def _interleave(a: Variable, b: Variable) -> Variable:
    if a.unit != b.unit:
        raise UnitError(f"cannot concatenate {format_unit(a.unit)} and {format_unit(b.unit)} events")
    if a.dtype != b.dtype:
        raise DTypeError(f"cannot concatenate {a.dtype.value} and {b.dtype.value} events")
    if a.has_variances != b.has_variances:
        raise ShapeError("cannot concatenate events with and without variances")
    ca = copy(a)
    cb = copy(transpose_to(b, a.dims))
    storage = EventStorage.concat([ca.event_storage, cb.event_storage])
    variances = None
    if ca.has_variances:
        variances = storage.with_flat(
            np.concatenate([ca.event_variance_storage.flat, cb.event_variance_storage.flat])
        )
    joined = Variable(
        Dims(("list",), (storage.count,)),
        a.unit,
        a.dtype,
        np.arange(storage.count, dtype=np.int64),
        None,
        storage,
        variances,
    )
    ids = np.stack([ca.list_ids.ravel(), cb.list_ids.ravel() + ca.event_storage.count], axis=1)
    groups = np.full(a.layout.volume, 2, dtype=np.int64)
    return joined.gather_lists(ids.ravel(), a.layout, group_sizes=groups)


def event_concatenate(a: DataArray, b: DataArray) -> DataArray:
    """
    Append each list of b to the matching list of a.

    Raises:
        ShapeError: If dense dims differ
        UnitError: If units differ
        CoordError: If event coord names or shared dense coords differ
    """
    if not (a.is_event and b.is_event):
        raise DTypeError("event_concatenate requires event data")
    if sorted(a.data.layout.pairs()) != sorted(b.data.layout.pairs()):
        raise ShapeError(f"dense dims differ: {a.data.layout} and {b.data.layout}")
    a_events, b_events = a.event_coords(), b.event_coords()
    if set(a_events) != set(b_events):
        raise CoordError(
            f"event coords differ: {sorted(a_events)} and {sorted(b_events)}"
        )
    data = _interleave(a.data, b.data)
    coords = {name: _interleave(a_events[name], b_events[name]) for name in a_events}
    for name, coord in a.coords.items():
        if coord.is_event:
            continue
        if name in b.coords and not variable_identical(coord, b.coords[name]):
            raise CoordError(f"coordinate {name!r} does not match between operands")
        coords[name] = copy(coord)
    for name, coord in b.coords.items():
        if not coord.is_event and name not in coords:
            coords[name] = copy(coord)
    attrs = {k: copy(v) for k, v in _merge_attrs(a.attrs, b.attrs).items()}
    return DataArray(data, coords, attrs, name=a.name)


def event_dense_op(
    da: DataArray,
    dense: Variable,
    op: OpLike,
    target: str = "data",
) -> DataArray:
    """
    Apply a dense operand to every event of one event-list Variable.

    Args:
        da: Event DataArray
        dense: Dense Variable over a subset of the dense dims
        op: "add", "subtract", "multiply" or "divide"
        target: "data" or the name of an event coord

    Returns:
        New DataArray with the targeted Variable replaced; list lengths unchanged

    Raises:
        DimensionError: If dense has dims outside the dense dims of da
        UnitError: Per the op's unit rules
    """
    fn = _resolve_op(op)
    if dense.is_event:
        raise UnsupportedError("the operand must be dense")
    for label in dense.dims:
        if label not in da.dims:
            raise DimensionError(f"operand dim {label!r} is not a dense dim of the event data")
    if target == "data":
        original = da.data
    else:
        original = _event_coord(da, target)
    if not original.is_event:
        raise UnsupportedError(f"{target!r} does not hold event lists")
    updated = fn(original, dense)

    data = updated if target == "data" else copy(da.data)
    coords = {}
    for name, coord in da.coords.items():
        coords[name] = updated if name == target else copy(coord)
    attrs = {k: copy(v) for k, v in da.attrs.items()}
    return DataArray(data, coords, attrs, name=da.name)
