"""
Utility Module - Display Helpers

Small formatting helpers shared by the renderers, the plot exporter and the
command-line tools. Every function is deterministic so that output on
identical inputs is byte-identical across runs.

Example:
    from src.utils import format_float, format_dims, format_bytes

    format_float(0.1)                    # '0.1'
    format_dims(v.layout)                # '(x: 3, y: 2)'
    format_bytes(2.5e9)                  # '2.50 GB'
"""

import math
from typing import Any, Optional

import numpy as np

from .units import Unit, format_unit
from .variable import Dims


def format_float(value: float) -> str:
    """
    Shortest round-trip text of a float.

    Args:
        value: Number to format

    Returns:
        Text that parses back to the same float

    Example:
        >>> format_float(0.1)
        '0.1'
        >>> format_float(float("nan"))
        'nan'
    """
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def format_scalar(value: Any) -> str:
    """Text of one element of any dense element type."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


def format_dims(dims: Dims) -> str:
    """
    Render dims with extents.

    Example:
        >>> format_dims(Dims(("x", "y"), (3, 2)))
        '(x: 3, y: 2)'
    """
    return "(" + ", ".join(f"{label}: {extent}" for label, extent in dims.pairs()) + ")"


def unit_label(name: str, unit: Optional[Unit]) -> str:
    """
    Axis or column label built from a name and a unit.

    Example:
        >>> unit_label("tof", us)
        'tof [us]'
    """
    if unit is None:
        return name
    return f"{name} [{format_unit(unit)}]"


def format_bytes(amount: float) -> str:
    """
    Format a byte count or rate with a decimal prefix.

    Example:
        >>> format_bytes(2.5e9)
        '2.50 GB'
    """
    for prefix in ("", "k", "M", "G", "T"):
        if abs(amount) < 1000 or prefix == "T":
            return f"{amount:.2f} {prefix}B"
        amount /= 1000
    return ""


def truncate_name(name: str, chars: int = 24) -> str:
    """
    Truncate a long name for column display.

    Example:
        >>> truncate_name("a_very_long_coordinate_name_indeed", 12)
        'a_very_lo...'
    """
    if len(name) <= chars:
        return name
    return name[:chars - 3] + "..."
