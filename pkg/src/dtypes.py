"""
Element types of Variables.

Dense types map one-to-one onto numpy dtypes; event-list types store their
elements in an EventStorage flat buffer of the matching scalar type.
"""

from enum import Enum
from typing import Any

import numpy as np

from .errors import DTypeError


class DType(str, Enum):
    """Element type constants."""
    FLOAT64 = "float64"
    FLOAT32 = "float32"
    INT64 = "int64"
    INT32 = "int32"
    BOOL = "bool"
    STRING = "string"
    EVENT_FLOAT64 = "event_list_float64"
    EVENT_FLOAT32 = "event_list_float32"
    EVENT_INT64 = "event_list_int64"
    EVENT_INT32 = "event_list_int32"

    @property
    def is_event(self) -> bool:
        return self.value.startswith("event_list_")

    @property
    def element(self) -> "DType":
        """Scalar type of the elements (the type itself for dense types)."""
        if self.is_event:
            return DType(self.value[len("event_list_"):])
        return self

    @property
    def event(self) -> "DType":
        """Event-list form of a numeric scalar type."""
        if self.is_event:
            return self
        if self not in NUMERIC:
            raise DTypeError(f"no event-list form of {self.value}")
        return DType("event_list_" + self.value)

    @property
    def is_float(self) -> bool:
        return self.element in (DType.FLOAT64, DType.FLOAT32)

    @property
    def is_int(self) -> bool:
        return self.element in (DType.INT64, DType.INT32)

    @property
    def supports_variances(self) -> bool:
        return self.is_float

    @property
    def numpy(self) -> np.dtype:
        """numpy dtype of the stored scalars."""
        return _TO_NUMPY[self.element]


NUMERIC = (DType.FLOAT64, DType.FLOAT32, DType.INT64, DType.INT32)

_TO_NUMPY = {
    DType.FLOAT64: np.dtype(np.float64),
    DType.FLOAT32: np.dtype(np.float32),
    DType.INT64: np.dtype(np.int64),
    DType.INT32: np.dtype(np.int32),
    DType.BOOL: np.dtype(np.bool_),
    DType.STRING: np.dtype(object),
}


def from_numpy(dtype: Any) -> DType:
    """
    Map a numpy dtype to a dense DType.

    Raises:
        DTypeError: If the dtype has no counterpart
    """
    dtype = np.dtype(dtype)
    if dtype.kind in ("U", "S", "O"):
        return DType.STRING
    for key, value in _TO_NUMPY.items():
        if key is not DType.STRING and value == dtype:
            return key
    if dtype.kind == "i":
        return DType.INT64
    raise DTypeError(f"unsupported element type {dtype}")


def as_dtype(value: Any) -> DType:
    """Accept a DType, its name, or a numpy dtype."""
    if isinstance(value, DType):
        return value
    if isinstance(value, str):
        try:
            return DType(value)
        except ValueError:
            pass
    try:
        return from_numpy(value)
    except TypeError:
        raise DTypeError(f"unknown element type {value!r}") from None
