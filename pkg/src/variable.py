"""
Variable Module - Array-Valued Physical Quantities

A Variable bundles named dimensions, one unit, a values buffer and an
optional variances buffer of identical shape. Event-list Variables keep
their elements in an EventStorage and hold an array of list ids in place of
dense values.

Slicing returns a VariableView: a writable window that shares the buffers of
its base Variable. A view can change element values but never the unit,
the dimension labels, or the shape.

Example:
    from src.variable import array, slice_range

    v = array(["x", "y"], [[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]], unit="m")
    row = v["x", 1]               # view of shape (y: 2)
    row.values[0] = 10.0          # visible in v
    part = slice_range(v, "x", 0, 2)
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .dtypes import DType, as_dtype, from_numpy
from .errors import (
    DimensionError,
    DTypeError,
    IndexBoundsError,
    ShapeError,
    UnitError,
    UnsupportedError,
    ValidationError,
    ViewError,
)
from .event_storage import EventStorage
from .units import Unit, as_unit, dimensionless, format_unit

logger = logging.getLogger(__name__)

MAX_RANK = 6


@dataclass(frozen=True)
class Dims:
    """
    Ordered dimension labels with their extents.

    Attributes:
        labels: Unique dimension labels, outermost first
        shape: Extent of every dimension
    """

    labels: Tuple[str, ...] = ()
    shape: Tuple[int, ...] = ()

    def __post_init__(self):
        labels = tuple(self.labels)
        shape = tuple(int(n) for n in self.shape)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "shape", shape)
        if len(labels) != len(shape):
            raise ShapeError(f"{len(labels)} labels but {len(shape)} extents")
        if len(labels) > MAX_RANK:
            raise DimensionError(f"rank {len(labels)} exceeds maximum {MAX_RANK}")
        for label in labels:
            if not isinstance(label, str) or not label:
                raise DimensionError(f"dimension label must be a non-empty string, got {label!r}")
        if len(set(labels)) != len(labels):
            raise DimensionError(f"duplicate dimension label in {list(labels)}")
        for n in shape:
            if n < 0:
                raise ShapeError(f"negative extent {n} in {self}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[str, int]]) -> "Dims":
        pairs = list(pairs)
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))

    @property
    def ndim(self) -> int:
        return len(self.labels)

    @property
    def volume(self) -> int:
        return int(np.prod(self.shape, dtype=np.int64)) if self.shape else 1

    @property
    def sizes(self) -> Dict[str, int]:
        return dict(zip(self.labels, self.shape))

    def pairs(self) -> List[Tuple[str, int]]:
        return list(zip(self.labels, self.shape))

    def index(self, label: str) -> int:
        """Axis of label, raising DimensionError if absent."""
        try:
            return self.labels.index(label)
        except ValueError:
            raise DimensionError(
                f"dimension {label!r} not found in {list(self.labels)}"
            ) from None

    def extent(self, label: str) -> int:
        return self.shape[self.index(label)]

    def without(self, label: str) -> "Dims":
        axis = self.index(label)
        return Dims(
            self.labels[:axis] + self.labels[axis + 1:],
            self.shape[:axis] + self.shape[axis + 1:],
        )

    def with_extent(self, label: str, extent: int) -> "Dims":
        axis = self.index(label)
        return Dims(self.labels, self.shape[:axis] + (extent,) + self.shape[axis + 1:])

    def replaced(self, label: str, new_label: str, extent: int) -> "Dims":
        """Swap one dimension for another at the same position."""
        axis = self.index(label)
        return Dims(
            self.labels[:axis] + (new_label,) + self.labels[axis + 1:],
            self.shape[:axis] + (extent,) + self.shape[axis + 1:],
        )

    def permuted(self, order: Sequence[str]) -> "Dims":
        return Dims(tuple(order), tuple(self.extent(label) for label in order))

    def __contains__(self, label: object) -> bool:
        return label in self.labels

    def __len__(self) -> int:
        return len(self.labels)

    def __str__(self) -> str:
        return "(" + ", ".join(f"{l}: {n}" for l, n in self.pairs()) + ")"


DimsLike = Union[Dims, Sequence[Tuple[str, int]], Dict[str, int]]


def as_dims(value: DimsLike) -> Dims:
    """Accept Dims, a list of (label, extent) pairs or a mapping."""
    if isinstance(value, Dims):
        return value
    if isinstance(value, dict):
        return Dims(tuple(value.keys()), tuple(value.values()))
    return Dims.from_pairs(value)


def _point(arr: np.ndarray, axis: int, index: int) -> np.ndarray:
    # Slice then squeeze so 0-D results stay writable views
    key = (slice(None),) * axis + (slice(index, index + 1),)
    return np.squeeze(arr[key], axis=axis)


def _apply_selectors(arr: Optional[np.ndarray], selectors: Tuple[tuple, ...]) -> Optional[np.ndarray]:
    if arr is None:
        return None
    for sel in selectors:
        kind = sel[0]
        if kind == "point":
            arr = _point(arr, sel[1], sel[2])
        elif kind == "range":
            key = (slice(None),) * sel[1] + (slice(sel[2], sel[3]),)
            arr = arr[key]
        else:
            arr = arr.transpose(sel[1])
    return arr


def _event_object_array(storage: EventStorage, ids: np.ndarray) -> np.ndarray:
    out = np.empty(ids.shape, dtype=object)
    flat_ids = ids.ravel()
    flat_out = out.reshape(-1)
    for i, list_id in enumerate(flat_ids):
        flat_out[i] = storage.list(int(list_id))
    return out


class Variable:
    """
    Array-valued physical quantity.

    Attributes:
        dims: Dimension labels, outermost first
        shape: Extent per dimension
        unit: Physical unit of all elements
        dtype: Element type
        values: numpy array (dense) or object array of per-list views (events)
        variances: Same layout as values, or None
    """

    def __init__(
        self,
        dims: Dims,
        unit: Unit,
        dtype: DType,
        values: np.ndarray,
        variances: Optional[np.ndarray] = None,
        events: Optional[EventStorage] = None,
        event_variances: Optional[EventStorage] = None,
    ):
        self._dims = dims
        self._unit = unit
        self._dtype = dtype
        self._values = values
        self._variances = variances
        self._events = events
        self._event_variances = event_variances

    # Storage access; overridden by views

    def _raw_values(self) -> np.ndarray:
        return self._values

    def _raw_variances(self) -> Optional[np.ndarray]:
        return self._variances

    def _storage(self) -> Optional[EventStorage]:
        return self._events

    def _variance_storage(self) -> Optional[EventStorage]:
        return self._event_variances

    def _root(self) -> "Variable":
        return self

    def _selectors(self) -> Tuple[tuple, ...]:
        return ()

    # Metadata

    @property
    def dims(self) -> Tuple[str, ...]:
        return self._dims.labels

    @property
    def shape(self) -> Tuple[int, ...]:
        return self._dims.shape

    @property
    def sizes(self) -> Dict[str, int]:
        return self._dims.sizes

    @property
    def layout(self) -> Dims:
        """Dims object (labels and extents)."""
        return self._dims

    @property
    def ndim(self) -> int:
        return self._dims.ndim

    @property
    def dtype(self) -> DType:
        return self._dtype

    @property
    def is_view(self) -> bool:
        return False

    @property
    def is_event(self) -> bool:
        return self._dtype.is_event

    @property
    def unit(self) -> Unit:
        return self._unit

    @unit.setter
    def unit(self, value: Union[Unit, str]) -> None:
        unit = as_unit(value)
        if self._dtype in (DType.STRING, DType.BOOL) and not unit.is_dimensionless:
            raise UnitError(f"{self._dtype.value} variables must be dimensionless")
        self._unit = unit

    @property
    def has_variances(self) -> bool:
        if self.is_event:
            return self._variance_storage() is not None
        return self._raw_variances() is not None

    # Values and variances

    @property
    def values(self) -> np.ndarray:
        if self.is_event:
            return _event_object_array(self._storage(), self._raw_values())
        return self._raw_values()

    @values.setter
    def values(self, value: Any) -> None:
        if self.is_event:
            raise UnsupportedError("event lists are modified element-wise through .values[...]")
        target = self._raw_values()
        arr = np.asarray(value, dtype=self._dtype.numpy)
        try:
            np.copyto(target, arr)
        except ValueError:
            raise ShapeError(
                f"cannot assign values of shape {arr.shape} to {self._dims}"
            ) from None

    @property
    def variances(self) -> Optional[np.ndarray]:
        if self.is_event:
            storage = self._variance_storage()
            return None if storage is None else _event_object_array(storage, self._raw_values())
        return self._raw_variances()

    @variances.setter
    def variances(self, value: Any) -> None:
        if value is None:
            if self.is_view:
                raise ViewError("cannot remove variances through a view")
            self._variances = None
            self._event_variances = None
            return
        if not self._dtype.supports_variances:
            raise DTypeError(f"variances not supported for {self._dtype.value}")
        if self.is_event:
            self._set_event_variances(value)
            return
        arr = np.asarray(value, dtype=self._dtype.numpy)
        existing = self._raw_variances()
        if existing is None:
            if self.is_view:
                raise ViewError("cannot add variances through a view")
            try:
                self._variances = np.array(np.broadcast_to(arr, self.shape))
            except ValueError:
                raise ShapeError(
                    f"cannot assign variances of shape {arr.shape} to {self._dims}"
                ) from None
            return
        try:
            np.copyto(existing, arr)
        except ValueError:
            raise ShapeError(
                f"cannot assign variances of shape {arr.shape} to {self._dims}"
            ) from None

    def _set_event_variances(self, value: Any) -> None:
        if self.is_view:
            raise ViewError("cannot replace event variances through a view")
        storage = self._storage()
        if not isinstance(value, EventStorage):
            value = EventStorage.from_lists(list(value), dtype=self._dtype.numpy)
        if not np.array_equal(value.lengths(), storage.lengths()):
            raise ShapeError("event variances must match the event list lengths")
        self._event_variances = storage.with_flat(value.flat.astype(self._dtype.numpy))

    @property
    def value(self) -> Any:
        """Element of a 0-D variable."""
        if self.ndim != 0:
            raise ShapeError(f"value requires a 0-D variable, got {self._dims}")
        if self.is_event:
            return self.values[()]
        return self._raw_values()[()]

    @value.setter
    def value(self, new: Any) -> None:
        if self.ndim != 0:
            raise ShapeError(f"value requires a 0-D variable, got {self._dims}")
        self.values = new

    @property
    def variance(self) -> Any:
        if self.ndim != 0:
            raise ShapeError(f"variance requires a 0-D variable, got {self._dims}")
        var = self.variances
        return None if var is None else var[()]

    @variance.setter
    def variance(self, new: Any) -> None:
        if self.ndim != 0:
            raise ShapeError(f"variance requires a 0-D variable, got {self._dims}")
        self.variances = new

    # Event-list access

    @property
    def list_ids(self) -> np.ndarray:
        """Event-list ids into the shared storage, shaped like dims."""
        self._require_events()
        return self._raw_values()

    @property
    def event_storage(self) -> EventStorage:
        self._require_events()
        return self._storage()

    @property
    def event_variance_storage(self) -> Optional[EventStorage]:
        self._require_events()
        return self._variance_storage()

    def lengths(self) -> np.ndarray:
        """Length of every event list, shaped like dims."""
        self._require_events()
        return self._storage().lengths()[self._raw_values()]

    def event_lists(self) -> List[np.ndarray]:
        """Views of every event list in row-major order."""
        self._require_events()
        storage = self._storage()
        return [storage.list(int(i)) for i in self._raw_values().ravel()]

    def _require_events(self) -> None:
        if not self.is_event:
            raise DTypeError(f"{self._dtype.value} variable holds no event lists")

    def gather_lists(
        self,
        list_ids: np.ndarray,
        dims: Dims,
        group_sizes: Optional[np.ndarray] = None,
    ) -> "Variable":
        """
        New owned event Variable built from selected lists of this one.

        Args:
            list_ids: Ids into this variable's storage, in output order
            dims: Dims of the result
            group_sizes: Concatenate consecutive runs of this many lists

        Returns:
            Event Variable with compact storage
        """
        self._require_events()
        storage = self._storage()
        values = storage.gather(list_ids, group_sizes)
        variances = None
        if self._variance_storage() is not None:
            flat = self._variance_storage().flat[storage.positions(list_ids)]
            variances = values.with_flat(flat)
        if values.count != dims.volume:
            raise ShapeError(f"{values.count} lists for dims {dims}")
        ids = np.arange(values.count, dtype=np.int64).reshape(dims.shape)
        return Variable(dims, self.unit, self._dtype, ids, None, values, variances)

    # Invariants

    def validate(self) -> List[str]:
        """
        Re-derive the container invariants.

        Returns:
            List of problems (empty if valid)
        """
        problems = []
        values = self._raw_values()
        if values.shape != self.shape:
            problems.append(f"values shape {values.shape} does not match {self._dims}")
        if self._dtype in (DType.STRING, DType.BOOL) and not self.unit.is_dimensionless:
            problems.append(f"{self._dtype.value} variable has unit {format_unit(self.unit)}")
        if self.has_variances and not self._dtype.supports_variances:
            problems.append(f"variances not supported for {self._dtype.value}")
        if self.is_event:
            storage = self._storage()
            problems.extend(storage.validate())
            if values.size and (values.min() < 0 or values.max() >= storage.count):
                problems.append("event list ids out of range")
            var_storage = self._variance_storage()
            if var_storage is not None:
                if not np.array_equal(var_storage.offsets, storage.offsets):
                    problems.append("event variances do not match event list lengths")
                elif np.any(var_storage.flat < 0):
                    problems.append("negative variance")
        else:
            if values.dtype != self._dtype.numpy:
                problems.append(f"buffer dtype {values.dtype} does not match {self._dtype.value}")
            variances = self._raw_variances()
            if variances is not None:
                if variances.shape != values.shape:
                    problems.append(
                        f"variances shape {variances.shape} does not match values {values.shape}"
                    )
                elif np.any(variances < 0):
                    problems.append("negative variance")
        return problems

    # Operators

    def __getitem__(self, key: Tuple[str, Union[int, slice]]) -> "VariableView":
        dim, index = _split_key(key)
        if isinstance(index, slice):
            begin, end = _slice_bounds(index, self.sizes.get(dim, 0))
            return slice_range(self, dim, begin, end)
        return slice_point(self, dim, index)

    def __add__(self, other):
        from . import ops
        return ops.add(self, _as_operand(other, self))

    def __radd__(self, other):
        from . import ops
        return ops.add(_as_operand(other, self), self)

    def __sub__(self, other):
        from . import ops
        return ops.subtract(self, _as_operand(other, self))

    def __rsub__(self, other):
        from . import ops
        return ops.subtract(_as_operand(other, self), self)

    def __mul__(self, other):
        from . import ops
        return ops.multiply(self, _as_operand(other, self))

    def __rmul__(self, other):
        from . import ops
        return ops.multiply(_as_operand(other, self), self)

    def __truediv__(self, other):
        from . import ops
        return ops.divide(self, _as_operand(other, self))

    def __rtruediv__(self, other):
        from . import ops
        return ops.divide(_as_operand(other, self), self)

    def __iadd__(self, other):
        from . import ops
        ops.add_in_place(self, _as_operand(other, self))
        return self

    def __isub__(self, other):
        from . import ops
        ops.subtract_in_place(self, _as_operand(other, self))
        return self

    def __imul__(self, other):
        from . import ops
        ops.multiply_in_place(self, _as_operand(other, self))
        return self

    def __itruediv__(self, other):
        from . import ops
        ops.divide_in_place(self, _as_operand(other, self))
        return self

    def __neg__(self):
        from . import ops
        return ops.negative(self)

    def __abs__(self):
        from . import ops
        return ops.abs(self)

    def __repr__(self) -> str:
        kind = "VariableView" if self.is_view else "Variable"
        variances = ", variances" if self.has_variances else ""
        return (
            f"<{kind} dims={self._dims} dtype={self._dtype.value} "
            f"unit={format_unit(self.unit)}{variances}>"
        )


class VariableView(Variable):
    """
    Writable window into a Variable.

    Buffers are resolved through the base on every access, so writes through
    any view are visible in the base and in all overlapping views.
    """

    def __init__(self, base: Variable, selectors: Tuple[tuple, ...], dims: Dims):
        root = base._root()
        super().__init__(dims, root._unit, root._dtype, None)
        self._base = root
        self._selector_chain = base._selectors() + selectors

    def _raw_values(self) -> np.ndarray:
        return _apply_selectors(self._base._values, self._selector_chain)

    def _raw_variances(self) -> Optional[np.ndarray]:
        return _apply_selectors(self._base._variances, self._selector_chain)

    def _storage(self) -> Optional[EventStorage]:
        return self._base._events

    def _variance_storage(self) -> Optional[EventStorage]:
        return self._base._event_variances

    def _root(self) -> Variable:
        return self._base

    def _selectors(self) -> Tuple[tuple, ...]:
        return self._selector_chain

    @property
    def base(self) -> Variable:
        return self._base

    @property
    def is_view(self) -> bool:
        return True

    @property
    def unit(self) -> Unit:
        return self._base.unit

    @unit.setter
    def unit(self, value: Union[Unit, str]) -> None:
        raise ViewError("cannot change the unit through a view")


def _split_key(key: Any) -> Tuple[str, Union[int, slice]]:
    if not (isinstance(key, tuple) and len(key) == 2 and isinstance(key[0], str)):
        raise DimensionError(f"slice key must be (dim, index-or-slice), got {key!r}")
    return key[0], key[1]


def _slice_bounds(index: slice, extent: int) -> Tuple[int, int]:
    if index.step not in (None, 1):
        raise UnsupportedError("strided slicing is not supported")
    begin = 0 if index.start is None else index.start
    end = extent if index.stop is None else index.stop
    return begin, end


def _as_operand(other: Any, like: Variable) -> Variable:
    """Wrap a plain number as a dimensionless scalar of like's element type."""
    if isinstance(other, Variable):
        return other
    if isinstance(other, bool) or not isinstance(other, (int, float, np.number)):
        raise DTypeError(f"cannot combine Variable with {type(other).__name__}")
    element = like.dtype.element
    if element.is_float or (element.is_int and float(other).is_integer()):
        return scalar(other, dtype=element)
    return scalar(float(other))


def make_variable(
    dims: DimsLike,
    unit: Union[Unit, str, None] = None,
    values: Any = None,
    variances: Any = None,
    dtype: Any = None,
) -> Variable:
    """
    Build a validated dense Variable.

    Args:
        dims: Dimension labels and extents
        unit: Physical unit (default dimensionless)
        values: Flat row-major buffer, or an array of the dims shape
        variances: Optional buffer laid out like values
        dtype: Element type (default inferred from values)

    Returns:
        Owned Variable

    Raises:
        ShapeError: If the buffer does not match dims
        DTypeError: If variances are given for a non-float type
        DimensionError: On duplicate dim labels
        UnitError: If string or bool data gets a unit other than dimensionless
    """
    layout = as_dims(dims)
    unit = as_unit(unit)
    if values is None:
        raise ShapeError("values are required")
    if dtype is not None:
        element = as_dtype(dtype)
        if element.is_event:
            raise DTypeError("use make_event_variable for event-list types")
        arr = np.array(values, dtype=element.numpy)
    else:
        arr = np.array(values)
        element = from_numpy(arr.dtype)
        if element is DType.STRING:
            arr = arr.astype(object)
        elif arr.dtype != element.numpy:
            arr = arr.astype(element.numpy)
    if element in (DType.STRING, DType.BOOL) and not unit.is_dimensionless:
        raise UnitError(f"{element.value} variables must be dimensionless")
    arr = _shape_buffer(arr, layout, "values")

    var_arr = None
    if variances is not None:
        if not element.supports_variances:
            raise DTypeError(f"variances not supported for {element.value}")
        var_arr = _shape_buffer(np.array(variances, dtype=element.numpy), layout, "variances")

    variable = Variable(layout, unit, element, arr, var_arr)
    problems = variable.validate()
    if problems:
        raise ValidationError(problems, "variable")
    return variable


def _shape_buffer(arr: np.ndarray, layout: Dims, what: str) -> np.ndarray:
    if arr.shape == layout.shape:
        return arr
    if arr.size == layout.volume and arr.ndim <= 1:
        return arr.reshape(layout.shape)
    raise ShapeError(f"{what} of shape {arr.shape} do not match dims {layout}")


def array(
    dims: Sequence[str],
    values: Any,
    unit: Union[Unit, str, None] = None,
    variances: Any = None,
    dtype: Any = None,
) -> Variable:
    """Build a Variable whose extents are taken from the values array shape."""
    shape = np.shape(values)
    if len(shape) != len(dims):
        raise ShapeError(f"{len(dims)} dims for values of shape {shape}")
    return make_variable(Dims(tuple(dims), shape), unit, values, variances, dtype)


def scalar(
    value: Any,
    unit: Union[Unit, str, None] = None,
    variance: Any = None,
    dtype: Any = None,
) -> Variable:
    """Build a 0-D Variable."""
    return make_variable(Dims(), unit, value, variance, dtype)


def view_of(v: Variable) -> VariableView:
    """Full-extent view of v."""
    if v.is_view:
        return v
    return VariableView(v, (), v.layout)


def _checked_axis(v: Variable, dim: str) -> int:
    if v.is_event and dim not in v.dims:
        raise DimensionError(
            f"cannot slice event variable along {dim!r}: only dense dims "
            f"{list(v.dims)} can be sliced"
        )
    return v.layout.index(dim)


def slice_point(v: Variable, dim: str, index: int) -> VariableView:
    """
    View of v at one index of dim; the dim is removed.

    Raises:
        DimensionError: If dim is not a dim of v
        IndexBoundsError: If index is out of range
    """
    axis = _checked_axis(v, dim)
    extent = v.shape[axis]
    if isinstance(index, bool) or not isinstance(index, (int, np.integer)):
        raise IndexBoundsError(f"point index must be an integer, got {index!r}")
    if not 0 <= index < extent:
        raise IndexBoundsError(f"index {index} out of range for {dim!r} with extent {extent}")
    return VariableView(v, (("point", axis, int(index)),), v.layout.without(dim))


def slice_range(v: Variable, dim: str, begin: int, end: int) -> VariableView:
    """
    View of v restricted to [begin, end) along dim; the dim is kept.

    Raises:
        DimensionError: If dim is not a dim of v
        IndexBoundsError: If the range is invalid
    """
    axis = _checked_axis(v, dim)
    extent = v.shape[axis]
    if not 0 <= begin <= end <= extent:
        raise IndexBoundsError(
            f"range [{begin}, {end}) invalid for {dim!r} with extent {extent}"
        )
    return VariableView(
        v,
        (("range", axis, int(begin), int(end)),),
        v.layout.with_extent(dim, end - begin),
    )


def transpose_to(v: Variable, order: Sequence[str]) -> VariableView:
    """
    View of v with permuted dimension order; no data moves.

    Raises:
        DimensionError: If order is not a permutation of v.dims
    """
    order = tuple(order)
    if sorted(order) != sorted(v.dims) or len(set(order)) != len(order):
        raise DimensionError(f"{list(order)} is not a permutation of {list(v.dims)}")
    perm = tuple(v.dims.index(label) for label in order)
    return VariableView(v, (("transpose", perm),), v.layout.permuted(order))


def copy(v: Variable) -> Variable:
    """Deep, contiguous, independent copy."""
    if v.is_event:
        return v.gather_lists(v.list_ids.ravel(), v.layout)
    variances = v.variances
    return Variable(
        v.layout,
        v.unit,
        v.dtype,
        np.array(v.values, copy=True, order="C"),
        None if variances is None else np.array(variances, copy=True, order="C"),
    )


def to_unit(v: Variable, target: Union[Unit, str]) -> Variable:
    """
    Convert v to a compatible unit.

    Values scale by the unit ratio, variances by its square. Integer data
    stays integer only when the ratio is integral.

    Raises:
        UnitError: If the units measure different dimensions
    """
    target = as_unit(target)
    factor = v.unit.factor_to(target)
    if not v.dtype.is_float and not v.dtype.is_int:
        raise DTypeError(f"cannot convert units of {v.dtype.value} data")
    if v.dtype.is_int and not float(factor).is_integer():
        raise DTypeError(
            f"converting integer data by non-integral factor {factor}; convert to float first"
        )
    result = copy(v)
    result._unit = target
    if v.is_event:
        storage = result._events
        storage.flat = (storage.flat * factor).astype(storage.flat.dtype)
        if result._event_variances is not None:
            vs = result._event_variances
            vs.flat = (vs.flat * factor * factor).astype(vs.flat.dtype)
        return result
    dtype = v.dtype.numpy
    if v.dtype.is_int:
        result._values = result._values * np.asarray(int(factor), dtype=dtype)
    else:
        result._values = (result._values * factor).astype(dtype)
        if result._variances is not None:
            result._variances = (result._variances * (factor * factor)).astype(dtype)
    return result


def take(v: Variable, dim: str, indices: Sequence[int]) -> Variable:
    """
    Gather elements along dim into a new Variable.

    Raises:
        DimensionError: If dim is not a dim of v
        IndexBoundsError: If an index is out of range
    """
    axis = v.layout.index(dim)
    idx = np.asarray(indices, dtype=np.int64).ravel()
    extent = v.shape[axis]
    if idx.size and (idx.min() < 0 or idx.max() >= extent):
        raise IndexBoundsError(f"take index out of range for {dim!r} with extent {extent}")
    layout = v.layout.with_extent(dim, idx.size)
    if v.is_event:
        ids = np.take(v.list_ids, idx, axis=axis)
        return v.gather_lists(ids.ravel(), layout)
    variances = v.variances
    return Variable(
        layout,
        v.unit,
        v.dtype,
        np.take(v.values, idx, axis=axis),
        None if variances is None else np.take(variances, idx, axis=axis),
    )


def _bitwise_equal(a: np.ndarray, b: np.ndarray) -> bool:
    if a.shape != b.shape or a.dtype != b.dtype:
        return False
    if a.dtype == object:
        return all(x == y for x, y in zip(a.ravel().tolist(), b.ravel().tolist()))
    return np.ascontiguousarray(a).tobytes() == np.ascontiguousarray(b).tobytes()


def identical(a: Variable, b: Variable) -> bool:
    """
    Deep bitwise equality of dims, dtype, unit (including scale), values,
    and variances.
    """
    if a.layout != b.layout or a.dtype != b.dtype or a.unit != b.unit:
        return False
    if a.has_variances != b.has_variances:
        return False
    if a.is_event:
        if not np.array_equal(a.lengths(), b.lengths()):
            return False
        sa, sb = a.event_storage, b.event_storage
        if not _bitwise_equal(sa.flat[sa.positions(a.list_ids)], sb.flat[sb.positions(b.list_ids)]):
            return False
        if a.has_variances:
            va, vb = a.event_variance_storage, b.event_variance_storage
            return _bitwise_equal(va.flat[sa.positions(a.list_ids)], vb.flat[sb.positions(b.list_ids)])
        return True
    if not _bitwise_equal(a.values, b.values):
        return False
    if a.has_variances:
        return _bitwise_equal(a.variances, b.variances)
    return True
