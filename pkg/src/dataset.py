"""
Dataset Module - DataArray and Dataset Containers

A DataArray is one data Variable with coordinate and attribute dictionaries.
A Dataset is a name-keyed collection of data items sharing one set of
coordinates, with every dimension extent aligned across the set.

Coordinate rules:
    - coord dims are a subset of the data dims
    - along each dim a coord matches the data extent, or exceeds it by one
      along the coord's last dim (bin edges)
    - event-list data needs at least one event coord with matching list lengths

Binary operations compare coordinates bitwise and raise CoordError on any
mismatch. Attributes survive when present in one operand only or equal in
both, and are dropped otherwise.

Example:
    from src.dataset import DataArray, Dataset, da_binary
    from src.variable import array

    x = array(["x"], [0.0, 1.0, 2.0], unit="m")
    a = DataArray(array(["x"], [1.0, 2.0, 3.0], unit="counts"), coords={"x": x})
    b = DataArray(array(["x"], [0.5, 0.5, 0.5], unit="counts"), coords={"x": x})
    diff = da_binary(a, b, "subtract")

    ds = Dataset({"sample": a, "background": b})
    ratio = ds["sample"] / ds["background"]
"""

import logging
from collections.abc import MutableMapping
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Tuple, Union

import numpy as np

from . import ops
from .errors import (
    AlignmentError,
    CoordError,
    DimensionError,
    ItemNotFoundError,
    UnsupportedError,
    ViewError,
)
from .units import Unit
from .variable import (
    Dims,
    Variable,
    copy,
    identical as variable_identical,
    slice_point,
    slice_range,
    transpose_to,
    view_of,
)

logger = logging.getLogger(__name__)

BINARY_OPS: Dict[str, Callable[[Variable, Variable], Variable]] = {
    "add": ops.add,
    "subtract": ops.subtract,
    "multiply": ops.multiply,
    "divide": ops.divide,
}

OpLike = Union[str, Callable[[Variable, Variable], Variable]]


def _resolve_op(op: OpLike) -> Callable[[Variable, Variable], Variable]:
    if callable(op):
        return op
    try:
        return BINARY_OPS[op]
    except KeyError:
        raise UnsupportedError(
            f"unknown binary operation {op!r}; expected one of {sorted(BINARY_OPS)}"
        ) from None


def coord_problems(data: Dims, name: str, coord: Variable, role: str = "coord") -> List[str]:
    """
    Check one coord or attr against the data layout.

    Coords must use only data dims; attrs may also carry dims the data lacks.
    Along shared dims the extent must match, or exceed by one along the
    variable's last dim.
    """
    problems = []
    for label, extent in coord.layout.pairs():
        if label not in data:
            if role == "coord":
                problems.append(f"{role} {name!r} has dim {label!r} not in data dims {list(data.labels)}")
            continue
        expected = data.extent(label)
        if extent == expected:
            continue
        if extent == expected + 1 and label == coord.dims[-1] and not coord.is_event:
            continue
        problems.append(
            f"{role} {name!r} has extent {extent} along {label!r}, data has {expected}"
        )
    return problems


def _event_coord_problems(data: Variable, name: str, coord: Variable) -> List[str]:
    if not data.is_event:
        return [f"event coord {name!r} on dense data"]
    if sorted(coord.dims) != sorted(data.dims):
        return [f"event coord {name!r} dims {list(coord.dims)} differ from data {list(data.dims)}"]
    lengths = transpose_to(coord, data.dims).lengths()
    if not np.array_equal(lengths, data.lengths()):
        return [f"event coord {name!r} list lengths do not match the data"]
    return []


class Coords(MutableMapping):
    """
    Name to Variable mapping that validates insertions against its owner.

    Read-only when the owner is a view.
    """

    def __init__(
        self,
        check: Optional[Callable[[str, Variable], None]],
        items: Optional[Mapping[str, Variable]] = None,
        readonly: bool = False,
    ):
        self._check = check
        self._items: Dict[str, Variable] = dict(items or {})
        self._readonly = readonly

    def __getitem__(self, name: str) -> Variable:
        try:
            return self._items[name]
        except KeyError:
            raise ItemNotFoundError(f"no entry named {name!r}") from None

    def __setitem__(self, name: str, value: Variable) -> None:
        if self._readonly:
            raise ViewError(f"cannot set {name!r} through a view")
        if self._check is not None:
            self._check(name, value)
        self._items[name] = value

    def __delitem__(self, name: str) -> None:
        if self._readonly:
            raise ViewError(f"cannot remove {name!r} through a view")
        if name not in self._items:
            raise ItemNotFoundError(f"no entry named {name!r}")
        del self._items[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __repr__(self) -> str:
        return f"Coords({list(self._items)})"


class DataArray:
    """
    Data Variable with coords and attrs.

    Attributes:
        data: The data Variable (a view when the DataArray is a view)
        coords: Coordinate Variables keyed by name
        attrs: Attribute Variables keyed by name
        name: Optional display name
    """

    def __init__(
        self,
        data: Variable,
        coords: Optional[Mapping[str, Variable]] = None,
        attrs: Optional[Mapping[str, Variable]] = None,
        name: str = "",
        view: bool = False,
    ):
        self._data = data
        self.name = name
        self._is_view = view
        self._coords = Coords(self._check_coord, readonly=view)
        self._attrs = Coords(self._check_attr, readonly=view)
        for key, value in (coords or {}).items():
            self._check_coord(key, value)
            self._coords._items[key] = value
        for key, value in (attrs or {}).items():
            self._check_attr(key, value)
            self._attrs._items[key] = value
        if data.is_event and not any(c.is_event for c in self._coords.values()):
            raise CoordError("event data requires an event coordinate")

    def _check_coord(self, name: str, coord: Variable) -> None:
        if coord.is_event:
            problems = _event_coord_problems(self._data, name, coord)
        else:
            problems = coord_problems(self._data.layout, name, coord)
        if problems:
            raise CoordError("; ".join(problems))

    def _check_attr(self, name: str, attr: Variable) -> None:
        problems = coord_problems(self._data.layout, name, attr, role="attr")
        if problems:
            raise CoordError("; ".join(problems))

    @property
    def data(self) -> Variable:
        return self._data

    @property
    def coords(self) -> Coords:
        return self._coords

    @property
    def attrs(self) -> Coords:
        return self._attrs

    @property
    def is_view(self) -> bool:
        return self._is_view

    @property
    def dims(self) -> Tuple[str, ...]:
        return self._data.dims

    @property
    def shape(self) -> Tuple[int, ...]:
        return self._data.shape

    @property
    def sizes(self) -> Dict[str, int]:
        return self._data.sizes

    @property
    def unit(self) -> Unit:
        return self._data.unit

    @property
    def values(self) -> np.ndarray:
        return self._data.values

    @property
    def variances(self) -> Optional[np.ndarray]:
        return self._data.variances

    @property
    def is_event(self) -> bool:
        return self._data.is_event

    def event_coords(self) -> Dict[str, Variable]:
        return {k: v for k, v in self._coords.items() if v.is_event}

    def validate(self) -> List[str]:
        """Re-check data and coord invariants from scratch."""
        problems = list(self._data.validate())
        for name, coord in self._coords.items():
            problems.extend(coord.validate())
            if coord.is_event:
                problems.extend(_event_coord_problems(self._data, name, coord))
            else:
                problems.extend(coord_problems(self._data.layout, name, coord))
        for name, attr in self._attrs.items():
            problems.extend(attr.validate())
            problems.extend(coord_problems(self._data.layout, name, attr, role="attr"))
        if self._data.is_event and not self.event_coords():
            problems.append("event data requires an event coordinate")
        return problems

    def copy(self) -> "DataArray":
        return DataArray(
            copy(self._data),
            {k: copy(v) for k, v in self._coords.items()},
            {k: copy(v) for k, v in self._attrs.items()},
            self.name,
        )

    def __getitem__(self, key):
        if not (isinstance(key, tuple) and len(key) == 2 and isinstance(key[0], str)):
            raise DimensionError(f"slice key must be (dim, index-or-slice), got {key!r}")
        dim, index = key
        if isinstance(index, slice):
            if index.step not in (None, 1):
                raise UnsupportedError("strided slicing is not supported")
            begin = 0 if index.start is None else index.start
            end = self.sizes.get(dim, 0) if index.stop is None else index.stop
            return da_slice_range(self, dim, begin, end)
        return da_slice_point(self, dim, index)

    def __add__(self, other):
        return da_binary(self, _as_data_array(other), "add")

    def __sub__(self, other):
        return da_binary(self, _as_data_array(other), "subtract")

    def __mul__(self, other):
        return da_binary(self, _as_data_array(other), "multiply")

    def __truediv__(self, other):
        return da_binary(self, _as_data_array(other), "divide")

    def __repr__(self) -> str:
        kind = "DataArray view" if self._is_view else "DataArray"
        return (
            f"<{kind} {self.name!r} data={self._data!r} "
            f"coords={list(self._coords)} attrs={list(self._attrs)}>"
        )


def _as_data_array(other) -> DataArray:
    if isinstance(other, DataArray):
        return other
    if isinstance(other, Variable):
        return DataArray(other)
    raise UnsupportedError(f"cannot combine DataArray with {type(other).__name__}")


def is_edges(da: DataArray, coord_name: str, dim: str) -> bool:
    """
    True if coord_name holds bin edges along dim.

    Raises:
        ItemNotFoundError: If the coord does not exist
        DimensionError: If dim is not a dim of the coord and data
    """
    if coord_name in da.coords:
        coord = da.coords[coord_name]
    elif coord_name in da.attrs:
        coord = da.attrs[coord_name]
    else:
        raise ItemNotFoundError(f"no coord named {coord_name!r}")
    extent = coord.layout.extent(dim)
    return extent == da.data.layout.extent(dim) + 1


def _merge_attrs(a: Mapping[str, Variable], b: Mapping[str, Variable]) -> Dict[str, Variable]:
    """Keep attrs unique to one side or identical in both."""
    merged = {}
    for name, attr in a.items():
        if name not in b:
            merged[name] = attr
        elif variable_identical(attr, b[name]):
            merged[name] = attr
        else:
            logger.debug(f"dropping attr {name!r}: operands differ")
    for name, attr in b.items():
        if name not in a:
            merged[name] = attr
    return merged


def _merge_coords(
    a: Mapping[str, Variable],
    a_dims: Dims,
    b: Mapping[str, Variable],
    b_dims: Dims,
) -> Dict[str, Variable]:
    """
    Union of two coord maps.

    Raises:
        CoordError: If a shared coord differs, or a one-sided coord spans a
            dim of the other operand
    """
    merged = {}
    for name, coord in a.items():
        if name in b:
            if not variable_identical(coord, b[name]):
                raise CoordError(f"coordinate {name!r} does not match between operands")
        elif any(label in b_dims for label in coord.dims):
            raise CoordError(f"coordinate {name!r} missing from one operand")
        merged[name] = coord
    for name, coord in b.items():
        if name in a:
            continue
        if any(label in a_dims for label in coord.dims):
            raise CoordError(f"coordinate {name!r} missing from one operand")
        merged[name] = coord
    return merged


def da_binary(a: DataArray, b: DataArray, op: OpLike) -> DataArray:
    """
    Combine two DataArrays element-wise.

    Args:
        a: Left operand
        b: Right operand
        op: "add", "subtract", "multiply", "divide" or a Variable function

    Returns:
        New DataArray with the union of coords

    Raises:
        CoordError: If coords do not match
    """
    fn = _resolve_op(op)
    coords = _merge_coords(a.coords, a.data.layout, b.coords, b.data.layout)
    attrs = _merge_attrs(a.attrs, b.attrs)
    data = fn(a.data, b.data)
    return DataArray(
        data,
        {k: copy(v) for k, v in coords.items()},
        {k: copy(v) for k, v in attrs.items()},
        name=a.name,
    )


def _point_sliced(var: Variable, dim: str, index: int, edges: bool) -> Variable:
    if edges:
        return slice_range(var, dim, index, index + 2)
    return slice_point(var, dim, index)


def da_slice_point(da: DataArray, dim: str, index: int) -> DataArray:
    """
    View of da at one index of dim.

    Coords that contain dim move to attrs; bin-edge coords keep the two
    edges enclosing the selected bin. Event coords stay coords.

    Raises:
        DimensionError: If dim is not a data dim
        IndexBoundsError: If index is out of range
    """
    data = slice_point(da.data, dim, index)
    coords = {}
    attrs = {}
    for name, coord in da.coords.items():
        if dim not in coord.dims:
            coords[name] = view_of(coord)
        elif coord.is_event:
            coords[name] = slice_point(coord, dim, index)
        else:
            attrs[name] = _point_sliced(coord, dim, index, is_edges(da, name, dim))
    for name, attr in da.attrs.items():
        if dim not in attr.dims:
            attrs[name] = view_of(attr)
        else:
            attrs[name] = _point_sliced(attr, dim, index, is_edges(da, name, dim))
    return DataArray(data, coords, attrs, name=da.name, view=True)


def _range_sliced(da: DataArray, name: str, var: Variable, dim: str, begin: int, end: int) -> Variable:
    if dim not in var.dims:
        return view_of(var)
    if not var.is_event and is_edges(da, name, dim):
        return slice_range(var, dim, begin, end + 1)
    return slice_range(var, dim, begin, end)


def da_slice_range(da: DataArray, dim: str, begin: int, end: int) -> DataArray:
    """
    View of da restricted to [begin, end) along dim.

    Bin-edge coords are sliced over [begin, end + 1) so they still bound
    every remaining bin.
    """
    data = slice_range(da.data, dim, begin, end)
    coords = {name: _range_sliced(da, name, c, dim, begin, end) for name, c in da.coords.items()}
    attrs = {name: _range_sliced(da, name, a, dim, begin, end) for name, a in da.attrs.items()}
    return DataArray(data, coords, attrs, name=da.name, view=True)


def _reduce(da: DataArray, dim: str, fn: Callable[[Variable, str], Variable]) -> DataArray:
    data = fn(da.data, dim)
    coords = {k: copy(v) for k, v in da.coords.items() if dim not in v.dims}
    attrs = {k: copy(v) for k, v in da.attrs.items() if dim not in v.dims}
    return DataArray(data, coords, attrs, name=da.name)


def da_sum(da: DataArray, dim: str) -> DataArray:
    """Sum over dim; coords and attrs that depend on dim are dropped."""
    return _reduce(da, dim, ops.sum)


def da_mean(da: DataArray, dim: str) -> DataArray:
    """Mean over dim; coords and attrs that depend on dim are dropped."""
    return _reduce(da, dim, ops.mean)


@dataclass
class DatasetItem:
    data: Variable
    attrs: Dict[str, Variable] = field(default_factory=dict)


class Dataset:
    """
    Name-keyed data items with shared, aligned coords.

    Attributes:
        coords: Shared coordinates
        attrs: Dataset-level attributes
    """

    def __init__(
        self,
        items: Optional[Mapping[str, DataArray]] = None,
        coords: Optional[Mapping[str, Variable]] = None,
        attrs: Optional[Mapping[str, Variable]] = None,
    ):
        self._items: Dict[str, DatasetItem] = {}
        self._coords = Coords(self._check_coord)
        self._attrs = Coords(None, attrs)
        for name, coord in (coords or {}).items():
            self._coords[name] = coord
        for name, da in (items or {}).items():
            ds_set(self, name, da)

    def _check_coord(self, name: str, coord: Variable) -> None:
        if coord.is_event:
            raise UnsupportedError("dataset coords cannot hold event lists")
        extents = self.sizes
        problems = []
        for label, extent in coord.layout.pairs():
            if label not in extents:
                continue
            expected = extents[label]
            if extent != expected and not (extent == expected + 1 and label == coord.dims[-1]):
                problems.append(
                    f"coord {name!r} has extent {extent} along {label!r}, dataset has {expected}"
                )
        if problems:
            raise AlignmentError("; ".join(problems))

    @property
    def coords(self) -> Coords:
        return self._coords

    @property
    def attrs(self) -> Coords:
        return self._attrs

    @property
    def sizes(self) -> Dict[str, int]:
        """Extent of every dim used by any item."""
        sizes: Dict[str, int] = {}
        for item in self._items.values():
            sizes.update(item.data.sizes)
        return sizes

    def keys(self) -> List[str]:
        return list(self._items)

    def item(self, name: str) -> DatasetItem:
        try:
            return self._items[name]
        except KeyError:
            raise ItemNotFoundError(f"no item named {name!r}") from None

    def validate(self) -> List[str]:
        """
        Re-derive alignment from scratch.

        Returns:
            List of problems (empty if valid)
        """
        problems = []
        extents: Dict[str, Tuple[int, str]] = {}
        for name, item in self._items.items():
            problems.extend(item.data.validate())
            for label, extent in item.data.layout.pairs():
                if label in extents and extents[label][0] != extent:
                    problems.append(
                        f"item {name!r} has extent {extent} along {label!r}, "
                        f"item {extents[label][1]!r} has {extents[label][0]}"
                    )
                extents.setdefault(label, (extent, name))
            for attr_name, attr in item.attrs.items():
                problems.extend(coord_problems(item.data.layout, attr_name, attr, role="attr"))
        for name, coord in self._coords.items():
            problems.extend(coord.validate())
            for label, extent in coord.layout.pairs():
                if label not in extents:
                    continue
                expected = extents[label][0]
                if extent != expected and not (extent == expected + 1 and label == coord.dims[-1]):
                    problems.append(
                        f"coord {name!r} has extent {extent} along {label!r}, dataset has {expected}"
                    )
        return problems

    def copy(self) -> "Dataset":
        result = Dataset(
            coords={k: copy(v) for k, v in self._coords.items()},
            attrs={k: copy(v) for k, v in self._attrs.items()},
        )
        for name, item in self._items.items():
            result._items[name] = DatasetItem(
                copy(item.data), {k: copy(v) for k, v in item.attrs.items()}
            )
        return result

    def __getitem__(self, name: str) -> DataArray:
        return ds_get(self, name)

    def __setitem__(self, name: str, da: DataArray) -> None:
        ds_set(self, name, da)

    def __delitem__(self, name: str) -> None:
        self.item(name)
        del self._items[name]

    def __contains__(self, name: object) -> bool:
        return name in self._items

    def __iter__(self) -> Iterator[str]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __add__(self, other: "Dataset") -> "Dataset":
        return ds_binary(self, other, "add")

    def __sub__(self, other: "Dataset") -> "Dataset":
        return ds_binary(self, other, "subtract")

    def __mul__(self, other: "Dataset") -> "Dataset":
        return ds_binary(self, other, "multiply")

    def __truediv__(self, other: "Dataset") -> "Dataset":
        return ds_binary(self, other, "divide")

    def __repr__(self) -> str:
        return f"<Dataset items={self.keys()} coords={list(self._coords)} sizes={self.sizes}>"


def ds_get(ds: Dataset, name: str) -> DataArray:
    """
    View of one item as a DataArray.

    The view carries the shared coords whose dims are all item dims, plus the
    item's attrs. Values are writable; unit, dims and coord maps are not.

    Raises:
        ItemNotFoundError: If name is not an item
    """
    item = ds.item(name)
    dims = item.data.layout
    coords = {
        key: view_of(coord)
        for key, coord in ds.coords.items()
        if all(label in dims for label in coord.dims)
    }
    attrs = {key: view_of(attr) for key, attr in item.attrs.items()}
    return DataArray(view_of(item.data), coords, attrs, name=name, view=True)


def ds_set(ds: Dataset, name: str, da: DataArray) -> None:
    """
    Insert or replace an item; its coords merge into the shared coords.

    The dataset is unchanged if any check fails.

    Raises:
        AlignmentError: If a dim extent disagrees with the dataset
        CoordError: If a coord conflicts with an existing shared coord
        UnsupportedError: For event-list data
    """
    if da.is_event:
        raise UnsupportedError("dataset items must hold dense data; histogram event data first")
    others = {k: v for k, v in ds._items.items() if k != name}
    extents: Dict[str, int] = {}
    for item in others.values():
        extents.update(item.data.sizes)
    for label, extent in da.data.layout.pairs():
        if label in extents and extents[label] != extent:
            raise AlignmentError(
                f"item {name!r} has extent {extent} along {label!r}, dataset has {extents[label]}"
            )
    extents.update(da.data.sizes)
    new_coords = {}
    for key, coord in da.coords.items():
        if key in ds.coords:
            if not variable_identical(ds.coords[key], coord):
                raise CoordError(f"coordinate {key!r} conflicts with the dataset's")
            continue
        new_coords[key] = coord
    for key, coord in ds.coords.items():
        for label, extent in coord.layout.pairs():
            if label in da.data.sizes:
                expected = da.data.sizes[label]
                if extent != expected and not (extent == expected + 1 and label == coord.dims[-1]):
                    raise AlignmentError(
                        f"item {name!r} extent {expected} along {label!r} does not fit coord {key!r}"
                    )

    ds._items[name] = DatasetItem(copy(da.data), {k: copy(v) for k, v in da.attrs.items()})
    for key, coord in new_coords.items():
        ds._coords._items[key] = copy(coord)
    logger.debug(f"dataset item {name!r} set with dims {da.data.layout}")


def ds_binary(a: Dataset, b: Dataset, op: OpLike) -> Dataset:
    """
    Apply op to items present in both datasets, matched by name.

    Items present in only one operand are omitted.

    Raises:
        CoordError: If shared coords differ
    """
    fn = _resolve_op(op)
    a_dims = Dims.from_pairs(a.sizes.items())
    b_dims = Dims.from_pairs(b.sizes.items())
    coords = _merge_coords(a.coords, a_dims, b.coords, b_dims)
    result = Dataset(coords=coords, attrs=_merge_attrs(a.attrs, b.attrs))
    for name in a:
        if name not in b:
            continue
        left, right = a.item(name), b.item(name)
        data = fn(left.data, right.data)
        result[name] = DataArray(data, attrs=_merge_attrs(left.attrs, right.attrs))
    return result


def _ds_reduce(ds: Dataset, dim: str, fn: Callable[[Variable, str], Variable]) -> Dataset:
    for name in ds:
        if dim not in ds.item(name).data.dims:
            raise DimensionError(f"item {name!r} has no dim {dim!r}")
    result = Dataset(
        coords={k: v for k, v in ds.coords.items() if dim not in v.dims},
        attrs={k: v for k, v in ds.attrs.items() if dim not in v.dims},
    )
    for name in ds:
        item = ds.item(name)
        attrs = {k: v for k, v in item.attrs.items() if dim not in v.dims}
        result[name] = DataArray(fn(item.data, dim), attrs=attrs)
    return result


def ds_sum(ds: Dataset, dim: str) -> Dataset:
    """Sum every item over dim."""
    return _ds_reduce(ds, dim, ops.sum)


def ds_mean(ds: Dataset, dim: str) -> Dataset:
    """Mean of every item over dim."""
    return _ds_reduce(ds, dim, ops.mean)


def _maps_identical(a: Mapping[str, Variable], b: Mapping[str, Variable]) -> bool:
    if set(a) != set(b):
        return False
    return all(variable_identical(a[k], b[k]) for k in a)


def identical(a, b) -> bool:
    """Deep bitwise equality of Variables, DataArrays or Datasets."""
    if isinstance(a, Variable) and isinstance(b, Variable):
        return variable_identical(a, b)
    if isinstance(a, DataArray) and isinstance(b, DataArray):
        return (
            variable_identical(a.data, b.data)
            and _maps_identical(a.coords, b.coords)
            and _maps_identical(a.attrs, b.attrs)
        )
    if isinstance(a, Dataset) and isinstance(b, Dataset):
        if a.keys() != b.keys():
            return False
        if not (_maps_identical(a.coords, b.coords) and _maps_identical(a.attrs, b.attrs)):
            return False
        for name in a:
            left, right = a.item(name), b.item(name)
            if not (variable_identical(left.data, right.data) and _maps_identical(left.attrs, right.attrs)):
                return False
        return True
    return False
