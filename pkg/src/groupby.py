"""
GroupBy Module - Split-Apply-Combine

Groups the slices of a DataArray along one dim by the values of a 1-D
coordinate, then combines every group with a reduction (sum, mean) or, for
event data, by concatenating the member event lists.

Without bins there is one group per distinct coord value, ordered by first
occurrence. With bins there is one group per bin using the half-open rule;
slices whose coord falls outside the edges belong to no group.

Example:
    from src.groupby import groupby, gb_sum, gb_flatten

    by_theta = groupby(events, "theta", bins=theta_edges)
    flat = gb_flatten(by_theta)      # (theta: n) event lists
    totals = gb_sum(groupby(hist, "theta", bins=theta_edges))
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .dataset import DataArray
from .errors import CoordError, DimensionError, DTypeError, EdgesError, UnitError, UnsupportedError
from .units import format_unit
from .variable import Dims, Variable, copy, transpose_to

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GroupBy:
    """
    Grouping of one DataArray.

    Attributes:
        source: DataArray being grouped
        group_dim: Output dim, named after the grouping coord
        source_dim: Dim of source that is grouped over
        groups: Ascending member indices along source_dim, one array per group
        group_coord: Unique values, or bin edges when binned
    """

    source: DataArray
    group_dim: str
    source_dim: str
    groups: Tuple[np.ndarray, ...]
    group_coord: Variable

    @property
    def binned(self) -> bool:
        return self.group_coord.shape[0] == len(self.groups) + 1

    def __len__(self) -> int:
        return len(self.groups)


def _unique_groups(coord: Variable, group_dim: str) -> Tuple[Tuple[np.ndarray, ...], Variable]:
    values = np.asarray(coord.values)
    if values.size == 0:
        unique = values[:0]
        return (), Variable(Dims((group_dim,), (0,)), coord.unit, coord.dtype, unique.copy())
    unique, first, inverse = np.unique(values, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    group_of = rank[inverse.ravel()]
    groups = tuple(np.flatnonzero(group_of == k) for k in range(order.size))
    labels = np.ascontiguousarray(unique[order], dtype=coord.dtype.numpy)
    return groups, Variable(Dims((group_dim,), (labels.size,)), coord.unit, coord.dtype, labels)


def _binned_groups(coord: Variable, bins: Variable, group_dim: str) -> Tuple[np.ndarray, ...]:
    if bins.dims != (group_dim,):
        raise DimensionError(f"bins must be 1-D over {group_dim!r}, got {bins.layout}")
    if bins.unit != coord.unit:
        raise UnitError(
            f"bins unit {format_unit(bins.unit)} differs from coord unit {format_unit(coord.unit)}"
        )
    if not (bins.dtype.is_float or bins.dtype.is_int) or not (coord.dtype.is_float or coord.dtype.is_int):
        raise DTypeError("binned grouping requires numeric coord and bins")
    edges = np.asarray(bins.values, dtype=np.float64)
    if edges.size < 2 or np.any(~(np.diff(edges) > 0)):
        raise EdgesError(f"bins along {group_dim!r} must be strictly increasing")
    index = np.searchsorted(edges, np.asarray(coord.values, dtype=np.float64), side="right") - 1
    return tuple(np.flatnonzero(index == k) for k in range(edges.size - 1))


def groupby(da: DataArray, coord_name: str, bins: Optional[Variable] = None) -> GroupBy:
    """
    Group da by a 1-D coord.

    Args:
        da: DataArray to group
        coord_name: Name of the grouping coord; also the output dim name
        bins: Optional strictly increasing edges over (coord_name,)

    Raises:
        CoordError: If the coord does not exist
        UnsupportedError: If the coord is not 1-D over a dense dim
        EdgesError: If bins are not strictly increasing
    """
    if coord_name not in da.coords:
        raise CoordError(f"no coordinate named {coord_name!r}")
    coord = da.coords[coord_name]
    if coord.is_event or coord.ndim != 1:
        raise UnsupportedError(f"grouping coord {coord_name!r} must be 1-D over a dense dim")
    source_dim = coord.dims[0]
    if coord.shape[0] != da.sizes[source_dim]:
        raise UnsupportedError(f"cannot group by bin-edge coord {coord_name!r}")

    if bins is None:
        groups, group_coord = _unique_groups(coord, coord_name)
    else:
        groups = _binned_groups(coord, bins, coord_name)
        group_coord = copy(bins)
    logger.debug(
        f"groupby {coord_name!r} over {source_dim!r}: {len(groups)} groups, "
        f"{sum(g.size for g in groups)} of {coord.shape[0]} slices grouped"
    )
    return GroupBy(da, coord_name, source_dim, tuple(groups), group_coord)


def _combined(g: GroupBy, data: Variable, extra: Optional[dict] = None) -> DataArray:
    coords = {
        k: copy(v) for k, v in g.source.coords.items()
        if g.source_dim not in v.dims and k != g.group_dim
    }
    coords[g.group_dim] = copy(g.group_coord)
    coords.update(extra or {})
    attrs = {k: copy(v) for k, v in g.source.attrs.items() if g.source_dim not in v.dims}
    return DataArray(data, coords, attrs, name=g.source.name)


def _reduce_groups(g: GroupBy, mean: bool) -> DataArray:
    data = g.source.data
    if data.is_event:
        raise DTypeError("grouped reductions need dense data; use gb_flatten for events")
    if not (data.dtype.is_float or data.dtype.is_int):
        raise DTypeError(f"grouped reductions need numeric data, got {data.dtype.value}")
    if mean and not data.dtype.is_float:
        raise DTypeError(f"mean requires floating-point data, got {data.dtype.value}")

    axis = data.layout.index(g.source_dim)
    dtype = data.dtype.numpy
    layout = data.layout.replaced(g.source_dim, g.group_dim, len(g.groups))

    def combine(arr: np.ndarray, power: int) -> np.ndarray:
        moved = np.moveaxis(arr, axis, -1)
        out = np.empty(moved.shape[:-1] + (len(g.groups),), dtype=dtype)
        with np.errstate(divide="ignore", invalid="ignore"):
            for k, members in enumerate(g.groups):
                total = np.sum(moved[..., members], axis=-1, dtype=dtype)
                if mean:
                    total = total / dtype.type(members.size ** power) if members.size else np.nan
                out[..., k] = total
        return np.ascontiguousarray(np.moveaxis(out, -1, axis))

    values = combine(data.values, 1)
    variances = combine(data.variances, 2) if data.has_variances else None
    return _combined(g, Variable(layout, data.unit, data.dtype, values, variances))


def gb_sum(g: GroupBy) -> DataArray:
    """Sum every group; the grouped dim is replaced by the group dim."""
    return _reduce_groups(g, mean=False)


def gb_mean(g: GroupBy) -> DataArray:
    """Mean of every group; empty groups give NaN with NaN variance."""
    return _reduce_groups(g, mean=True)


def _flatten_groups(g: GroupBy, v: Variable) -> Variable:
    rest = v.layout.without(g.source_dim)
    ids = transpose_to(v, rest.labels + (g.source_dim,)).list_ids
    ids = ids.reshape(rest.volume, v.layout.extent(g.source_dim))
    members = np.concatenate([m for m in g.groups] or [np.zeros(0, dtype=np.int64)])
    sizes = np.array([m.size for m in g.groups], dtype=np.int64)
    gathered = ids[:, members]
    layout = Dims(rest.labels + (g.group_dim,), rest.shape + (len(g.groups),))
    flat = v.gather_lists(gathered.ravel(), layout, group_sizes=np.tile(sizes, rest.volume))
    order = v.layout.replaced(g.source_dim, g.group_dim, len(g.groups)).labels
    return copy(transpose_to(flat, order))


def gb_flatten(g: GroupBy) -> DataArray:
    """
    Concatenate the event lists of every group's members, in ascending member order.

    Raises:
        DTypeError: If the source holds dense data
    """
    source = g.source
    if not source.is_event:
        raise DTypeError("gb_flatten requires event data; use gb_sum for dense data")
    data = _flatten_groups(g, source.data)
    events = {
        name: _flatten_groups(g, coord)
        for name, coord in source.coords.items()
        if coord.is_event
    }
    return _combined(g, data, events)
