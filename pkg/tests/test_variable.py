"""Tests for Variable construction, views, slicing and conversion."""

import itertools

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from src.dtypes import DType
from src.errors import (
    DimensionError,
    DTypeError,
    IndexBoundsError,
    ShapeError,
    UnitError,
    ValidationError,
    ViewError,
)
from src.units import angstrom, m, s
from src.variable import (
    MAX_RANK,
    Dims,
    array,
    copy,
    identical,
    make_variable,
    scalar,
    slice_point,
    slice_range,
    take,
    to_unit,
    transpose_to,
)


class TestDims:

    def test_volume(self):
        assert Dims(("x", "y"), (3, 2)).volume == 6
        assert Dims().volume == 1

    def test_duplicate_labels(self):
        with pytest.raises(DimensionError):
            Dims(("x", "x"), (1, 2))

    def test_rank_limit(self):
        labels = tuple(f"d{i}" for i in range(MAX_RANK + 1))
        with pytest.raises(DimensionError):
            Dims(labels, (1,) * len(labels))

    def test_label_count_must_match_shape(self):
        with pytest.raises(ShapeError):
            Dims(("x",), (1, 2))

    def test_str(self):
        assert str(Dims(("x", "y"), (3, 2))) == "(x: 3, y: 2)"


class TestMakeVariable:

    def test_valid_1d(self):
        v = make_variable([("x", 3)], "m", [1.0, 2.0, 3.0])
        assert v.dims == ("x",)
        assert v.shape == (3,)
        assert v.unit == m
        assert v.dtype is DType.FLOAT64
        assert not v.has_variances

    def test_wrong_length(self):
        with pytest.raises(ShapeError):
            make_variable([("x", 3)], "m", [1.0, 2.0, 3.0, 4.0])

    def test_int_with_variances(self):
        with pytest.raises(DTypeError):
            make_variable([("x", 2)], "m", np.array([1, 2], dtype=np.int64), variances=[1, 1])

    def test_flat_buffer_is_reshaped_row_major(self):
        v = make_variable({"x": 2, "y": 3}, None, np.arange(6.0))
        assert_array_equal(v.values, [[0.0, 1.0, 2.0], [3.0, 4.0, 5.0]])

    def test_negative_variance_rejected(self):
        with pytest.raises(ValidationError):
            array(["x"], [1.0, 2.0], variances=[0.1, -0.1])

    def test_nan_variance_allowed(self):
        v = array(["x"], [1.0], variances=[np.nan])
        assert np.isnan(v.variances[0])

    def test_string_needs_dimensionless(self):
        with pytest.raises(UnitError):
            array(["x"], ["a", "b"], unit="m")

    def test_bool_needs_dimensionless(self):
        with pytest.raises(UnitError):
            array(["x"], [True, False], unit="s")
        flags = array(["x"], [True, False])
        with pytest.raises(UnitError):
            flags.unit = "m"

    def test_strings(self):
        v = array(["x"], ["a", "b"])
        assert v.dtype is DType.STRING
        assert list(v.values) == ["a", "b"]

    def test_scalar(self):
        v = scalar(2.0, unit="s", variance=0.5)
        assert v.ndim == 0
        assert v.value == 2.0
        assert v.variance == 0.5

    def test_value_requires_0d(self):
        with pytest.raises(ShapeError):
            array(["x"], [1.0, 2.0]).value


class TestSlicing:

    def test_point(self):
        v = array(["x", "y"], [[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
        row = slice_point(v, "x", 1)
        assert row.dims == ("y",)
        assert_array_equal(row.values, [3.0, 4.0])

    def test_point_unknown_dim(self):
        with pytest.raises(DimensionError):
            slice_point(array(["x"], [1.0, 2.0, 3.0]), "q", 0)

    def test_point_out_of_bounds(self):
        with pytest.raises(IndexBoundsError):
            slice_point(array(["x"], [1.0, 2.0, 3.0]), "x", 3)

    def test_range(self):
        v = array(["x"], np.arange(5.0))
        part = slice_range(v, "x", 1, 3)
        assert part.shape == (2,)
        assert_array_equal(part.values, [1.0, 2.0])

    def test_full_range_is_identity(self):
        v = array(["x"], np.arange(5.0))
        assert_array_equal(slice_range(v, "x", 0, 5).values, v.values)

    def test_reversed_range(self):
        with pytest.raises(IndexBoundsError):
            slice_range(array(["x"], np.arange(5.0)), "x", 4, 2)

    def test_key_syntax(self):
        v = array(["x", "y"], np.arange(6.0).reshape(3, 2))
        assert_array_equal(v["x", 2].values, [4.0, 5.0])
        assert_array_equal(v["y", 0:1].values, [[0.0], [2.0], [4.0]])
        assert v["x", :].shape == (3, 2)

    def test_writes_through_views_are_shared(self):
        v = array(["x", "y"], np.zeros((3, 2)))
        row = v["x", 1]
        col = v["y", 0:1]
        row.values[0] = 7.0
        assert v.values[1, 0] == 7.0
        assert col.values[1, 0] == 7.0

    def test_view_of_view(self):
        v = array(["x", "y"], np.arange(12.0).reshape(4, 3))
        inner = v["x", 1:4]["y", 2]
        assert_array_equal(inner.values, [5.0, 8.0, 11.0])
        inner.values[1] = -1.0
        assert v.values[2, 2] == -1.0


LABELS = ("x", "y", "z")


def slice_steps(free):
    """Every point and range slice applicable to a view with the given free dims."""
    for label, _, _, extent in free:
        for i in range(extent):
            yield ("point", label, i)
        for begin in range(extent + 1):
            for end in range(begin, extent + 1):
                yield ("range", label, begin, end)


def advance(free, fixed, step):
    """Naive index map after one slice: free dims as (label, base axis, offset, extent)."""
    label = step[1]
    pos = [f[0] for f in free].index(label)
    _, axis, offset, _ = free[pos]
    if step[0] == "point":
        return free[:pos] + free[pos + 1:], {**fixed, axis: offset + step[2]}
    begin, end = step[2], step[3]
    return free[:pos] + [(label, axis, offset + begin, end - begin)] + free[pos + 1:], fixed


def apply_step(view, step):
    if step[0] == "point":
        return slice_point(view, step[1], step[2])
    return slice_range(view, step[1], step[2], step[3])


def base_index(free, fixed, idx, rank):
    index = dict(fixed)
    for (_, axis, offset, _), i in zip(free, idx):
        index[axis] = offset + i
    return tuple(index[a] for a in range(rank))


def check_view(shape, chain):
    rank = len(shape)
    values = np.arange(float(np.prod(shape))).reshape(shape)
    v = array(LABELS[:rank], values, variances=values + 0.5)
    view = v
    free = [(LABELS[a], a, 0, shape[a]) for a in range(rank)]
    fixed = {}
    for step in chain:
        view = apply_step(view, step)
        free, fixed = advance(free, fixed, step)

    assert view.shape == tuple(f[3] for f in free)
    assert view.dims == tuple(f[0] for f in free)
    for idx in np.ndindex(*view.shape):
        target = base_index(free, fixed, idx, rank)
        assert view.values[idx] == values[target]
        assert view.variances[idx] == values[target] + 0.5

    markers = -1.0 - np.arange(float(np.prod(view.shape))).reshape(view.shape)
    expected = values.copy()
    for idx in np.ndindex(*view.shape):
        expected[base_index(free, fixed, idx, rank)] = markers[idx]
    view.values = markers
    assert_array_equal(v.values, expected)


def chains(shape, depth):
    """All slice chains of exactly `depth` steps starting from a fresh shape."""
    rank = len(shape)

    def walk(free, prefix):
        if len(prefix) == depth:
            yield prefix
            return
        for step in slice_steps(free):
            yield from walk(advance(free, {}, step)[0], prefix + (step,))

    return walk([(LABELS[a], a, 0, shape[a]) for a in range(rank)], ())


def all_shapes(max_rank=3, max_extent=4):
    for rank in range(1, max_rank + 1):
        yield from itertools.product(range(1, max_extent + 1), repeat=rank)


class TestViewIndexOracle:
    """Reads and writes through sliced views against naive index arithmetic."""

    def test_single_slices(self):
        for shape in all_shapes():
            for chain in chains(shape, 1):
                check_view(shape, chain)

    def test_two_step_chains_low_rank(self):
        for shape in all_shapes(max_rank=2):
            for chain in chains(shape, 2):
                check_view(shape, chain)

    @pytest.mark.slow
    def test_two_step_chains_rank_three(self):
        for shape in itertools.product(range(1, 5), repeat=3):
            for chain in chains(shape, 2):
                check_view(shape, chain)

    def test_three_points_reach_every_element(self):
        for shape in itertools.product(range(1, 5), repeat=3):
            for i, j, k in itertools.product(*(range(n) for n in shape)):
                check_view(shape, (("point", "z", k), ("point", "x", i), ("point", "y", j)))


class TestViewImmutability:

    def test_unit_cannot_change_through_view(self):
        v = array(["x"], [1.0, 2.0], unit="m")
        with pytest.raises(ViewError):
            v["x", 0:1].unit = "s"
        assert v.unit == m

    def test_owner_may_change_unit(self):
        v = array(["x"], [1.0, 2.0], unit="m")
        v.unit = "s"
        assert v.unit == s

    def test_cannot_add_variances_through_view(self):
        v = array(["x"], [1.0, 2.0])
        with pytest.raises(ViewError):
            v["x", 0:1].variances = [0.1]

    def test_view_shape_assignment_must_match(self):
        v = array(["x"], [1.0, 2.0, 3.0])
        with pytest.raises(ShapeError):
            v["x", 0:2].values = [1.0, 2.0, 3.0]

    def test_view_value_assignment(self):
        v = array(["x"], [1.0, 2.0, 3.0], variances=[0.1, 0.2, 0.3])
        view = v["x", 1:3]
        view.values = [20.0, 30.0]
        view.variances = [2.0, 3.0]
        assert_array_equal(v.values, [1.0, 20.0, 30.0])
        assert_array_equal(v.variances, [0.1, 2.0, 3.0])


class TestCopy:

    def test_copy_of_view_is_contiguous(self):
        v = array(["x"], np.arange(5.0))
        c = copy(v["x", 1:3])
        assert not c.is_view
        assert c.values.flags["C_CONTIGUOUS"]
        assert_array_equal(c.values, [1.0, 2.0])

    def test_copy_of_scalar(self):
        v = scalar(3.0, unit="m")
        assert identical(copy(v), v)

    def test_copy_is_independent(self):
        v = array(["x"], [1.0, 2.0])
        c = copy(v)
        v.values[0] = 9.0
        assert c.values[0] == 1.0


class TestToUnit:

    def test_angstrom_to_m(self):
        v = to_unit(scalar(1.0, unit=angstrom), m)
        assert v.unit == m
        assert v.value == pytest.approx(1e-10)

    def test_variance_scales_with_square(self):
        v = to_unit(scalar(2.0, unit="m", variance=0.09), angstrom)
        assert v.value == pytest.approx(2e10)
        assert v.variance == pytest.approx(9e18)

    def test_incompatible(self):
        with pytest.raises(UnitError):
            to_unit(scalar(1.0, unit="m"), "s")

    def test_integer_with_non_integral_factor(self):
        with pytest.raises(DTypeError):
            to_unit(array(["x"], np.array([1, 2]), unit="us"), "s")

    def test_integer_with_integral_factor(self):
        v = to_unit(array(["x"], np.array([1, 2]), unit="s"), "ms")
        assert v.dtype is DType.INT64
        assert_array_equal(v.values, [1000, 2000])

    def test_input_unchanged(self):
        v = scalar(1.0, unit="m")
        to_unit(v, angstrom)
        assert v.unit == m
        assert v.value == 1.0


class TestTranspose:

    def test_permutation(self):
        v = array(["x", "y"], np.arange(6.0).reshape(2, 3))
        t = transpose_to(v, ["y", "x"])
        assert t.dims == ("y", "x")
        assert t.shape == (3, 2)
        for i in range(2):
            for j in range(3):
                assert t.values[j, i] == v.values[i, j]

    def test_identity(self):
        v = array(["x", "y"], np.arange(6.0).reshape(2, 3))
        assert_array_equal(transpose_to(v, ["x", "y"]).values, v.values)

    def test_not_a_permutation(self):
        v = array(["x", "y"], np.zeros((2, 3)))
        with pytest.raises(DimensionError):
            transpose_to(v, ["x", "z"])


class TestTake:

    def test_take(self):
        v = array(["x", "y"], np.arange(6.0).reshape(3, 2), variances=np.ones((3, 2)))
        t = take(v, "x", [2, 0])
        assert t.shape == (2, 2)
        assert_array_equal(t.values, [[4.0, 5.0], [0.0, 1.0]])
        assert t.has_variances

    def test_out_of_range(self):
        with pytest.raises(IndexBoundsError):
            take(array(["x"], [1.0]), "x", [1])


class TestIdentical:

    def test_unit_scale_matters(self):
        assert not identical(scalar(1.0, unit="s"), scalar(1.0, unit="ms"))

    def test_variance_presence_matters(self):
        assert not identical(scalar(1.0), scalar(1.0, variance=0.0))

    def test_nan_payloads_compare_bitwise(self):
        assert identical(array(["x"], [np.nan]), array(["x"], [np.nan]))
