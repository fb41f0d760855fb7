"""Tests for DataArray and Dataset containers."""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from conftest import random_data_array, random_dataset, random_event_data_array
from src.dataset import (
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
from src.errors import (
    AlignmentError,
    CoordError,
    DimensionError,
    ItemNotFoundError,
    ShapeError,
    UnitError,
    UnsupportedError,
    ViewError,
)
from src.events import make_event_variable
from src.units import counts, dimensionless, m
from src.variable import array, scalar


def line(values, x=(0.0, 1.0, 2.0), unit="counts", variances=None, name=""):
    return DataArray(
        array(["x"], values, unit=unit, variances=variances),
        coords={"x": array(["x"], list(x), unit="m")},
        name=name,
    )


class TestDataArrayConstruction:

    def test_coord_dims_must_be_data_dims(self):
        with pytest.raises(CoordError):
            DataArray(array(["x"], [1.0, 2.0]), coords={"y": array(["y"], [1.0, 2.0])})

    def test_bin_edges_accepted(self):
        da = DataArray(array(["x"], [1.0, 2.0]), coords={"x": array(["x"], [0.0, 1.0, 2.0])})
        assert is_edges(da, "x", "x")

    def test_edges_must_be_on_last_coord_dim(self):
        data = array(["x", "y"], np.zeros((2, 3)))
        ok = array(["x", "y"], np.zeros((2, 4)))
        bad = array(["x", "y"], np.zeros((3, 3)))
        DataArray(data, coords={"c": ok})
        with pytest.raises(CoordError):
            DataArray(data, coords={"c": bad})

    def test_attrs_may_have_extra_dims(self):
        da = DataArray(array(["x"], [1.0]), attrs={"t": array(["run"], [1.0, 2.0])})
        assert "t" in da.attrs

    def test_event_data_requires_event_coord(self):
        weights = make_event_variable([("x", 2)], "counts", [[1.0], [1.0, 1.0]])
        with pytest.raises(CoordError):
            DataArray(weights)

    def test_setting_invalid_coord(self):
        da = line([1.0, 2.0, 3.0])
        with pytest.raises(CoordError):
            da.coords["bad"] = array(["x"], np.zeros(5))
        assert "bad" not in da.coords

    def test_missing_coord(self):
        with pytest.raises(ItemNotFoundError):
            line([1.0, 2.0, 3.0]).coords["nope"]


class TestIsEdges:

    def test_edges(self):
        da = DataArray(array(["x"], [1.0, 2.0, 3.0]), coords={"x": array(["x"], np.arange(4.0))})
        assert is_edges(da, "x", "x")

    def test_points(self):
        assert not is_edges(line([1.0, 2.0, 3.0]), "x", "x")

    def test_oversized_coord_rejected_at_construction(self):
        with pytest.raises(CoordError):
            DataArray(array(["x"], [1.0, 2.0, 3.0]), coords={"x": array(["x"], np.arange(5.0))})


class TestBinary:

    def test_subtract_keeps_coord(self):
        out = da_binary(line([3.0, 4.0, 5.0]), line([1.0, 1.0, 1.0]), "subtract")
        assert_array_equal(out.values, [2.0, 3.0, 4.0])
        assert identical(out.coords["x"], array(["x"], [0.0, 1.0, 2.0], unit="m"))

    def test_coord_mismatch(self):
        a = line([3.0, 4.0, 5.0])
        b = line([1.0, 1.0, 1.0], x=(0.0, 1.0, 2.5))
        before = a.copy()
        with pytest.raises(CoordError):
            a - b
        assert identical(a, before)

    def test_one_sided_coord_on_shared_dim(self):
        a = line([1.0, 2.0, 3.0])
        b = DataArray(array(["x"], [1.0, 1.0, 1.0], unit="counts"))
        with pytest.raises(CoordError):
            a + b

    def test_attr_merge(self):
        a = line([1.0, 2.0, 3.0])
        b = line([1.0, 2.0, 3.0])
        a.attrs["same"] = scalar(1.0)
        b.attrs["same"] = scalar(1.0)
        a.attrs["differs"] = scalar(1.0)
        b.attrs["differs"] = scalar(2.0)
        a.attrs["only_a"] = scalar(3.0)
        out = a * b
        assert set(out.attrs) == {"same", "only_a"}

    def test_units_checked(self):
        with pytest.raises(UnitError):
            line([1.0, 2.0, 3.0], unit="m") + line([1.0, 2.0, 3.0], unit="s")

    def test_unknown_op(self):
        with pytest.raises(UnsupportedError):
            da_binary(line([1.0, 2.0, 3.0]), line([1.0, 2.0, 3.0]), "power")

    def test_ratio_is_dimensionless(self):
        out = line([2.0, 4.0, 6.0]) / line([1.0, 2.0, 3.0])
        assert out.unit == dimensionless
        assert_array_equal(out.values, [2.0, 2.0, 2.0])


class TestCompositeExpression:
    """a sliced along x minus the z-mean of b, checked element by element."""

    def test_values_variances_and_coords(self, mixed_dataset):
        a = mixed_dataset.item("a").data
        b = mixed_dataset.item("b").data
        delta = mixed_dataset["a"]["x", 1:3] - da_mean(mixed_dataset["b"], "z")

        assert delta.dims == ("x", "y", "z")
        assert delta.shape == (2, 3, 2)
        assert delta.unit == counts
        b_mean = b.values.sum(axis=1) / 2
        b_mean_var = b.variances.sum(axis=1) / 4
        for i in range(2):
            for j in range(3):
                for k in range(2):
                    assert delta.values[i, j, k] == pytest.approx(a.values[i + 1, j, k] - b_mean[j])
                    assert delta.variances[i, j, k] == pytest.approx(a.variances[i + 1, j, k] + b_mean_var[j])
        assert_array_equal(delta.coords["x"].values, [0.5, 1.0])
        assert set(delta.coords) == {"x", "y", "z", "labels"}
        assert is_edges(delta, "y", "y")
        assert not delta.is_view

    def test_coord_mismatch_leaves_inputs_unchanged(self, mixed_dataset):
        before = mixed_dataset.copy()
        b = mixed_dataset["b"].copy()
        b.coords["labels"] = array(["y"], ["low", "mid", "top"])
        with pytest.raises(CoordError):
            mixed_dataset["a"]["x", 1:3] - da_mean(b, "z")
        assert identical(mixed_dataset, before)


class TestSlicing:

    def histogram_1d(self):
        return DataArray(
            array(["x"], [10.0, 20.0, 30.0], unit="counts"),
            coords={"x": array(["x"], [0.0, 1.0, 2.0, 3.0], unit="m")},
        )

    def test_point_slice_moves_edges_to_attrs(self):
        sliced = da_slice_point(self.histogram_1d(), "x", 1)
        assert sliced.dims == ()
        assert sliced.data.value == 20.0
        assert "x" not in sliced.coords
        assert_array_equal(sliced.attrs["x"].values, [1.0, 2.0])

    def test_point_slice_without_coord(self):
        da = DataArray(array(["x", "y"], np.arange(6.0).reshape(2, 3)), coords={"y": array(["y"], [1.0, 2.0, 3.0])})
        sliced = da["x", 1]
        assert_array_equal(sliced.values, [3.0, 4.0, 5.0])
        assert_array_equal(sliced.coords["y"].values, [1.0, 2.0, 3.0])
        assert not sliced.attrs

    def test_point_slice_point_coord_becomes_0d_attr(self):
        sliced = line([1.0, 2.0, 3.0])["x", 2]
        assert sliced.attrs["x"].value == 2.0

    def test_unknown_dim(self):
        with pytest.raises(DimensionError):
            da_slice_point(line([1.0, 2.0, 3.0]), "q", 0)

    def test_range_keeps_enclosing_edges(self):
        sliced = da_slice_range(self.histogram_1d(), "x", 0, 2)
        assert_array_equal(sliced.values, [10.0, 20.0])
        assert_array_equal(sliced.coords["x"].values, [0.0, 1.0, 2.0])
        assert is_edges(sliced, "x", "x")

    def test_full_range_is_identity(self):
        da = self.histogram_1d()
        assert identical(da["x", 0:3].copy(), da)

    def test_range_on_coordless_dim(self):
        da = DataArray(array(["x", "y"], np.arange(6.0).reshape(2, 3)), coords={"x": array(["x"], [0.0, 1.0])})
        sliced = da["y", 1:3]
        assert sliced.shape == (2, 2)
        assert_array_equal(sliced.coords["x"].values, [0.0, 1.0])

    def test_view_is_writable_but_maps_are_fixed(self):
        da = self.histogram_1d()
        view = da["x", 0:2]
        view.values[0] = -1.0
        assert da.values[0] == -1.0
        with pytest.raises(ViewError):
            view.coords["extra"] = array(["x"], [1.0, 2.0])
        with pytest.raises(ViewError):
            view.data.unit = "m"


class TestReduce:

    def test_sum_keeps_edges_of_other_dim(self):
        hist = DataArray(
            array(["spectrum", "dspacing"], np.ones((3, 4)), unit="counts", variances=np.ones((3, 4))),
            coords={
                "dspacing": array(["dspacing"], np.linspace(0.0, 1.0, 5), unit="angstrom"),
                "spectrum": array(["spectrum"], np.arange(3)),
            },
        )
        summed = da_sum(hist, "spectrum")
        assert summed.dims == ("dspacing",)
        assert_array_equal(summed.values, [3.0] * 4)
        assert_array_equal(summed.variances, [3.0] * 4)
        assert is_edges(summed, "dspacing", "dspacing")
        assert "spectrum" not in summed.coords

    def test_sum_over_extent_one(self):
        da = DataArray(array(["x", "y"], [[1.0, 2.0]]))
        assert_array_equal(da_sum(da, "x").values, [1.0, 2.0])

    def test_unknown_dim(self):
        with pytest.raises(DimensionError):
            da_sum(line([1.0, 2.0, 3.0]), "y")

    def test_mean(self):
        out = da_mean(line([1.0, 2.0, 3.0], variances=[0.3, 0.3, 0.3]), "x")
        assert out.data.value == 2.0
        assert out.data.variance == pytest.approx(0.1)


class TestDataset:

    def test_shared_coord(self):
        edges = array(["dspacing"], [0.0, 1.0, 2.0], unit="angstrom")
        sample = DataArray(array(["dspacing"], [1.0, 2.0], unit="counts"), coords={"dspacing": edges})
        vanadium = DataArray(array(["dspacing"], [3.0, 4.0], unit="counts"), coords={"dspacing": edges})
        ds = Dataset({"sample": sample, "vanadium": vanadium})
        assert ds.keys() == ["sample", "vanadium"]
        assert list(ds.coords) == ["dspacing"]

    def test_alignment_error(self):
        ds = Dataset({"a": DataArray(array(["x"], np.zeros(4)))})
        with pytest.raises(AlignmentError):
            ds["b"] = DataArray(array(["x"], np.zeros(5)))
        assert ds.keys() == ["a"]

    def test_conflicting_coord(self):
        ds = Dataset({"a": line([1.0, 2.0, 3.0])})
        with pytest.raises(CoordError):
            ds_set(ds, "b", line([1.0, 2.0, 3.0], x=(5.0, 6.0, 7.0)))
        assert ds.keys() == ["a"]

    def test_missing_item(self, mixed_dataset):
        with pytest.raises(ItemNotFoundError):
            ds_get(mixed_dataset, "missing")
        with pytest.raises(KeyError):
            mixed_dataset["missing"]

    def test_event_items_rejected(self):
        tof = make_event_variable([("x", 1)], "us", [[1.0]])
        weights = make_event_variable([("x", 1)], "counts", [[1.0]])
        with pytest.raises(UnsupportedError):
            Dataset({"events": DataArray(weights, coords={"tof": tof})})

    def test_item_view_carries_relevant_coords(self, mixed_dataset):
        c = mixed_dataset["c"]
        assert set(c.coords) == {"x"}
        d = mixed_dataset["d"]
        assert not d.coords
        assert d.data.value == 1.5

    def test_item_view_writes_through(self, mixed_dataset):
        mixed_dataset["c"].values[0] = 123.0
        assert mixed_dataset.item("c").data.values[0] == 123.0

    def test_replace_item(self, mixed_dataset):
        mixed_dataset["c"] = DataArray(array(["x"], np.ones(4), unit="m"))
        assert_array_equal(mixed_dataset["c"].values, np.ones(4))

    def test_delete_item(self, mixed_dataset):
        del mixed_dataset["d"]
        assert "d" not in mixed_dataset
        assert len(mixed_dataset) == 3

    def test_sizes(self, mixed_dataset):
        assert mixed_dataset.sizes == {"x": 4, "y": 3, "z": 2}

    def test_validate(self, mixed_dataset):
        assert mixed_dataset.validate() == []

    def test_validate_reports_broken_alignment(self, mixed_dataset):
        mixed_dataset.item("c").data = array(["x"], np.zeros(5), unit="m")
        problems = mixed_dataset.validate()
        assert any("'x'" in p for p in problems)


class TestDatasetBinary:

    def make(self, names, values=1.0):
        return Dataset({n: line([values] * 3) for n in names})

    def test_name_matching(self):
        out = self.make(["s", "v"]) - self.make(["s"], values=0.5)
        assert out.keys() == ["s"]
        assert_array_equal(out["s"].values, [0.5] * 3)

    def test_disjoint(self):
        out = ds_binary(self.make(["s"]), self.make(["v"]), "add")
        assert len(out) == 0
        assert "x" in out.coords

    def test_coord_mismatch(self):
        a = Dataset({"s": line([1.0] * 3)})
        b = Dataset({"s": line([1.0] * 3, x=(0.0, 1.0, 9.0))})
        with pytest.raises(CoordError):
            a * b

    def test_sum_and_mean(self, mixed_dataset):
        del mixed_dataset["c"]
        del mixed_dataset["d"]
        summed = ds_sum(mixed_dataset, "z")
        assert summed.keys() == ["a", "b"]
        assert summed["a"].dims == ("x", "y")
        assert "z" not in summed.coords
        assert_allclose(summed["b"].values, mixed_dataset.item("b").data.values.sum(axis=1))
        averaged = ds_mean(mixed_dataset, "z")
        assert_allclose(averaged["b"].variances, mixed_dataset.item("b").data.variances.sum(axis=1) / 4)

    def test_reduce_requires_dim_in_every_item(self, mixed_dataset):
        with pytest.raises(DimensionError):
            ds_sum(mixed_dataset, "z")


class TestContainerProperties:
    """Randomized attempts to break the container invariants."""

    def test_bin_edge_extent_rule(self, rng):
        for _ in range(300):
            rank = int(rng.integers(1, 4))
            dims = ["x", "y", "z"][:rank]
            shape = [int(n) for n in rng.integers(1, 5, rank)]
            data = array(dims, np.zeros(shape))
            coord_rank = int(rng.integers(1, rank + 1))
            coord_dims = [str(d) for d in rng.permutation(dims)[:coord_rank]]
            delta = int(rng.integers(-1, 3))
            coord_shape = [shape[dims.index(d)] for d in coord_dims]
            coord_shape[-1] += delta
            coord = array(coord_dims, np.zeros(coord_shape))
            if delta in (0, 1):
                da = DataArray(data, coords={"c": coord})
                assert da.validate() == []
                assert is_edges(da, "c", coord_dims[-1]) == (delta == 1)
            else:
                with pytest.raises(CoordError):
                    DataArray(data, coords={"c": coord})

    def test_event_coord_length_rule(self, rng):
        for _ in range(100):
            lengths = [int(n) for n in rng.integers(0, 4, 3)]
            weights = make_event_variable([("x", 3)], "counts", [np.ones(n) for n in lengths])
            coord_lengths = list(lengths)
            if rng.random() < 0.5:
                coord_lengths[int(rng.integers(0, 3))] += 1
            tof = make_event_variable([("x", 3)], "us", [np.zeros(n) for n in coord_lengths])
            if coord_lengths == lengths:
                assert DataArray(weights, coords={"tof": tof}).validate() == []
            else:
                with pytest.raises(CoordError):
                    DataArray(weights, coords={"tof": tof})

    def test_dataset_alignment(self, rng):
        for _ in range(100):
            ds = Dataset()
            sizes = {}
            for name in "abcd":
                rank = int(rng.integers(0, 3))
                dims = [str(d) for d in rng.permutation(["x", "y", "z"])[:rank]]
                shape = [int(n) for n in rng.integers(2, 4, rank)]
                da = DataArray(array(dims, np.zeros(shape)))
                consistent = all(sizes.get(d, n) == n for d, n in zip(dims, shape))
                if consistent:
                    ds[name] = da
                    sizes.update(zip(dims, shape))
                else:
                    keys = ds.keys()
                    with pytest.raises(AlignmentError):
                        ds[name] = da
                    assert ds.keys() == keys
            assert ds.sizes == sizes
            assert ds.validate() == []

    def test_generated_containers_are_valid(self, rng):
        for _ in range(50):
            for x in (random_data_array(rng), random_event_data_array(rng), random_dataset(rng)):
                assert x.validate() == []
                assert identical(x, x)

    def test_view_unit_and_shape_are_fixed(self, rng):
        for _ in range(20):
            shape = tuple(int(n) for n in rng.integers(2, 5, 2))
            da = DataArray(array(["x", "y"], rng.normal(size=shape), unit="m"))
            view = da["x", 0:1]
            with pytest.raises(ViewError):
                view.data.unit = "s"
            with pytest.raises(ShapeError):
                view.data.values = np.zeros(shape)
            assert da.unit == m
            assert da.shape == shape
