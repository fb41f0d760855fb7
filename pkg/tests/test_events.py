"""Tests for event-list construction, histogramming and event manipulation."""

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from src.dataset import DataArray, is_edges
from src.dtypes import DType
from src.errors import (
    CoordError,
    DimensionError,
    DTypeError,
    EdgesError,
    ShapeError,
    UnitError,
)
from src.events import (
    event_concatenate,
    event_dense_op,
    event_variable_from_flat,
    flatten,
    histogram,
    make_event_data_array,
    make_event_variable,
)
from src.units import counts, us
from src.variable import array


def lists_of(var):
    return [list(lst) for lst in var.event_lists()]


def variance_lists(var):
    return [list(lst) for lst in var.variances.ravel()]


def tof_events(lists, spectra=None):
    spectra = spectra if spectra is not None else len(lists)
    tof = make_event_variable([("spectrum", spectra)], "us", lists)
    return make_event_data_array(
        {"tof": tof},
        {"spectrum": array(["spectrum"], np.arange(spectra))},
    )


class TestMakeEventVariable:

    def test_offsets(self):
        v = make_event_variable([("x", 2)], "us", [[1.0, 2.0], [3.0]])
        assert v.is_event
        assert v.dtype is DType.EVENT_FLOAT64
        assert_array_equal(v.event_storage.offsets, [0, 2, 3])
        assert_array_equal(v.lengths(), [2, 1])

    def test_list_count_mismatch(self):
        with pytest.raises(ShapeError):
            make_event_variable([("x", 3)], "us", [[1.0], [2.0]])

    def test_variance_lengths_must_match(self):
        with pytest.raises(ShapeError):
            make_event_variable([("x", 2)], "counts", [[1.0], [1.0]], variances=[[1.0], [1.0, 1.0]])

    def test_integer_events_reject_variances(self):
        with pytest.raises(DTypeError):
            make_event_variable([("x", 1)], "counts", [[1]], variances=[[1]], dtype=DType.INT64)

    def test_from_flat(self):
        v = event_variable_from_flat([("x", 3)], "us", np.array([1.0, 2.0, 3.0]), [1, 0, 2])
        assert lists_of(v) == [[1.0], [], [2.0, 3.0]]

    def test_from_flat_length_mismatch(self):
        with pytest.raises(ShapeError):
            event_variable_from_flat([("x", 2)], "us", np.array([1.0, 2.0]), [1, 2])

    def test_weights_are_one(self):
        da = tof_events([[1.0, 2.0], [3.0]])
        assert da.unit == counts
        assert lists_of(da.data) == [[1.0, 1.0], [1.0]]
        assert variance_lists(da.data) == [[1.0, 1.0], [1.0]]


class TestHistogram:

    def edges(self, values, unit="us"):
        return array(["tof"], values, unit=unit)

    def test_single_list(self):
        hist = histogram(tof_events([[0.5, 1.5, 1.7, 2.5]]), self.edges([0.0, 1.0, 2.0, 3.0]))
        assert hist.dims == ("spectrum", "tof")
        assert_array_equal(hist.values, [[1.0, 2.0, 1.0]])
        assert_array_equal(hist.variances, [[1.0, 2.0, 1.0]])
        assert hist.unit == counts
        assert is_edges(hist, "tof", "tof")
        assert "spectrum" in hist.coords

    def test_bins_are_half_open(self):
        hist = histogram(tof_events([[0.0, 1.0, 3.0, -0.1]]), self.edges([0.0, 1.0, 2.0, 3.0]))
        assert_array_equal(hist.values, [[1.0, 1.0, 0.0]])

    def test_empty_lists(self):
        hist = histogram(tof_events([[], [1.5]]), self.edges([0.0, 1.0, 2.0]))
        assert_array_equal(hist.values, [[0.0, 0.0], [0.0, 1.0]])

    def test_non_increasing_edges(self):
        with pytest.raises(EdgesError):
            histogram(tof_events([[1.0]]), self.edges([0.0, 2.0, 2.0]))

    def test_single_edge(self):
        with pytest.raises(EdgesError):
            histogram(tof_events([[1.0]]), self.edges([0.0]))

    def test_unit_mismatch(self):
        with pytest.raises(UnitError):
            histogram(tof_events([[1.0]]), self.edges([0.0, 1.0, 2.0], unit="s"))

    def test_missing_event_coord(self):
        with pytest.raises(CoordError):
            histogram(tof_events([[1.0]]), array(["energy"], [0.0, 1.0]))

    def test_dense_dim_clash(self):
        spectrum = make_event_variable([("spectrum", 1)], "us", [[1.0]])
        da = make_event_data_array({"spectrum": spectrum})
        with pytest.raises(DimensionError):
            histogram(da, array(["spectrum"], [0.0, 2.0], unit="us"))

    def test_weighted_events(self):
        tof = make_event_variable([("spectrum", 1)], "us", [[0.5, 0.6, 1.5]])
        weights = make_event_variable(
            [("spectrum", 1)], "counts", [[2.0, 3.0, 4.0]], variances=[[0.5, 0.5, 1.0]]
        )
        hist = histogram(DataArray(weights, coords={"tof": tof}), self.edges([0.0, 1.0, 2.0]))
        assert_array_equal(hist.values, [[5.0, 4.0]])
        assert_array_equal(hist.variances, [[1.0, 1.0]])

    def test_counts_without_variances_get_poisson(self):
        tof = make_event_variable([("spectrum", 1)], "us", [[0.5, 0.6]])
        weights = make_event_variable([("spectrum", 1)], "counts", [[1.0, 1.0]])
        hist = histogram(DataArray(weights, coords={"tof": tof}), self.edges([0.0, 1.0]))
        assert_array_equal(hist.variances, [[2.0]])

    def test_matches_per_event_loop(self, rng):
        edge_values = np.linspace(0.0, 1000.0, 101)
        lists = [rng.uniform(-50.0, 1050.0, 2000) for _ in range(5)]
        lists[0][:3] = [edge_values[0], edge_values[-1], edge_values[37]]
        hist = histogram(tof_events(lists), self.edges(edge_values))

        expected = np.zeros((len(lists), edge_values.size - 1))
        expected_variances = np.zeros_like(expected)
        for i, events in enumerate(lists):
            for t in events:
                for b in range(edge_values.size - 1):
                    if edge_values[b] <= t < edge_values[b + 1]:
                        expected[i, b] += 1.0
                        expected_variances[i, b] += 1.0
                        break
        assert_array_equal(hist.values, expected)
        assert_array_equal(hist.variances, expected_variances)
        assert hist.values[0, 0] >= 1.0
        assert hist.values[0, 37] >= 1.0


class TestFlatten:

    def test_flatten_spectra(self):
        da = tof_events([[1.0], [2.0, 3.0], []])
        flat = flatten(da, "spectrum")
        assert flat.dims == ()
        assert lists_of(flat.coords["tof"]) == [[1.0, 2.0, 3.0]]
        assert lists_of(flat.data) == [[1.0, 1.0, 1.0]]
        assert "spectrum" not in flat.coords

    def test_flatten_keeps_other_dims(self):
        tof = make_event_variable([("x", 2), ("y", 2)], "us", [[1.0], [2.0], [3.0], [4.0, 5.0]])
        da = make_event_data_array({"tof": tof}, {"y": array(["y"], [10.0, 20.0])})
        flat = flatten(da, "x")
        assert flat.dims == ("y",)
        assert lists_of(flat.coords["tof"]) == [[1.0, 3.0], [2.0, 4.0, 5.0]]
        assert "y" in flat.coords

    def test_event_coord_name_rejected(self):
        with pytest.raises(DimensionError):
            flatten(tof_events([[1.0]]), "tof")

    def test_dense_data_rejected(self):
        with pytest.raises(DTypeError):
            flatten(DataArray(array(["x"], [1.0])), "x")


class TestEventConcatenate:

    def test_appends_lists(self):
        a = tof_events([[1.0], [2.0]])
        b = tof_events([[10.0], [20.0, 30.0]])
        out = event_concatenate(a, b)
        assert lists_of(out.coords["tof"]) == [[1.0, 10.0], [2.0, 20.0, 30.0]]
        assert lists_of(out.data) == [[1.0, 1.0], [1.0, 1.0, 1.0]]
        assert lists_of(a.coords["tof"]) == [[1.0], [2.0]]

    def test_dense_dims_must_match(self):
        with pytest.raises(ShapeError):
            event_concatenate(tof_events([[1.0]]), tof_events([[1.0], [2.0]]))

    def test_unit_mismatch(self):
        a = tof_events([[1.0]])
        tof = make_event_variable([("spectrum", 1)], "ms", [[1.0]])
        b = make_event_data_array({"tof": tof}, {"spectrum": array(["spectrum"], np.arange(1))})
        with pytest.raises(UnitError):
            event_concatenate(a, b)

    def test_event_coord_names_must_match(self):
        a = tof_events([[1.0]])
        energy = make_event_variable([("spectrum", 1)], "us", [[1.0]])
        b = make_event_data_array({"energy": energy})
        with pytest.raises(CoordError):
            event_concatenate(a, b)


class TestEventDenseOp:

    def test_shift_event_coord(self):
        da = tof_events([[100.0], [200.0, 300.0]])
        offsets = array(["spectrum"], [1.0, 2.0], unit="us")
        out = event_dense_op(da, offsets, "add", target="tof")
        assert lists_of(out.coords["tof"]) == [[101.0], [202.0, 302.0]]
        assert lists_of(da.coords["tof"]) == [[100.0], [200.0, 300.0]]
        assert out.coords["tof"].unit == us

    def test_scale_weights(self):
        da = tof_events([[1.0], [2.0, 3.0]])
        out = event_dense_op(da, array(["spectrum"], [2.0, 0.5]), "multiply")
        assert lists_of(out.data) == [[2.0], [0.5, 0.5]]
        assert variance_lists(out.data) == [[4.0], [0.25, 0.25]]

    def test_unit_mismatch(self):
        da = tof_events([[100.0], [200.0]])
        with pytest.raises(UnitError):
            event_dense_op(da, array(["spectrum"], [1.0, 2.0], unit="m"), "add", target="tof")

    def test_unknown_dim(self):
        da = tof_events([[100.0]])
        with pytest.raises(DimensionError):
            event_dense_op(da, array(["pixel"], [1.0]), "add", target="tof")

    def test_missing_target(self):
        with pytest.raises(CoordError):
            event_dense_op(tof_events([[1.0]]), array(["spectrum"], [1.0], unit="us"), "add", target="energy")
