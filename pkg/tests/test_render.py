"""Tests for the structure and table displays."""

import numpy as np
import pytest

from lib.render import render_structure, render_table, render_tables
from src.dataset import DataArray
from src.errors import UnsupportedError
from src.events import make_event_data_array, make_event_variable
from src.variable import array, scalar


class TestStructure:

    def test_dataset_lists_every_entry(self, mixed_dataset):
        text = render_structure(mixed_dataset)
        lines = text.splitlines()
        assert lines[0] == "<larr.Dataset>"
        assert lines[1] == "Dimensions: (x: 4, y: 3, z: 2)"
        for name in ("a", "b", "c", "d", "x", "y", "z", "labels", "attr"):
            assert any(line.split()[0] == name for line in lines[2:] if line.startswith("  "))

    def test_roles_and_markers(self, mixed_dataset):
        lines = {line.split()[0]: line for line in render_structure(mixed_dataset).splitlines() if line.startswith("  ")}
        assert "edge-coord" in lines["y"]
        assert "edge-coord" not in lines["x"]
        assert "variances" in lines["a"]
        assert "variances" in lines["d"]
        assert "variances" not in lines["c"]
        assert "[counts]" in lines["a"]
        assert "(y: 4)" in lines["y"]

    def test_independent_of_values(self, mixed_dataset):
        before = render_structure(mixed_dataset)
        mixed_dataset["a"].values[...] = 0.0
        assert render_structure(mixed_dataset) == before

    def test_view_title(self, mixed_dataset):
        assert render_structure(mixed_dataset["c"]).startswith("<larr.DataArray view> 'c'")

    def test_event_data_array(self):
        tof = make_event_variable([("spectrum", 2)], "us", [[1.0], []])
        text = render_structure(make_event_data_array({"tof": tof}, name="events"))
        assert "event_list_float64" in text
        assert "edge-coord" not in text

    def test_unsupported_type(self):
        with pytest.raises(UnsupportedError):
            render_structure([1, 2, 3])


class TestTable:

    def test_one_dimensional(self, mixed_dataset):
        lines = render_table(mixed_dataset["c"]).splitlines()
        assert lines[0] == "c (x: 4)"
        assert "x [m]" in lines[1]
        assert "values [m]" in lines[1]
        assert len(lines) == 3 + 4

    def test_scalar_is_a_single_row(self, mixed_dataset):
        lines = render_table(mixed_dataset["d"]).splitlines()
        assert lines[0] == "d ()"
        assert "variances [s^2]" in lines[1]
        assert len(lines) == 4
        assert lines[3].split() == ["1.5", "0.25"]

    def test_edges_as_intervals(self):
        hist = DataArray(
            array(["tof"], [5.0, 7.0], unit="counts"),
            coords={"tof": array(["tof"], [0.0, 10.0, 20.0], unit="us")},
            name="hist",
        )
        text = render_table(hist)
        assert "[0.0, 10.0)" in text
        assert "[10.0, 20.0)" in text

    def test_row_limit(self):
        da = DataArray(array(["x"], np.arange(10.0)))
        lines = render_table(da, max_rows=3).splitlines()
        assert lines[-1] == "... 7 more rows"
        assert len(lines) == 3 + 3 + 1

    def test_scalar_attrs_listed(self):
        da = DataArray(array(["x"], [1.0]), attrs={"temperature": scalar(300.0, unit="K")})
        text = render_table(da)
        assert "Scalars:" in text
        assert "temperature = 300.0 [K]" in text

    def test_rank_two_rejected(self, mixed_dataset):
        with pytest.raises(UnsupportedError):
            render_table(mixed_dataset["b"])

    def test_events_rejected(self):
        tof = make_event_variable([("spectrum", 1)], "us", [[1.0]])
        with pytest.raises(UnsupportedError):
            render_table(make_event_data_array({"tof": tof}))

    def test_single_item(self, mixed_dataset):
        assert render_tables(mixed_dataset, item="c") == render_table(mixed_dataset["c"])
