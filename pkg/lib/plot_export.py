"""
Plot Export - CSV Tables and Static SVG Plots

Writes plot data for 1-D and 2-D dense DataArrays:

- 1-D: CSV with one row per data element (coordinate or coordinate interval,
  value, stddev when variances exist) and an SVG line plot. Bin-edge coords
  are drawn as a histogram step line, point coords as markers; variances are
  drawn as error bars of one standard deviation.
- 2-D: CSV with one row per cell and an SVG colour map of rectangles.
- Dataset: every 1-D item over the same dim becomes one named series.

Axes are labelled from coord names and units, and from the data unit.

Usage:
    from lib.plot_export import emit_plot

    paths = emit_plot(histogrammed, "out/")     # [out/<name>.csv, out/<name>.svg]
"""

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union
from xml.sax.saxutils import escape

import numpy as np

from src.dataset import DataArray, Dataset
from src.errors import UnsupportedError
from src.utils import format_float, format_scalar, unit_label
from src.variable import Variable

logger = logging.getLogger(__name__)

WIDTH = 640
HEIGHT = 400
MARGIN_LEFT = 80
MARGIN_RIGHT = 130
MARGIN_TOP = 30
MARGIN_BOTTOM = 60
TICKS = 5

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")

# Perceptually ordered anchors, low to high
COLORMAP = (
    (68, 1, 84),
    (59, 82, 139),
    (33, 145, 140),
    (94, 201, 98),
    (253, 231, 37),
)
MISSING_COLOR = "#d9d9d9"


@dataclass
class Axis:
    """Data coordinates of one plot axis along one dim."""
    dim: str
    label: str
    positions: np.ndarray     # bin edges when edges is True, else points
    edges: bool
    csv_headers: List[str]
    csv_cells: List[List[str]]

    @property
    def centers(self) -> np.ndarray:
        if self.edges:
            return 0.5 * (self.positions[:-1] + self.positions[1:])
        return self.positions

    def bounds(self) -> np.ndarray:
        """Cell boundaries; points get midpoints between neighbours."""
        if self.edges:
            return self.positions
        p = self.positions
        if p.size == 1:
            return np.array([p[0] - 0.5, p[0] + 0.5])
        mid = 0.5 * (p[:-1] + p[1:])
        return np.concatenate([[2 * p[0] - mid[0]], mid, [2 * p[-1] - mid[-1]]])


@dataclass
class Series:
    name: str
    values: np.ndarray
    stddev: Optional[np.ndarray]


def _is_numeric(var: Variable) -> bool:
    return var.dtype.is_float or var.dtype.is_int


def _axis(da: DataArray, dim: str) -> Axis:
    """Axis from the dimension coord of dim, or from element indices."""
    extent = da.sizes[dim]
    coord = da.coords[dim] if dim in da.coords else None
    if coord is None or coord.dims != (dim,) or coord.is_event:
        positions = np.arange(extent, dtype=np.float64)
        cells = [[str(i)] for i in range(extent)]
        return Axis(dim, dim, positions, False, [dim], cells)

    label = unit_label(dim, coord.unit)
    values = np.asarray(coord.values)
    edges = coord.shape[0] == extent + 1
    if edges:
        cells = [
            [format_scalar(lo), format_scalar(hi)] for lo, hi in zip(values[:-1], values[1:])
        ]
        headers = [unit_label(f"{dim}_low", coord.unit), unit_label(f"{dim}_high", coord.unit)]
    else:
        cells = [[format_scalar(v)] for v in values]
        headers = [label]
    if _is_numeric(coord):
        positions = values.astype(np.float64)
    else:
        positions = np.arange(extent, dtype=np.float64)
        edges = False
        label = dim
    return Axis(dim, label, positions, edges, headers, cells)


def _series(da: DataArray, name: str) -> Series:
    values = np.asarray(da.values, dtype=np.float64)
    stddev = None
    if da.data.has_variances:
        stddev = np.sqrt(np.asarray(da.variances, dtype=np.float64))
    return Series(name, values, stddev)


def _check_plottable(da: DataArray, ranks: Sequence[int]) -> None:
    if da.is_event:
        raise UnsupportedError("cannot plot event data; histogram it first")
    if not _is_numeric(da.data):
        raise UnsupportedError(f"cannot plot {da.data.dtype.value} data")
    if da.data.ndim not in ranks:
        raise UnsupportedError(f"can plot rank {' or '.join(map(str, ranks))}, got dims {list(da.dims)}")


# ----------------------------------------------------------------------
# SVG primitives
# ----------------------------------------------------------------------


def _num(x: float) -> str:
    return f"{x:.2f}"


def _tick_text(x: float) -> str:
    return f"{x:.4g}"


def _finite_range(arrays: Sequence[np.ndarray]) -> Tuple[float, float]:
    finite = [a[np.isfinite(a)] for a in arrays if a is not None and a.size]
    finite = [a for a in finite if a.size]
    if not finite:
        return 0.0, 1.0
    lo = float(min(a.min() for a in finite))
    hi = float(max(a.max() for a in finite))
    if lo == hi:
        return lo - 0.5, hi + 0.5
    return lo, hi


def _padded(lo: float, hi: float, fraction: float = 0.05) -> Tuple[float, float]:
    pad = (hi - lo) * fraction
    return lo - pad, hi + pad


class _Frame:
    """Maps data coordinates into the plot area of the SVG canvas."""

    def __init__(self, x_range: Tuple[float, float], y_range: Tuple[float, float]):
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        self.left = MARGIN_LEFT
        self.right = WIDTH - MARGIN_RIGHT
        self.top = MARGIN_TOP
        self.bottom = HEIGHT - MARGIN_BOTTOM

    def px(self, x: float) -> float:
        return self.left + (x - self.x0) / (self.x1 - self.x0) * (self.right - self.left)

    def py(self, y: float) -> float:
        return self.bottom - (y - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)

    def axes(self, x_label: str, y_label: str, title: str) -> List[str]:
        out = [
            f'<rect x="{self.left}" y="{self.top}" width="{self.right - self.left}" '
            f'height="{self.bottom - self.top}" fill="none" stroke="#000"/>'
        ]
        for k in range(TICKS):
            fx = self.x0 + (self.x1 - self.x0) * k / (TICKS - 1)
            fy = self.y0 + (self.y1 - self.y0) * k / (TICKS - 1)
            x, y = self.px(fx), self.py(fy)
            out.append(
                f'<line x1="{_num(x)}" y1="{self.bottom}" x2="{_num(x)}" y2="{self.bottom + 5}" stroke="#000"/>'
            )
            out.append(
                f'<text x="{_num(x)}" y="{self.bottom + 18}" font-size="11" '
                f'text-anchor="middle">{escape(_tick_text(fx))}</text>'
            )
            out.append(
                f'<line x1="{self.left - 5}" y1="{_num(y)}" x2="{self.left}" y2="{_num(y)}" stroke="#000"/>'
            )
            out.append(
                f'<text x="{self.left - 8}" y="{_num(y + 4)}" font-size="11" '
                f'text-anchor="end">{escape(_tick_text(fy))}</text>'
            )
        mid_x = (self.left + self.right) / 2
        mid_y = (self.top + self.bottom) / 2
        out.append(
            f'<text x="{_num(mid_x)}" y="{HEIGHT - 15}" font-size="13" '
            f'text-anchor="middle">{escape(x_label)}</text>'
        )
        out.append(
            f'<text x="18" y="{_num(mid_y)}" font-size="13" text-anchor="middle" '
            f'transform="rotate(-90 18 {_num(mid_y)})">{escape(y_label)}</text>'
        )
        if title:
            out.append(
                f'<text x="{_num(mid_x)}" y="{MARGIN_TOP - 10}" font-size="14" '
                f'text-anchor="middle">{escape(title)}</text>'
            )
        return out


def _document(body: List[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">'
    )
    return "\n".join([head, f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#fff"/>'] + body + ["</svg>"]) + "\n"


def _runs(mask: np.ndarray) -> List[Tuple[int, int]]:
    """Maximal [begin, end) runs of True."""
    runs, begin = [], None
    for i, ok in enumerate(mask):
        if ok and begin is None:
            begin = i
        elif not ok and begin is not None:
            runs.append((begin, i))
            begin = None
    if begin is not None:
        runs.append((begin, len(mask)))
    return runs


def _step_lines(frame: _Frame, edges: np.ndarray, values: np.ndarray, color: str) -> List[str]:
    out = []
    for begin, end in _runs(np.isfinite(values)):
        points = []
        for i in range(begin, end):
            y = _num(frame.py(values[i]))
            points.append(f"{_num(frame.px(edges[i]))},{y}")
            points.append(f"{_num(frame.px(edges[i + 1]))},{y}")
        out.append(f'<polyline points="{" ".join(points)}" fill="none" stroke="{color}" stroke-width="1.5"/>')
    return out


def _markers(frame: _Frame, x: np.ndarray, values: np.ndarray, color: str) -> List[str]:
    return [
        f'<circle cx="{_num(frame.px(xi))}" cy="{_num(frame.py(vi))}" r="3" fill="{color}"/>'
        for xi, vi in zip(x, values)
        if math.isfinite(xi) and math.isfinite(vi)
    ]


def _error_bars(frame: _Frame, x: np.ndarray, values: np.ndarray, stddev: np.ndarray, color: str) -> List[str]:
    out = []
    for xi, vi, si in zip(x, values, stddev):
        if not (math.isfinite(xi) and math.isfinite(vi) and math.isfinite(si)):
            continue
        px = _num(frame.px(xi))
        out.append(
            f'<line x1="{px}" y1="{_num(frame.py(vi - si))}" x2="{px}" '
            f'y2="{_num(frame.py(vi + si))}" stroke="{color}"/>'
        )
    return out


def _legend(series: Sequence[Series]) -> List[str]:
    out = []
    x = WIDTH - MARGIN_RIGHT + 12
    for k, s in enumerate(series):
        y = MARGIN_TOP + 14 + 18 * k
        color = PALETTE[k % len(PALETTE)]
        out.append(f'<rect x="{x}" y="{y - 9}" width="12" height="10" fill="{color}"/>')
        out.append(f'<text x="{x + 18}" y="{y}" font-size="12">{escape(s.name)}</text>')
    return out


def _line_plot_svg(axis: Axis, series: Sequence[Series], y_label: str, title: str) -> str:
    y_arrays = []
    for s in series:
        y_arrays.append(s.values)
        if s.stddev is not None:
            y_arrays += [s.values - s.stddev, s.values + s.stddev]
    frame = _Frame(_finite_range([axis.positions]), _padded(*_finite_range(y_arrays)))
    body = frame.axes(axis.label, y_label, title)
    for k, s in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        if axis.edges:
            body += _step_lines(frame, axis.positions, s.values, color)
        else:
            body += _markers(frame, axis.positions, s.values, color)
        if s.stddev is not None:
            body += _error_bars(frame, axis.centers, s.values, s.stddev, color)
    if len(series) > 1 or (series and series[0].name):
        body += _legend(series)
    return _document(body)


def _color(fraction: float) -> str:
    if not math.isfinite(fraction):
        return MISSING_COLOR
    fraction = min(max(fraction, 0.0), 1.0)
    scaled = fraction * (len(COLORMAP) - 1)
    k = min(int(scaled), len(COLORMAP) - 2)
    t = scaled - k
    rgb = [round(a + (b - a) * t) for a, b in zip(COLORMAP[k], COLORMAP[k + 1])]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _color_map_svg(y_axis: Axis, x_axis: Axis, values: np.ndarray, z_label: str, title: str) -> str:
    x_bounds, y_bounds = x_axis.bounds(), y_axis.bounds()
    frame = _Frame(_finite_range([x_bounds]), _finite_range([y_bounds]))
    body = frame.axes(x_axis.label, y_axis.label, title)
    lo, hi = _finite_range([values])
    for i in range(values.shape[0]):
        top, bottom = frame.py(y_bounds[i + 1]), frame.py(y_bounds[i])
        for j in range(values.shape[1]):
            left, right = frame.px(x_bounds[j]), frame.px(x_bounds[j + 1])
            fill = _color((values[i, j] - lo) / (hi - lo))
            body.append(
                f'<rect x="{_num(min(left, right))}" y="{_num(min(top, bottom))}" '
                f'width="{_num(abs(right - left))}" height="{_num(abs(bottom - top))}" fill="{fill}"/>'
            )
    # colour bar
    bar_x = WIDTH - MARGIN_RIGHT + 20
    steps = 20
    height = (frame.bottom - frame.top) / steps
    for k in range(steps):
        y = frame.bottom - (k + 1) * height
        body.append(
            f'<rect x="{bar_x}" y="{_num(y)}" width="14" height="{_num(height)}" '
            f'fill="{_color((k + 0.5) / steps)}"/>'
        )
    body.append(f'<text x="{bar_x + 18}" y="{frame.bottom}" font-size="11">{escape(_tick_text(lo))}</text>')
    body.append(f'<text x="{bar_x + 18}" y="{frame.top + 8}" font-size="11">{escape(_tick_text(hi))}</text>')
    body.append(f'<text x="{bar_x}" y="{frame.top - 8}" font-size="11">{escape(z_label)}</text>')
    return _document(body)


# ----------------------------------------------------------------------
# CSV
# ----------------------------------------------------------------------


def _write_csv(path: Path, headers: List[str], rows: List[List[str]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(headers)
        writer.writerows(rows)


def _value_cells(da: DataArray, prefix: str = "") -> Tuple[List[str], List[List[str]]]:
    label = unit_label(prefix or "values", da.unit)
    values = [format_scalar(v) for v in np.asarray(da.values).reshape(-1)]
    if not da.data.has_variances:
        return [label], [[v] for v in values]
    stddev = np.sqrt(np.asarray(da.variances, dtype=np.float64)).reshape(-1)
    headers = [label, unit_label(f"{prefix}_stddev" if prefix else "stddev", da.unit)]
    return headers, [[v, format_float(s)] for v, s in zip(values, stddev)]


# ----------------------------------------------------------------------
# Public entry point
# ----------------------------------------------------------------------


def _emit_1d(items: Sequence[DataArray], out_dir: Path, stem: str, title: str) -> List[Path]:
    dim = items[0].dims[0]
    axis = _axis(items[0], dim)
    headers = list(axis.csv_headers)
    rows = [list(cells) for cells in axis.csv_cells]
    for da in items:
        value_headers, value_rows = _value_cells(da, da.name if len(items) > 1 else "")
        headers += value_headers
        for row, cells in zip(rows, value_rows):
            row += cells

    units = {da.unit for da in items}
    y_name = items[0].name if len(items) == 1 and items[0].name else "values"
    y_label = unit_label(y_name, items[0].unit) if len(units) == 1 else y_name
    series = [_series(da, da.name) for da in items]

    csv_path, svg_path = out_dir / f"{stem}.csv", out_dir / f"{stem}.svg"
    _write_csv(csv_path, headers, rows)
    svg_path.write_text(_line_plot_svg(axis, series, y_label, title), encoding="utf-8")
    return [csv_path, svg_path]


def _emit_2d(da: DataArray, out_dir: Path, stem: str, title: str) -> List[Path]:
    outer, inner = da.dims
    y_axis, x_axis = _axis(da, outer), _axis(da, inner)
    value_headers, value_rows = _value_cells(da)
    headers = y_axis.csv_headers + x_axis.csv_headers + value_headers
    rows = []
    for i, y_cells in enumerate(y_axis.csv_cells):
        for j, x_cells in enumerate(x_axis.csv_cells):
            rows.append(y_cells + x_cells + value_rows[i * len(x_axis.csv_cells) + j])

    csv_path, svg_path = out_dir / f"{stem}.csv", out_dir / f"{stem}.svg"
    _write_csv(csv_path, headers, rows)
    values = np.asarray(da.values, dtype=np.float64)
    z_label = unit_label(da.name or "values", da.unit)
    svg_path.write_text(_color_map_svg(y_axis, x_axis, values, z_label, title), encoding="utf-8")
    return [csv_path, svg_path]


def emit_plot(
    x: Union[DataArray, Dataset],
    out_dir: Union[str, Path],
    stem: Optional[str] = None,
) -> List[Path]:
    """
    Write CSV plot data and an SVG plot.

    Args:
        x: 1-D or 2-D dense DataArray, or a Dataset of 1-D items over one dim
        out_dir: Output directory (created if missing)
        stem: File name stem (default: the DataArray name, or "plot")

    Returns:
        Paths of the written files [csv, svg]

    Raises:
        UnsupportedError: For event data, non-numeric data, or rank other than 1 and 2
    """
    out_dir = Path(out_dir)

    if isinstance(x, Dataset):
        names = list(x)
        if not names:
            raise UnsupportedError("cannot plot an empty dataset")
        items = [x[name] for name in names]
        for da in items:
            _check_plottable(da, (1,))
        dims = {da.dims for da in items}
        if len(dims) != 1:
            raise UnsupportedError(f"dataset items must share one dim to plot together, got {sorted(dims)}")
        stem = stem or "plot"
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = _emit_1d(items, out_dir, stem, "")
    elif isinstance(x, DataArray):
        _check_plottable(x, (1, 2))
        stem = stem or x.name or "plot"
        out_dir.mkdir(parents=True, exist_ok=True)
        if x.data.ndim == 1:
            paths = _emit_1d([x], out_dir, stem, x.name)
        else:
            paths = _emit_2d(x, out_dir, stem, x.name)
    else:
        raise UnsupportedError(f"cannot plot {type(x).__name__}")

    logger.debug(f"wrote plot files {[str(p) for p in paths]}")
    return paths
