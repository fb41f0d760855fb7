"""
Render - Structure and Table Displays

Text views of containers for the terminal:

- render_structure: one line per data item, coord and attr with its role,
  dims, dtype, unit and a variances marker. Depends only on structure,
  never on bulk values.
- render_table: column display of 0-D and 1-D dense data with coords,
  bin-edge coords shown as intervals.

Usage:
    from lib.render import render_structure, render_table

    print(render_structure(dataset))
    print(render_table(dataset["c"]))
"""

from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from lib.terminal_utils import Colors, paint
from src.dataset import DataArray, Dataset
from src.errors import UnsupportedError
from src.units import Unit, format_unit, unit_pow
from src.utils import format_dims, format_scalar, truncate_name, unit_label
from src.variable import Variable

Container = Union[DataArray, Dataset]

ROLE_DATA = "data"
ROLE_COORD = "coord"
ROLE_EDGES = "edge-coord"
ROLE_ATTR = "attr"


def _role(var: Variable, sizes: Mapping[str, int], role: str = ROLE_COORD) -> str:
    if role != ROLE_COORD or var.is_event or var.ndim == 0:
        return role
    inner = var.dims[-1]
    if inner in sizes and var.shape[-1] == sizes[inner] + 1:
        return ROLE_EDGES
    return role


def _entry(name: str, role: str, var: Variable) -> Tuple[str, ...]:
    return (
        name,
        role,
        format_dims(var.layout),
        var.dtype.value,
        f"[{format_unit(var.unit)}]",
        "variances" if var.has_variances else "",
    )


def _format_entries(entries: Sequence[Tuple[str, ...]], indent: str) -> List[str]:
    if not entries:
        return []
    widths = [max(len(e[i]) for e in entries) for i in range(len(entries[0]))]
    lines = []
    for entry in entries:
        name = paint(entry[0].ljust(widths[0]), Colors.CYAN)
        rest = "  ".join(cell.ljust(width) for cell, width in zip(entry[1:], widths[1:]))
        lines.append(f"{indent}{name}  {rest}".rstrip())
    return lines


def _section(title: str, entries: Sequence[Tuple[str, ...]], indent: str = "  ") -> List[str]:
    if not entries:
        return []
    return [paint(f"{title}:", Colors.BOLD)] + _format_entries(entries, indent)


def _map_entries(
    variables: Mapping[str, Variable], sizes: Mapping[str, int], role: str
) -> List[Tuple[str, ...]]:
    return [_entry(name, _role(var, sizes, role), var) for name, var in variables.items()]


def _render_data_array(da: DataArray) -> List[str]:
    sizes = da.sizes
    title = "<larr.DataArray view>" if da.is_view else "<larr.DataArray>"
    if da.name:
        title += f" {da.name!r}"
    lines = [paint(title, Colors.BOLD), f"Dimensions: {format_dims(da.data.layout)}"]
    lines += _section("Coordinates", _map_entries(da.coords, sizes, ROLE_COORD))
    lines += _section("Data", [_entry(da.name or "<data>", ROLE_DATA, da.data)])
    lines += _section("Attributes", _map_entries(da.attrs, sizes, ROLE_ATTR))
    return lines


def _render_dataset(ds: Dataset) -> List[str]:
    sizes = ds.sizes
    lines = [
        paint("<larr.Dataset>", Colors.BOLD),
        "Dimensions: (" + ", ".join(f"{label}: {extent}" for label, extent in sizes.items()) + ")",
    ]
    lines += _section("Coordinates", _map_entries(ds.coords, sizes, ROLE_COORD))
    if len(ds):
        lines.append(paint("Data:", Colors.BOLD))
        items = [(name, ds.item(name)) for name in ds]
        lines += _format_entries([_entry(name, ROLE_DATA, item.data) for name, item in items], "  ")
        for name, item in items:
            if item.attrs:
                lines.append(f"  {name} attributes:")
                lines += _format_entries(_map_entries(item.attrs, sizes, ROLE_ATTR), "    ")
    lines += _section("Attributes", _map_entries(ds.attrs, sizes, ROLE_ATTR))
    return lines


def render_structure(x: Container) -> str:
    """
    Describe the structure of a DataArray or Dataset.

    Args:
        x: Container to describe

    Returns:
        Deterministic multi-line text
    """
    if isinstance(x, Dataset):
        return "\n".join(_render_dataset(x))
    if isinstance(x, DataArray):
        return "\n".join(_render_data_array(x))
    raise UnsupportedError(f"cannot render {type(x).__name__}")


def _variance_unit(unit: Unit) -> Unit:
    return unit_pow(unit, 2)


def _column_cells(var: Variable, edges: bool) -> List[str]:
    values = np.asarray(var.values)
    if edges:
        return [
            f"[{format_scalar(lo)}, {format_scalar(hi)})"
            for lo, hi in zip(values[:-1], values[1:])
        ]
    return [format_scalar(v) for v in values.reshape(-1)]


def _table_columns(da: DataArray) -> List[Tuple[str, List[str]]]:
    columns: List[Tuple[str, List[str]]] = []
    sizes = da.sizes
    if da.data.ndim == 1:
        for name, coord in da.coords.items():
            if coord.ndim != 1:
                continue
            edges = _role(coord, sizes) == ROLE_EDGES
            columns.append((unit_label(name, coord.unit), _column_cells(coord, edges)))
    data = da.data
    columns.append((unit_label("values", data.unit), [format_scalar(v) for v in np.asarray(data.values).reshape(-1)]))
    if data.has_variances:
        columns.append((
            unit_label("variances", _variance_unit(data.unit)),
            [format_scalar(v) for v in np.asarray(data.variances).reshape(-1)],
        ))
    return columns


def _scalar_lines(variables: Mapping[str, Variable]) -> List[str]:
    lines = []
    for name, var in variables.items():
        if var.ndim != 0 or var.is_event:
            continue
        text = f"  {name} = {format_scalar(var.value)} [{format_unit(var.unit)}]"
        if var.has_variances:
            text += f" (variance {format_scalar(var.variance)})"
        lines.append(text)
    return lines


def render_table(da: DataArray, max_rows: Optional[int] = None) -> str:
    """
    Table display of 0-D or 1-D dense data.

    Each 1-D coord becomes a column; bin-edge coords become an interval
    column "[low, high)". Scalar coords and attrs are listed below the table.

    Args:
        da: DataArray with rank <= 1
        max_rows: Show at most this many rows (None for all)

    Raises:
        UnsupportedError: If da has rank >= 2 or holds event lists
    """
    if da.is_event:
        raise UnsupportedError("table display needs dense data; histogram events first")
    if da.data.ndim > 1:
        raise UnsupportedError(f"table display needs rank <= 1, got dims {list(da.dims)}")

    columns = _table_columns(da)
    headers = [truncate_name(header) for header, _ in columns]
    rows = len(columns[-1][1])
    shown = rows if max_rows is None else min(rows, max_rows)
    widths = [
        max([len(h)] + [len(cell) for cell in cells[:shown]])
        for h, (_, cells) in zip(headers, columns)
    ]

    title = da.name or "<data>"
    lines = [paint(f"{title} {format_dims(da.data.layout)}", Colors.BOLD)]
    lines.append("  ".join(paint(h.rjust(w), Colors.CYAN) for h, w in zip(headers, widths)))
    lines.append("  ".join("-" * w for w in widths))
    for r in range(shown):
        lines.append("  ".join(cells[r].rjust(w) for (_, cells), w in zip(columns, widths)))
    if shown < rows:
        lines.append(paint(f"... {rows - shown} more rows", Colors.DIM))

    scalars = _scalar_lines(da.coords) + _scalar_lines(da.attrs)
    if scalars:
        lines.append("Scalars:")
        lines += scalars
    return "\n".join(lines)


def render_tables(x: Container, item: Optional[str] = None, max_rows: Optional[int] = None) -> str:
    """Tables of one DataArray, one Dataset item, or every Dataset item in order."""
    if isinstance(x, DataArray):
        return render_table(x, max_rows)
    if item is not None:
        return render_table(x[item], max_rows)
    tables: Dict[str, str] = {name: render_table(x[name], max_rows) for name in x}
    return "\n\n".join(tables.values())
