"""
larr - Reusable Components Library

Components built on the core library for terminal output and export.

Available Modules:
    - terminal_utils: Terminal output utilities (colors, log symbols, report display)
    - render: Structure and table displays of containers
    - plot_export: CSV plot data and static SVG plots
    - bandwidth: Element-wise add vs memcpy throughput harness

Usage:
    from lib import render_structure, emit_plot
    from lib.terminal_utils import Colors

    print(render_structure(dataset))
    emit_plot(dataset["c"], "plots/")
"""

from lib.terminal_utils import Colors, StatusDisplay, log, set_color_enabled
from lib.render import render_structure, render_table, render_tables
from lib.plot_export import emit_plot
from lib.bandwidth import BandwidthReport, measure

__all__ = [
    "Colors",
    "StatusDisplay",
    "log",
    "set_color_enabled",
    "render_structure",
    "render_table",
    "render_tables",
    "emit_plot",
    "BandwidthReport",
    "measure",
]
