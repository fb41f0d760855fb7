"""
Console Utilities - Terminal Output Helpers

Provides:
- ANSI color codes that can be switched off (LARR_NO_COLOR / --no-color)
- Colored log messages with level symbols
- Multi-line report building

Usage:
    from lib.terminal_utils import Colors, log, set_color_enabled

    set_color_enabled(False)
    log("Saved histogram.json", level="success")
    print(f"{Colors.BOLD}Dataset{Colors.RESET}")
"""

import sys
from typing import Dict, List, TextIO, Tuple


class Colors:
    """ANSI color codes for terminal output; all empty while color is disabled."""

    # Regular colors
    RED = "\033[91m"
    GREEN = "\033[92m"
    YELLOW = "\033[93m"
    BLUE = "\033[94m"
    MAGENTA = "\033[95m"
    CYAN = "\033[96m"

    # Styles
    BOLD = "\033[1m"
    DIM = "\033[2m"

    # Reset
    RESET = "\033[0m"


_CODES: Dict[str, str] = {
    name: value for name, value in vars(Colors).items() if name.isupper()
}


def set_color_enabled(enabled: bool) -> None:
    """Switch ANSI styling on or off for every subsequent output."""
    for name, code in _CODES.items():
        setattr(Colors, name, code if enabled else "")


def color_enabled() -> bool:
    return Colors.RESET != ""


def paint(text: str, color: str) -> str:
    """Wrap text in a color code (no-op while color is disabled)."""
    if not color:
        return text
    return f"{color}{text}{Colors.RESET}"


# Log level configuration: symbol and Colors attribute name
LOG_SYMBOLS: Dict[str, Tuple[str, str]] = {
    "info": ("►", "BLUE"),
    "success": ("●", "GREEN"),
    "warning": ("▲", "YELLOW"),
    "error": ("■", "RED"),
    "debug": ("○", "DIM"),
}


def format_log(msg: str, level: str = "info") -> str:
    """
    Format a log message without printing.

    Args:
        msg: Message to format
        level: Log level (info, success, warning, error, debug)

    Returns:
        Formatted message string
    """
    symbol, color_name = LOG_SYMBOLS.get(level, ("·", ""))
    color = getattr(Colors, color_name, "") if color_name else ""
    return f"{paint(symbol, color)} {msg}"


def log(msg: str, level: str = "info", stream: TextIO = None) -> str:
    """
    Format and print a log message.

    Messages go to stderr so that command output on stdout stays clean.

    Args:
        msg: Message to log
        level: Log level (info, success, warning, error, debug)
        stream: Output stream (default stderr)

    Returns:
        Formatted message string
    """
    formatted = format_log(msg, level)
    print(formatted, file=stream or sys.stderr)
    return formatted


class StatusDisplay:
    """
    Helper for building multi-line reports.

    Usage:
        display = StatusDisplay()
        display.add_header("Bandwidth")
        display.add_line("memcpy: 10.2 GB/s")
        display.add_separator()
        display.render()
    """

    def __init__(self, width: int = 60):
        self.width = width
        self.lines: List[str] = []

    def add_line(self, line: str) -> "StatusDisplay":
        """Add a line."""
        self.lines.append(line)
        return self

    def add_header(self, text: str) -> "StatusDisplay":
        """Add a bold header line."""
        self.lines.append(paint(text, Colors.BOLD))
        return self

    def add_field(self, name: str, value: str, width: int = 18) -> "StatusDisplay":
        """Add an aligned 'name: value' line."""
        self.lines.append(f"{name + ':':<{width}} {value}")
        return self

    def add_separator(self, char: str = "-") -> "StatusDisplay":
        """Add a separator line."""
        self.lines.append(char * self.width)
        return self

    def add_blank(self) -> "StatusDisplay":
        """Add a blank line."""
        self.lines.append("")
        return self

    def render(self, stream: TextIO = None) -> str:
        """
        Render and print the display.

        Args:
            stream: Output stream (default stdout)

        Returns:
            The rendered output string
        """
        output = "\n".join(self.lines)
        print(output, file=stream or sys.stdout, flush=True)
        return output

    def clear(self) -> "StatusDisplay":
        """Clear all lines."""
        self.lines = []
        return self

    def get_lines(self) -> List[str]:
        """Get all lines."""
        return self.lines.copy()
