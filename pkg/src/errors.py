"""
Errors Module - Exception Hierarchy

Every error raised by the library derives from LarrError, so callers can
catch the whole family at once or pick the specific class they care about.

Example:
    from src.errors import LarrError, UnitError

    try:
        total = a + b
    except UnitError as e:
        print(f"Cannot add: {e}")
"""

from typing import List, Optional


class LarrError(Exception):
    """Base exception for labeled-array errors."""
    pass


class UnitError(LarrError):
    """Raised when units are incompatible or a unit change is not allowed."""
    pass


class UnitOverflowError(UnitError):
    """Raised when a unit exponent leaves the storable range."""
    pass


class UnitParseError(UnitError, ValueError):
    """Raised when a unit string cannot be parsed."""

    def __init__(self, message: str, token: str = ""):
        super().__init__(message)
        self.token = token


class DimensionError(LarrError):
    """Raised for unknown, duplicate or mismatched dimension labels."""
    pass


class ShapeError(LarrError):
    """Raised when extents or buffer lengths do not match."""
    pass


class IndexBoundsError(LarrError, IndexError):
    """Raised when a slice index is out of range."""
    pass


class DTypeError(LarrError, TypeError):
    """Raised for unsupported element types or type combinations."""
    pass


class UnsupportedError(LarrError):
    """Raised when an operation is not defined for its input."""
    pass


class ViewError(LarrError):
    """Raised when a view is used to break an invariant of its container."""
    pass


class CoordError(LarrError):
    """Raised when coordinates are missing or do not match."""
    pass


class AlignmentError(LarrError):
    """Raised when dataset items disagree on a dimension extent."""
    pass


class EdgesError(LarrError):
    """Raised when bin edges are not strictly increasing."""
    pass


class ItemNotFoundError(LarrError, KeyError):
    """Raised when a dataset item does not exist."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class IntegerDivisionError(LarrError, ZeroDivisionError):
    """Raised on integer division by zero."""
    pass


class FormatError(LarrError):
    """Raised when a file document is malformed."""

    def __init__(self, message: str, location: str = ""):
        text = f"{location}: {message}" if location else message
        super().__init__(text)
        self.location = location


class ValidationError(LarrError):
    """Raised when a container fails its invariant checks."""

    def __init__(self, problems: List[str], context: Optional[str] = None):
        head = f"{context}: " if context else ""
        super().__init__(head + "; ".join(problems))
        self.problems = list(problems)
        self.context = context
