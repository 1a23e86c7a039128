"""Shared error taxonomy.

Every operation in this package raises one of these instead of bare
ValueError/RuntimeError so callers (and the CLI exit-code mapping) can tell
bad inputs apart from exhausted budgets and undersized windows.
"""


class DeloneLabError(Exception):
    """Base class for all package errors."""


class InvalidArgument(DeloneLabError):
    """Malformed or out-of-contract input."""


class InsufficientData(DeloneLabError):
    """Too few points (or too low rank) to compute the requested quantity."""


class WindowTooSmall(DeloneLabError):
    """The materialized window cannot certify the requested radius."""


class InsufficientWindow(DeloneLabError):
    """The window does not admit the required number of sample boxes."""


class NeedsMoreTerms(DeloneLabError):
    """A finite continued fraction ran out of partial quotients."""


class ResourceLimit(DeloneLabError):
    """A big-integer or sample budget was exceeded."""


class DegenerateGeometry(DeloneLabError):
    """Point positions are too degenerate for a stable fit."""
