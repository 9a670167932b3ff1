"""Exception types shared across the package.

The CLI maps these onto its exit-code contract; library code raises them
directly so callers can tell bad data from bad parameters.
"""

from __future__ import annotations


class PhomError(Exception):
    """Base class for errors raised by this package."""


class InputError(PhomError):
    """Malformed or unreadable input data (files, matrices, grids)."""


class ParameterError(PhomError):
    """A parameter value outside its documented domain."""


class InternalError(PhomError):
    """An internal invariant was violated; indicates a bug, not user error."""
