"""
Exception hierarchy for the rearrangement toolkit.
Every error raised by a toolkit operation derives from RearrangementKitError.
"""

from typing import Any, Optional


class RearrangementKitError(Exception):
    """Base class for all toolkit errors."""


class DomainError(RearrangementKitError, ValueError):
    """An argument lies outside the domain of an operation (negative values, p < 1, ...)."""


class ContractViolationError(RearrangementKitError, ValueError):
    """A caller-supplied map breaks the operation contract (e.g. phi(0) != 0)."""


class GridError(RearrangementKitError, ValueError):
    """Base class for grid construction and compatibility problems."""


class DegenerateGridError(GridError):
    """An axis has too few cells for the requested operation."""


class GridMismatchError(GridError):
    """Two fields do not share the spacing or layout an operation needs."""


class UnsupportedGridError(GridError):
    """The grid is valid but the operation does not support it (e.g. hx != hy)."""


class FieldFormatError(GridError):
    """A field file is malformed or not sampled on a uniform grid."""


class AmbiguousLevelError(RearrangementKitError, ValueError):
    """A level coincides with a sampled value, so crossing counts are undefined."""


class RangeError(RearrangementKitError, ValueError):
    """A tabulated nonlinearity is evaluated outside its sample range."""


class InvalidSpecError(RearrangementKitError, ValueError):
    """A nonlinearity spec fails its structural conditions or cannot be parsed."""


class DegenerateConstraintError(RearrangementKitError, ValueError):
    """A mass constraint has no admissible non-zero field."""


class DivergenceError(RearrangementKitError, RuntimeError):
    """The gradient flow produced a non-finite energy."""

    def __init__(self, message: str, last_stable: Optional[Any] = None, iteration: int = 0):
        super().__init__(message)
        self.last_stable = last_stable
        self.iteration = iteration
