"""Exception types shared across the package.

The CLI maps these onto process exit codes: configuration problems exit
with 2, :class:`DomainError` (and subclasses) with 3, and
:class:`NumericalError` with 4.
"""

from __future__ import annotations


class ReflcopError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ReflcopError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InfiniteQuantileError(DomainError):
    """Quantile requested at probability 0 or 1, where it is infinite."""


class RangeError(DomainError):
    """A calibration target lies outside the attainable range.

    Attributes
    ----------
    valid_range : tuple of float, optional
        The attainable closed interval, when known.
    """

    def __init__(self, message: str, valid_range: tuple[float, float] | None = None):
        super().__init__(message)
        self.valid_range = valid_range


class NumericalError(ReflcopError, RuntimeError):
    """A numerical routine failed to converge to the requested accuracy."""
