"""Exception types shared across the package."""

from __future__ import annotations


class PrecisionExhausted(ArithmeticError):
    """A p-adic result would depend on digits beyond the tracked precision."""


class PoleError(ZeroDivisionError):
    """A Pochhammer factor vanished where a finite value was required."""


class DomainError(ValueError):
    """An argument falls outside the hypothesis of the requested operation."""
