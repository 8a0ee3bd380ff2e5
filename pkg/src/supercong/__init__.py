"""Exact verification of a Ramanujan-type 1/pi supercongruence and its relatives."""

from .errors import DomainError, PoleError, PrecisionExhausted
from .exact import PadicScaled, congruent, padic_encode, vp

__all__ = [
    "DomainError",
    "PadicScaled",
    "PoleError",
    "PrecisionExhausted",
    "congruent",
    "padic_encode",
    "vp",
]

__version__ = "0.1.0"
