"""Configurable-precision reals.

Reals are mpmath ``mpf`` values. Precision is expressed in decimal digits at
the public surface and converted to bits internally.
"""

import math
import os

import mpmath

from .errors import ConfigError

Real = mpmath.mpf

PRECISION_ENV = "HYPERAIM_PRECISION_DIGITS"
FALLBACK_DIGITS = 100
MIN_BITS = 64


def default_digits() -> int:
    """Default working precision in decimal digits, overridable from the environment."""
    raw = os.environ.get(PRECISION_ENV)
    if raw is None or not raw.strip():
        return FALLBACK_DIGITS
    try:
        digits = int(raw)
    except ValueError:
        raise ConfigError(f"{PRECISION_ENV} must be an integer, got {raw!r}") from None
    if digits < 1:
        raise ConfigError(f"{PRECISION_ENV} must be positive, got {digits}")
    return digits


def digits_to_bits(digits: int) -> int:
    return max(MIN_BITS, math.ceil(digits * math.log2(10)))


def bits_to_digits(bits: int) -> int:
    return int(bits * math.log10(2))


def to_real(value, bits: int) -> Real:
    """Convert ``value`` (int, float, str, mpf) to a Real rounded to ``bits``."""
    with mpmath.workprec(bits):
        return mpmath.mpf(value)


def man_exp(value, bits: int) -> tuple[int, int]:
    """Exact (mantissa, exponent) pair of ``value`` rounded to ``bits``."""
    x = value if isinstance(value, mpmath.mpf) else to_real(value, bits)
    if not x:
        return 0, 0
    if not mpmath.isfinite(x):
        raise ValueError(f"non-finite value {value!r}")
    sign, m, e, _ = x._mpf_
    return (-int(m) if sign else int(m)), int(e)


def from_man_exp(m: int, e: int) -> Real:
    """Exact Real equal to m * 2**e."""
    with mpmath.workprec(max(MIN_BITS, int(m).bit_length() + 1)):
        return mpmath.mpf((int(m), int(e)))
