"""Gamma and beta values at half-integer arguments, kept exact.

For ``x`` a positive half-integer, ``Gamma(x) = q * sqrt(pi)**e`` with ``q``
rational and ``e`` in ``{0, 1}``.  A beta value is then a rational times a
power of ``sqrt(pi)``; a ratio of beta values is rational exactly when the
powers agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

import mpmath

from .interval import Interval

__all__ = [
    "PiPowerValue",
    "BetaRatio",
    "gamma_half",
    "beta_half",
    "beta_ratio",
    "sphint_ratio",
    "sphere_volume",
    "sphere_volume_interval",
]


@dataclass(frozen=True)
class PiPowerValue:
    """``rational * sqrt(pi)**half_power``."""

    rational: Fraction
    half_power: int

    def __mul__(self, other: "PiPowerValue") -> "PiPowerValue":
        return PiPowerValue(self.rational * other.rational, self.half_power + other.half_power)

    def __truediv__(self, other: "PiPowerValue") -> "PiPowerValue":
        return PiPowerValue(self.rational / other.rational, self.half_power - other.half_power)

    def __float__(self) -> float:
        return float(self.to_mpf())

    def to_mpf(self, dps: int = 40):
        with mpmath.workdps(dps):
            return mpmath.mpf(self.rational.numerator) / self.rational.denominator * mpmath.sqrt(mpmath.pi) ** self.half_power


@dataclass(frozen=True)
class BetaRatio:
    """A ratio of beta values whose sqrt(pi) content cancels."""

    value: Fraction

    def __float__(self) -> float:
        return float(self.value)


def _half_integer(x) -> Fraction:
    q = Fraction(x)
    if q <= 0 or (2 * q).denominator != 1:
        raise ValueError(f"expected a positive half-integer, got {x!r}")
    return q


@lru_cache(maxsize=None)
def gamma_half(x: Fraction) -> PiPowerValue:
    """Gamma at a positive integer or half-integer."""
    x = _half_integer(x)
    if x.denominator == 1:
        return PiPowerValue(Fraction(factorial(int(x) - 1)), 0)
    m = int(x - Fraction(1, 2))
    # Gamma(m + 1/2) = (2m)! / (4^m m!) sqrt(pi)
    return PiPowerValue(Fraction(factorial(2 * m), 4**m * factorial(m)), 1)


def beta_half(p, q) -> PiPowerValue:
    """B(p, q) for positive half-integers, as rational * sqrt(pi)**e."""
    p = _half_integer(p)
    q = _half_integer(q)
    return gamma_half(p) * gamma_half(q) / gamma_half(p + q)


def beta_ratio(num: tuple, den: tuple) -> BetaRatio:
    """Exact ``B(*num) / B(*den)``.

    Raises ``ValueError`` when the sqrt(pi) factors do not cancel, i.e. the
    ratio is not rational.
    """
    r = beta_half(*num) / beta_half(*den)
    if r.half_power != 0:
        raise ValueError(
            f"B{tuple(map(str, num))}/B{tuple(map(str, den))} carries sqrt(pi)^{r.half_power}; not rational"
        )
    return BetaRatio(r.rational)


def sphint_ratio(n: int, k: int, shift: int = 0) -> BetaRatio:
    """``B(k + shift + n/2, 1/2) / B(n/2, 3/2)``, the ratio in the mu formulas."""
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    half_n = Fraction(n, 2)
    return beta_ratio((k + shift + half_n, Fraction(1, 2)), (half_n, Fraction(3, 2)))


def sphere_volume(n: int, dps: int = 40):
    """Volume of the unit n-sphere S^n as an mpmath float."""
    with mpmath.workdps(dps):
        return 2 * mpmath.pi ** (mpmath.mpf(n + 1) / 2) / mpmath.gamma(mpmath.mpf(n + 1) / 2)


def sphere_volume_interval(n: int) -> Interval:
    """Certified enclosure of vol(S^n)."""
    with mpmath.workdps(60):
        v = sphere_volume(n, dps=60)
        lo = float(mpmath.mpf(v) * (1 - mpmath.mpf(2) ** -50))
        hi = float(mpmath.mpf(v) * (1 + mpmath.mpf(2) ** -50))
    return Interval(lo, hi)
