"""Radial composites of an even profile F with sin r, cos r and their quotients.

Every quantity is a numerator polynomial in (sin r, cos r, F, F', F'', F''')
over a power of sin r.  The same numerator is evaluated either on Taylor
models (r <= R_SWITCH, where the quotient has a removable singularity) or
directly in interval arithmetic (r >= R_SWITCH).  All quantities are linear
in F, so they are computed for the unnormalized profile and scaled by an
interval normalizer afterwards.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, NamedTuple

import numpy as np

from .interval import DomainError, Interval, interval_env
from .poly import RPoly, poly_eval_interval
from .taylor import DEFAULT_ORDER, R_SWITCH, RSeries, series_quantity

__all__ = ["Composite", "COMPOSITES", "RadialProfile"]


class Composite(NamedTuple):
    numerator: Callable
    sin_power: int
    description: str


def _c(fn, j, text):
    return Composite(fn, j, text)


# S = sin r, Co = cos r, F0..F3 = F, F', F'', F'''
COMPOSITES: dict[str, Composite] = {
    "Q1": _c(lambda S, Co, F0, F1, F2, F3: F0, 0, "F"),
    "Q2": _c(lambda S, Co, F0, F1, F2, F3: F1, 0, "F'"),
    "Q3": _c(lambda S, Co, F0, F1, F2, F3: F2, 0, "F''"),
    "Q4": _c(lambda S, Co, F0, F1, F2, F3: F3, 0, "F'''"),
    "Q5": _c(lambda S, Co, F0, F1, F2, F3: F1 * S - 2 * F0 * Co, 3, "(F' - 2F cot r)/sin^2 r"),
    "Q6": _c(lambda S, Co, F0, F1, F2, F3: F0, 2, "F/sin^2 r"),
    "Q7": _c(
        lambda S, Co, F0, F1, F2, F3: F2 * S * S + 3 * F1 * Co * S + 4 * F0 * S * S - 2 * F0,
        2,
        "F'' + 3F' cot r + 4F - 2F/sin^2 r",
    ),
    "Q8": _c(
        lambda S, Co, F0, F1, F2, F3: F2 * S * S + F1 * Co * S + 2 * F0 * S * S - F0,
        2,
        "F'' + F' cot r + 2F - F/sin^2 r",
    ),
    "Q9": _c(
        lambda S, Co, F0, F1, F2, F3: F2 * S * S + 2 * F1 * Co * S + 4 * F0 * S * S - 6 * F0,
        2,
        "F'' + 2F' cot r + 4F - 6F/sin^2 r",
    ),
    "Q10": _c(
        lambda S, Co, F0, F1, F2, F3: 2 * F2 * S * S + 3 * F1 * Co * S + 4 * F0 * S * S - 4 * F0,
        2,
        "2F'' + 3F' cot r + 4F - 4F/sin^2 r",
    ),
    "Q11": _c(
        lambda S, Co, F0, F1, F2, F3: 2 * F2 * S * S + 3 * F1 * Co * S + 4 * F0 * S * S - 10 * F0,
        2,
        "2F'' + 3F' cot r + 4F - 10F/sin^2 r",
    ),
    "Q12": _c(
        lambda S, Co, F0, F1, F2, F3: F2 * S * S + 2 * F1 * Co * S + 4 * F0 * S * S - 2 * F0,
        2,
        "F'' + 2F' cot r + 4F - 2F/sin^2 r",
    ),
    "Q13": _c(lambda S, Co, F0, F1, F2, F3: F1 * Co * S - 3 * F0, 2, "F' cot r - 3F/sin^2 r"),
    "Q14": _c(lambda S, Co, F0, F1, F2, F3: F1 * S - F0 * Co, 2, "(F' - F cot r)/sin r"),
    "Q15": _c(
        lambda S, Co, F0, F1, F2, F3: F2 * S * S - 2 * F1 * Co * S - F0 * S * S + 2 * F0,
        3,
        "(F'' - 2F' cot r - F + 2F/sin^2 r)/sin r",
    ),
    "Q16": _c(lambda S, Co, F0, F1, F2, F3: F2 * Co * S - F1, 2, "F'' cot r - F'/sin^2 r"),
    "Q17": _c(lambda S, Co, F0, F1, F2, F3: F1 * Co, 1, "F' cot r"),
    "Q18": _c(
        lambda S, Co, F0, F1, F2, F3: F3 * S * S * S
        + 2 * F2 * Co * S * S
        + 4 * F1 * S * S * S
        - 4 * F1 * S
        + 4 * F0 * Co,
        3,
        "F''' + 2F'' cot r + 4F' - 4F'/sin^2 r + 4F cot r/sin^2 r",
    ),
}
# the Hessian uses three of them under their own names
COMPOSITES["P"] = COMPOSITES["Q6"]
COMPOSITES["T"] = COMPOSITES["Q17"]
COMPOSITES["W"] = COMPOSITES["Q14"]


class RadialProfile:
    """An even profile ``F = Ftilde * scale`` with cached Taylor models.

    ``Ftilde`` has rational coefficients and ``scale`` is an ``Interval``
    (the reciprocal of the normalizing constant), or 1.
    """

    def __init__(self, Ftilde: RPoly, scale=1, order: int = DEFAULT_ORDER, r_switch: Fraction = R_SWITCH):
        if Ftilde.parity != "even":
            raise ValueError("radial profile must be even in r")
        if Ftilde.coeffs and Ftilde.coeffs[0] != 0:
            raise ValueError("radial profile must vanish at r = 0")
        self.Ftilde = Ftilde
        self.derivs = [Ftilde]
        for _ in range(3):
            self.derivs.append(self.derivs[-1].derive())
        self.scale = Interval.coerce(scale)
        self.order = order
        self.r_switch = float(r_switch)
        self._series: dict[str, RSeries] = {}

    def series(self, name: str) -> RSeries:
        if name not in self._series:
            comp = COMPOSITES[name]
            self._series[name] = series_quantity(self.Ftilde, comp.numerator, comp.sin_power, self.order)
        return self._series[name]

    def _direct(self, name: str, r: Interval) -> Interval:
        comp = COMPOSITES[name]
        S = interval_env("sin", r)
        Co = interval_env("cos", r)
        Fs = [poly_eval_interval(d, r) for d in self.derivs]
        num = comp.numerator(S, Co, *Fs)
        if comp.sin_power == 0:
            return num
        return num / S**comp.sin_power

    def unscaled(self, name: str, r) -> Interval:
        """Enclosure of the quantity for ``Ftilde`` over ``r`` (scalar or batch).

        Boxes must not straddle ``r_switch``; split them first.
        """
        r = Interval.coerce(r)
        if np.any(r.lo < 0):
            raise DomainError("negative r")
        if np.ndim(r.lo) == 0:
            if r.hi <= self.r_switch:
                return self.series(name)(r)
            if r.lo >= self.r_switch:
                return self._direct(name, r)
            raise DomainError("box straddles the Taylor switch point; split it")
        near = r.hi <= self.r_switch
        far = r.lo >= self.r_switch
        if not np.all(near | far):
            raise DomainError("box straddles the Taylor switch point; split it")
        lo = np.empty_like(r.lo)
        hi = np.empty_like(r.hi)
        for mask, fn in ((near, self.series(name)), (far, lambda x: self._direct(name, x))):
            if np.any(mask):
                v = fn(Interval(r.lo[mask], r.hi[mask]))
                lo[mask] = v.lo
                hi[mask] = v.hi
        return Interval(lo, hi)

    def enclose(self, name: str, r) -> Interval:
        """Enclosure of the normalized quantity, splitting at the switch point if needed."""
        r = Interval.coerce(r)
        if np.ndim(r.lo) == 0 and r.lo < self.r_switch < r.hi:
            a = self.unscaled(name, Interval(r.lo, self.r_switch))
            b = self.unscaled(name, Interval(self.r_switch, r.hi))
            return a.hull(b) * self.scale
        if np.ndim(r.lo) and np.any((r.lo < self.r_switch) & (self.r_switch < r.hi)):
            straddle = (r.lo < self.r_switch) & (self.r_switch < r.hi)
            lo_part = Interval(r.lo, np.where(straddle, self.r_switch, r.hi))
            hi_part = Interval(np.where(straddle, self.r_switch, r.lo), r.hi)
            a = self.unscaled(name, lo_part)
            b = self.unscaled(name, hi_part)
            return a.hull(b) * self.scale
        return self.unscaled(name, r) * self.scale

    def float_values(self, name: str, r: np.ndarray) -> np.ndarray:
        """Plain float64 evaluation (r > 0), for oracles and plots."""
        comp = COMPOSITES[name]
        r = np.asarray(r, dtype=float)
        S, Co = np.sin(r), np.cos(r)
        Fs = [np.polynomial.polynomial.polyval(r, [float(c) for c in d.coeffs] or [0.0]) for d in self.derivs]
        num = comp.numerator(S, Co, *Fs)
        return num / S**comp.sin_power * float(self.scale.mid)
