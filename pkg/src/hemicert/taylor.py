"""Taylor models in u = r^2 for radial expressions with removable singularities.

A ``TaylorModel`` stands for ``sum(c[i] * u**i) + u**K * R`` on ``u in [0, umax]``
with exact rational ``c`` and an interval remainder ``R``.  An ``RSeries`` is
``r**p`` times a Taylor model, which is how odd functions of r and quotients
such as ``F / sin(r)**2`` stay bounded at r = 0: the powers of r are
cancelled exactly before anything is evaluated.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np

from .interval import DomainError, Interval
from .poly import RPoly

__all__ = [
    "R_SWITCH",
    "DEFAULT_ORDER",
    "TaylorModel",
    "RSeries",
    "sin_series",
    "cos_series",
    "rpoly_series",
    "TAYLOR_TAGS",
    "taylor_enclosure",
]

R_SWITCH = Fraction(1, 8)
DEFAULT_ORDER = 12
_UMAX = R_SWITCH**2


def _range_on(coeffs, umax: Fraction) -> Interval:
    """Enclosure of a rational polynomial over [0, umax]."""
    u = Interval(0.0, float(Interval.coerce(umax).hi))
    acc = Interval(0.0)
    for c in reversed(coeffs):
        acc = acc * u + c
    return acc


def _upow_range(d: int, umax: Fraction) -> Interval:
    return Interval.coerce(Fraction(0)).hull(Interval.coerce(umax**d))


class TaylorModel:
    """Polynomial in u of order ``K`` plus ``u**K * rem`` on ``[0, umax]``."""

    __slots__ = ("coeffs", "rem", "umax", "_icoeffs")

    def __init__(self, coeffs, rem=None, umax: Fraction = _UMAX, order: int | None = None):
        coeffs = [Fraction(c) for c in coeffs]
        rem = Interval(0.0) if rem is None else Interval.coerce(rem)
        if order is not None:
            if len(coeffs) > order:
                # spill the high terms into the remainder
                for j in range(order, len(coeffs)):
                    if coeffs[j]:
                        rem = rem + Interval.coerce(coeffs[j]) * _upow_range(j - order, umax)
                coeffs = coeffs[:order]
            coeffs = coeffs + [Fraction(0)] * (order - len(coeffs))
        self.coeffs = tuple(coeffs)
        self.rem = rem
        self.umax = Fraction(umax)
        self._icoeffs = None

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def _check(self, other: "TaylorModel"):
        if self.umax != other.umax:
            raise ValueError("Taylor models live on different domains")

    def _to_order(self, order: int) -> "TaylorModel":
        if order == self.order:
            return self
        if order > self.order:
            raise ValueError("cannot raise the order of a Taylor model")
        rem = self.rem * _upow_range(self.order - order, self.umax)
        return TaylorModel(self.coeffs, rem, self.umax, order)

    def __add__(self, other):
        if not isinstance(other, TaylorModel):
            c = list(self.coeffs)
            c[0] += Fraction(other)
            return TaylorModel(c, self.rem, self.umax)
        self._check(other)
        k = min(self.order, other.order)
        a = self._to_order(k)
        b = other._to_order(k)
        return TaylorModel([x + y for x, y in zip(a.coeffs, b.coeffs)], a.rem + b.rem, self.umax)

    __radd__ = __add__

    def __neg__(self):
        return TaylorModel([-c for c in self.coeffs], -self.rem, self.umax)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, q) -> "TaylorModel":
        q = Fraction(q)
        return TaylorModel([q * c for c in self.coeffs], self.rem * q, self.umax)

    def __mul__(self, other):
        if not isinstance(other, TaylorModel):
            return self.scale(other)
        self._check(other)
        k = min(self.order, other.order)
        a = self._to_order(k)
        b = other._to_order(k)
        prod = [Fraction(0)] * (2 * k - 1 if k else 0)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    prod[i + j] += x * y
        rem = _range_on(a.coeffs, self.umax) * b.rem + _range_on(b.coeffs, self.umax) * a.rem
        rem = rem + _upow_range(k, self.umax) * (a.rem * b.rem)
        return TaylorModel(prod, rem, self.umax, order=k)

    __rmul__ = __mul__

    def shift(self, d: int) -> "TaylorModel":
        """Multiply by ``u**d``, keeping the order."""
        if d == 0:
            return self
        k = self.order
        rem = self.rem * _upow_range(d, self.umax)
        return TaylorModel([Fraction(0)] * d + list(self.coeffs), rem, self.umax, order=k)

    def strip_zeros(self) -> tuple[int, "TaylorModel"]:
        """Divide by the largest ``u**d`` that divides the model exactly."""
        d = 0
        while d < self.order and self.coeffs[d] == 0:
            d += 1
        if d == self.order:
            # nothing but remainder left; keep it as is
            return 0, self
        return d, TaylorModel(self.coeffs[d:], self.rem, self.umax)

    def range(self) -> Interval:
        return _range_on(self.coeffs, self.umax) + _upow_range(self.order, self.umax) * self.rem

    def reciprocal(self) -> "TaylorModel":
        """Taylor model of ``1 / self``; the constant term must be nonzero."""
        g = self.coeffs
        if not g or g[0] == 0:
            raise DomainError("reciprocal of a Taylor model vanishing at u = 0")
        k = self.order
        p = [Fraction(0)] * k
        p[0] = 1 / g[0]
        for i in range(1, k):
            acc = sum((g[j] * p[i - j] for j in range(1, i + 1)), Fraction(0))
            p[i] = -acc / g[0]
        inv = TaylorModel(p, None, self.umax)
        err = self * inv - 1
        assert all(c == 0 for c in err.coeffs)
        rng = self.range()
        if rng.lo <= 0 <= rng.hi:
            raise DomainError("Taylor model may vanish on its domain")
        return TaylorModel(p, -(err.rem / rng), self.umax)

    def _interval_coeffs(self):
        if self._icoeffs is None:
            self._icoeffs = [Interval.coerce(c) for c in self.coeffs]
        return self._icoeffs

    def __call__(self, u: Interval) -> Interval:
        u = Interval.coerce(u)
        if np.any(u.lo < 0) or np.any(Fraction(float(np.max(u.hi))) > self.umax):
            raise DomainError("u outside the Taylor model domain")
        acc = None
        for c in reversed(self._interval_coeffs()):
            acc = c if acc is None else acc * u + c
        if acc is None:
            acc = Interval(0.0)
        return acc + (u**self.order) * self.rem

    def __repr__(self):
        return f"TaylorModel(order={self.order}, c0={self.coeffs[0] if self.coeffs else 0}, rem={self.rem})"


class RSeries:
    """``r**p * tm(r**2)`` with ``p >= 0``."""

    __slots__ = ("p", "tm")

    def __init__(self, p: int, tm: TaylorModel):
        if p < 0:
            raise DomainError("negative power of r: the expression is singular at r = 0")
        self.p = p
        self.tm = tm

    def normalized(self) -> "RSeries":
        d, tm = self.tm.strip_zeros()
        return RSeries(self.p + 2 * d, tm) if d else self

    def __add__(self, other):
        if not isinstance(other, RSeries):
            other = RSeries(0, TaylorModel([Fraction(other)], None, self.tm.umax))
        a, b = self.normalized(), other.normalized()
        if (a.p - b.p) % 2:
            raise ValueError("adding series of different parity in r")
        if a.p > b.p:
            a, b = b, a
        return RSeries(a.p, a.tm + b.tm.shift((b.p - a.p) // 2)).normalized()

    __radd__ = __add__

    def __neg__(self):
        return RSeries(self.p, -self.tm)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, RSeries):
            return RSeries(self.p + other.p, self.tm * other.tm).normalized()
        return RSeries(self.p, self.tm.scale(other))

    __rmul__ = __mul__

    def divide_by_sin_power(self, j: int, order: int) -> "RSeries":
        """``self / sin(r)**j``, cancelling ``r**j`` exactly."""
        if j == 0:
            return self
        base = self.normalized()
        inv = sin_series(order).tm.reciprocal()
        out = base.tm
        for _ in range(j):
            out = out * inv
        return RSeries(base.p - j, out)

    def __call__(self, r) -> Interval:
        r = Interval.coerce(r)
        if np.any(r.lo < 0):
            raise DomainError("RSeries evaluated at negative r")
        val = self.tm(r.sqr())
        return val if self.p == 0 else (r**self.p) * val


@lru_cache(maxsize=None)
def sin_series(order: int = DEFAULT_ORDER) -> RSeries:
    """sin r = r * sum (-u)^i / (2i+1)!, alternating tail of known sign."""
    c = [Fraction((-1) ** i, factorial(2 * i + 1)) for i in range(order)]
    t = Fraction((-1) ** order, factorial(2 * order + 1))
    return RSeries(1, TaylorModel(c, Interval.coerce(min(t, 0)).hull(Interval.coerce(max(t, 0))), _UMAX))


@lru_cache(maxsize=None)
def cos_series(order: int = DEFAULT_ORDER) -> RSeries:
    """cos r = sum (-u)^i / (2i)!."""
    c = [Fraction((-1) ** i, factorial(2 * i)) for i in range(order)]
    t = Fraction((-1) ** order, factorial(2 * order))
    return RSeries(0, TaylorModel(c, Interval.coerce(min(t, 0)).hull(Interval.coerce(max(t, 0))), _UMAX))


def rpoly_series(p: RPoly, order: int = DEFAULT_ORDER) -> RSeries:
    """Exact RSeries of an even or odd polynomial (order grows to hold it)."""
    par = p.parity
    if par is None:
        raise ValueError("polynomial has mixed parity")
    start = 0 if par == "even" else 1
    c = list(p.coeffs[start::2]) or [Fraction(0)]
    k = max(order, len(c))
    return RSeries(start, TaylorModel(c, None, _UMAX, order=k)).normalized()


def _tag_numerators():
    # (numerator, power of sin r in the denominator); S = sin r, Co = cos r,
    # F0..F3 = F and its derivatives
    return {
        "F_over_sin2": (lambda S, Co, F0, F1, F2, F3: F0, 2),
        "Fdot_cot": (lambda S, Co, F0, F1, F2, F3: F1 * Co, 1),
        "W": (lambda S, Co, F0, F1, F2, F3: F1 * S - F0 * Co, 2),
    }


TAYLOR_TAGS = tuple(_tag_numerators())


def series_quantity(F: RPoly, numerator, sin_power: int, order: int = DEFAULT_ORDER) -> RSeries:
    """RSeries of ``numerator(S, Co, F0..F3) / sin(r)**sin_power``."""
    derivs = [F]
    for _ in range(3):
        derivs.append(derivs[-1].derive())
    fs = [rpoly_series(d, order) for d in derivs]
    num = numerator(sin_series(order), cos_series(order), *fs)
    return num.divide_by_sin_power(sin_power, order)


def taylor_enclosure(F: RPoly, tag: str, r, order: int = DEFAULT_ORDER) -> Interval:
    """Certified enclosure of a tagged removable-singularity composite of F near 0.

    Tags: ``F_over_sin2`` (F / sin^2 r), ``Fdot_cot`` (F' cot r) and ``W``
    ((F' - F cot r) / sin r).  ``r`` must lie in ``[0, R_SWITCH]``.
    """
    r = Interval.coerce(r)
    if np.any(r.lo < 0) or np.any(r.hi > float(R_SWITCH)):
        raise DomainError(f"taylor_enclosure needs r within [0, {R_SWITCH}]")
    try:
        numerator, j = _tag_numerators()[tag]
    except KeyError:
        raise ValueError(f"unknown tag {tag!r}; expected one of {TAYLOR_TAGS}") from None
    return series_quantity(F, numerator, j, order)(r)
