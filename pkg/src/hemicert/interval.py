"""Interval arithmetic with outward rounding on float64 endpoints.

Endpoints may be scalars or numpy arrays of equal shape; an array-valued
``Interval`` is a batch of independent intervals evaluated elementwise.
Rounding is emulated by stepping results one ulp outward (``nextafter``)
whenever the floating-point result may be inexact; sums use an error-free
transformation so exact sums stay tight.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational as _RationalABC

import numpy as np

__all__ = [
    "DomainError",
    "Interval",
    "PI",
    "HALF_PI",
    "interval_env",
    "ENV_TAGS",
]

# numpy transcendental kernels are accurate to a few ulp; widen by this many.
TRANSCENDENTAL_ULPS = 4


class DomainError(ValueError):
    """An interval operation left the domain of the enclosed function."""


def _down(x):
    return np.nextafter(x, -np.inf)


def _up(x):
    return np.nextafter(x, np.inf)


def _down_n(x, n=TRANSCENDENTAL_ULPS):
    for _ in range(n):
        x = _down(x)
    return x


def _up_n(x, n=TRANSCENDENTAL_ULPS):
    for _ in range(n):
        x = _up(x)
    return x


def _as_float(x):
    if isinstance(x, np.ndarray):
        return x.astype(np.float64, copy=False)
    return np.float64(x)


def _fraction_bounds(q: Fraction) -> tuple[float, float]:
    f = float(q)
    e = Fraction(f)
    if e == q:
        return f, f
    if e < q:
        return f, float(_up(f))
    return float(_down(f)), f


def _two_sum_bounds(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    lo = np.where(err < 0, _down(s), s)
    hi = np.where(err > 0, _up(s), s)
    if np.ndim(lo) == 0:
        return np.float64(lo), np.float64(hi)
    return lo, hi


_SPLITTER = 134217729.0  # 2**27 + 1


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _prod_err(x, y, p):
    """Rounding error of ``p = fl(x*y)`` by Dekker's exact product (no overflow assumed)."""
    with np.errstate(over="ignore", invalid="ignore"):
        xh, xl = _split(x)
        yh, yl = _split(y)
        err = ((xh * yh - p) + xh * yl + xl * yh) + xl * yl
    # NaN marks "inexact, direction unknown": splitting overflowed, or the
    # product is so small that the error term underflows
    tiny = (np.abs(p) < 2.0**-900) & (x != 0) & (y != 0)
    return np.where(np.isfinite(err) & ~tiny, err, np.nan)


def _prod_dn(x, y):
    p = x * y
    err = _prod_err(x, y, p)
    inexact = (err < 0) | np.isnan(err)
    return np.where(inexact, _down(p), p) if np.ndim(p) else (_down(p) if inexact else p)


def _prod_up(x, y):
    p = x * y
    err = _prod_err(x, y, p)
    inexact = (err > 0) | np.isnan(err)
    return np.where(inexact, _up(p), p) if np.ndim(p) else (_up(p) if inexact else p)


def _scalarize(v):
    if np.ndim(v) == 0:
        return np.float64(v)
    return v


class Interval:
    """Closed interval ``[lo, hi]`` (or a batch of them).

    Instances are immutable.  Arithmetic accepts other intervals, ints,
    floats and ``Fraction`` values; rationals are enclosed exactly.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        lo = _as_float(lo)
        hi = _as_float(hi)
        if isinstance(lo, np.ndarray) or isinstance(hi, np.ndarray):
            lo, hi = np.broadcast_arrays(lo, hi)
            lo = np.array(lo, dtype=np.float64)
            hi = np.array(hi, dtype=np.float64)
            lo.flags.writeable = False
            hi.flags.writeable = False
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise DomainError("NaN endpoint")
        if np.any(lo > hi):
            raise ValueError(f"empty interval: lo={lo!r} > hi={hi!r}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("Interval is immutable")

    # -- construction -------------------------------------------------
    @classmethod
    def coerce(cls, x) -> "Interval":
        if isinstance(x, Interval):
            return x
        if isinstance(x, Fraction) or (
            isinstance(x, _RationalABC) and not isinstance(x, (int, bool))
        ):
            return cls(*_fraction_bounds(Fraction(x)))
        if isinstance(x, (int, np.integer)):
            if abs(int(x)) <= 2**53:
                return cls(float(x))
            return cls(*_fraction_bounds(Fraction(int(x))))
        return cls(x)

    @classmethod
    def hull_of(cls, *items) -> "Interval":
        ivs = [cls.coerce(i) for i in items]
        lo = ivs[0].lo
        hi = ivs[0].hi
        for iv in ivs[1:]:
            lo = np.minimum(lo, iv.lo)
            hi = np.maximum(hi, iv.hi)
        return cls(lo, hi)

    # -- properties ---------------------------------------------------
    @property
    def shape(self):
        return np.shape(self.lo)

    @property
    def mid(self):
        # halving first avoids overflow; the clip guards against subnormal underflow
        return _scalarize(np.clip(0.5 * self.lo + 0.5 * self.hi, self.lo, self.hi))

    @property
    def width(self):
        return _scalarize(_up(self.hi - self.lo))

    @property
    def rad(self):
        m = self.mid
        return _scalarize(np.maximum(_up(m - self.lo), _up(self.hi - m)))

    @property
    def mag(self):
        return _scalarize(np.maximum(np.abs(self.lo), np.abs(self.hi)))

    def __len__(self):
        return len(self.lo)

    def __getitem__(self, idx):
        return Interval(self.lo[idx], self.hi[idx])

    def contains(self, x) -> bool | np.ndarray:
        """True where ``x`` (number, Fraction or interval) lies inside."""
        if isinstance(x, Fraction):
            q_lo, q_hi = _fraction_bounds(x)
            if q_lo != q_hi:
                # the rational sits strictly between two floats
                return (self.lo <= q_lo) & (q_hi <= self.hi)
            x = q_lo
        if isinstance(x, Interval):
            return (self.lo <= x.lo) & (x.hi <= self.hi)
        return (self.lo <= x) & (x <= self.hi)

    def subset_of(self, other) -> bool | np.ndarray:
        other = Interval.coerce(other)
        return (other.lo <= self.lo) & (self.hi <= other.hi)

    def overlaps(self, other) -> bool | np.ndarray:
        other = Interval.coerce(other)
        return (self.lo <= other.hi) & (other.lo <= self.hi)

    def hull(self, other) -> "Interval":
        return Interval.hull_of(self, other)

    def intersect(self, other) -> "Interval":
        other = Interval.coerce(other)
        lo = np.maximum(self.lo, other.lo)
        hi = np.minimum(self.hi, other.hi)
        if np.any(lo > hi):
            raise DomainError("empty intersection")
        return Interval(lo, hi)

    def split(self) -> tuple["Interval", "Interval"]:
        m = self.mid
        return Interval(self.lo, m), Interval(m, self.hi)

    # -- arithmetic ---------------------------------------------------
    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __pos__(self):
        return self

    def __add__(self, other):
        o = Interval.coerce(other)
        lo, _ = _two_sum_bounds(self.lo, o.lo)
        _, hi = _two_sum_bounds(self.hi, o.hi)
        return Interval(lo, hi)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-Interval.coerce(other))

    def __rsub__(self, other):
        return Interval.coerce(other) + (-self)

    def __mul__(self, other):
        o = Interval.coerce(other)
        a, b, c, d = self.lo, self.hi, o.lo, o.hi
        lo = np.minimum(
            np.minimum(_prod_dn(a, c), _prod_dn(a, d)),
            np.minimum(_prod_dn(b, c), _prod_dn(b, d)),
        )
        hi = np.maximum(
            np.maximum(_prod_up(a, c), _prod_up(a, d)),
            np.maximum(_prod_up(b, c), _prod_up(b, d)),
        )
        return Interval(_scalarize(lo), _scalarize(hi))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Interval.coerce(other)
        if np.any((o.lo <= 0) & (o.hi >= 0)):
            raise DomainError("division by an interval containing zero")
        a, b, c, d = self.lo, self.hi, o.lo, o.hi
        with np.errstate(over="ignore", under="ignore"):
            qs = (a / c, a / d, b / c, b / d)
        num = (a, a, b, b)
        lo = hi = None
        for q, n in zip(qs, num):
            ql = np.where(n == 0, q, _down(q))
            qh = np.where(n == 0, q, _up(q))
            lo = ql if lo is None else np.minimum(lo, ql)
            hi = qh if hi is None else np.maximum(hi, qh)
        return Interval(_scalarize(lo), _scalarize(hi))

    def __rtruediv__(self, other):
        return Interval.coerce(other) / self

    def sqr(self) -> "Interval":
        a, b = self.lo, self.hi
        lo2 = _prod_dn(a, a)
        hi2 = _prod_up(a, a)
        lob = _prod_dn(b, b)
        hib = _prod_up(b, b)
        straddle = (a < 0) & (b > 0)
        lo = np.where(straddle, 0.0, np.minimum(lo2, lob))
        hi = np.maximum(hi2, hib)
        return Interval(_scalarize(lo), _scalarize(hi))

    def __pow__(self, k: int):
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise ValueError("only nonnegative integer powers are supported")
        if k == 0:
            return Interval(np.ones_like(self.lo), np.ones_like(self.hi))
        if k == 1:
            return self
        half = self ** (k // 2)
        sq = half.sqr()
        if k % 2:
            return sq * self
        return sq

    def __abs__(self):
        a, b = self.lo, self.hi
        lo = np.where((a <= 0) & (b >= 0), 0.0, np.minimum(np.abs(a), np.abs(b)))
        hi = np.maximum(np.abs(a), np.abs(b))
        return Interval(_scalarize(lo), _scalarize(hi))

    def sqrt(self) -> "Interval":
        if np.any(self.lo < 0):
            raise DomainError("sqrt of negative interval")
        lo = np.sqrt(self.lo)
        hi = np.sqrt(self.hi)
        # keep a root only when its exact square is on the correct side
        lo = np.where(_prod_up(lo, lo) <= self.lo, lo, _down(lo))
        hi = np.where(_prod_dn(hi, hi) >= self.hi, hi, _up(hi))
        return Interval(_scalarize(np.maximum(lo, 0.0)), _scalarize(hi))

    # -- comparisons returning certainty ---------------------------------
    def certainly_lt(self, x):
        return self.hi < Interval.coerce(x).lo

    def certainly_le(self, x):
        return self.hi <= Interval.coerce(x).lo

    def certainly_gt(self, x):
        return self.lo > Interval.coerce(x).hi

    def certainly_ge(self, x):
        return self.lo >= Interval.coerce(x).hi

    def __repr__(self):
        if np.ndim(self.lo) == 0:
            return f"Interval({float(self.lo)!r}, {float(self.hi)!r})"
        return f"Interval(shape={self.shape})"

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        return bool(np.all(self.lo == other.lo) and np.all(self.hi == other.hi))

    __hash__ = None


PI = Interval(math.pi, float(_up(math.pi)))
HALF_PI = Interval(math.pi / 2, float(_up(math.pi / 2)))


# ---------------------------------------------------------------------------
# elementary enclosures


def _nudged(values, inputs, exact_at_zero_input, exact_value):
    """Widen a transcendental evaluation outward, keeping exact special points."""
    dn = _down_n(values)
    up = _up_n(values)
    if exact_at_zero_input:
        dn = np.where(inputs == 0, exact_value, dn)
        up = np.where(inputs == 0, exact_value, up)
    return dn, up


def _contains_point_mod(x: Interval, offset: float, period: float):
    """Conservatively test whether ``offset + period*k`` lies in ``x`` for some k."""
    slack = 1e-12
    t_lo = (x.lo - offset) / period
    t_hi = (x.hi - offset) / period
    return np.floor(t_lo - slack) != np.floor(t_hi + slack)


def _sin(x: Interval) -> Interval:
    v_lo = np.sin(x.lo)
    v_hi = np.sin(x.hi)
    a_dn, a_up = _nudged(v_lo, x.lo, True, 0.0)
    b_dn, b_up = _nudged(v_hi, x.hi, True, 0.0)
    lo = np.minimum(a_dn, b_dn)
    hi = np.maximum(a_up, b_up)
    hi = np.where(_contains_point_mod(x, math.pi / 2, 2 * math.pi), 1.0, hi)
    lo = np.where(_contains_point_mod(x, -math.pi / 2, 2 * math.pi), -1.0, lo)
    return Interval(_scalarize(np.maximum(lo, -1.0)), _scalarize(np.minimum(hi, 1.0)))


def _cos(x: Interval) -> Interval:
    v_lo = np.cos(x.lo)
    v_hi = np.cos(x.hi)
    a_dn, a_up = _nudged(v_lo, x.lo, True, 1.0)
    b_dn, b_up = _nudged(v_hi, x.hi, True, 1.0)
    lo = np.minimum(a_dn, b_dn)
    hi = np.maximum(a_up, b_up)
    hi = np.where(_contains_point_mod(x, 0.0, 2 * math.pi), 1.0, hi)
    lo = np.where(_contains_point_mod(x, math.pi, 2 * math.pi), -1.0, lo)
    return Interval(_scalarize(np.maximum(lo, -1.0)), _scalarize(np.minimum(hi, 1.0)))


def _check_within(x: Interval, lo: float, hi: float, name: str, open_lo=False, open_hi=False):
    bad = (x.lo < lo) | (x.hi > hi)
    if open_lo:
        bad = bad | (x.lo <= lo)
    if open_hi:
        bad = bad | (x.hi >= hi)
    if np.any(bad):
        raise DomainError(f"{name}: argument outside supported domain")


def _xcot_point(x):
    """x*cot(x) at float points in [0, pi), value at 0 is 1."""
    safe = np.where(x == 0, 1.0, x)
    v = safe * np.cos(safe) / np.sin(safe)
    return np.where(x == 0, 1.0, v)


def _x2_over_sin2_point(x):
    safe = np.where(x == 0, 1.0, x)
    q = safe / np.sin(safe)
    return np.where(x == 0, 1.0, q * q)


# composite kernels use three or four roundings on top of the libm error
_COMPOSITE_ULPS = 3 * TRANSCENDENTAL_ULPS


def _xcot(x: Interval) -> Interval:
    # even, strictly decreasing in |x| on [0, pi)
    _check_within(x, -math.pi, math.pi, "x*cot(x)", open_lo=True, open_hi=True)
    a = np.abs(x.lo)
    b = np.abs(x.hi)
    near = np.minimum(a, b)
    near = np.where((x.lo <= 0) & (x.hi >= 0), 0.0, near)
    far = np.maximum(a, b)
    top = _xcot_point(near)
    bot = _xcot_point(far)
    hi = np.where(near == 0, 1.0, np.minimum(_up_n(top, _COMPOSITE_ULPS), 1.0))
    lo = np.where(far == 0, 1.0, _down_n(bot, _COMPOSITE_ULPS))
    return Interval(_scalarize(lo), _scalarize(hi))


def _x2_over_sin2(x: Interval) -> Interval:
    # even, strictly increasing in |x| on [0, pi)
    _check_within(x, -math.pi, math.pi, "x^2/sin^2(x)", open_lo=True, open_hi=True)
    a = np.abs(x.lo)
    b = np.abs(x.hi)
    near = np.where((x.lo <= 0) & (x.hi >= 0), 0.0, np.minimum(a, b))
    far = np.maximum(a, b)
    lo = np.where(near == 0, 1.0, np.maximum(_down_n(_x2_over_sin2_point(near), _COMPOSITE_ULPS), 1.0))
    hi = np.where(far == 0, 1.0, _up_n(_x2_over_sin2_point(far), _COMPOSITE_ULPS))
    return Interval(_scalarize(lo), _scalarize(hi))


def _inv_sin2(x: Interval) -> Interval:
    _check_within(x, 0.0, math.pi, "1/sin^2", open_lo=True, open_hi=True)
    s = _sin(x)
    if np.any(s.lo <= 0):
        raise DomainError("1/sin^2: pole inside interval")
    return 1 / s.sqr()


def _cot(x: Interval) -> Interval:
    _check_within(x, 0.0, math.pi, "cot", open_lo=True, open_hi=True)
    # strictly decreasing on (0, pi)
    c_lo = np.cos(x.hi) / np.sin(x.hi)
    c_hi = np.cos(x.lo) / np.sin(x.lo)
    return Interval(_scalarize(_down_n(c_lo, _COMPOSITE_ULPS)), _scalarize(_up_n(c_hi, _COMPOSITE_ULPS)))


def _sin2(x: Interval) -> Interval:
    return _sin(x).sqr()


_ENV = {
    "sin": _sin,
    "cos": _cos,
    "sin2": _sin2,
    "xcot": _xcot,
    "x2_over_sin2": _x2_over_sin2,
    "inv_sin2": _inv_sin2,
    "cot": _cot,
}

ENV_TAGS = tuple(_ENV)


def interval_env(expr: str, x) -> Interval:
    """Certified enclosure of an elementary expression over ``x``.

    ``expr`` is one of ``sin``, ``cos``, ``sin2`` (sin squared), ``xcot``
    (x cot x, extended by 1 at 0), ``x2_over_sin2`` (extended by 1 at 0),
    ``inv_sin2`` and ``cot``.  Raises ``DomainError`` when ``x`` reaches a
    pole that has no removable factor.
    """
    try:
        fn = _ENV[expr]
    except KeyError:
        raise ValueError(f"unknown expression tag {expr!r}; expected one of {ENV_TAGS}") from None
    return fn(Interval.coerce(x))
