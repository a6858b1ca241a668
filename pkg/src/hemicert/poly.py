"""Exact polynomials in the radial variable r and in cos s.

``RPoly`` holds rational coefficients in r with a parity tag; the radial
profiles F of the conformal factor are even, their first derivatives odd.
``CosPoly`` holds rational coefficients in x = cos s, on which the
Laplace-Beltrami operator of S^n acts without leaving the class.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .interval import Interval
from .special import PiPowerValue, beta_half

__all__ = [
    "RPoly",
    "even_poly",
    "CosPoly",
    "poly_derive",
    "laplace_beltrami",
    "poly_eval_interval",
]


def _trim(coeffs) -> tuple[Fraction, ...]:
    c = [Fraction(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class RPoly:
    """Polynomial in r; ``coeffs[i]`` multiplies ``r**i``."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @property
    def parity(self) -> str | None:
        """'even', 'odd', or None when mixed (the zero polynomial is even)."""
        nz = [i for i, c in enumerate(self.coeffs) if c != 0]
        if all(i % 2 == 0 for i in nz):
            return "even"
        if all(i % 2 == 1 for i in nz):
            return "odd"
        return None

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def derive(self) -> "RPoly":
        return RPoly(tuple(i * c for i, c in enumerate(self.coeffs))[1:])

    def __add__(self, other: "RPoly") -> "RPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return RPoly(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self):
        return RPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, RPoly):
            if self.is_zero() or other.is_zero():
                return RPoly(())
            out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return RPoly(tuple(out))
        q = Fraction(other)
        return RPoly(tuple(q * c for c in self.coeffs))

    __rmul__ = __mul__

    def __call__(self, x):
        """Exact evaluation at a rational, float evaluation otherwise."""
        if isinstance(x, (int, Fraction)):
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def eval_interval(self, x) -> Interval:
        return poly_eval_interval(self, x)

    def divide_by_r(self, power: int = 1) -> "RPoly":
        """Exact division by ``r**power``; the low coefficients must vanish."""
        if any(c != 0 for c in self.coeffs[:power]):
            raise ValueError("polynomial is not divisible by that power of r")
        return RPoly(self.coeffs[power:])


def even_poly(coeffs: Sequence) -> RPoly:
    """Polynomial in r with ``coeffs[i]`` multiplying ``r**(2i)``."""
    out: list[Fraction] = []
    for c in coeffs:
        out.extend([Fraction(c), Fraction(0)])
    return RPoly(tuple(out))


@dataclass(frozen=True)
class CosPoly:
    """Polynomial in x = cos s; ``coeffs[i]`` multiplies ``x**i``."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def constant(cls, c) -> "CosPoly":
        return cls((Fraction(c),))

    @classmethod
    def x(cls) -> "CosPoly":
        return cls((Fraction(0), Fraction(1)))

    @classmethod
    def sin2_power(cls, k: int) -> "CosPoly":
        """sin^{2k} s = (1 - x^2)^k."""
        base = cls((Fraction(1), Fraction(0), Fraction(-1)))
        out = cls.constant(1)
        for _ in range(k):
            out = out * base
        return out

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if i < len(self.coeffs) else Fraction(0)

    def __add__(self, other):
        if not isinstance(other, CosPoly):
            other = CosPoly.constant(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return CosPoly(tuple(self.coeff(i) + other.coeff(i) for i in range(n)))

    __radd__ = __add__

    def __neg__(self):
        return CosPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, CosPoly):
            if self.is_zero() or other.is_zero():
                return CosPoly(())
            out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return CosPoly(tuple(out))
        q = Fraction(other)
        return CosPoly(tuple(q * c for c in self.coeffs))

    __rmul__ = __mul__

    def derive(self) -> "CosPoly":
        """d/dx."""
        return CosPoly(tuple(i * c for i, c in enumerate(self.coeffs))[1:])

    def __call__(self, x):
        if isinstance(x, (int, Fraction)):
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        if isinstance(x, Interval):
            return poly_eval_interval(self, x)
        acc = np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def of_s(self, s):
        """Float evaluation as a function of the angle s."""
        return self(np.cos(s))

    def sphere_integral(self, n: int) -> PiPowerValue:
        """Exact ``int_0^pi p(cos s) sin^{n-1} s ds`` (multiply by vol(S^{n-1}) for S^n).

        Odd powers of cos s integrate to zero; ``cos^{2j}`` gives
        ``B(j + 1/2, n/2)``.  For fixed ``n`` all terms carry the same power
        of sqrt(pi), so the sum stays of the form rational * sqrt(pi)**e.
        """
        if n < 1:
            raise ValueError("n >= 1 required")
        total = Fraction(0)
        power = beta_half(Fraction(1, 2), Fraction(n, 2)).half_power
        for i, c in enumerate(self.coeffs):
            if c == 0 or i % 2:
                continue
            b = beta_half(Fraction(i + 1, 2), Fraction(n, 2))
            assert b.half_power == power
            total += c * b.rational
        return PiPowerValue(total, power)


def poly_derive(p):
    """Exact formal derivative of an ``RPoly`` (d/dr) or ``CosPoly`` (d/dx)."""
    return p.derive()


def laplace_beltrami(f: CosPoly, n: int) -> CosPoly:
    """Laplace-Beltrami of S^n on a function of s alone, written in x = cos s.

    ``d_s^2 + (n-1) cot s d_s`` becomes ``(1 - x^2) f'' - n x f'``.
    """
    if n < 1:
        raise ValueError("n >= 1 required")
    d1 = f.derive()
    d2 = d1.derive()
    one_minus_x2 = CosPoly((Fraction(1), Fraction(0), Fraction(-1)))
    return one_minus_x2 * d2 - n * (CosPoly.x() * d1)


def poly_eval_interval(p, x) -> Interval:
    """Horner evaluation of an ``RPoly`` or ``CosPoly`` in interval arithmetic."""
    x = Interval.coerce(x)
    if not p.coeffs:
        return Interval(np.zeros_like(x.lo), np.zeros_like(x.hi))
    if isinstance(p, RPoly) and p.parity in ("even", "odd") and len(p.coeffs) > 1:
        # evaluate in u = x^2 to avoid the dependency loss of plain Horner
        start = 0 if p.parity == "even" else 1
        u = x.sqr()
        acc = None
        for c in reversed(p.coeffs[start::2]):
            acc = Interval.coerce(c) if acc is None else acc * u + c
        if acc.shape != x.shape:
            acc = acc + Interval(np.zeros_like(x.lo))
        return acc * x if start else acc
    acc = None
    for c in reversed(p.coeffs):
        acc = Interval.coerce(c) if acc is None else acc * x + c
    if acc.shape != x.shape:
        acc = acc + Interval(np.zeros_like(x.lo))
    return acc
