"""First-order variation of the first eigenvalue of the equator S^n.

For a boundary conformal factor ``f = a - b (1 - x_n^2)^k`` the (n+1)-fold
eigenvalue n splits into ``mu_n`` (along x_n) and a common value for the
other coordinates.  Everything reduces to two sphere moments

    int (1 - x_n^2)^k       = B(k + n/2, 1/2) * vol(S^{n-1})
    int x_n^2 (1 - x_n^2)^k = B(k + n/2, 3/2) * vol(S^{n-1})

so the eigenvalue variations are rational whenever a and b are.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from scipy import integrate

from .poly import CosPoly
from .special import PiPowerValue, beta_half, sphere_volume, sphint_ratio

__all__ = [
    "QuadratureError",
    "SphereMoment",
    "SpectralVariation",
    "sphere_moment",
    "mu_values",
    "sign_pattern_check",
    "quadrature_oracle",
    "offdiagonal_quadrature",
    "quadrature_mu_n",
    "gamma_check",
]

QUAD_ABS_TOL = 1e-12


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach its tolerance."""


@dataclass(frozen=True)
class SphereMoment:
    """The two moments of ``(1 - x_n^2)^k`` over S^n, as beta parts times vol(S^{n-1})."""

    n: int
    k: int
    plain: PiPowerValue
    weighted: PiPowerValue

    @property
    def ratio(self) -> Fraction:
        """weighted / plain, always ``1 / (2k + n + 1)``."""
        q = self.weighted / self.plain
        assert q.half_power == 0
        return q.rational

    def plain_value(self) -> float:
        return float(self.plain.to_mpf() * sphere_volume(self.n - 1))

    def weighted_value(self) -> float:
        return float(self.weighted.to_mpf() * sphere_volume(self.n - 1))


def sphere_moment(n: int, k: int) -> SphereMoment:
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    half_n = Fraction(n, 2)
    plain = beta_half(k + half_n, Fraction(1, 2))
    weighted = beta_half(k + half_n, Fraction(3, 2))
    sm = SphereMoment(n, k, plain, weighted)
    if sm.ratio != Fraction(1, 2 * k + n + 1):
        raise ArithmeticError("beta identity violated")  # pragma: no cover
    return sm


@dataclass(frozen=True)
class SpectralVariation:
    n: int
    k: int
    a: Fraction
    b: Fraction
    mu_n: Fraction
    mu_common: Fraction
    mu_sum: Fraction


def mu_values(n: int, k: int, a, b) -> SpectralVariation:
    """Exact eigenvalue variations for ``f|_Sigma = a - b sin^{2k} s``."""
    if n < 2 or k < 1:
        raise ValueError("need n >= 2 and k >= 1")
    a = Fraction(a)
    b = Fraction(b)
    R = sphint_ratio(n, k).value
    mu_sum = -n * (n + 1) * a + n * R * b
    mu_n = -n * a - b / (2 * k + n + 1) * R * (k * (n - 2) - n)
    mu_common = (mu_sum - mu_n) / n
    assert mu_sum == mu_n + n * mu_common
    return SpectralVariation(n, k, a, b, mu_n, mu_common, mu_sum)


def sign_pattern_check(sv: SpectralVariation) -> str:
    """PASS iff ``mu_n < 0 < mu_common`` (exact comparison)."""
    return "PASS" if sv.mu_n < 0 < sv.mu_common else "FAIL"


def _weight_fn(weight, n: int):
    if weight in (1, "1", None):
        return lambda x, s: 1.0
    if weight in ("xn2", "x_n^2"):
        return lambda x, s: x * x
    if isinstance(weight, tuple) and weight[0] == "phi":
        _, i, j = weight
        if i == j == n:
            cn = float(sphere_volume(n)) / (n + 1)
            return lambda x, s: x * x / cn
        raise ValueError("only the (n, n) eigenfunction product reduces to one angle; use offdiagonal_quadrature")
    raise ValueError(f"unknown weight {weight!r}")


def quadrature_oracle(f, n: int, weight=1, tol: float = QUAD_ABS_TOL) -> float:
    """``vol(S^{n-1}) * int_0^pi f(cos s) w sin^{n-1} s ds`` by adaptive quadrature.

    ``f`` is a ``CosPoly`` or a callable of ``cos s``.
    """
    if n < 2:
        raise ValueError("n >= 2 required")
    w = _weight_fn(weight, n)
    fx = f if callable(f) and not isinstance(f, CosPoly) else (lambda x: float(f(x)))

    def integrand(s):
        x = math.cos(s)
        return fx(x) * w(x, s) * math.sin(s) ** (n - 1)

    val, err = integrate.quad(integrand, 0.0, math.pi, epsabs=tol, epsrel=1e-13, limit=200)
    if err > max(tol, 1e-13 * abs(val)) * 10:
        raise QuadratureError(f"quadrature error estimate {err:g} above tolerance")
    return val * float(sphere_volume(n - 1))


def offdiagonal_quadrature(f, tol: float = QUAD_ABS_TOL) -> float:
    """``int_{S^2} f(x_2) x_2 x_1`` with two angles; zero by oddness in x_1."""
    fx = (lambda x: float(f(x))) if isinstance(f, CosPoly) else f

    def integrand(theta, s):
        x2 = math.cos(s)
        x1 = math.sin(s) * math.cos(theta)
        return fx(x2) * x2 * x1 * math.sin(s)

    val, err = integrate.dblquad(integrand, 0.0, math.pi, 0.0, 2 * math.pi, epsabs=tol, epsrel=1e-13)
    if err > 10 * tol:
        raise QuadratureError(f"quadrature error estimate {err:g} above tolerance")
    return val


def quadrature_mu_n(n: int, k: int, a, b) -> float:
    """``mu_n`` from quadrature of the boundary factor against 1 and x_n^2.

    ``mu_n = (n-2)/2 <f, 1>/C_n - (n+2)(n-1)/2 <f, x_n^2>/C_n`` with
    ``C_n = vol(S^n)/(n+1)``.
    """
    a = float(a)
    b = float(b)
    fx = lambda x: a - b * (1 - x * x) ** k  # noqa: E731
    cn = float(sphere_volume(n)) / (n + 1)
    plain = quadrature_oracle(fx, n)
    weighted = quadrature_oracle(fx, n, "xn2")
    return (n - 2) / 2 * plain / cn - (n + 2) * (n - 1) / 2 * weighted / cn


def gamma_check(n: int) -> float:
    """Relative gap between B(n/2, 3/2) vol(S^{n-1}) and vol(S^n)/(n+1)."""
    with mpmath.workdps(40):
        lhs = beta_half(Fraction(n, 2), Fraction(3, 2)).to_mpf() * sphere_volume(n - 1)
        rhs = sphere_volume(n) / (n + 1)
        return float(abs(lhs - rhs) / rhs)
