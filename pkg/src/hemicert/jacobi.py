"""Boundary correction by a diffeomorphism: the Jacobi solution v.

The conformal change moves the mean curvature of the equator by
``(n/2) c psi``.  A normal deformation by v moves it by ``-(Lap + n) v``, so
v solves ``(Lap + n) v = (n/2) c psi`` with ``psi = -(1 - x^2)^k``.  A
polynomial solution exists in x = cos s:

    v = n c / (2 (2k-1)(n+2k)) * sum_j a_j (1 - x^2)^j,
    a_k = 1,  a_j = 2(j+1) a_{j+1} / (2j - 1).

Everything here is exact except the constant c, carried as an interval.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .curvature import ScaledCosPoly
from .interval import Interval
from .poly import CosPoly, laplace_beltrami
from .special import sphere_volume, sphint_ratio
from .spectral import quadrature_oracle

__all__ = [
    "JacobiSolution",
    "solve_jacobi",
    "a_operator",
    "sff_variation",
    "sff_rational_part",
    "sff_integral",
    "sff_integral_quadrature",
    "h_prime_diffeo",
    "solvability_integral",
]


@dataclass(frozen=True)
class JacobiSolution:
    n: int
    k: int
    c: Interval
    coeffs: tuple[Fraction, ...]  # a_0 ... a_k
    prefactor: Fraction  # n / (2 (2k-1)(n+2k)); v = c * prefactor * sum a_j (1-x^2)^j
    v: ScaledCosPoly


def _forcing(n: int, k: int) -> CosPoly:
    # (n/2) psi with the factor c stripped
    return -Fraction(n, 2) * CosPoly.sin2_power(k)


def solve_jacobi(n: int, k: int, c) -> JacobiSolution:
    """Explicit solution of ``(Lap + n) v = (n/2) c psi``, verified exactly before returning."""
    if n < 2 or k < 1:
        raise ValueError("need n >= 2 and k >= 1")
    c = Interval.coerce(c)
    a = [Fraction(0)] * (k + 1)
    a[k] = Fraction(1)
    for j in range(k - 1, -1, -1):
        a[j] = Fraction(2 * (j + 1), 2 * j - 1) * a[j + 1]
    pre = Fraction(n, 2 * (2 * k - 1) * (n + 2 * k))
    poly = CosPoly(())
    for j, aj in enumerate(a):
        poly = poly + aj * CosPoly.sin2_power(j)
    poly = pre * poly
    residual = laplace_beltrami(poly, n) + n * poly - _forcing(n, k)
    if not residual.is_zero():
        raise ArithmeticError(f"Jacobi identity failed for n={n}, k={k}")  # pragma: no cover
    return JacobiSolution(n, k, c, tuple(a), pre, ScaledCosPoly(poly, c))


def a_operator(g: CosPoly) -> CosPoly:
    """``(cot s d_s - d_s^2) g`` for g a polynomial in x = cos s; equals ``-(1 - x^2) g''``."""
    return -(CosPoly((Fraction(1), Fraction(0), Fraction(-1))) * g.derive().derive())


def sff_variation(js: JacobiSolution) -> ScaledCosPoly:
    """``A'_11 = ((n-1)/n) (cot s d_s - d_s^2) v`` as a CosPoly scaled by c."""
    n, k = js.n, js.k
    out = Fraction(n - 1, n) * a_operator(js.v.poly)
    expected = Fraction(n - 1, n) * Fraction(n * k, n + 2 * k) * CosPoly.sin2_power(k)
    if out != expected:
        raise ArithmeticError("second fundamental form identity failed")  # pragma: no cover
    return ScaledCosPoly(out, js.c)


def sff_rational_part(n: int, k: int) -> Fraction:
    """``(n-1) k B(k+1+n/2, 1/2) / ((n+2k) B(n/2, 3/2))``."""
    return Fraction((n - 1) * k, n + 2 * k) * sphint_ratio(n, k, shift=1).value


def sff_integral(n: int, k: int, c) -> Interval:
    """``int_{S^n} A'(grad phi, grad phi)`` for the x_n eigenfunction, as an interval."""
    if n < 2 or k < 1:
        raise ValueError("need n >= 2 and k >= 1")
    c = Interval.coerce(c)
    return c * sff_rational_part(n, k)


def sff_integral_quadrature(n: int, k: int, c: float) -> float:
    """Same integral by quadrature of ``(sin^2 s / C_n) A'_11`` over S^n."""
    js = solve_jacobi(n, k, c)
    a11 = sff_variation(js).poly
    cn = float(sphere_volume(n)) / (n + 1)
    integrand = lambda x: (1 - x * x) * float(a11(x)) / cn  # noqa: E731
    return c * quadrature_oracle(integrand, n)


def h_prime_diffeo(v: CosPoly, n: int) -> CosPoly:
    """First-order mean curvature from a normal deformation by v: ``-(Lap + n) v``."""
    return -(laplace_beltrami(v, n) + n * v)


def solvability_integral(n: int, k: int) -> Fraction:
    """``int x_n psi`` over S^n divided by vol(S^{n-1}); must vanish exactly."""
    val = (CosPoly.x() * CosPoly.sin2_power(k)).sphere_integral(n)
    return val.rational
