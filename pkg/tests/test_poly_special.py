import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy as sp
from scipy import integrate

from hemicert.interval import HALF_PI, Interval
from hemicert.poly import CosPoly, RPoly, even_poly, laplace_beltrami, poly_eval_interval
from hemicert.special import (
    beta_half,
    beta_ratio,
    gamma_half,
    sphere_volume,
    sphere_volume_interval,
    sphint_ratio,
)


# ---------------------------------------------------------------- polynomials in r


def test_rpoly_trims_and_reports_parity():
    p = RPoly([0, 0, 1, 0, 0])
    assert p.coeffs == (0, 0, 1)
    assert p.parity == "even"
    assert RPoly([0, 1, 0, 3]).parity == "odd"
    assert RPoly([1, 1]).parity is None
    assert RPoly([]).is_zero()


def test_rpoly_arithmetic_and_derivative():
    p = RPoly([1, 2, 3])
    q = RPoly([0, 1])
    assert (p * q).coeffs == (0, 1, 2, 3)
    assert p.derive().coeffs == (2, 6)
    assert (p - p).is_zero()
    assert p(Fraction(1, 2)) == Fraction(1) + 1 + Fraction(3, 4)


def test_even_poly_places_coefficients_on_even_powers():
    p = even_poly([0, 1, Fraction(-1, 21)])
    assert p.coeffs == (0, 0, 1, 0, Fraction(-1, 21))


def test_interval_horner_encloses_exact_value():
    p = even_poly([0, 1, Fraction(-1, 21), Fraction(4, 315), Fraction(1, 945), Fraction(74, 429925)])
    exact = sum(float(c) * (math.pi / 2) ** (2 * i) for i, c in enumerate(p.coeffs[::2]))
    enc = poly_eval_interval(p, HALF_PI)
    assert enc.contains(exact) and enc.width < 1e-14
    with mpmath.workdps(40):
        v = sum(mpmath.mpf(c.numerator) / c.denominator * (mpmath.pi / 2) ** i for i, c in enumerate(p.coeffs))
    assert mpmath.mpf(enc.lo) <= v <= mpmath.mpf(enc.hi)


# ---------------------------------------------------------------- polynomials in cos s


def test_sin2_power_expands_binomially():
    assert CosPoly.sin2_power(2).coeffs == (1, 0, -2, 0, 1)


def test_cospoly_evaluation_modes_agree():
    p = CosPoly.sin2_power(3) + 2 * CosPoly.x()
    assert p(Fraction(1, 3)) == (1 - Fraction(1, 9)) ** 3 + Fraction(2, 3)
    assert p(1 / 3) == pytest.approx(float(p(Fraction(1, 3))))
    assert p(Interval(1 / 3)).contains(float(p(Fraction(1, 3))))


def _lb_finite_difference(p: CosPoly, n: int, s: np.ndarray, h: float = 1e-4) -> np.ndarray:
    g = lambda t: p(np.cos(t))  # noqa: E731
    g1 = (g(s + h) - g(s - h)) / (2 * h)
    g2 = (g(s + h) - 2 * g(s) + g(s - h)) / (h * h)
    return g2 + (n - 1) * np.cos(s) / np.sin(s) * g1


@pytest.mark.parametrize("n", [2, 3, 5, 8])
@pytest.mark.parametrize(
    "p",
    [CosPoly.sin2_power(1), CosPoly.sin2_power(4), CosPoly.x() * CosPoly.sin2_power(2), CosPoly((1, -3, 0, 5, 2))],
    ids=["sin2", "sin8", "x_sin4", "generic"],
)
def test_laplace_beltrami_matches_finite_differences(p, n):
    s = np.linspace(0.2, math.pi - 0.2, 50)
    exact = laplace_beltrami(p, n)(np.cos(s))
    fd = _lb_finite_difference(p, n, s)
    scale = np.maximum(np.abs(exact), 1.0)
    assert np.max(np.abs(exact - fd) / scale) < 1e-6


def test_laplace_beltrami_matches_symbolic_formula():
    s = sp.symbols("s")
    p = CosPoly((2, 1, -3, 0, 1))
    g = sum(sp.Rational(c.numerator, c.denominator) * sp.cos(s) ** i for i, c in enumerate(p.coeffs))
    for n in (2, 4):
        sym = sp.diff(g, s, 2) + (n - 1) * sp.cos(s) / sp.sin(s) * sp.diff(g, s)
        for t in (0.3, 1.1, 2.5):
            assert float(laplace_beltrami(p, n)(math.cos(t))) == pytest.approx(float(sym.subs(s, t)), rel=1e-12)


def test_coordinate_functions_are_eigenfunctions():
    # Delta x = -n x on S^n
    for n in range(2, 9):
        assert laplace_beltrami(CosPoly.x(), n) == -n * CosPoly.x()


@pytest.mark.parametrize("n", [2, 3, 6])
def test_sphere_integral_against_quadrature(n):
    p = CosPoly((1, 0, -2, 0, 1)) + CosPoly((0, 0, 3))
    exact = float(p.sphere_integral(n))
    num, _ = integrate.quad(lambda t: p(math.cos(t)) * math.sin(t) ** (n - 1), 0, math.pi, epsabs=1e-14)
    assert exact == pytest.approx(num, rel=1e-12)


def test_odd_integrands_vanish_exactly():
    assert (CosPoly.x() * CosPoly.sin2_power(3)).sphere_integral(4).rational == 0


# ---------------------------------------------------------------- gamma and beta


def test_gamma_half_integers():
    assert float(gamma_half(Fraction(1, 2))) == pytest.approx(math.sqrt(math.pi))
    assert float(gamma_half(Fraction(5))) == 24
    assert float(gamma_half(Fraction(7, 2))) == pytest.approx(math.gamma(3.5))


def test_beta_values():
    assert float(beta_half(2, Fraction(1, 2))) == pytest.approx(4 / 3)
    assert float(beta_half(1, Fraction(3, 2))) == pytest.approx(2 / 3)
    for p, q in [(Fraction(3, 2), Fraction(1, 2)), (Fraction(7, 2), Fraction(5, 2)), (4, Fraction(1, 2))]:
        assert float(beta_half(p, q)) == pytest.approx(float(mpmath.beta(p, q)), rel=1e-14)


def test_beta_ratio_requires_cancelling_pi():
    assert beta_ratio((2, Fraction(1, 2)), (1, Fraction(3, 2))).value == 2
    with pytest.raises(ValueError):
        beta_ratio((Fraction(1, 2), Fraction(1, 2)), (1, 1))


def test_sphint_ratio_small_cases():
    assert sphint_ratio(2, 1).value == 2
    # B(k + n/2, 1/2) / B(n/2, 3/2) against floating point
    for n in range(2, 9):
        for k in range(0, 6):
            ref = mpmath.beta(k + mpmath.mpf(n) / 2, 0.5) / mpmath.beta(mpmath.mpf(n) / 2, 1.5)
            assert float(sphint_ratio(n, k).value) == pytest.approx(float(ref), rel=1e-14)


def test_sphere_volumes():
    assert float(sphere_volume(1)) == pytest.approx(2 * math.pi)
    assert float(sphere_volume(2)) == pytest.approx(4 * math.pi)
    assert float(sphere_volume(3)) == pytest.approx(2 * math.pi**2)
    iv = sphere_volume_interval(2)
    assert iv.contains(4 * math.pi)
