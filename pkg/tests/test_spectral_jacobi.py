from fractions import Fraction

import numpy as np
import pytest

from hemicert.curvature import mean_curvature_first_order
from hemicert.interval import Interval
from hemicert.jacobi import (
    a_operator,
    h_prime_diffeo,
    sff_integral,
    sff_integral_quadrature,
    sff_rational_part,
    sff_variation,
    solvability_integral,
    solve_jacobi,
)
from hemicert.poly import CosPoly, laplace_beltrami
from hemicert.spectral import (
    QuadratureError,
    quadrature_mu_n,
    gamma_check,
    mu_values,
    offdiagonal_quadrature,
    quadrature_oracle,
    sign_pattern_check,
    sphere_moment,
)

A_DEFAULT = Fraction(400001, 1000000)
C_APPROX = 1.41627662753828
GRID = [(n, k) for n in range(2, 9) for k in range(1, 9)]


# ---------------------------------------------------------------- eigenvalue variations


def test_two_dimensional_reduction_is_exact():
    a, b = Fraction(3, 7), Fraction(5, 11)
    sv = mu_values(2, 1, a, b)
    assert sv.mu_n == -2 * a + Fraction(4, 5) * b
    assert sv.mu_sum == -6 * a + 4 * b


def test_mu_n_just_below_zero_for_the_chosen_constant():
    sv = mu_values(2, 1, A_DEFAULT, 1)
    assert sv.mu_n == Fraction(-1, 500000)
    assert sv.mu_common > 0
    assert sign_pattern_check(sv) == "PASS"


def test_zero_factor_gives_zero_variation():
    sv = mu_values(3, 2, 0, 0)
    assert sv.mu_n == sv.mu_common == sv.mu_sum == 0
    assert sign_pattern_check(sv) == "FAIL"


def test_sign_pattern_for_large_k_and_no_constant():
    # k > n/(n-2) makes the x_n variation negative with a = 0
    sv = mu_values(5, 2, 0, 1)
    assert sv.mu_n < 0 < sv.mu_common
    assert mu_values(3, 3, 0, 1).mu_n == 0


def test_invalid_dimensions():
    with pytest.raises(ValueError):
        mu_values(1, 1, 0, 1)


@pytest.mark.parametrize("n,k", GRID)
def test_moments_match_quadrature(n, k):
    sm = sphere_moment(n, k)
    assert sm.ratio == Fraction(1, 2 * k + n + 1)
    f = CosPoly.sin2_power(k)
    plain = quadrature_oracle(f, n)
    weighted = quadrature_oracle(f, n, "xn2")
    assert sm.plain_value() == pytest.approx(plain, rel=1e-10)
    assert sm.weighted_value() == pytest.approx(weighted, rel=1e-10)


@pytest.mark.parametrize("n,k", GRID)
def test_quadrature_mu_n_matches_closed_form(n, k):
    a, b = Fraction(1, 3), Fraction(2, 5)
    exact = float(mu_values(n, k, a, b).mu_n)
    assert quadrature_mu_n(n, k, a, b) == pytest.approx(exact, rel=1e-9, abs=1e-12)


def test_offdiagonal_entries_vanish():
    assert abs(offdiagonal_quadrature(CosPoly.sin2_power(1))) < 1e-12


def test_normalization_constant_identity():
    for n in range(2, 9):
        assert gamma_check(n) < 1e-30


def test_quadrature_rejects_unknown_weight():
    with pytest.raises(ValueError):
        quadrature_oracle(CosPoly.x(), 3, "nope")
    assert issubclass(QuadratureError, RuntimeError)


# ---------------------------------------------------------------- boundary correction


@pytest.mark.parametrize("n,k", GRID)
def test_jacobi_identity_is_exact(n, k):
    js = solve_jacobi(n, k, 1.0)
    v = js.v.poly
    residual = laplace_beltrami(v, n) + n * v + Fraction(n, 2) * CosPoly.sin2_power(k)
    assert residual.is_zero()
    expected = Fraction(n * k, n + 2 * k) * CosPoly.sin2_power(k)
    assert a_operator(v) == expected
    assert sff_variation(js).poly == Fraction(n - 1, n) * expected


def test_two_dimensional_solution_coefficients():
    js = solve_jacobi(2, 1, C_APPROX)
    # v = (c/4)(sin^2 s - 2) = -(c/4)(1 + x^2)
    assert js.v.poly == CosPoly((Fraction(-1, 4), 0, Fraction(-1, 4)))
    assert js.v.scale.contains(C_APPROX)


def test_diffeomorphism_cancels_conformal_mean_curvature():
    from hemicert.dim2 import build_F2

    cf = build_F2()
    h_conf = mean_curvature_first_order(cf)
    js = solve_jacobi(2, 1, cf.c)
    assert (h_conf.poly + h_prime_diffeo(js.v.poly, 2)).is_zero()


def test_solvability_integral_vanishes():
    for n, k in GRID:
        assert solvability_integral(n, k) == 0


def test_sff_integral_two_dimensions():
    assert sff_rational_part(2, 1) == Fraction(2, 5)
    c = Interval(1.4162766275382, 1.4162766275383)
    val = sff_integral(2, 1, c)
    assert val.lo > 0
    assert val.contains(0.4 * 1.41627662753825)
    assert abs(val.mid - 0.5665) < 1e-4


@pytest.mark.parametrize("n,k", GRID)
def test_sff_integral_matches_quadrature(n, k):
    exact = sff_integral(n, k, 1.0).mid
    assert sff_integral_quadrature(n, k, 1.0) == pytest.approx(exact, rel=1e-9)


def test_sff_integral_positive_everywhere():
    assert all(sff_integral(n, k, Interval(0.5)).lo > 0 for n, k in GRID)


def test_product_of_first_eigenfunctions_is_degree_two_eigenfunction():
    # on S^2 with x_2 = cos s, x_1 = sin s cos t: Delta(x_1 x_2) = -2(n+1) x_1 x_2 with n = 2
    rng = np.random.default_rng(5)
    s = rng.uniform(0.3, np.pi - 0.3, 50)
    t = rng.uniform(0.0, 2 * np.pi, 50)
    h = 1e-4

    def g(s, t):
        return np.sin(s) * np.cos(t) * np.cos(s)

    lap = (
        (g(s + h, t) - 2 * g(s, t) + g(s - h, t)) / h**2
        + (g(s + h, t) - g(s - h, t)) / (2 * h) / np.tan(s)
        + (g(s, t + h) - 2 * g(s, t) + g(s, t - h)) / h**2 / np.sin(s) ** 2
    )
    assert np.max(np.abs(lap + 6 * g(s, t))) < 1e-6
