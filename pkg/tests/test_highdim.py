import math
from fractions import Fraction

import numpy as np
import pytest

from hemicert.curvature import float_fields, semidefinite_oracle
from hemicert.highdim import (
    L_value,
    check_Lest,
    check_mkcond,
    check_mkest,
    find_m,
    monomial_factor,
    param_choice,
    scaled_coefficients,
    verify_chain,
)
from hemicert.interval import Interval
from hemicert.spectral import mu_values

SMALL_DEGREE_CASES = [(n, 2, 4) for n in range(5, 12)]


def test_find_m_under_the_stated_conditions():
    pc = find_m(3, 4)
    assert pc.m == 3 and pc.all_met
    # 2m - 1 = 5 against max(4, 32/pi^2); ratio 25/78 > 2/9
    assert Fraction(25, 78) > Fraction(2, 9)
    assert find_m(5, 2).m == 5


def test_find_m_with_the_corrected_pi_condition():
    # (2m - 1) > pi^2 k / 2 = 19.74 for k = 4
    assert find_m(3, 4, rule="corrected").m == 11


@pytest.mark.parametrize("n,k", [(3, 3), (3, 2), (4, 2)])
def test_k_at_or_below_threshold_is_rejected(n, k):
    with pytest.raises(ValueError):
        find_m(n, k)


def test_two_dimensions_rejected():
    with pytest.raises(ValueError):
        find_m(2, 5)


def test_param_choice_reports_each_condition():
    pc = param_choice(5, 2, 4)
    assert pc.conditions_met == (False, True, False)
    with pytest.raises(ValueError):
        param_choice(5, 2, 0)
    with pytest.raises(ValueError):
        param_choice(5, 2, 4, rule="other")


def test_L_at_the_equator():
    n, k, m = 3, 4, 3
    L0, L1 = L_value(n, k, m, Interval(math.pi / 2))
    expected = -2 * m * (2 * m - 1) + k * math.pi**2 / 2 - n * math.pi**2 / 2
    assert L0.mid == pytest.approx(expected, rel=1e-12)
    assert L1.lo > 0
    with pytest.raises(ValueError):
        L_value(n, k, m, Interval(2.0))


@pytest.mark.parametrize("n,k,m", [(3, 4, 3), (6, 2, 4), (4, 3, 7)])
def test_L_matches_the_laplacian(n, k, m):
    cf = monomial_factor(n, k, m)
    r = np.array([0.2, 0.9, 1.4])
    s = np.array([0.5, 1.2, 2.6])
    lam = float_fields(cf, r, s)["lam"]
    L0, L1 = L_value(n, k, m, Interval(r))
    L = L0.mid - L1.mid / np.tan(s) ** 2
    assert np.allclose(L * r ** (2 * m - 2) * np.sin(s) ** (2 * k), lam, rtol=1e-12)


@pytest.mark.parametrize("n,k,m", [(3, 4, 3), (5, 2, 4), (7, 3, 5)])
def test_scaled_coefficients_reproduce_the_conditions(n, k, m):
    cf = monomial_factor(n, k, m)
    r = np.array([0.3, 1.0, 1.5])
    s = np.array([0.4, 1.3, 2.0])
    v = float_fields(cf, r, s)
    c = scaled_coefficients(n, k, m, Interval(r))
    x = np.sin(s) ** 2
    scale = r ** (2 * m - 2) * x ** (k - 1)
    assert np.allclose((c["e1"][0].mid + x * c["e1"][1].mid) * scale, v["e1"], rtol=1e-12)
    assert np.allclose((c["e2"][0].mid + x * c["e2"][1].mid) * scale, v["e2"], rtol=1e-12)
    d = c["d"]
    assert np.allclose((d[0].mid + x * (d[1].mid + x * d[2].mid)) * scale**2, v["d"], rtol=1e-11)


def test_stated_choice_for_n3_k4_is_refuted():
    res = verify_chain(find_m(3, 4), 2000, workers=1)
    assert res.verdict == "FALSIFIED"
    assert res.failed == "D >= 0"
    r, s = res.witness
    top, _ = semidefinite_oracle(monomial_factor(3, 4, 3), r, s)
    assert top > 0


def test_corrected_choice_for_n3_k4_certifies():
    res = verify_chain(find_m(3, 4, rule="corrected"), 2000, workers=1)
    assert res.verdict == "CERTIFIED"
    assert res.e1_max < 0 and res.e2_max < 0 and res.d_min > 0


@pytest.mark.parametrize("n,k,m", SMALL_DEGREE_CASES)
def test_k2_m4_certifies_without_stated_conditions(n, k, m):
    assert verify_chain(param_choice(n, k, m), 2000, workers=1).verdict == "CERTIFIED"


def test_one_box_is_inconclusive():
    assert verify_chain(param_choice(5, 2, 5), 1).verdict == "INCONCLUSIVE"
    with pytest.raises(ValueError):
        verify_chain(param_choice(5, 2, 5), 0)


def test_worker_count_does_not_change_the_result():
    pc = param_choice(6, 2, 4)
    a, b = verify_chain(pc, 500, workers=1), verify_chain(pc, 500, workers=4)
    assert (a.verdict, a.e1_max, a.e2_max, a.d_min) == (b.verdict, b.e1_max, b.e2_max, b.d_min)


def test_larger_m_keeps_passing():
    for n, k, m in [(3, 4, 11), (5, 2, 4), (5, 2, 5)]:
        assert verify_chain(param_choice(n, k, m + 1), 1000).verdict == "CERTIFIED"


def test_intermediate_estimates():
    stated = find_m(3, 4)
    assert check_mkest(stated).verdict == "FAIL"
    assert check_Lest(stated).verdict == "PASS"
    assert check_mkcond(stated).verdict == "PASS"
    corrected = find_m(3, 4, rule="corrected")
    assert all(c.verdict == "PASS" for c in (check_mkest(corrected), check_Lest(corrected), check_mkcond(corrected)))


def test_certified_choices_have_the_spectral_sign_pattern():
    for n, k, m in SMALL_DEGREE_CASES + [(3, 4, 11)]:
        sv = mu_values(n, k, 0, 1)
        assert sv.mu_n < 0 < sv.mu_common


def test_oracle_agrees_on_certified_choice():
    cf = monomial_factor(3, 4, 11)
    rng = np.random.default_rng(3)
    r = rng.uniform(1e-3, math.pi / 2, 10_000)
    s = rng.uniform(1e-3, math.pi - 1e-3, 10_000)
    top, ok = semidefinite_oracle(cf, r, s)
    assert ok.all() and np.all(top <= 0)
