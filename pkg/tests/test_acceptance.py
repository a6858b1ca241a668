"""Acceptance criteria 1-12, one test each.

Every test prints a single ``criterion N: PASS|FAIL`` line with the measured
values before asserting, so ``pytest -v -s tests/test_acceptance.py`` (or the
captured output of a failing run) reads as a checklist.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from hemicert.cli import cmd_certify_n2
from hemicert.curvature import christoffel_hessian_oracle, float_fields, semidefinite_oracle
from hemicert.dim2 import QBOUND_SPECS, build_F2, certify_qbound, d_derivative_bounds, grid_certify
from hemicert.highdim import check_mkcond, find_m, monomial_factor, param_choice, verify_chain
from hemicert.interval import PI, Interval
from hemicert.jacobi import a_operator, sff_integral, sff_integral_quadrature, sff_rational_part, solve_jacobi
from hemicert.poly import CosPoly, laplace_beltrami
from hemicert.report import fmt_real
from hemicert.spectral import quadrature_mu_n, mu_values, quadrature_oracle, sphere_moment

A = Fraction(400001, 1000000)


def _line(capsys, number: int, ok: bool, detail: str):
    with capsys.disabled():
        print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="module")
def cf():
    return build_F2()


def test_criterion_01_grid_reproduction(capsys):
    t0 = time.perf_counter()
    rep = cmd_certify_n2(delta=1e-4, oracle_points=0)
    grid = next(c for c in rep.certificates if c.name == "grid").data
    r, s = grid.argmin
    ok = (
        abs(grid.grid_min - 0.01536) <= 1e-4
        and math.hypot(r - 0.76488, s - 1.5708) <= 1e-3
        and grid.margin >= 0.0007
        and rep.exit_code == 0
    )
    _line(
        capsys,
        1,
        ok,
        f"grid_min={grid.grid_min:.6f} argmin=({r:.5f}, {s:.5f}) margin={grid.margin:.6f} "
        f"exit={rep.exit_code} t={time.perf_counter() - t0:.1f}s",
    )
    assert ok


def test_criterion_02_derivative_bounds(cf, capsys):
    db = d_derivative_bounds(cf)
    ok = db.verdict == "PASS" and db.bound_s <= 80 and db.bound_r <= 202
    _line(capsys, 2, ok, f"|d_s D| <= {db.bound_s:.3f}, |d_r D| <= {db.bound_r:.3f} (claimed 80, 202)")
    assert ok


def test_criterion_03_q_bounds(cf, capsys):
    results = [certify_qbound(spec, cf, max_depth=40) for spec in QBOUND_SPECS]
    passed = all(r.verdict == "PASS" and r.seconds < 5 and r.depth <= 40 for r in results)
    tightened = []
    for spec in QBOUND_SPECS:
        vals = cf.profile.float_values(spec.name, np.linspace(1e-3, math.pi / 2, 2001))
        mid = Fraction(float(vals.min() + vals.max()) / 2)
        t = spec.with_bounds(upper=mid) if spec.upper is not None else spec.with_bounds(lower=mid)
        tightened.append(certify_qbound(t, cf).verdict)
    ok = passed and all(v == "FAIL" for v in tightened)
    slowest = max(r.seconds for r in results)
    _line(capsys, 3, ok, f"{sum(r.verdict == 'PASS' for r in results)}/18 PASS, slowest {slowest:.2f}s, tightened all FAIL: {all(v == 'FAIL' for v in tightened)}")
    assert ok


def test_criterion_04_constants(cf, capsys):
    C, c = cf.C, cf.c
    ok = abs(C.mid - 2.423) <= 5e-4 and abs(c.mid - 1.416) <= 5e-4 and C.width < 1e-12 and c.width < 1e-12
    _line(capsys, 4, ok, f"C in [{float(C.lo)!r}, {float(C.hi)!r}], c in [{float(c.lo)!r}, {float(c.hi)!r}]")
    assert ok


def test_criterion_05_spectral_exactness(capsys):
    a, b = Fraction(7, 13), Fraction(3, 17)
    sv = mu_values(2, 1, a, b)
    reduced = sv.mu_n == -2 * a + Fraction(4, 5) * b and sv.mu_sum == -6 * a + 4 * b
    chosen = mu_values(2, 1, A, 1)
    ok = reduced and chosen.mu_n == Fraction(-2, 10**6) and chosen.mu_common > 0
    _line(capsys, 5, ok, f"mu_n={chosen.mu_n} mu_common={chosen.mu_common}")
    assert ok


def test_criterion_06_oracle_equivalence(capsys):
    worst_moment = worst_sff = worst_mu = 0.0
    for n in range(2, 9):
        for k in range(1, 9):
            sm = sphere_moment(n, k)
            f = CosPoly.sin2_power(k)
            worst_moment = max(
                worst_moment,
                abs(sm.plain_value() - quadrature_oracle(f, n)) / sm.plain_value(),
                abs(sm.weighted_value() - quadrature_oracle(f, n, "xn2")) / sm.weighted_value(),
            )
            exact = sff_integral(n, k, 1.0).mid
            worst_sff = max(worst_sff, abs(sff_integral_quadrature(n, k, 1.0) - exact) / exact)
            mu = float(mu_values(n, k, Fraction(1, 3), Fraction(2, 5)).mu_n)
            worst_mu = max(worst_mu, abs(quadrature_mu_n(n, k, Fraction(1, 3), Fraction(2, 5)) - mu) / max(abs(mu), 1e-300))
    ok = worst_moment < 1e-10 and worst_sff < 1e-9 and worst_mu < 1e-9
    _line(capsys, 6, ok, f"moments {worst_moment:.1e}, sff {worst_sff:.1e}, mu_n {worst_mu:.1e} (relative)")
    assert ok


def test_criterion_07_jacobi_identity(cf, capsys):
    exact = True
    for n in range(2, 9):
        for k in range(1, 9):
            v = solve_jacobi(n, k, 1.0).v.poly
            exact &= (laplace_beltrami(v, n) + n * v + Fraction(n, 2) * CosPoly.sin2_power(k)).is_zero()
            exact &= a_operator(v) == Fraction(n * k, n + 2 * k) * CosPoly.sin2_power(k)
    v2 = solve_jacobi(2, 1, cf.c).v.poly
    # (c/4)(sin^2 s - 2) = (c/4)(-1 - x^2)
    shape = v2 == CosPoly((Fraction(-1, 4), 0, Fraction(-1, 4)))
    ok = exact and shape
    _line(capsys, 7, ok, f"identity exact on 2..8 x 1..8: {exact}; n=2,k=1 v=c*{v2.coeffs}")
    assert ok


def test_criterion_08_final_integral(cf, capsys):
    val = sff_integral(2, 1, cf.c)
    ok = sff_rational_part(2, 1) == Fraction(2, 5) and val.lo > 0 and abs(val.mid - 0.5665) < 1e-4
    _line(capsys, 8, ok, f"rational part {sff_rational_part(2, 1)}, integral in [{float(val.lo)!r}, {float(val.hi)!r}]")
    assert ok


def test_criterion_09_higher_dimensional_chain(capsys):
    pc = find_m(3, 4)
    pi2 = PI.sqr()
    conditions = (
        pc.m == 3
        and pc.all_met
        and 2 * pc.m - 1 >= 2 * (3 - 1)
        and (Interval(8 * 4) / pi2).hi <= 2 * pc.m - 1
        and check_mkcond(pc).verdict == "PASS"
    )
    chain = verify_chain(pc, 2000)
    cf = monomial_factor(3, 4, pc.m)
    rng = np.random.default_rng(2024)
    r = rng.uniform(1e-3, math.pi / 2, 100_000)
    s = rng.uniform(1e-3, math.pi - 1e-3, 100_000)
    top, consistent = semidefinite_oracle(cf, r, s)
    inconsistent = int(np.sum(~consistent))
    ok = conditions and chain.verdict == "CERTIFIED" and inconsistent == 0
    _line(
        capsys,
        9,
        ok,
        f"find_m(3,4)={pc.m} conditions={conditions}; verify_chain(3,4,3)={chain.verdict}"
        f" (failed {chain.failed} at {chain.witness}); oracle inconsistencies={inconsistent},"
        f" points with positive eigenvalue={int(np.sum(top > 0))}",
    )
    assert ok


def test_criterion_10_k2_m4_probe(capsys):
    outcomes = {n: verify_chain(param_choice(n, 2, 4), 2000).verdict for n in range(5, 12)}
    decided = all(v in ("CERTIFIED", "FALSIFIED") for v in outcomes.values())
    _line(capsys, 10, decided, "k=2, m=4: " + ", ".join(f"n={n} {v}" for n, v in outcomes.items()))
    assert decided


def test_criterion_11_determinism(cf, capsys):
    a = grid_certify(delta=1e-4, workers=1, cf=cf)
    b = grid_certify(delta=1e-4, workers=8, cf=cf)
    fa = (fmt_real(a.grid_min), tuple(map(fmt_real, a.argmin)))
    fb = (fmt_real(b.grid_min), tuple(map(fmt_real, b.argmin)))
    ok = fa == fb
    _line(capsys, 11, ok, f"workers=1 {fa} vs workers=8 {fb}")
    assert ok


def test_criterion_12_property_suites(cf, capsys):
    # interval containment: 10^6 operations against exact rationals on a subsample, float results on all
    rng = np.random.default_rng(99)
    n = 250_000
    x = rng.standard_normal(n) * 10.0 ** rng.integers(-6, 6, n)
    y = rng.standard_normal(n) * 10.0 ** rng.integers(-6, 6, n)
    X, Y = Interval(x), Interval(y)
    ops = {"+": (X + Y, x + y), "-": (X - Y, x - y), "*": (X * Y, x * y), "/": (X / Y, x / y)}
    contained = all(np.all((iv.lo <= fl) & (fl <= iv.hi)) for iv, fl in ops.values())
    for i in rng.choice(n, 1000, replace=False):
        fx, fy = Fraction(float(x[i])), Fraction(float(y[i]))
        exact = {"+": fx + fy, "-": fx - fy, "*": fx * fy, "/": fx / fy}
        contained &= all(Fraction(float(ops[k][0].lo[i])) <= exact[k] <= Fraction(float(ops[k][0].hi[i])) for k in ops)

    # Laplace-Beltrami against finite differences, 50 points per function
    s = np.linspace(0.2, math.pi - 0.2, 50)
    h = 1e-4
    worst_lb = 0.0
    for dim in (2, 3, 5):
        for p in (CosPoly.sin2_power(1), CosPoly.sin2_power(3), CosPoly.x() * CosPoly.sin2_power(2)):
            g = lambda t: p(np.cos(t))  # noqa: E731
            fd = (g(s + h) - 2 * g(s) + g(s - h)) / h**2 + (dim - 1) / np.tan(s) * (g(s + h) - g(s - h)) / (2 * h)
            ex = laplace_beltrami(p, dim)(np.cos(s))
            worst_lb = max(worst_lb, float(np.max(np.abs(ex - fd) / np.maximum(np.abs(ex), 1.0))))

    # Christoffel Hessian oracle on a 50 x 50 grid
    R, S = np.meshgrid(np.linspace(0.05, 1.52, 50), np.linspace(0.05, math.pi - 0.05, 50))
    worst_chr = float(np.max(christoffel_hessian_oracle(cf, R, S)))

    # D symmetric under s -> pi - s
    r = rng.uniform(0.0, math.pi / 2, 10_000)
    t = rng.uniform(0.0, math.pi, 10_000)
    d1 = float_fields(cf, r, t)["d"]
    d2 = float_fields(cf, r, math.pi - t)["d"]
    worst_sym = float(np.max(np.abs(d1 - d2)))

    ok = bool(contained) and worst_lb < 1e-6 and worst_chr < 1e-5 and worst_sym < 1e-12
    _line(
        capsys,
        12,
        ok,
        f"interval containment {bool(contained)}, LB vs FD {worst_lb:.1e}, Christoffel {worst_chr:.1e}, symmetry {worst_sym:.1e}",
    )
    assert ok


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(pytest.main([__file__, "-v", "-s"]))
