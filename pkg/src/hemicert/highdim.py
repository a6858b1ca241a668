"""Dimensions n >= 3: the monomial profile F = r^{2m} with a = 0.

With ``f = -r^{2m} sin^{2k} s`` every Hessian entry carries a factor
``r^{2m-2}`` and a power of ``x = sin^2 s``.  After dividing E1, E2 by
``r^{2m-2} x^{k-1}`` and D by the square of that, what is left is affine
(E1, E2) or quadratic (D) in x with coefficients built from

    r^2,  r^2/sin^2 r,  r cot r,  (r/sin r)(2m - r cot r),

all analytic on [0, pi/2].  The scaled conditions are certified on
[0, pi/2] x [0, 1]; strict signs there give the signs of the unscaled
quantities on the open quarter square.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .curvature import ConformalFactor
from .dim2 import quadratic_lower_bound
from .interval import HALF_PI, PI, Interval, interval_env
from .poly import RPoly

__all__ = [
    "ParamChoice",
    "ChainResult",
    "CheckResult",
    "param_choice",
    "find_m",
    "L_value",
    "scaled_coefficients",
    "verify_chain",
    "check_mkest",
    "check_Lest",
    "check_mkcond",
    "monomial_factor",
]


@dataclass(frozen=True)
class ParamChoice:
    n: int
    k: int
    m: int
    conditions_met: tuple[bool, bool, bool]  # degree, pi^2, ratio
    rule: str = "stated"

    @property
    def all_met(self) -> bool:
        return all(self.conditions_met)


def _check_nk(n: int, k: int):
    if n < 3:
        raise ValueError("the monomial branch needs n >= 3")
    if Fraction(k) <= Fraction(n, n - 2):
        raise ValueError(f"k = {k} must exceed n/(n-2) = {Fraction(n, n - 2)}, otherwise mu_n >= 0")


def _pi2_condition(k: int, m: int, rule: str) -> bool:
    """Certified comparison of 2m - 1 with 8k/pi^2 (stated) or pi^2 k / 2 (corrected)."""
    pi2 = PI.sqr()
    if rule == "stated":
        q = Interval(8 * k) / pi2
        if (2 * m - 1) >= q.hi:
            return True
        if (2 * m - 1) < q.lo:
            return False
    elif rule == "corrected":
        q = pi2 * k / 2
        if (2 * m - 1) > q.hi:
            return True
        if (2 * m - 1) <= q.lo:
            return False
    else:
        raise ValueError(f"unknown rule {rule!r}")
    raise ArithmeticError("pi^2 comparison undecided")  # pragma: no cover


def _ratio_condition(n: int, k: int, m: int) -> bool:
    return Fraction((2 * m - 1) ** 2, 2 * m * (2 * k + 2 * m - 1)) > Fraction(n - 1, n + 2 * k - 2)


def param_choice(n: int, k: int, m: int, rule: str = "stated") -> ParamChoice:
    """Evaluate the three sufficient conditions for a given (n, k, m)."""
    _check_nk(n, k)
    if m < 1:
        raise ValueError("m must be positive")
    conds = (2 * m - 1 >= 2 * (n - 1), _pi2_condition(k, m, rule), _ratio_condition(n, k, m))
    return ParamChoice(n, k, m, conds, rule)


def find_m(n: int, k: int, rule: str = "stated") -> ParamChoice:
    """Least m meeting all three sufficient conditions.

    ``rule="stated"`` compares 2m - 1 with 8k/pi^2; ``rule="corrected"``
    with pi^2 k / 2, which is what the estimate (2m-1) sin^2 r >= 2k r^2
    actually needs.
    """
    _check_nk(n, k)
    m = 1
    while True:
        pc = param_choice(n, k, m, rule)
        if pc.all_met:
            return pc
        m += 1


def L_value(n: int, k: int, m: int, r) -> tuple[Interval, Interval]:
    """``(Lap f + 2n f) / (r^{2m-2} sin^{2k} s)`` split as ``(L0, L1)`` with ``L = L0 - L1 cot^2 s``.

    ``L0 = -2m(2m-1) - 2mn r cot r + 2k r^2/sin^2 r - 2n r^2`` and
    ``L1 = 2k(2k+n-2) r^2/sin^2 r >= 0``.
    """
    r = Interval.coerce(r)
    if np.any(r.lo < 0) or np.any(r.hi > HALF_PI.hi):
        raise ValueError("r must lie in [0, pi/2]")
    q = interval_env("x2_over_sin2", r)
    rc = interval_env("xcot", r)
    L0 = -2 * m * (2 * m - 1) - 2 * m * n * rc + 2 * k * q - 2 * n * r.sqr()
    L1 = 2 * k * (2 * k + n - 2) * q
    return L0, L1


def _affine_mul(p, q):
    """Product of two affine polynomials in x, as a quadratic (c0, c1, c2)."""
    return (p[0] * q[0], p[0] * q[1] + p[1] * q[0], p[1] * q[1])


def scaled_coefficients(n: int, k: int, m: int, r) -> dict:
    """Coefficients in x = sin^2 s of the scaled E1, E2 (affine) and D (quadratic) over ``r``."""
    r = Interval.coerce(r)
    F0 = r.sqr()
    F2 = 2 * m * (2 * m - 1)
    P = interval_env("x2_over_sin2", r)
    rc = interval_env("xcot", r)
    T = 2 * m * rc
    W2 = P * (2 * m - rc).sqr()
    zero = Interval.coerce(0.0) * F0
    # psi, psi'', psi' cot s over x^{k-1}
    h_rr = (zero, -F2 + zero)
    h_ss = (P * (-2 * k * (2 * k - 1)), P * (4 * k * k) - T)
    h_th = (P * (-2 * k), P * (2 * k) - T)
    lam = tuple(h_rr[i] + h_ss[i] + (n - 1) * h_th[i] for i in range(2))
    lam = (lam[0], lam[1] - 2 * n * F0)
    e1 = (lam[0] + (n - 1) * h_th[0], lam[1] + (n - 1) * h_th[1])
    e2 = (lam[0] + (n - 1) * h_rr[0], lam[1] + (n - 1) * h_rr[1])
    other = (lam[0] + (n - 1) * h_ss[0], lam[1] + (n - 1) * h_ss[1])
    d0, d1, d2 = _affine_mul(e2, other)
    # - (n-1)^2 4k^2 x (1 - x) W^2
    cross = (n - 1) ** 2 * 4 * k * k * W2
    return {"e1": e1, "e2": e2, "d": (d0, d1 - cross, d2 + cross)}


def monomial_factor(n: int, k: int, m: int) -> ConformalFactor:
    """The conformal factor ``-r^{2m} sin^{2k} s`` (a = 0, unnormalized)."""
    coeffs = [0] * (2 * m) + [1]
    return ConformalFactor(n, 0, RPoly(coeffs), k)


@dataclass(frozen=True)
class ChainResult:
    n: int
    k: int
    m: int
    verdict: str  # CERTIFIED, FALSIFIED, INCONCLUSIVE
    e1_max: float  # certified upper bound of scaled E1
    e2_max: float
    d_min: float  # certified lower bound of scaled D
    witness: Optional[tuple[float, float]]  # (r, s) where a condition provably fails
    failed: Optional[str]  # which condition the witness violates
    subdivision: int
    undecided_boxes: int
    seconds: float


def _chunk_bounds(args):
    n, k, m, lo, hi = args
    c = scaled_coefficients(n, k, m, Interval(lo, hi))
    zeros, ones = np.zeros_like(lo), np.ones_like(lo)
    e1 = (c["e1"][0]).hull(c["e1"][0] + c["e1"][1])
    e2 = (c["e2"][0]).hull(c["e2"][0] + c["e2"][1])
    d_low = quadratic_lower_bound(*c["d"], zeros, ones)
    return e1.hi, e2.hi, d_low


def _refute(n: int, k: int, m: int, r: np.ndarray):
    """Point checks at r with x in {0, 1, vertex}; returns (r, s, condition) or None."""
    c = scaled_coefficients(n, k, m, Interval(r))
    d0, d1, d2 = c["d"]
    with np.errstate(divide="ignore", invalid="ignore"):
        vx = np.where(d2.mid > 0, -d1.mid / (2 * d2.mid), 0.0)
    vx = np.clip(np.nan_to_num(vx), 0.0, 1.0)
    for x in (np.zeros_like(r), np.ones_like(r), vx):
        xi = Interval(x)
        checks = (
            ("E1 < 0", (c["e1"][0] + xi * c["e1"][1]).lo >= 0),
            ("E2 <= 0", (c["e2"][0] + xi * c["e2"][1]).lo > 0),
            ("D >= 0", (d0 + xi * (d1 + xi * d2)).hi < 0),
        )
        for name, bad in checks:
            if np.any(bad):
                i = int(np.argmax(bad))
                return float(r[i]), math.asin(math.sqrt(float(x[i]))), name
    return None


def verify_chain(pc: ParamChoice, subdivision: int = 2000, workers: Optional[int] = None) -> ChainResult:
    """Certify E1 < 0, E2 < 0 and D > 0 for ``f = -r^{2m} sin^{2k} s``.

    [0, pi/2] is cut into ``subdivision`` equal r-boxes; on each box the
    x-dependence is handled exactly (affine maximum at the ends, quadratic
    minimum at the ends or the vertex).  Boxes that cannot be decided make
    the verdict INCONCLUSIVE unless some point check refutes a condition.
    The sufficient conditions in ``pc`` are recorded but not required, so
    choices outside them can be probed.
    """
    t0 = time.perf_counter()
    if subdivision < 1:
        raise ValueError("subdivision must be positive")
    n, k, m = pc.n, pc.k, pc.m
    workers = workers or int(os.environ.get("WORKERS", "0") or 0) or (os.cpu_count() or 1)
    edges = np.linspace(0.0, float(HALF_PI.hi), subdivision + 1)
    lo, hi = edges[:-1], edges[1:]
    chunks = np.array_split(np.arange(subdivision), max(1, min(workers * 4, subdivision)))
    tasks = [(n, k, m, lo[c], hi[c]) for c in chunks]
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_chunk_bounds, tasks))
    else:
        parts = [_chunk_bounds(t) for t in tasks]
    e1 = np.concatenate([p[0] for p in parts])
    e2 = np.concatenate([p[1] for p in parts])
    dl = np.concatenate([p[2] for p in parts])
    bad = (e1 >= 0) | (e2 >= 0) | (dl <= 0)
    e1_max, e2_max, d_min = float(np.max(e1)), float(np.max(e2)), float(np.min(dl))
    witness = failed = None
    if not np.any(bad):
        verdict = "CERTIFIED"
    else:
        probe = np.concatenate([0.5 * (lo[bad] + hi[bad]), hi[bad]])
        hit = _refute(n, k, m, probe)
        if hit is None:
            verdict = "INCONCLUSIVE"
        else:
            verdict = "FALSIFIED"
            witness, failed = (hit[0], hit[1]), hit[2]
    return ChainResult(
        n, k, m, verdict, e1_max, e2_max, d_min, witness, failed, subdivision, int(np.sum(bad)), time.perf_counter() - t0
    )


@dataclass(frozen=True)
class CheckResult:
    name: str
    verdict: str  # PASS / FAIL
    worst: float  # the certified extreme of the checked quantity
    detail: str


def _r_grid(pieces: int) -> Interval:
    e = np.linspace(0.0, float(HALF_PI.hi), pieces + 1)
    return Interval(e[:-1], e[1:])


def check_mkest(pc: ParamChoice, pieces: int = 1000) -> CheckResult:
    """``(2m-1) sin^2 r >= 2k r^2`` on [0, pi/2], i.e. ``(2m-1) >= 2k r^2/sin^2 r``."""
    q = interval_env("x2_over_sin2", _r_grid(pieces))
    worst = float(np.max((2 * pc.k * q).hi))
    ok = (2 * pc.m - 1) >= worst
    return CheckResult("mkest", "PASS" if ok else "FAIL", worst, f"need 2m-1 = {2 * pc.m - 1} >= max 2k r^2/sin^2 r")


def check_Lest(pc: ParamChoice, pieces: int = 1000) -> CheckResult:
    """``L0 < -(2m-1)^2`` on (0, pi/2] for the cot^2-free part of L."""
    L0, _ = L_value(pc.n, pc.k, pc.m, _r_grid(pieces))
    worst = float(np.max(L0.hi))
    ok = worst < -((2 * pc.m - 1) ** 2)
    return CheckResult("Lest", "PASS" if ok else "FAIL", worst, f"need max L0 < {-((2 * pc.m - 1) ** 2)}")


def check_mkcond(pc: ParamChoice) -> CheckResult:
    """``(2m-1)^2 / (2m(2k+2m-1)) >= (n-1)/(n+2k-2)`` in exact arithmetic."""
    n, k, m = pc.n, pc.k, pc.m
    lhs = Fraction((2 * m - 1) ** 2, 2 * m * (2 * k + 2 * m - 1))
    rhs = Fraction(n - 1, n + 2 * k - 2)
    return CheckResult("mkcond", "PASS" if lhs >= rhs else "FAIL", float(lhs - rhs), f"{lhs} vs {rhs}")
