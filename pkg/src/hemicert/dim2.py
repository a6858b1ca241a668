"""Certification of the two-dimensional construction (n = 2, k = 1).

Here ``f = a - F(r) sin^2 s`` with a degree-10 even polynomial F normalized
by ``F(pi/2) = 1``.  Writing ``x = sin^2 s``, the determinant condition is a
quadratic in x whose coefficients are built from the radial composites
Q3, Q6, Q10, Q12, Q14 and Q17:

    D = (4a - 4Q6 + (4Q6 - Q12) x)(4a - 6Q6 + (6Q6 - Q10) x)
        - Q3 x (2Q6 (2x - 1) - Q17 x) - 4 Q14^2 x (1 - x)

Three certifiers are provided: bounds on the composites (adaptive bisection
in r), bounds on the partial derivatives of D, and positivity of D (a
Lipschitz grid search and an interval branch-and-bound).
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .curvature import ConformalFactor
from .interval import HALF_PI, Interval, interval_env
from .poly import even_poly, poly_eval_interval
from .radial import RadialProfile
from .taylor import R_SWITCH

__all__ = [
    "E_COEFFICIENT_BOUNDS",
    "A_DEFAULT",
    "F_COEFFS",
    "build_F2",
    "Bound",
    "Monotone",
    "QBoundSpec",
    "QBoundResult",
    "QBOUND_SPECS",
    "certify_qbound",
    "certify_all_qbounds",
    "LapestResult",
    "certify_lapest",
    "EResult",
    "certify_E1_E2",
    "DerivativeBounds",
    "d_derivative_bounds",
    "d_coefficients",
    "ds_over_sin2s",
    "dr_D",
    "GridCertificate",
    "grid_certify",
    "BranchBoundResult",
    "branch_bound_certify",
    "quadratic_lower_bound",
]

A_DEFAULT = Fraction(400001, 1000000)

# r^0, r^2, ..., r^10 of the unnormalized profile, per coefficient variant
F_COEFFS = {
    "eq": (0, 1, Fraction(-1, 21), Fraction(4, 315), Fraction(1, 945), Fraction(74, 429925)),
    "appendix": (0, 1, Fraction(-1, 21), Fraction(4, 315), Fraction(1, 945), Fraction(74, 429975)),
}


def build_F2(variant: str = "eq", a=A_DEFAULT) -> ConformalFactor:
    """The n = 2 conformal factor, normalized so that F(pi/2) = 1."""
    try:
        coeffs = F_COEFFS[variant]
    except KeyError:
        raise ValueError(f"unknown coefficient variant {variant!r}") from None
    Ft = even_poly(coeffs)
    C = poly_eval_interval(Ft, HALF_PI)
    cf = ConformalFactor(2, a, Ft, 1, 1 / C)
    cf.C = C
    cf.variant = variant
    return cf


def _C_of(cf: ConformalFactor) -> Interval:
    C = getattr(cf, "C", None)
    return C if C is not None else 1 / cf.scale


# ---------------------------------------------------------------------------
# Q bounds


@dataclass(frozen=True)
class Bound:
    """The number ``const + per_C / C``, with C the normalizing constant."""

    const: Fraction = Fraction(0)
    per_C: object = Fraction(0)  # Fraction or Interval

    def tilde(self, C: Interval) -> Interval:
        """The bound multiplied by C (the scale of the unnormalized quantities)."""
        return Interval.coerce(self.const) * C + self.per_C

    def value(self, C: Interval) -> Interval:
        return self.tilde(C) / C

    def is_rational_pair(self) -> bool:
        return isinstance(self.per_C, (int, Fraction))

    def __str__(self):
        if not self.is_rational_pair():
            return f"{self.const} + [{self.per_C.lo!r}, {self.per_C.hi!r}]/C"
        if self.per_C == 0:
            return str(self.const)
        if self.const == 0:
            return f"{self.per_C}/C"
        return f"{self.const} + {self.per_C}/C"


def _b(x) -> Bound:
    return Bound(Fraction(x))


def _compare_ge(x: Bound, y: Bound, C: Interval) -> str:
    """'yes' if x >= y certainly, 'no' if x < y certainly, else 'unknown'."""
    if x.is_rational_pair() and y.is_rational_pair():
        if x.const == y.const and Fraction(x.per_C) == Fraction(y.per_C):
            return "yes"
    diff = Interval.coerce(x.const - y.const) * C + (Interval.coerce(x.per_C) - Interval.coerce(y.per_C))
    if diff.lo >= 0:
        return "yes"
    if diff.hi < 0:
        return "no"
    return "unknown"


@dataclass(frozen=True)
class Monotone:
    """Monotonicity shortcut: sign of a derivative composite plus exact endpoint values."""

    derivative: str
    increasing: bool
    kind: str  # which endpoint formulas apply: F, Fdot, F_over_sin2, Fdot_cot


@dataclass(frozen=True)
class QBoundSpec:
    index: int
    lower: Optional[Bound]
    upper: Optional[Bound]
    monotone: Optional[Monotone] = None

    @property
    def name(self) -> str:
        return f"Q{self.index}"

    def with_bounds(self, lower="keep", upper="keep") -> "QBoundSpec":
        lo = self.lower if lower == "keep" else (None if lower is None else _as_bound(lower))
        hi = self.upper if upper == "keep" else (None if upper is None else _as_bound(upper))
        return QBoundSpec(self.index, lo, hi, self.monotone)


def _as_bound(x) -> Bound:
    return x if isinstance(x, Bound) else _b(Fraction(str(x)) if isinstance(x, float) else x)


def _spec(i, lo, hi, mono=None):
    return QBoundSpec(i, None if lo is None else _as_bound(lo), None if hi is None else _as_bound(hi), mono)


_F = Fraction
QBOUND_SPECS: tuple[QBoundSpec, ...] = (
    _spec(1, 0, 1, Monotone("Q2", True, "F")),
    _spec(2, 0, _F(3, 2), Monotone("Q3", True, "Fdot")),
    _spec(3, 0, _F(24, 10)),
    _spec(4, _F(-75, 100), _F(51, 10)),
    _spec(5, 0, _F(18, 10)),
    _spec(6, Bound(_F(0), _F(1)), 1, Monotone("Q5", True, "F_over_sin2")),
    _spec(7, _F(19, 10), None),
    _spec(8, _F(11, 10), None),
    _spec(9, _F(-51, 10), _F(17, 10)),
    _spec(10, _F(-23, 10), _F(61, 10)),
    _spec(11, -11, _F(34, 10)),
    _spec(12, _F(7, 10), _F(47, 10)),
    _spec(13, _F(-52, 10), 0),
    _spec(14, 0, _F(158, 100)),
    _spec(15, 0, _F(41, 10)),
    _spec(16, _F(-36, 10), 0),
    _spec(17, 0, _F(9, 10), Monotone("Q16", False, "Fdot_cot")),
    _spec(18, _F(-33, 10), _F(71, 10)),
)


@dataclass
class QBoundResult:
    index: int
    verdict: str  # PASS, FAIL, INCONCLUSIVE
    direct: str
    monotone: Optional[str]
    lower: Optional[str]
    upper: Optional[str]
    observed: tuple[float, float]
    leaves: int
    depth: int
    seconds: float
    witness: Optional[float] = None

    @property
    def name(self) -> str:
        return f"Q{self.index}"


def _initial_boxes(n_near: int = 8, n_far: int = 64) -> Interval:
    rs = float(R_SWITCH)
    near = np.linspace(0.0, rs, n_near + 1)
    far = np.linspace(rs, float(HALF_PI.hi), n_far + 1)
    lo = np.concatenate([near[:-1], far[:-1]])
    hi = np.concatenate([near[1:], far[1:]])
    hi[-1] = float(HALF_PI.hi)
    return Interval(lo, hi)


def _split_boxes(lo, hi):
    mid = 0.5 * (lo + hi)
    return np.concatenate([lo, mid]), np.concatenate([mid, hi])


def _bisect_certify(
    profile: RadialProfile,
    name: str,
    lo_req: Optional[Interval],
    hi_req: Optional[Interval],
    max_depth: int,
    max_boxes: int = 20000,
):
    """Adaptive bisection of [0, pi/2] proving ``lo_req <= Q~ <= hi_req``.

    Gives up (INCONCLUSIVE) at ``max_depth`` or once ``max_boxes`` boxes are
    pending; near a bound attained at an endpoint, float resolution stops
    the boxes touching it from ever being decided.
    Returns (verdict, observed hull of Q~, leaves, depth reached, witness r).
    """
    boxes = _initial_boxes()
    lo, hi = boxes.lo, boxes.hi
    obs_lo, obs_hi = math.inf, -math.inf
    leaves = 0
    depth = 0
    while lo.size:
        v = profile.unscaled(name, Interval(lo, hi))
        ok = np.ones(lo.shape, dtype=bool)
        bad = np.zeros(lo.shape, dtype=bool)
        if lo_req is not None:
            ok &= v.lo >= lo_req.hi
            bad |= v.hi < lo_req.lo
        if hi_req is not None:
            ok &= v.hi <= hi_req.lo
            bad |= v.lo > hi_req.hi
        if np.any(bad):
            i = int(np.argmax(bad))
            return "FAIL", (obs_lo, obs_hi), leaves, depth, float(0.5 * (lo[i] + hi[i]))
        if np.any(ok):
            obs_lo = min(obs_lo, float(np.min(v.lo[ok])))
            obs_hi = max(obs_hi, float(np.max(v.hi[ok])))
            leaves += int(np.count_nonzero(ok))
        pending = ~ok
        if not np.any(pending):
            return "PASS", (obs_lo, obs_hi), leaves, depth, None
        if depth >= max_depth or 2 * np.count_nonzero(pending) > max_boxes:
            i = int(np.argmax(pending))
            return "INCONCLUSIVE", (obs_lo, obs_hi), leaves, depth, float(0.5 * (lo[i] + hi[i]))
        lo, hi = _split_boxes(lo[pending], hi[pending])
        depth += 1
    return "PASS", (obs_lo, obs_hi), leaves, depth, None  # pragma: no cover


def _endpoint_bounds(cf: ConformalFactor, kind: str) -> tuple[Bound, Bound]:
    """Exact values of the monotone quantity at r = 0 and r = pi/2, in units of 1/C."""
    Ft = cf.F
    lead = Ft.coeffs[2] if len(Ft.coeffs) > 2 else Fraction(0)  # coefficient of r^2
    if kind == "F":
        return Bound(), Bound(Fraction(1))  # F(pi/2) = 1 by the normalization
    if kind == "Fdot":
        return Bound(), Bound(Fraction(0), poly_eval_interval(Ft.derive(), HALF_PI))
    if kind == "F_over_sin2":
        return Bound(Fraction(0), lead), Bound(Fraction(1))  # sin(pi/2) = 1
    if kind == "Fdot_cot":
        return Bound(Fraction(0), 2 * lead), Bound()  # cot(pi/2) = 0
    raise ValueError(kind)


def _monotone_route(cf: ConformalFactor, spec: QBoundSpec, max_depth: int) -> str:
    mono = spec.monotone
    C = _C_of(cf)
    req = (Interval(0.0), None) if mono.increasing else (None, Interval(0.0))
    sign, *_ = _bisect_certify(cf.profile, mono.derivative, req[0], req[1], max_depth)
    at0, at1 = _endpoint_bounds(cf, mono.kind)
    vmin, vmax = (at0, at1) if mono.increasing else (at1, at0)
    checks = []
    if spec.lower is not None:
        checks.append(_compare_ge(vmin, spec.lower, C))
    if spec.upper is not None:
        checks.append(_compare_ge(spec.upper, vmax, C))
    if "no" in checks:
        return "FAIL"
    if sign != "PASS" or "unknown" in checks:
        return "INCONCLUSIVE"
    return "PASS"


def certify_qbound(spec: QBoundSpec, cf: Optional[ConformalFactor] = None, max_depth: int = 40) -> QBoundResult:
    """Certify ``lower <= Q <= upper`` on [0, pi/2].

    The direct route bisects r and evaluates the composite in interval
    arithmetic (Taylor models below the switch point).  Specs carrying a
    monotonicity shortcut are also checked by certifying the sign of the
    derivative composite and comparing exact endpoint values; this closes
    bounds that are attained at an endpoint, where no enclosure can be
    strictly inside.
    """
    cf = cf if cf is not None else build_F2()
    C = _C_of(cf)
    t0 = time.perf_counter()
    lo_req = None if spec.lower is None else spec.lower.tilde(C)
    hi_req = None if spec.upper is None else spec.upper.tilde(C)
    direct, obs, leaves, depth, witness = _bisect_certify(cf.profile, spec.name, lo_req, hi_req, max_depth)
    mono = None
    if spec.monotone is not None and direct != "FAIL":
        mono = _monotone_route(cf, spec, max_depth)
    if direct == "FAIL" or mono == "FAIL":
        verdict = "FAIL"
    elif direct == "PASS" or mono == "PASS":
        verdict = "PASS"
    else:
        verdict = "INCONCLUSIVE"
    inv_c = 1 / C
    observed = (
        float((Interval(obs[0]) * inv_c).lo) if math.isfinite(obs[0]) else math.nan,
        float((Interval(obs[1]) * inv_c).hi) if math.isfinite(obs[1]) else math.nan,
    )
    return QBoundResult(
        index=spec.index,
        verdict=verdict,
        direct=direct,
        monotone=mono,
        lower=None if spec.lower is None else str(spec.lower),
        upper=None if spec.upper is None else str(spec.upper),
        observed=observed,
        leaves=leaves,
        depth=depth,
        seconds=time.perf_counter() - t0,
        witness=witness,
    )


def certify_all_qbounds(cf: Optional[ConformalFactor] = None, max_depth: int = 40) -> list[QBoundResult]:
    cf = cf if cf is not None else build_F2()
    return [certify_qbound(spec, cf, max_depth) for spec in QBOUND_SPECS]


def spec_constants(specs=QBOUND_SPECS, C: Optional[Interval] = None) -> dict[str, Interval]:
    """The certified Q-bounds as intervals (one-sided bounds open to infinity)."""
    C = C if C is not None else _C_of(build_F2())
    out = {}
    for s in specs:
        lo = -math.inf if s.lower is None else float(s.lower.value(C).lo)
        hi = math.inf if s.upper is None else float(s.upper.value(C).hi)
        out[s.name] = Interval(lo, hi)
    return out


def _exact_end(b: Optional[Bound], C: Interval):
    """A bound as an exact Fraction when it does not involve C, else an Interval."""
    if b is None:
        return None
    if b.is_rational_pair() and b.per_C == 0:
        return b.const
    return b.value(C)


def _mag(x) -> float:
    """Upper bound on |x| for a Fraction or Interval, as float (exact for Fractions)."""
    if isinstance(x, Interval):
        return float(max(abs(x.lo), abs(x.hi)))
    return abs(x)


def _spec_by_name(specs):
    return {s.name: s for s in specs}


# ---------------------------------------------------------------------------
# Laplacian bounds

LAP_BOUND = Fraction(31, 10)
DLAP_BOUND = Fraction(72, 10)


@dataclass
class LapestResult:
    verdict: str
    lap_from_constants: float  # certified max |Lap f + 4f| from the Q constants
    dlap_from_constants: float
    lap_direct: float  # same, from box-wise enclosures
    dlap_direct: float


def _sigma_boxes(n: int) -> Interval:
    e = np.linspace(0.0, 1.0, n + 1)
    return Interval(e[:-1], e[1:])


def _r_boxes(n: int) -> Interval:
    rs = float(R_SWITCH)
    e = np.union1d(np.linspace(0.0, float(HALF_PI.hi), n + 1), [rs])
    e[-1] = float(HALF_PI.hi)
    return Interval(e[:-1], e[1:])


def _lap_terms(a, Q12, Q6, Q18, Q5, sig):
    cos2 = 1 - sig
    lap = a * 4 - Q12 * sig - 4 * Q6 * cos2
    dlap = -(Q18 * sig) - 4 * Q5 * cos2
    return lap, dlap


def _hull_mag(*ivs) -> float:
    return max(float(np.max(np.maximum(np.abs(v.lo), np.abs(v.hi)))) for v in ivs)


def certify_lapest(
    cf: Optional[ConformalFactor] = None, specs=QBOUND_SPECS, n_r: int = 400, n_sigma: int = 64
) -> LapestResult:
    """``|Lap f + 4f| <= 3.1`` and ``|d_r(Lap f + 4f)| <= 7.2`` on the quarter square.

    Two routes: the convex-combination argument with the Q-bound constants
    (exact rational arithmetic where the constants are rational), and direct
    box enclosures.
    """
    cf = cf if cf is not None else build_F2()
    C = _C_of(cf)
    by = _spec_by_name(specs)
    a4 = 4 * cf.a
    # Lap f + 4f = 4a - (Q12 x + 4 Q6 (1 - x)) and its r-derivative
    # -(Q18 x + 4 Q5 (1 - x)) are affine in x: extremes sit at the bounds of
    # Q12, 4 Q6 (resp. Q18, 4 Q5)
    lap_ends = []
    for name, mult in (("Q12", 1), ("Q6", 4)):
        for b in (by[name].lower, by[name].upper):
            lap_ends.append(a4 - mult * _exact_end(b, C))
    dlap_ends = []
    for name, mult in (("Q18", 1), ("Q5", 4)):
        for b in (by[name].lower, by[name].upper):
            dlap_ends.append(mult * _exact_end(b, C))
    lap_c = max(_mag(x) for x in lap_ends)
    dlap_c = max(_mag(x) for x in dlap_ends)

    a = Interval.coerce(cf.a)
    rb = _r_boxes(n_r)
    prof = cf.profile
    Q = {k: prof.enclose(k, rb) for k in ("Q12", "Q6", "Q18", "Q5")}
    sb = _sigma_boxes(n_sigma)
    R = lambda v: Interval(v.lo[:, None], v.hi[:, None])  # noqa: E731
    S = Interval(sb.lo[None, :], sb.hi[None, :])
    lap, dlap = _lap_terms(a, R(Q["Q12"]), R(Q["Q6"]), R(Q["Q18"]), R(Q["Q5"]), S)
    lap_d, dlap_d = _hull_mag(lap), _hull_mag(dlap)
    ok = lap_c <= LAP_BOUND and dlap_c <= DLAP_BOUND and lap_d <= LAP_BOUND and dlap_d <= DLAP_BOUND
    return LapestResult("PASS" if ok else "FAIL", float(lap_c), float(dlap_c), lap_d, dlap_d)


# ---------------------------------------------------------------------------
# E1, E2

E_COEFFICIENT_BOUNDS = {"Q6": Fraction(41, 100), "Q7": Fraction(19, 10), "Q8": Fraction(11, 10)}


@dataclass
class EResult:
    verdict: str
    e1_bound: float  # certified upper bound on E1 via the convex combination with min
    e2_bound: float
    e1_bound_with_max: float  # the same expression with max in place of min (not a valid bound)
    e1_direct: float  # certified max of E1 from box enclosures
    e2_direct: float
    constants: dict = field(default_factory=dict)


def _certified_min(profile: RadialProfile, name: str, n_r: int = 400) -> Fraction:
    v = profile.enclose(name, _r_boxes(n_r))
    return Fraction(float(np.min(v.lo)))


def certify_E1_E2(cf: Optional[ConformalFactor] = None, constants: Optional[dict] = None, n_r: int = 4000) -> EResult:
    """``E1 < 0`` and ``E2 < 0`` on [0, pi/2] x [0, pi].

    With x = sin^2 s, ``E1 = 4a - (6 Q6 (1-x) + Q7 x)`` and
    ``E2 = 4a - (4 Q6 (1-x) + 2 Q8 x)``; both subtract a convex combination,
    so ``E1 <= 4a - min(6 Q6, Q7)`` and ``E2 <= 4a - min(4 Q6, 2 Q8)`` with
    certified lower bounds on the Q's.  Without ``constants`` these lower
    bounds are computed from enclosures.
    """
    cf = cf if cf is not None else build_F2()
    prof = cf.profile
    if constants is None:
        constants = {k: _certified_min(prof, k, n_r) for k in ("Q6", "Q7", "Q8")}
    q6, q7, q8 = (constants[k] for k in ("Q6", "Q7", "Q8"))
    if all(isinstance(q, (int, Fraction)) for q in (q6, q7, q8)) and isinstance(cf.a, Fraction):
        # rational constants: decide exactly
        a4e = 4 * cf.a
        e1 = a4e - min(6 * q6, q7)
        e2 = a4e - min(4 * q6, 2 * q8)
        e1_max = a4e - max(6 * q6, q7)
    else:
        a4i = Interval.coerce(4 * cf.a)
        q6, q7, q8 = (Interval.coerce(q) for q in (q6, q7, q8))

        def imin(x, y):
            return Interval(min(x.lo, y.lo), min(x.hi, y.hi))

        def imax(x, y):
            return Interval(max(x.lo, y.lo), max(x.hi, y.hi))

        e1 = (a4i - imin(6 * q6, q7)).hi
        e2 = (a4i - imin(4 * q6, 2 * q8)).hi
        e1_max = (a4i - imax(6 * q6, q7)).hi
    a4 = Interval.coerce(4 * cf.a)

    rb = _r_boxes(n_r)
    Q = {k: prof.enclose(k, rb) for k in ("Q6", "Q7", "Q8")}
    # affine in x = sin^2 s, so the maximum over x sits at x = 0 or x = 1
    E1 = (a4 - 6 * Q["Q6"]).hull(a4 - Q["Q7"])
    E2 = (a4 - 4 * Q["Q6"]).hull(a4 - 2 * Q["Q8"])
    d1, d2 = float(np.max(E1.hi)), float(np.max(E2.hi))
    ok = e1 < 0 and e2 < 0 and d1 < 0 and d2 < 0
    return EResult(
        "PASS" if ok else "FAIL",
        float(e1),
        float(e2),
        float(e1_max),
        d1,
        d2,
        {k: float(v) for k, v in constants.items()},
    )


# ---------------------------------------------------------------------------
# derivative bounds for D


def d_coefficients(Q: dict, a):
    """Coefficients (A0, A1, A2) of D as a quadratic in x = sin^2 s."""
    a4 = a * 4
    x0 = a4 - 4 * Q["Q6"]
    x1 = 4 * Q["Q6"] - Q["Q12"]
    y0 = a4 - 6 * Q["Q6"]
    y1 = 6 * Q["Q6"] - Q["Q10"]
    q14sq = Q["Q14"] * Q["Q14"] if not isinstance(Q["Q14"], Interval) else Q["Q14"].sqr()
    A0 = x0 * y0
    A1 = x0 * y1 + x1 * y0 + 2 * (Q["Q3"] * Q["Q6"]) - 4 * q14sq
    A2 = x1 * y1 - Q["Q3"] * (4 * Q["Q6"] - Q["Q17"]) + 4 * q14sq
    return A0, A1, A2


def ds_over_sin2s(Q: dict, a, sig):
    """``d_s D / sin 2s``, grouped so each bracket is a sum of certified composites."""
    a4 = a * 4
    cos2 = 1 - sig
    cos2s = 1 - 2 * sig
    q14sq = Q["Q14"].sqr() if isinstance(Q["Q14"], Interval) else Q["Q14"] ** 2
    neg = (
        Q["Q9"] * (a4 - Q["Q10"] * sig - 6 * Q["Q6"] * cos2)
        + Q["Q3"] * (-2 * Q["Q13"] * sig - 2 * Q["Q6"] * cos2)
        + Q["Q11"] * (a4 - Q["Q12"] * sig - 4 * Q["Q6"] * cos2)
        + 4 * q14sq * cos2s
    )
    return -neg


def dr_D(Q: dict, a, sig, lap=None, dlap=None):
    """``d_r D``, grouped so each bracket is a sum of certified composites.

    ``lap`` and ``dlap`` stand for ``Lap f + 4f`` and its r-derivative; by
    default they are formed from the composites.
    """
    cos2 = 1 - sig
    cos2s = 1 - 2 * sig
    sin2_2s = 4 * sig * cos2
    if lap is None:
        lap = a * 4 - Q["Q12"] * sig - 4 * Q["Q6"] * cos2
    if dlap is None:
        dlap = -(Q["Q18"] * sig) - 4 * Q["Q5"] * cos2
    return (
        -(lap * (2 * Q["Q5"] * cos2s + (Q["Q4"] + Q["Q16"]) * sig))
        - 2 * Q["Q14"] * Q["Q15"] * sin2_2s
        + dlap * (2 * lap - (Q["Q3"] + Q["Q17"]) * sig - 2 * Q["Q6"] * cos2s)
        + Q["Q4"] * (2 * Q["Q6"] * cos2s + Q["Q17"] * sig) * sig
        + Q["Q3"] * (2 * Q["Q5"] * cos2s + Q["Q16"] * sig) * sig
    )


DS_BOUND = 80
DR_BOUND = 202
_DERIV_NAMES = ("Q3", "Q4", "Q5", "Q6", "Q9", "Q10", "Q11", "Q12", "Q13", "Q14", "Q15", "Q16", "Q17", "Q18")


@dataclass
class DerivativeBounds:
    verdict: str
    bound_s: float  # certified max |d_s D| (refined route)
    bound_r: float
    crude_s: float  # same from the Q constants alone
    crude_r: float
    crude_verdict: str
    claimed: tuple = (DS_BOUND, DR_BOUND)


def _crude_bounds(consts: dict, a: Interval, lap_c: float, dlap_c: float, n_sigma: int) -> tuple[float, float]:
    S = _sigma_boxes(n_sigma)
    Q = {k: Interval(np.full(n_sigma, v.lo), np.full(n_sigma, v.hi)) for k, v in consts.items()}
    # |sin 2s| <= 1 and the display carries no other s-dependence besides x
    ds = _hull_mag(ds_over_sin2s(Q, a, S))
    lap = Interval(-lap_c, lap_c)
    dlap = Interval(-dlap_c, dlap_c)
    dr = _hull_mag(dr_D(Q, a, S, lap=lap, dlap=dlap))
    return ds, dr


def d_derivative_bounds(
    cf: Optional[ConformalFactor] = None,
    consts: Optional[dict] = None,
    n_r: int = 2000,
    n_sigma: int = 200,
    crude_sigma: int = 1000,
) -> DerivativeBounds:
    """Certified bounds on ``|d_s D|`` and ``|d_r D|`` over [0, pi/2] x [0, pi].

    The crude route replaces every composite by its certified constant
    range (18 constants only); the refined route uses enclosures of the
    composites over short r-intervals.  The verdict is PASS when the refined
    bounds are at most 80 and 202.
    """
    cf = cf if cf is not None else build_F2()
    C = _C_of(cf)
    consts = consts if consts is not None else spec_constants(C=C)
    a = Interval.coerce(cf.a)
    lap_c = float(LAP_BOUND)
    dlap_c = float(DLAP_BOUND)
    crude_s, crude_r = _crude_bounds(consts, a, lap_c, dlap_c, crude_sigma)

    rb = _r_boxes(n_r)
    prof = cf.profile
    Q = {k: prof.enclose(k, rb) for k in _DERIV_NAMES}
    R = {k: Interval(v.lo[:, None], v.hi[:, None]) for k, v in Q.items()}
    sb = _sigma_boxes(n_sigma)
    S = Interval(sb.lo[None, :], sb.hi[None, :])
    ds = _hull_mag(ds_over_sin2s(R, a, S))
    dr = _hull_mag(dr_D(R, a, S))
    verdict = "PASS" if ds <= DS_BOUND and dr <= DR_BOUND else "FAIL"
    crude_verdict = "PASS" if crude_s <= DS_BOUND and crude_r <= DR_BOUND else "FAIL"
    return DerivativeBounds(verdict, ds, dr, crude_s, crude_r, crude_verdict)


# ---------------------------------------------------------------------------
# Lipschitz grid certificate

_U = 2.0**-53
_GAMMA4 = 4 * _U / (1 - 4 * _U)
_D_NAMES = ("Q3", "Q6", "Q10", "Q12", "Q14", "Q17")


@dataclass
class GridCertificate:
    delta: float
    points_per_axis: int
    grid_min: float
    argmin: tuple[float, float]
    argmin_index: tuple[int, int]
    bound_s: float
    bound_r: float
    lip_bound_eucl: float
    covering_radius: float
    lip_term: float
    eps_eval: float
    margin: float
    verdict: str
    workers: int
    offset: float = 0.0
    seconds: float = 0.0


def grid_points(delta: float) -> np.ndarray:
    """``i * delta`` for i = 0 .. ceil((pi/2)/delta), the last clamped to pi/2."""
    n = math.ceil((math.pi / 2) / delta)
    pts = np.arange(n + 1, dtype=np.float64) * delta
    pts = np.minimum(pts, math.pi / 2)
    pts[-1] = math.pi / 2
    return pts


def _row_coefficients(cf: ConformalFactor, r: np.ndarray):
    prof = cf.profile
    ri = Interval(r)
    Q = {k: prof.enclose(k, ri) for k in _D_NAMES}
    A = d_coefficients(Q, Interval.coerce(cf.a))
    mids = [np.asarray(0.5 * x.lo + 0.5 * x.hi) for x in A]
    errs = [np.maximum(m - x.lo, x.hi - m) for m, x in zip(mids, A)]
    # midpoints computed in float: widen by one ulp of the magnitude
    errs = [e + np.spacing(np.maximum(np.abs(x.lo), np.abs(x.hi))) for e, x in zip(errs, A)]
    return mids, errs


def _scan_rows(args):
    A0, A1, A2, sig, offset = args
    best = math.inf
    best_ij = (0, 0)
    for i in range(A0.shape[0]):
        d = A0[i] + sig * (A1[i] + sig * A2[i])
        j = int(np.argmin(d))
        if d[j] - offset < best:
            best = float(d[j] - offset)
            best_ij = (i, j)
    return best, best_ij


def grid_certify(
    delta: float = 1e-4,
    workers: Optional[int] = None,
    cf: Optional[ConformalFactor] = None,
    bounds: tuple[float, float] = (DS_BOUND, DR_BOUND),
    offset: float = 0.0,
) -> GridCertificate:
    """Lipschitz grid certificate for ``D - offset > 0`` on [0, pi/2]^2.

    D is evaluated in float64 at all grid points, rows r = 0 and s = 0
    included.  Per row the quadratic coefficients are enclosed in interval
    arithmetic and their midpoints used; ``eps_eval`` bounds the distance
    between a float evaluation and the exact value of D at that grid point.
    The Lipschitz term uses the partial-derivative bounds ``(b_s, b_r)``
    componentwise: every point is within half a grid gap of a sample in each
    coordinate, so ``|D(p) - D(q)| <= (b_r g_r + b_s g_s) / 2``.
    """
    t0 = time.perf_counter()
    cf = cf if cf is not None else build_F2()
    workers = workers or int(os.environ.get("WORKERS", "0") or 0) or (os.cpu_count() or 1)
    pts = grid_points(delta)
    npts = pts.size
    mids, errs = _row_coefficients(cf, pts)
    A0, A1, A2 = mids

    sig_hat = np.sin(pts) ** 2
    sig_iv = interval_env("sin2", Interval(pts))
    e_sig = float(np.max(np.maximum(sig_hat - sig_iv.lo, sig_iv.hi - sig_hat)))
    sig_hat = np.clip(sig_hat, 0.0, 1.0)

    absA = np.abs(A0) + np.abs(A1) + np.abs(A2)
    per_row = _GAMMA4 * absA + errs[0] + errs[1] + errs[2] + (np.abs(A1) + 2.01 * np.abs(A2)) * e_sig
    eps_eval = float(np.max(per_row)) * (1 + 8 * _U)

    chunks = np.array_split(np.arange(npts), max(1, min(workers * 4, npts)))
    tasks = [(A0[c], A1[c], A2[c], sig_hat, offset) for c in chunks]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_scan_rows, tasks))
    else:
        results = [_scan_rows(t) for t in tasks]
    best = math.inf
    best_ij = (0, 0)
    for c, (val, (i, j)) in zip(chunks, results):
        ij = (int(c[i]), j)
        if val < best or (val == best and ij < best_ij):
            best, best_ij = val, ij
    grid_min = best

    gap = float(np.max(np.diff(pts)))
    gap = max(gap, float(HALF_PI.hi) - float(pts[-1]))
    b_s, b_r = bounds
    lip_term = float((Interval(b_r) * gap + Interval(b_s) * gap).hi) / 2 * (1 + 4 * _U)
    lip_eucl = math.hypot(b_s, b_r)
    covering = math.hypot(gap, gap) / 2
    margin = float((Interval(grid_min) - lip_term - eps_eval).lo)
    if grid_min + eps_eval <= 0:
        verdict = "FALSIFIED"
    elif margin > 0 and math.isfinite(grid_min):
        verdict = "CERTIFIED"
    else:
        verdict = "INCONCLUSIVE"
    i, j = best_ij
    return GridCertificate(
        delta=delta,
        points_per_axis=npts,
        grid_min=grid_min,
        argmin=(float(pts[i]), float(pts[j])),
        argmin_index=(i, j),
        bound_s=float(b_s),
        bound_r=float(b_r),
        lip_bound_eucl=lip_eucl,
        covering_radius=covering,
        lip_term=lip_term,
        eps_eval=eps_eval,
        margin=margin,
        verdict=verdict,
        workers=workers,
        offset=offset,
        seconds=time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------
# interval branch and bound


@dataclass
class BranchBoundResult:
    verdict: str  # PASS, FALSIFIED, INCONCLUSIVE
    boxes: int
    max_depth: int
    min_lower: float  # smallest certified lower bound among accepted boxes
    witness: Optional[tuple[float, float]] = None
    seconds: float = 0.0


def _d_on_boxes(cf: ConformalFactor, r: Interval, sig: Interval) -> Interval:
    Q = {k: cf.profile.enclose(k, r) for k in _D_NAMES}
    A0, A1, A2 = d_coefficients(Q, Interval.coerce(cf.a))
    return A0 + sig * (A1 + sig * A2)


def quadratic_lower_bound(A0: Interval, A1: Interval, A2: Interval, sl: np.ndarray, sh: np.ndarray) -> np.ndarray:
    """Rigorous lower bound of ``A0 + A1 x + A2 x^2`` over ``x in [sl, sh]``, ``sl >= 0``.

    For x >= 0 the expression is at least the real quadratic q with the lower
    endpoints as coefficients, whose minimum sits at an endpoint or, when q is
    convex, at its vertex.
    """
    c0, c1, c2 = Interval(A0.lo), Interval(A1.lo), Interval(A2.lo)
    q_lo = c0 + Interval(sl) * (c1 + Interval(sl) * c2)
    q_hi = c0 + Interval(sh) * (c1 + Interval(sh) * c2)
    low = np.minimum(q_lo.lo, q_hi.lo)
    with np.errstate(divide="ignore", invalid="ignore"):
        vx = -A1.lo / (2 * A2.lo)
        inside = (A2.lo > 0) & (vx > sl) & (vx < sh)
        if np.any(inside):
            vert = c0 - c1.sqr() / (c2 * 4)
            low = np.where(inside, np.minimum(low, vert.lo), low)
    return low


def branch_bound_certify(
    tolerance: float = 0.0,
    cf: Optional[ConformalFactor] = None,
    budget: int = 5_000_000,
    offset: float = 0.0,
    initial: int = 32,
) -> BranchBoundResult:
    """Prove ``D - offset > tolerance`` on [0, pi/2]^2 by interval subdivision.

    D is quadratic in x = sin^2 s, which maps [0, pi/2] onto [0, 1]
    monotonically.  Boxes are r-intervals paired with an x-interval; on each
    box the coefficients are enclosed and the quadratic minimized exactly
    over x.  A box is accepted when that lower bound exceeds
    ``offset + tolerance``, refuted when a point evaluation falls below
    ``offset``, and otherwise split in r (and in x once r is very thin).
    """
    t0 = time.perf_counter()
    cf = cf if cf is not None else build_F2()
    thr = offset + tolerance
    re = np.linspace(0.0, float(HALF_PI.hi), initial + 1)
    rl, rh = re[:-1].copy(), re[1:].copy()
    sl, sh = np.zeros_like(rl), np.ones_like(rl)
    used = 0
    depth = 0
    min_lower = math.inf
    while rl.size:
        if used + rl.size > budget:
            return BranchBoundResult("INCONCLUSIVE", used, depth, min_lower, None, time.perf_counter() - t0)
        used += rl.size
        Q = {k: cf.profile.enclose(k, Interval(rl, rh)) for k in _D_NAMES}
        A = d_coefficients(Q, Interval.coerce(cf.a))
        low = quadratic_lower_bound(*A, sl, sh)
        ok = low > thr
        if np.any(ok):
            min_lower = min(min_lower, float(np.min(low[ok])))
        pend = ~ok
        if np.any(pend):
            # refutation: at the r-centre, try both x-ends and the vertex of the midpoint quadratic
            rc = 0.5 * (rl[pend] + rh[pend])
            Qc = {k: cf.profile.enclose(k, Interval(rc)) for k in _D_NAMES}
            C0, C1, C2 = d_coefficients(Qc, Interval.coerce(cf.a))
            with np.errstate(divide="ignore", invalid="ignore"):
                vx = np.where(C2.mid > 0, -C1.mid / (2 * C2.mid), sl[pend])
            cands = (sl[pend], sh[pend], np.clip(vx, sl[pend], sh[pend]))
            for xc in cands:
                x = Interval(xc)
                dc = C0 + x * (C1 + x * C2)
                neg = dc.hi < offset
                if np.any(neg):
                    k = int(np.argmax(neg))
                    s_angle = math.asin(math.sqrt(min(1.0, float(xc[k]))))
                    return BranchBoundResult(
                        "FALSIFIED", used, depth, min_lower, (float(rc[k]), s_angle), time.perf_counter() - t0
                    )
        rl, rh, sl, sh = rl[pend], rh[pend], sl[pend], sh[pend]
        if not rl.size:
            break
        # split in r; once r is very thin, split in x instead
        thin = (rh - rl) < 1e-9
        rm = np.where(thin, rh, 0.5 * (rl + rh))
        sm = np.where(thin, 0.5 * (sl + sh), sh)
        rl, rh, sl, sh = (
            np.concatenate([rl, np.where(thin, rl, rm)]),
            np.concatenate([rm, rh]),
            np.concatenate([sl, np.where(thin, sm, sl)]),
            np.concatenate([sm, sh]),
        )
        depth += 1
    return BranchBoundResult("PASS", used, depth, min_lower, None, time.perf_counter() - t0)
