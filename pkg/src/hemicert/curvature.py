"""Separable conformal factors f = a + F(r) psi(s) on the hemisphere.

Coordinates: r is the distance from the pole, s the next polar angle, and
the remaining n-1 directions span a round S^{n-1} of radius sin r sin s.
The metric is ``dr^2 + sin^2 r (ds^2 + sin^2 s g_{S^{n-1}})`` and
``psi(s) = -sin^{2k} s``.

With P = F/sin^2 r, T = F' cot r and W = (F' - F cot r)/sin r, the Hessian
in the orthonormal frame (e_r, e_s, e_theta...) is

    [[F'' psi,  psi' W           ],
     [psi' W,   P psi'' + T psi  ]]   and  P psi' cot s + T psi  (n-1 times).

The Ricci variation is negative semidefinite when the endomorphism
``(Lap f + 2n f) Id + (n-1) Hess f`` is, which reduces to the signs of
E1 (repeated entry), E2 (upper-left entry) and D (2x2 determinant).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .interval import HALF_PI, PI, DomainError, Interval, interval_env
from .poly import CosPoly, RPoly
from .radial import RadialProfile

__all__ = [
    "ConformalFactor",
    "HessianBlocks",
    "ScaledCosPoly",
    "hessian_blocks",
    "e1_e2_d",
    "float_fields",
    "semidefinite_oracle",
    "christoffel_hessian_oracle",
    "mean_curvature_first_order",
    "conformal_H_exact",
]


@dataclass(frozen=True)
class ScaledCosPoly:
    """An exact ``CosPoly`` times an interval constant."""

    poly: CosPoly
    scale: Interval

    def is_zero(self) -> bool:
        return self.poly.is_zero() or (self.scale.lo == 0 and self.scale.hi == 0)


class ConformalFactor:
    """``f = a + F(r) * psi(s)`` with ``psi = -sin^{2k} s``.

    ``F`` is an even rational polynomial with ``F(0) = 0``, multiplied by the
    interval ``scale`` (the normalizer); ``b`` and ``c`` enclose ``F(pi/2)``
    and ``F'(pi/2)``.
    """

    def __init__(self, n: int, a, F: RPoly, k: int, scale=1):
        if n < 2:
            raise ValueError("n >= 2 required")
        if k < 1:
            raise ValueError("k >= 1 required")
        self.n = n
        self.a = Fraction(a)
        self.k = k
        self.profile = RadialProfile(F, scale)
        self.b = self.profile.enclose("Q1", HALF_PI.lo)
        self.c = self.profile.enclose("Q2", HALF_PI.lo)
        if not F.is_zero() and not (self.b.lo > 0 and self.c.lo > 0):
            raise ValueError("need F(pi/2) > 0 and F'(pi/2) > 0")

    @property
    def F(self) -> RPoly:
        return self.profile.Ftilde

    @property
    def scale(self) -> Interval:
        return self.profile.scale

    def __repr__(self):
        return f"ConformalFactor(n={self.n}, a={self.a}, k={self.k}, deg F={self.F.degree})"


@dataclass(frozen=True)
class HessianBlocks:
    """Hessian entries over a box.

    ``h_rr, h_rs, h_ss, h_sphere`` are coordinate components (the last one
    multiplies the unit S^{n-1} metric); the ``*_n`` fields are the same
    entries in the orthonormal frame.
    """

    r: Interval
    s: Interval
    h_rr: Interval
    h_rs: Interval
    h_ss: Interval
    h_sphere: Interval
    h_rs_n: Interval
    h_ss_n: Interval
    h_sphere_n: Interval
    lap: Interval
    f: Interval


def _fold_s(s: Interval) -> Interval:
    # psi is symmetric about pi/2; evaluate on the lower half when possible
    upper = s.lo >= HALF_PI.hi
    if np.ndim(s.lo) == 0:
        return PI - s if upper else s
    if not np.any(upper):
        return s
    flipped = PI - s
    return Interval(np.where(upper, flipped.lo, s.lo), np.where(upper, flipped.hi, s.hi))


def _psi_terms(k: int, s: Interval):
    """psi, psi', psi' cot s, psi'' over s (k >= 1)."""
    sig = interval_env("sin2", s)
    sn = interval_env("sin", s)
    cs = interval_env("cos", s)
    one_minus = 1 - sig
    sig_km1 = sig ** (k - 1)
    psi = -(sig**k)
    dpsi = -2 * k * (sn ** (2 * k - 1)) * cs
    dpsi_cot = -2 * k * sig_km1 * one_minus
    ddpsi = -2 * k * (2 * k - 1) * sig_km1 * one_minus + 2 * k * sig**k
    return psi, dpsi, dpsi_cot, ddpsi


def _check_box(r: Interval, s: Interval):
    if np.any(r.lo < 0) or np.any(r.hi > HALF_PI.hi):
        raise DomainError("r must lie in [0, pi/2]")
    if np.any(s.lo < 0) or np.any(s.hi > PI.hi):
        raise DomainError("s must lie in [0, pi]")


def hessian_blocks(cf: ConformalFactor, r, s) -> HessianBlocks:
    """Certified enclosures of the Hessian entries and the Laplacian of f."""
    r = Interval.coerce(r)
    s = Interval.coerce(s)
    _check_box(r, s)
    s_raw, s = s, _fold_s(s)
    n, k, prof = cf.n, cf.k, cf.profile
    F = prof.enclose("Q1", r)
    F2 = prof.enclose("Q3", r)
    P = prof.enclose("P", r)
    T = prof.enclose("T", r)
    W = prof.enclose("W", r)
    psi, _, dpsi_cot, ddpsi = _psi_terms(k, s)
    # psi' is odd about pi/2, so it is taken from the unfolded angle
    dpsi = _psi_terms(k, s_raw)[1]

    h_rr = F2 * psi
    h_rs_n = dpsi * W
    h_ss_n = P * ddpsi + T * psi
    h_sph_n = P * dpsi_cot + T * psi
    lap = h_rr + P * ddpsi + n * (T * psi) + (n - 1) * (P * dpsi_cot)

    sr = interval_env("sin", r)
    sr2 = interval_env("sin2", r)
    ss2 = interval_env("sin2", s)
    return HessianBlocks(
        r=r,
        s=s_raw,
        h_rr=h_rr,
        h_rs=sr * h_rs_n,
        h_ss=sr2 * h_ss_n,
        h_sphere=(sr2 * ss2) * h_sph_n,
        h_rs_n=h_rs_n,
        h_ss_n=h_ss_n,
        h_sphere_n=h_sph_n,
        lap=lap,
        f=cf.a + F * psi,
    )


def e1_e2_d(cf: ConformalFactor, r, s) -> tuple[Interval, Interval, Interval]:
    """Enclosures of E1, E2 and D over a box."""
    hb = hessian_blocks(cf, r, s)
    m = cf.n - 1
    lam = hb.lap + 2 * cf.n * hb.f
    e1 = lam + m * hb.h_sphere_n
    e2 = lam + m * hb.h_rr
    d = e2 * (lam + m * hb.h_ss_n) - (m * m) * hb.h_rs_n.sqr()
    return e1, e2, d


def float_fields(cf: ConformalFactor, r, s) -> dict[str, np.ndarray]:
    """Float64 values of f, the orthonormal-frame Hessian and E1, E2, D (r > 0)."""
    r = np.asarray(r, dtype=float)
    s_raw = np.asarray(s, dtype=float)
    s = np.where(s_raw > math.pi / 2, math.pi - s_raw, s_raw)
    n, k, prof = cf.n, cf.k, cf.profile
    F = prof.float_values("Q1", r)
    F2 = prof.float_values("Q3", r)
    P = prof.float_values("P", r)
    T = prof.float_values("T", r)
    W = prof.float_values("W", r)
    sig = np.sin(s) ** 2
    one_minus = np.cos(s) ** 2
    psi = -(sig**k)
    dpsi = -2 * k * np.sin(s) ** (2 * k - 1) * np.cos(s_raw)
    dpsi_cot = -2 * k * sig ** (k - 1) * one_minus
    ddpsi = -2 * k * (2 * k - 1) * sig ** (k - 1) * one_minus + 2 * k * sig**k
    h_rr = F2 * psi
    h_rs = dpsi * W
    h_ss = P * ddpsi + T * psi
    h_th = P * dpsi_cot + T * psi
    lap = h_rr + h_ss + (n - 1) * h_th
    f = float(cf.a) + F * psi
    lam = lap + 2 * n * f
    e1 = lam + (n - 1) * h_th
    e2 = lam + (n - 1) * h_rr
    d = e2 * (lam + (n - 1) * h_ss) - (n - 1) ** 2 * h_rs**2
    return dict(f=f, h_rr=h_rr, h_rs=h_rs, h_ss=h_ss, h_theta=h_th, lap=lap, lam=lam, e1=e1, e2=e2, d=d)


def semidefinite_oracle(cf: ConformalFactor, r, s):
    """Largest eigenvalue of ``(Lap f + 2n f) Id + (n-1) Hess f`` and a consistency flag.

    Assembles the full (n+1)x(n+1) matrices and diagonalizes them; the flag
    says whether "max eigenvalue <= 0" agrees with "E1 < 0, E2 <= 0, D >= 0".
    Accepts scalars or arrays of points.
    """
    v = float_fields(cf, r, s)
    n = cf.n
    shape = np.shape(v["d"])
    flat = {key: np.ravel(val) for key, val in v.items()}
    npts = flat["d"].size
    mats = np.zeros((npts, n + 1, n + 1))
    lam = flat["lam"]
    mats[:, 0, 0] = lam + (n - 1) * flat["h_rr"]
    mats[:, 0, 1] = mats[:, 1, 0] = (n - 1) * flat["h_rs"]
    mats[:, 1, 1] = lam + (n - 1) * flat["h_ss"]
    for i in range(2, n + 1):
        mats[:, i, i] = lam + (n - 1) * flat["h_theta"]
    top = np.linalg.eigvalsh(mats)[:, -1]
    reduced = (flat["e1"] < 0) & (flat["e2"] <= 0) & (flat["d"] >= 0)
    consistent = (top <= 0) == reduced
    if shape == ():
        return float(top[0]), bool(consistent[0])
    return top.reshape(shape), consistent.reshape(shape)


def _f_float(cf: ConformalFactor, r, s):
    Fv = np.polynomial.polynomial.polyval(r, [float(c) for c in cf.F.coeffs] or [0.0]) * float(cf.scale.mid)
    return float(cf.a) - Fv * np.sin(s) ** (2 * cf.k)


def christoffel_hessian_oracle(cf: ConformalFactor, r, s, step: float = 1e-5):
    """Max deviation between finite-difference Hessian and ``hessian_blocks``.

    Uses central differences for the partials of f and the closed-form
    Christoffel symbols of the warped metric.  Accepts scalars or arrays of
    points and returns the deviation per point.
    """
    scalar = np.ndim(r) == 0 and np.ndim(s) == 0
    r, s = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(s, dtype=float))
    h = step
    f = lambda x, y: _f_float(cf, x, y)  # noqa: E731
    f0 = f(r, s)
    fr = (f(r + h, s) - f(r - h, s)) / (2 * h)
    fs = (f(r, s + h) - f(r, s - h)) / (2 * h)
    frr = (f(r + h, s) - 2 * f0 + f(r - h, s)) / h**2
    fss = (f(r, s + h) - 2 * f0 + f(r, s - h)) / h**2
    frs = (f(r + h, s + h) - f(r + h, s - h) - f(r - h, s + h) + f(r - h, s - h)) / (4 * h * h)
    cr, sr = np.cos(r), np.sin(r)
    cs, ss = np.cos(s), np.sin(s)
    fd = {
        "h_rr": frr,
        "h_rs": frs - (cr / sr) * fs,
        "h_ss": fss + sr * cr * fr,
        "h_sphere": sr * cr * ss * ss * fr + ss * cs * fs,
    }
    hb = hessian_blocks(cf, Interval(r.ravel()), Interval(s.ravel()))
    dev = np.zeros(r.size)
    for key, val in fd.items():
        dev = np.maximum(dev, np.abs(np.asarray(getattr(hb, key).mid) - val.ravel()))
    return float(dev[0]) if scalar else dev.reshape(r.shape)


def mean_curvature_first_order(cf: ConformalFactor) -> ScaledCosPoly:
    """``(n/2) d_r f`` on the equator, i.e. ``(n/2) c psi`` as a scaled CosPoly."""
    poly = -Fraction(cf.n, 2) * CosPoly.sin2_power(cf.k)
    if cf.F.is_zero():
        return ScaledCosPoly(CosPoly(()), Interval(0.0))
    return ScaledCosPoly(poly, cf.c)


def conformal_H_exact(H: float, f_val: float, d0f: float, n: int) -> float:
    """Mean curvature of the boundary after the conformal change ``e^f g``."""
    return math.exp(-f_val / 2) * (H + n / 2 * d0f)
