"""Command line entry point: ``hemicert certify-n2 | certify-general | spectral``.

Exit codes: 0 certified, 1 falsified (or a rejected precondition),
2 inconclusive, 3 I/O error.
"""

from __future__ import annotations

import argparse
import os
import platform
import sys
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .curvature import semidefinite_oracle
from .dim2 import (
    A_DEFAULT,
    E_COEFFICIENT_BOUNDS,
    branch_bound_certify,
    build_F2,
    certify_all_qbounds,
    certify_E1_E2,
    certify_lapest,
    d_derivative_bounds,
    grid_certify,
)
from .highdim import check_Lest, check_mkcond, check_mkest, find_m, monomial_factor, param_choice, verify_chain
from .interval import HALF_PI
from .jacobi import sff_integral, sff_variation, solve_jacobi
from .report import IO_ERROR_EXIT, Report
from .spectral import quadrature_mu_n, mu_values, sign_pattern_check

__all__ = ["main", "build_parser", "cmd_certify_n2", "cmd_certify_general", "cmd_spectral", "read_config"]

ORACLE_POINTS = 10_000


def _workers(flag: Optional[int]) -> int:
    if flag:
        return flag
    env = os.environ.get("WORKERS")
    if env:
        return int(env)
    return os.cpu_count() or 1


def _environment(workers: int) -> dict:
    return {
        "arithmetic": "float64 intervals, outward rounded",
        "workers": workers,
        "hemicert": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
    }


def _oracle_check(report: Report, cf, points: int, seed: int = 0):
    """Compare the reduced sign conditions with full eigenvalue computations at random points."""
    if points <= 0:
        return
    rng = np.random.default_rng(seed)
    r = rng.uniform(1e-3, float(HALF_PI.lo), points)
    s = rng.uniform(1e-3, np.pi - 1e-3, points)
    top, consistent = semidefinite_oracle(cf, r, s)
    bad = int(np.sum(~consistent))
    report.add(
        "semidefinite_oracle",
        "PASS" if bad == 0 else "FAIL",
        {"points": points, "seed": seed, "inconsistent": bad, "positive_eigenvalue_points": int(np.sum(top > 0))},
    )


def _epsilon_upper(n: int, mu_n):
    """Largest admissible Ricci-scaling slack: 0 < eps < -2 mu_n / n, or None when mu_n >= 0."""
    return -2 * mu_n / n if mu_n < 0 else None


def _spectral_and_jacobi(report: Report, n: int, k: int, a, b, c):
    sv = mu_values(n, k, a, b)
    report.add(
        "spectral_sign",
        sign_pattern_check(sv),
        {"a": sv.a, "b": sv.b, "mu_n": sv.mu_n, "mu_common": sv.mu_common, "mu_sum": sv.mu_sum,
         "epsilon_upper": _epsilon_upper(n, sv.mu_n)},
    )
    try:
        js = solve_jacobi(n, k, c)
        sff_variation(js)
        report.add("jacobi_identity", "PASS", {"coeffs": list(js.coeffs), "prefactor": js.prefactor, "c": c})
    except ArithmeticError as exc:  # pragma: no cover - the identities are exact
        report.add("jacobi_identity", "FAIL", {"error": str(exc)})
        return
    integral = sff_integral(n, k, c)
    report.add("sff_integral", "PASS" if integral.lo > 0 else "FAIL", {"value": integral})


def cmd_certify_n2(
    delta: float = 1e-4,
    workers: Optional[int] = None,
    coefficient_variant: str = "eq",
    a=A_DEFAULT,
    branch_bound: bool = False,
    oracle_points: int = ORACLE_POINTS,
) -> Report:
    """The full n = 2 pipeline, from the normalizing constants to the boundary integral."""
    w = _workers(workers)
    a = Fraction(a)
    cf = build_F2(coefficient_variant, a)
    rep = Report(
        "certify-n2",
        {"n": 2, "k": 1, "a": a, "delta": delta, "coefficient_variant": coefficient_variant, "branch_bound": branch_bound},
        environment=_environment(w),
    )
    rep.add("normalization", "PASS" if cf.C.lo > 0 and cf.c.lo > 0 else "FAIL", {"C": cf.C, "c": cf.c})

    qb = certify_all_qbounds(cf)
    verdicts = {q.verdict for q in qb}
    q_verdict = "PASS" if verdicts == {"PASS"} else ("FAIL" if "FAIL" in verdicts else "INCONCLUSIVE")
    rep.add("q_bounds", q_verdict, {f"Q{q.index}": q for q in qb})

    lap = certify_lapest(cf)
    rep.add("laplacian_bounds", lap.verdict, lap)
    e = certify_E1_E2(cf, E_COEFFICIENT_BOUNDS)
    rep.add("E1_E2", e.verdict, e)
    db = d_derivative_bounds(cf)
    rep.add("derivative_bounds", db.verdict, db)

    grid = grid_certify(delta=delta, workers=w, cf=cf)
    rep.add("grid", grid.verdict, grid)
    if branch_bound:
        bb = branch_bound_certify(cf=cf)
        rep.add("branch_bound", bb.verdict, bb)

    _oracle_check(rep, cf, oracle_points)
    # F is normalized so that F(pi/2) = 1, hence b = 1 exactly
    _spectral_and_jacobi(rep, 2, 1, a, Fraction(1), cf.c)
    return rep


def cmd_certify_general(
    n: int,
    k: int,
    m: Optional[int] = None,
    subdivision: int = 2000,
    workers: Optional[int] = None,
    rule: str = "stated",
    oracle_points: int = ORACLE_POINTS,
) -> Report:
    """The n >= 3 pipeline for ``f = -r^{2m} sin^{2k} s``."""
    w = _workers(workers)
    rep = Report(
        "certify-general",
        {"n": n, "k": k, "m": m, "subdivision": subdivision, "rule": rule},
        environment=_environment(w),
    )
    try:
        pc = find_m(n, k, rule) if m is None else param_choice(n, k, m, rule)
    except ValueError as exc:
        rep.add("parameters", "ERROR", {"error": str(exc)})
        return rep
    rep.configuration["m"] = pc.m
    diagnostics = {c.name: c for c in (check_mkest(pc), check_Lest(pc), check_mkcond(pc))}
    rep.add(
        "parameters",
        "PASS",
        {
            "m_selected": m is None,
            "degree_condition": pc.conditions_met[0],
            "pi2_condition": pc.conditions_met[1],
            "ratio_condition": pc.conditions_met[2],
            "diagnostics": diagnostics,
        },
    )
    chain = verify_chain(pc, subdivision, w)
    rep.add("chain", chain.verdict, chain)

    cf = monomial_factor(n, k, pc.m)
    _oracle_check(rep, cf, oracle_points)
    # with a = 0 the variations are linear in b = (pi/2)^{2m} > 0; report them for b = 1
    _spectral_and_jacobi(rep, n, k, 0, Fraction(1), cf.c)
    rep.configuration["b"] = cf.b
    return rep


def cmd_spectral(n: int, k: int, a, b) -> Report:
    """Exact eigenvalue variations with a quadrature cross-check of mu_n."""
    a, b = Fraction(a), Fraction(b)
    rep = Report("spectral", {"n": n, "k": k, "a": a, "b": b}, environment=_environment(1))
    sv = mu_values(n, k, a, b)
    rep.add(
        "spectral_sign",
        sign_pattern_check(sv),
        {"mu_n": sv.mu_n, "mu_common": sv.mu_common, "mu_sum": sv.mu_sum, "epsilon_upper": _epsilon_upper(n, sv.mu_n)},
    )
    quad = quadrature_mu_n(n, k, a, b)
    delta = abs(quad - float(sv.mu_n))
    rep.add("quadrature_crosscheck", "PASS" if delta <= 1e-9 * max(1.0, abs(float(sv.mu_n))) else "FAIL", {"mu_n_quadrature": quad, "delta": delta})
    return rep


# --------------------------------------------------------------------------- argument handling


def read_config(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment.  Keys use flag names with - or _."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = (x.strip() for x in line.split("=", 1))
            out[key.replace("_", "-")] = value
    return out


def _config_argv(cfg: dict, sub: argparse.ArgumentParser) -> list[str]:
    flags = {}
    for act in sub._actions:
        for opt in act.option_strings:
            flags[opt.lstrip("-")] = act
    argv = []
    for key, value in cfg.items():
        act = flags.get(key)
        if act is None or key == "config":
            raise ValueError(f"unknown config key {key!r}")
        if act.nargs == 0:
            if value.lower() in ("1", "true", "yes", "on"):
                argv.append(f"--{key}")
        else:
            argv += [f"--{key}", value]
    return argv


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hemicert", description="Certify the hemisphere conformal deformation inequalities.")
    p.add_argument("--version", action="version", version=f"hemicert {__version__}")
    subs = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=("json", "markdown"), default="json")
        sp.add_argument("--config", help="key=value file; command-line flags win")

    n2 = subs.add_parser("certify-n2", help="the two-dimensional construction and its grid certificate")
    n2.add_argument("--delta", type=float, default=1e-4, help="grid spacing in both variables")
    n2.add_argument("--workers", type=int, default=None, help="worker threads (default: WORKERS env, then CPU count)")
    n2.add_argument("--coefficient-variant", choices=("eq", "appendix"), default="eq", help="r^10 coefficient of F: 74/429925 (eq) or 74/429975 (appendix)")
    n2.add_argument("--a", type=Fraction, default=A_DEFAULT, help="additive constant, exact rational such as 400001/1000000")
    n2.add_argument("--branch-bound", action="store_true", help="also run the interval branch-and-bound")
    n2.add_argument("--oracle-points", type=int, default=ORACLE_POINTS, help="random points for the eigenvalue cross-check (0 skips it)")
    common(n2)

    g = subs.add_parser("certify-general", help="the monomial construction for n >= 3")
    g.add_argument("--n", type=int, required=True, help="sphere dimension, at least 3")
    g.add_argument("--k", type=int, required=True, help="power of sin^2 in the angular factor")
    g.add_argument("--m", type=int, default=None, help="radial degree; searched for when omitted")
    g.add_argument("--subdivision", type=int, default=2000, help="number of radial boxes")
    g.add_argument("--workers", type=int, default=None, help="worker threads (default: WORKERS env, then CPU count)")
    g.add_argument("--rule", choices=("stated", "corrected"), default="stated", help="degree condition used when searching for m")
    g.add_argument("--oracle-points", type=int, default=ORACLE_POINTS, help="random points for the eigenvalue cross-check (0 skips it)")
    common(g)

    sp = subs.add_parser("spectral", help="exact first-order eigenvalue variations")
    sp.add_argument("--n", type=int, required=True, help="sphere dimension")
    sp.add_argument("--k", type=int, required=True, help="power of sin^2 in the angular factor")
    sp.add_argument("--a", type=Fraction, required=True, help="constant coefficient, exact rational")
    sp.add_argument("--b", type=Fraction, required=True, help="radial coefficient, exact rational")
    common(sp)
    return p


def _parse(argv: Sequence[str]) -> argparse.Namespace:
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config is None:
        return parser.parse_args(argv)
    cfg = read_config(known.config)
    cmd_index = next((i for i, x in enumerate(argv) if x in ("certify-n2", "certify-general", "spectral")), None)
    if cmd_index is None:
        return parser.parse_args(argv)
    subparser = parser._subparsers._group_actions[0].choices[argv[cmd_index]]
    extra = _config_argv(cfg, subparser)
    # config values go first so explicit flags override them
    return parser.parse_args([*argv[: cmd_index + 1], *extra, *argv[cmd_index + 1 :]])


def _run(args: argparse.Namespace) -> Report:
    if args.command == "certify-n2":
        return cmd_certify_n2(
            args.delta, args.workers, args.coefficient_variant, args.a, args.branch_bound, args.oracle_points
        )
    if args.command == "certify-general":
        return cmd_certify_general(args.n, args.k, args.m, args.subdivision, args.workers, args.rule, args.oracle_points)
    return cmd_spectral(args.n, args.k, args.a, args.b)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
    except OSError as exc:
        print(f"hemicert: cannot read config: {exc}", file=sys.stderr)
        return IO_ERROR_EXIT
    except ValueError as exc:
        print(f"hemicert: {exc}", file=sys.stderr)
        return 2
    report = _run(args)
    text = report.to_json() if args.format == "json" else report.to_markdown()
    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"hemicert: cannot write report: {exc}", file=sys.stderr)
        return IO_ERROR_EXIT
    print(f"overall: {report.overall}", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
