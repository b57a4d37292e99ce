"""Command-line surface: every computation as a reproducible, scriptable run.

Commands: bessel, scan, asymptotics, type, hardy, identities.  Numeric CSV
output uses fixed 12-significant-digit scientific notation so identical
configurations produce byte-identical artifacts (modulo the timestamped
banner comment, suppressible with --no-banner).

Exit codes: 0 success, 2 bad arguments, 3 solver failure, 4 semantic misuse,
5 internal invariant violation.
"""

from __future__ import annotations

import argparse
import math
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from typing import Optional

from . import __version__
from .numerics import Interval, InsufficientSamples, InvalidBracket, NonConvergence, NonFinite
from .profiles import InconclusiveTail, Profile, load_profile, parse_profile_options
from .special import (
    BracketingFailure,
    OutOfSupportedRange,
    check_lemma21,
    check_lemma23,
    first_zero,
    lambda_mu,
)
from .sturm import NoConvergence as SturmNoConvergence
from .sturm import SingularMass, StiffnessFailure
from .surface import (
    dprs_bound,
    estimate,
    h_bounds,
    lambda1_ball,
    r_grid,
    volume_ball,
    volume_complement,
)
from .hardy import MeaninglessConstant, RadialModel, check_prop17, hardy_infimum

EXIT_OK = 0
EXIT_BAD_ARGS = 2
EXIT_SOLVER = 3
EXIT_SEMANTIC = 4
EXIT_INVARIANT = 5

_SOLVER_ERRORS = (NonConvergence, SturmNoConvergence, StiffnessFailure, SingularMass,
                  BracketingFailure, InvalidBracket, NonFinite, InconclusiveTail)
_BAD_ARG_ERRORS = (OutOfSupportedRange, InsufficientSamples, ValueError)


def _fmt(x: float) -> str:
    return f"{x:.11e}"


class _Run:
    """Collects resolved settings (with provenance) for the banner comment."""

    def __init__(self, command: str):
        self.command = command
        self.settings: list[str] = []

    def note(self, key: str, value, source: str) -> None:
        self.settings.append(f"{key}={value}({source})")

    def banner(self) -> str:
        stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        body = " ".join(self.settings)
        return f"# spectral-type {self.command} v{__version__} generated={stamp} {body}"


def _profile_from_args(args, run: _Run) -> Profile:
    if args.profile is not None:
        profile = load_profile(args.profile)
        run.note("profile", args.profile, "config-file")
        return profile
    if args.family is None:
        raise ValueError("give either --profile <config> or --family <name>")
    opts = {"family": args.family}
    for key in ("alpha", "beta", "gamma"):
        value = getattr(args, key)
        if value is not None:
            opts[key] = repr(value)
    if args.mu_choice is not None:
        opts["mu_choice"] = args.mu_choice
    if args.table is not None:
        opts["csv"] = args.table
    profile = parse_profile_options(opts)
    run.note("profile", profile.describe().replace(" ", ","), "flags")
    return profile


def _add_profile_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--profile", help="profile config file (key=value lines)")
    parser.add_argument("--family", help="inline family: power_law|exp_decay|dprs|"
                                         "staircase|slowly_varying|tabulated")
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--beta", type=float)
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--mu-choice", dest="mu_choice",
                        choices=("log_power", "power", "log_log"))
    parser.add_argument("--table", help="two-column CSV (t, eta_prime) for tabulated")


def _add_output_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="write output here instead of stdout")
    parser.add_argument("--no-banner", action="store_true",
                        help="suppress the timestamped banner comment")


def _emit(args, run: _Run, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if not args.no_banner:
        text = run.banner() + "\n" + text
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _threads() -> int:
    raw = os.environ.get("SPECTRAL_TYPE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _radii_from_args(args, profile: Profile, run: _Run) -> list[float]:
    if args.r_list:
        radii = sorted(float(tok) for tok in args.r_list.split(","))
        run.note("r_list", args.r_list, "flag")
    else:
        if args.r_min is None or args.r_max is None:
            raise ValueError("give --r-list or both --r-min/--r-max")
        window = Interval(args.r_min, args.r_max)
        radii = list(r_grid(window, min_points=args.points or 6))
        run.note("r_window", f"[{args.r_min},{args.r_max}]", "flag")
    cap = profile.scan_r_cap()
    if cap is not None and radii[-1] > cap:
        raise ValueError(f"radius {radii[-1]} beyond this profile's scan cap {cap}")
    if any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    return radii


def cmd_bessel(args) -> int:
    if (args.nu is None) == (args.mu is None):
        raise ValueError("give exactly one of --nu or --mu")
    lines = []
    if args.nu is not None:
        lines.append(_fmt(first_zero(args.nu)))
    else:
        const = lambda_mu(args.mu)
        lines.append(f"mu={_fmt(const.mu.mu)} j={_fmt(const.j)} lambda={_fmt(const.lam)}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_scan(args) -> int:
    run = _Run("scan")
    profile = _profile_from_args(args, run)
    radii = _radii_from_args(args, profile, run)
    run.note("cells", args.cells if args.cells else "auto", "flag" if args.cells else "default")

    def one(r: float):
        sol = lambda1_ball(profile, r, cells=args.cells)
        lower = dprs_bound(profile, r)
        try:
            comp = volume_complement(profile, r)
        except InconclusiveTail:
            comp = math.nan
        return (r, sol.lam, r * r * sol.lam, lower, volume_ball(profile, r), comp)

    workers = _threads()
    try:
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(one, radii))
        else:
            rows = [one(r) for r in radii]
    except _SOLVER_ERRORS as exc:
        print(f"solver failure during scan (r grid {radii}): {exc}", file=sys.stderr)
        return EXIT_SOLVER

    rows.sort(key=lambda row: row[0])
    tabulated = profile.family == "tabulated"
    for row in rows:
        r, lam, _, lower, _, _ = row
        if not tabulated and lam < lower * (1.0 - 1e-9):
            print(f"internal invariant violated at r={r}: lambda1={lam} "
                  f"below its lower bound {lower}", file=sys.stderr)
            return EXIT_INVARIANT
    lines = ["r,lambda1,r2lambda1,dprs_bound,vol_ball,vol_complement"]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    _emit(args, run, lines)
    return EXIT_OK


def cmd_asymptotics(args) -> int:
    run = _Run("asymptotics")
    profile = _profile_from_args(args, run)
    if args.r_min is None or args.r_max is None:
        raise ValueError("asymptotics needs --r-min and --r-max")
    window = Interval(args.r_min, args.r_max)
    cap = profile.scan_r_cap()
    if cap is not None and window.hi > cap:
        raise ValueError(f"window end {window.hi} beyond this profile's scan cap {cap}")
    run.note("r_window", f"[{window.lo},{window.hi}]", "flag")

    radii = r_grid(window)
    try:
        lam_samples = [(r, lambda1_ball(profile, r, cells=args.cells).lam) for r in radii]
    except _SOLVER_ERRORS as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER

    lines = ["quantity,estimate,window,flag"]

    def add(quantity: str, **kw) -> None:
        try:
            est = estimate(profile, quantity, window, **kw)
        except ValueError as exc:
            lines.append(f"{quantity},n/a,,{exc}")
            return
        flag = "finite-window heuristic"
        if est.note:
            flag += "; " + est.note
        lines.append(f"{quantity},{_fmt(est.value)},[{window.lo:g},{window.hi:g}],{flag}")

    add("lambda_star", samples=lam_samples)
    add("lambda_star_upper", samples=lam_samples)
    add("lambda_tilde", samples=lam_samples)
    add("nu_star")
    add("alpha_star")
    add("alpha_star_upper")
    _emit(args, run, lines)
    return EXIT_OK


def cmd_type(args) -> int:
    run = _Run("type")
    profile = _profile_from_args(args, run)
    verdict = h_bounds(profile)
    sup = "inf" if math.isinf(verdict.h_sup) else _fmt(verdict.h_sup)
    inf_ = "-inf" if math.isinf(verdict.h_inf) else _fmt(verdict.h_inf)
    flag = " [heuristic tail ruling]" if verdict.heuristic else ""
    print(f"{verdict.verdict.capitalize()} (sup h = {sup}, inf h = {inf_}){flag}")
    return EXIT_OK


def cmd_hardy(args) -> int:
    if args.check_prop17:
        if args.n is None or args.r is None:
            raise ValueError("--check-prop17 needs --n and --r")
        rep = check_prop17(args.n, args.r, cells=args.cells or 4000)
        status = "PASS" if rep.passed else "FAIL"
        print(f"{status} n={rep.n} r={rep.r:g}: lambda1*r^2={_fmt(rep.lam_fem * rep.r**2)} "
              f"expected={_fmt(rep.lam_expected * rep.r**2)} rel_err={rep.rel_error:.2e} "
              f"(tolerance 0.5%)")
        return EXIT_OK if rep.passed else EXIT_INVARIANT
    if args.euclidean is None:
        raise ValueError("give --euclidean N or --check-prop17")
    support = Interval(args.support[0], args.support[1])
    rep = hardy_infimum(RadialModel.euclidean(args.euclidean), support,
                        cells=args.cells or 8000, epsilon=args.epsilon)
    print(f"dimension n={args.euclidean} support=({support.lo:g},{support.hi:g}) "
          f"cells={rep.cells} epsilon={rep.epsilon:g}")
    print(f"discrete_infimum={_fmt(rep.discrete_infimum)} "
          f"sharp_constant={_fmt(rep.sharp_constant)}")
    return EXIT_OK


def cmd_identities(args) -> int:
    rng = random.Random(args.seed)
    worst = 0.0
    lines = []
    for _ in range(args.count):
        mu = rng.uniform(0.3, 40.0)
        a = rng.uniform(0.0, 0.5)
        b = rng.uniform(a + 0.1, 1.0)
        res = check_lemma21(mu, a, b)
        worst = max(worst, res)
        lines.append(f"interval-identity mu={mu:.4f} a={a:.4f} b={b:.4f} residual={res:.3e}")
    for _ in range(args.count):
        mu = rng.uniform(2.3, 40.0)
        x = rng.uniform(0.05, 1.0)
        res = check_lemma23(mu, x)
        worst = max(worst, res)
        lines.append(f"weighted-identity mu={mu:.4f} x={x:.4f} residual={res:.3e}")
    for line in lines:
        print(line)
    if worst >= 1e-8:
        print(f"FAIL: worst residual {worst:.3e} >= 1e-8", file=sys.stderr)
        return EXIT_INVARIANT
    print(f"PASS: worst residual {worst:.3e} < 1e-8")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectral-type",
        description="Eigenvalue, volume-growth, type and Hardy-constant numerics "
                    "on radially symmetric models",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bessel", help="first Bessel zero / eigenvalue constant")
    p.add_argument("--nu", type=float, help="order of the Bessel function")
    p.add_argument("--mu", type=float, help="dimension parameter (uses order mu/2-1)")
    p.set_defaults(fn=cmd_bessel)

    p = sub.add_parser("scan", help="lambda_1(B_r), bounds and volumes over an r grid (CSV)")
    _add_profile_args(p)
    p.add_argument("--r-min", type=float)
    p.add_argument("--r-max", type=float)
    p.add_argument("--points", type=int, help="minimum number of grid radii")
    p.add_argument("--r-list", help="comma-separated explicit radii")
    p.add_argument("--cells", type=int, help="FEM cells (default scales with r)")
    _add_output_args(p)
    p.set_defaults(fn=cmd_scan)

    p = sub.add_parser("asymptotics", help="finite-window estimates of the liminf/limsup quantities")
    _add_profile_args(p)
    p.add_argument("--r-min", type=float)
    p.add_argument("--r-max", type=float)
    p.add_argument("--cells", type=int)
    _add_output_args(p)
    p.set_defaults(fn=cmd_asymptotics)

    p = sub.add_parser("type", help="parabolic/hyperbolic verdict from the h-integral")
    _add_profile_args(p)
    p.set_defaults(fn=cmd_type)

    p = sub.add_parser("hardy", help="sharp Hardy constant checks on radial models")
    p.add_argument("--euclidean", type=int, help="Euclidean dimension n")
    p.add_argument("--support", type=float, nargs=2, default=(0.0, 10.0),
                   metavar=("LO", "HI"))
    p.add_argument("--cells", type=int)
    p.add_argument("--epsilon", type=float, help="rho regularization (default 1e-3*width)")
    p.add_argument("--check-prop17", action="store_true",
                   help="Euclidean ball eigenvalue against the Bessel constant")
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=float)
    p.set_defaults(fn=cmd_hardy)

    p = sub.add_parser("identities", help="random residual suite for the two integral identities")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--seed", type=int, default=20240814)
    p.set_defaults(fn=cmd_identities)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except MeaninglessConstant as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC
    except _SOLVER_ERRORS as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except _BAD_ARG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS


if __name__ == "__main__":
    sys.exit(main())
