"""Surface-of-revolution engine: ball volumes, parabolic/hyperbolic
classification through the h-integral, first Dirichlet eigenvalues of the
balls B_r = {|t| < r}, the quarter-square lower bound, and finite-window
estimators for the asymptotic quantities (liminf/limsup of r^2 lambda_1,
volume-growth order, exponential rates).

The 2-D eigenvalue problem on B_r reduces to the 1-D weighted quotient with
weight eta' on (-r, r): angular modes only add a nonnegative
eta'(t)**-2 * k**2 term to the quotient, so the first eigenfunction is
independent of the angle.  Every computed eigenvalue is cross-checked by the
sandwich  quarter-square bound <= lambda_1 <= trapezoid test-function bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .numerics import Interval, Tolerance, fit_log_slope, integrate
from .profiles import InconclusiveTail, Profile, TabulatedProfile
from .sturm import (
    DIRICHLET,
    BoundaryCondition,
    EigenSolution,
    Mesh,
    WeightedProblem,
    first_eigen_fem,
)

PARABOLIC = "parabolic"
HYPERBOLIC = "hyperbolic"

#: lambda1_ball keeps essentially all cells: its pencils stay relatively
#: accurate even with weight ratios far below the general-purpose merge
#: threshold, and the eigenfunction often lives exactly where eta' is tiny
LAMBDA1_MERGE_THRESHOLD = 1e-280

QUANTITIES = ("lambda_star", "lambda_star_upper", "lambda_tilde",
              "nu_star", "alpha_star", "alpha_star_upper")


@dataclass(frozen=True)
class RadialBall:
    """B_r = {|t| < r} x S^1 for the exhaustion rho(t, theta) = |t|."""

    r: float

    def __post_init__(self) -> None:
        if not (self.r > 0.0 and math.isfinite(self.r)):
            raise ValueError(f"ball radius must be positive and finite, got {self.r}")


@dataclass(frozen=True)
class TypeVerdict:
    """Parabolic/hyperbolic ruling with the h-integral evidence attached."""

    verdict: str
    h_sup: float
    h_inf: float
    evidence: tuple
    heuristic: bool = False

    def is_hyperbolic(self) -> bool:
        return self.verdict == HYPERBOLIC


@dataclass(frozen=True)
class AsymptoticEstimate:
    """Finite-window proxy for a liminf/limsup quantity; carries the window
    and samples used so the caller can re-run wider."""

    quantity: str
    value: float
    window: Interval
    samples: tuple
    note: str = ""


def _radius(r: "float | RadialBall") -> float:
    return r.r if isinstance(r, RadialBall) else RadialBall(float(r)).r


def volume_ball(profile: Profile, r: "float | RadialBall") -> float:
    """|B_r| = 2 pi (eta(r) - eta(-r)), exact through the stored antiderivative."""
    rr = _radius(r)
    return 2.0 * math.pi * (profile.eta(rr) - profile.eta(-rr))


def volume_complement(profile: Profile, r: "float | RadialBall") -> float:
    """|M \\ B_r|: finite only when eta stays bounded (then the left tail
    contributes 2 pi eta(-r) and the right one 2 pi (eta(inf) - eta(r)))."""
    rr = _radius(r)
    limit = profile.eta_limit_pos()
    if limit is None:
        raise InconclusiveTail("tabulated data cannot rule on the total volume")
    if math.isinf(limit):
        return math.inf
    return 2.0 * math.pi * ((limit - profile.eta(rr)) + profile.eta(-rr))


# --------------------------------------------------------------------------
# type classification


_H_TOL = Tolerance(abs=1e-10, rel=1e-7, max_depth=60)


def _h_increment(profile: Profile, a: float, b: float) -> float:
    """int_a^b ds/eta'(s) for a < b (evidence-grade tolerance)."""
    return integrate(lambda s: 1.0 / profile.eta_prime(s), Interval(a, b), _H_TOL)


def _default_cutoffs(profile: Profile) -> tuple:
    cap = profile.scan_r_cap()
    top = 256.0 if cap is None else min(256.0, cap)
    cut = [4.0]
    while cut[-1] * 2.0 <= top:
        cut.append(cut[-1] * 2.0)
    return tuple(cut)


def _tail_heuristic(h_values: Sequence[float]) -> Optional[bool]:
    """Convergence ruling from |h| increments over a doubling cutoff schedule:
    geometric decay of the increments means a finite limit."""
    inc = [abs(b - a) for a, b in zip(h_values, h_values[1:])]
    if len(inc) < 3:
        return None
    ratios = [b / a if a > 0.0 else math.inf for a, b in zip(inc, inc[1:])]
    last = ratios[-3:]
    if all(q < 0.7 for q in last):
        return True
    if all(q > 0.95 for q in last):
        return False
    return None


def h_bounds(profile: Profile, cutoffs: Optional[Sequence[float]] = None) -> TypeVerdict:
    """Classify the surface: hyperbolic iff sup h < inf or inf h > -inf.

    Convergence of each tail is ruled by the family's closed form; tabulated
    profiles fall back to a flagged increment-ratio heuristic and raise
    InconclusiveTail when the table ends before it stabilizes.
    """
    if cutoffs is None:
        cutoffs = _default_cutoffs(profile)
    cutoffs = tuple(sorted(float(c) for c in cutoffs))
    if not cutoffs:
        raise ValueError("need at least one cutoff")

    evidence = []
    h_plus, h_minus = [], []
    acc_p = acc_m = 0.0
    prev = 0.0
    for c in cutoffs:
        acc_p += _h_increment(profile, prev, c)
        acc_m -= _h_increment(profile, -c, -prev)
        prev = c
        evidence.append((c, acc_p, acc_m))
        h_plus.append(acc_p)
        h_minus.append(acc_m)

    heuristic = False
    conv_pos = profile.h_tail_convergent(+1)
    conv_neg = profile.h_tail_convergent(-1)
    if conv_pos is None:
        conv_pos = _tail_heuristic(h_plus)
        heuristic = True
        if conv_pos is None:
            raise InconclusiveTail("positive-side h increments did not stabilize")
    if conv_neg is None:
        conv_neg = _tail_heuristic(h_minus)
        heuristic = True
        if conv_neg is None:
            raise InconclusiveTail("negative-side h increments did not stabilize")

    h_sup = h_plus[-1] if conv_pos else math.inf
    h_inf = h_minus[-1] if conv_neg else -math.inf
    verdict = HYPERBOLIC if (conv_pos or conv_neg) else PARABOLIC
    return TypeVerdict(verdict=verdict, h_sup=h_sup, h_inf=h_inf,
                       evidence=tuple(evidence), heuristic=heuristic)


# --------------------------------------------------------------------------
# eigenvalues and bounds


def default_cells(r: float) -> int:
    return max(2000, int(math.ceil(120.0 * r)))


def lambda1_ball(
    profile: Profile,
    r: "float | RadialBall",
    *,
    cells: Optional[int] = None,
    merge_threshold: float = LAMBDA1_MERGE_THRESHOLD,
) -> EigenSolution:
    """First Dirichlet eigenvalue of B_r via the angle-independent reduction:
    weight eta' on (-r, r), Dirichlet at both ends."""
    rr = _radius(r)
    n = default_cells(rr) if cells is None else int(cells)
    problem = WeightedProblem(
        interval=Interval(-rr, rr),
        weight=profile.eta_prime,
        bc=BoundaryCondition(DIRICHLET, DIRICHLET),
    )
    mesh = Mesh.uniform(problem.interval, n)
    return first_eigen_fem(problem, mesh, merge_threshold=merge_threshold)


def dprs_bound(profile: Profile, r: "float | RadialBall", samples: int = 4096) -> float:
    """Quarter-square lower bound: lambda_1(B_r) >= inf_{|t|<=r} eta'^2/eta^2 / 4.

    Exact for the families whose eta'/eta is monotone in |t|; otherwise a
    4096-point sampled minimization (always including the endpoints).
    """
    rr = _radius(r)
    fam = profile.family
    if fam == "dprs":
        return 0.25
    if fam == "exp_decay":
        a = profile.alpha
        ratio = a * math.exp(-a * rr) / (2.0 - math.exp(-a * rr))
        return 0.25 * min(a, ratio) ** 2

    def ratio(t: float) -> float:
        return profile.eta_prime(t) / profile.eta(t)

    best = min(ratio(-rr), ratio(rr))
    for i in range(1, samples):
        t = -rr + 2.0 * rr * i / samples
        best = min(best, ratio(t))
    return 0.25 * best * best


def upper_bound_trapezoid(profile: Profile, r: "float | RadialBall") -> float:
    """Test-function upper bound from the ramp/plateau/ramp profile supported
    on [0, r]: (eta(r) - eta(r-1) + eta(1) - eta(0)) / (eta(r-1) - eta(1))."""
    rr = _radius(r)
    if rr <= 2.0:
        raise ValueError("trapezoid bound needs r > 2")
    num = (profile.eta(rr) - profile.eta(rr - 1.0)) + (profile.eta(1.0) - profile.eta(0.0))
    den = profile.eta(rr - 1.0) - profile.eta(1.0)
    return num / den


def sandwich_check(profile: Profile, r: float, lam: float) -> None:
    """Assert the two-sided bracket around a computed eigenvalue.  Skipped for
    the lower bound on tabulated profiles (their eta baseline is a convention,
    which can inflate eta'/eta)."""
    if not isinstance(profile, TabulatedProfile):
        lower = dprs_bound(profile, r)
        if lam < lower * (1.0 - 1e-9):
            raise AssertionError(
                f"sandwich violated at r={r}: lambda={lam} < lower bound {lower}")
    if r > 2.0:
        upper = upper_bound_trapezoid(profile, r)
        if lam > upper * (1.0 + 1e-9):
            raise AssertionError(
                f"sandwich violated at r={r}: lambda={lam} > upper bound {upper}")


# --------------------------------------------------------------------------
# asymptotic estimators


def r_grid(window: Interval, *, ratio: float = 1.25, min_points: int = 6) -> tuple:
    """Geometric radius grid covering the window (default ratio 1.25)."""
    if window.lo <= 0.0:
        raise ValueError("radius window must be positive")
    n = max(min_points, int(math.ceil(math.log(window.hi / window.lo) / math.log(ratio))) + 1)
    q = (window.hi / window.lo) ** (1.0 / (n - 1))
    return tuple(window.lo * q**i for i in range(n))


def _tail_half(values: Sequence[tuple]) -> list:
    return list(values[len(values) // 2:])


def _divergence_note(samples: Sequence[tuple]) -> str:
    tail = _tail_half(samples)
    ys = [y for _, y in tail]
    if len(ys) >= 3 and all(b > a for a, b in zip(ys, ys[1:])) and ys[-1] > 1e3:
        return "consistent with +inf (still increasing at the window end)"
    return ""


def estimate(
    profile: Profile,
    quantity: str,
    window: Interval,
    *,
    samples: Optional[Sequence[tuple]] = None,
    cells: Optional[int] = None,
) -> AsymptoticEstimate:
    """Finite-window proxy for one asymptotic quantity.

    liminf/limsup proxies take the min/max over the trailing half of the
    window; the exponential rates (lambda_tilde, alpha_star) and the volume
    order (nu_star) come from slope fits, which cancel the unknown constants.
    ``samples`` may supply precomputed (r, lambda_1(B_r)) pairs for the
    eigenvalue-based quantities.
    """
    if quantity not in QUANTITIES:
        raise ValueError(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}")
    radii = r_grid(window)
    if len(radii) < 6:
        raise ValueError("need at least 6 sample radii")

    def lam_samples() -> list:
        if samples is not None:
            return [(float(r), float(v)) for r, v in samples]
        return [(r, lambda1_ball(profile, r, cells=cells).lam) for r in radii]

    note = ""
    if quantity == "lambda_star" or quantity == "lambda_star_upper":
        pairs = [(r, r * r * lam) for r, lam in lam_samples()]
        tail = _tail_half(pairs)
        if quantity == "lambda_star":
            value = min(y for _, y in tail)
            note = _divergence_note(pairs)
        else:
            value = max(y for _, y in tail)
        used = pairs
    elif quantity == "lambda_tilde":
        pairs = [(r, -math.log(lam)) for r, lam in lam_samples()]
        value = _linear_slope(pairs)
        used = pairs
    elif quantity == "nu_star":
        pairs = [(r, volume_ball(profile, r)) for r in radii]
        value = fit_log_slope(pairs).slope
        used = pairs
    else:  # alpha_star / alpha_star_upper
        vols = [(r, volume_complement(profile, r)) for r in radii]
        if any(math.isinf(v) for _, v in vols):
            raise ValueError("alpha_star needs a finite-volume profile")
        pairs = [(r, -math.log(v)) for r, v in vols]
        if quantity == "alpha_star":
            value = _linear_slope(pairs)
        else:
            value = max(y / r for r, y in _tail_half(pairs))
        used = pairs
    return AsymptoticEstimate(quantity=quantity, value=value, window=window,
                              samples=tuple(used), note=note)


def _linear_slope(pairs: Sequence[tuple]) -> float:
    n = len(pairs)
    mx = sum(x for x, _ in pairs) / n
    my = sum(y for _, y in pairs) / n
    sxx = sum((x - mx) ** 2 for x, _ in pairs)
    sxy = sum((x - mx) * (y - my) for x, y in pairs)
    return sxy / sxx


# --------------------------------------------------------------------------
# staircase diagnostics


@dataclass(frozen=True)
class StaircaseReport:
    rows: tuple  # (r, upper_bound, envelope)
    envelope_constant: float
    verdict: TypeVerdict


def staircase_checks(profile: Profile, rs: Sequence[float]) -> StaircaseReport:
    """Trapezoid upper bounds along ``rs`` checked against the decay envelope
    C e**(-r/2) (log r)^2 with C fitted over the given radii, plus the
    h-integral verdict (hyperbolic)."""
    rs = sorted(float(r) for r in rs)
    if not rs or rs[0] < 16.0:
        raise ValueError("staircase checks expect radii >= 16")
    rows = []
    c_fit = 0.0
    for r in rs:
        ub = upper_bound_trapezoid(profile, r)
        c_fit = max(c_fit, ub / (math.exp(-0.5 * r) * math.log(r) ** 2))
        rows.append((r, ub))
    full = tuple((r, ub, c_fit * math.exp(-0.5 * r) * math.log(r) ** 2) for r, ub in rows)
    return StaircaseReport(rows=full, envelope_constant=c_fit, verdict=h_bounds(profile))


def upper_bound_trapezoid_quadrature(profile: Profile, r: float) -> float:
    """Same bound as upper_bound_trapezoid but with the three eta differences
    done by quadrature of eta'; a cross-check of the stored antiderivative."""
    if r <= 2.0:
        raise ValueError("trapezoid bound needs r > 2")
    tol = Tolerance(abs=1e-14, rel=1e-13, max_depth=60)
    top = integrate(profile.eta_prime, Interval(r - 1.0, r), tol)
    head = integrate(profile.eta_prime, Interval(0.0, 1.0), tol)
    mid = integrate(profile.eta_prime, Interval(1.0, r - 1.0), tol)
    return (top + head) / mid
