"""Hardy-inequality and capacity verification on radial models.

Two model kinds share the machinery: the Euclidean radial model (weight
r**(n-1), exhaustion rho(r) = r) and warped-product surfaces (weight eta',
rho(t) = |t|).  The sharp constant ((mu-2)/2)**2 is bracketed from below by
the discrete infimum of the regularized quotient

    int u'^2 w  /  int u^2 w / (rho^2 + eps^2)

and from above by the quotient of the explicit near-optimizer
u = rho**(-(mu-2)/2) with smooth boundary cutoffs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .numerics import Interval, Tolerance, integrate
from .profiles import Profile
from .special import lambda_mu
from .sturm import (
    DIRICHLET,
    NATURAL,
    BoundaryCondition,
    EigenSolution,
    Mesh,
    WeightedProblem,
    first_eigen_fem,
)

EUCLIDEAN = "euclidean"
WARPED = "warped"


class MeaninglessConstant(ValueError):
    """The sharp Hardy constant ((mu-2)/2)**2 degenerates for mu <= 2, or the
    model is parabolic and admits no positive constant at all."""


@dataclass(frozen=True)
class RadialModel:
    """Radial comparison model: weight, exhaustion function, and domain."""

    kind: str
    n: Optional[int] = None
    profile: Optional[Profile] = None
    domain: Optional[Interval] = None  # None = unbounded natural domain

    def __post_init__(self) -> None:
        if self.kind == EUCLIDEAN:
            if self.n is None or self.n < 2 or self.n != int(self.n):
                raise ValueError("Euclidean radial model needs an integer dimension n >= 2")
        elif self.kind == WARPED:
            if self.profile is None:
                raise ValueError("warped model needs a profile")
        else:
            raise ValueError(f"unknown model kind {self.kind!r}")

    @staticmethod
    def euclidean(n: int) -> "RadialModel":
        return RadialModel(kind=EUCLIDEAN, n=n)

    @staticmethod
    def warped(profile: Profile) -> "RadialModel":
        return RadialModel(kind=WARPED, profile=profile)

    @property
    def mu_effective(self) -> float:
        # 2-D warped products carry the borderline exponent; only Euclidean
        # models have a meaningful sharp constant here
        return float(self.n) if self.kind == EUCLIDEAN else 2.0

    def weight(self, x: float) -> float:
        if self.kind == EUCLIDEAN:
            return x ** (self.n - 1)
        return self.profile.eta_prime(x)

    def rho(self, x: float) -> float:
        return abs(x)


@dataclass(frozen=True)
class HardyReport:
    mu_effective: float
    discrete_infimum: float
    sharp_constant: float
    epsilon: float
    support: Interval
    cells: int
    minimizer: EigenSolution


@dataclass(frozen=True)
class CapacityValue:
    r0: float
    R: float  # may be math.inf
    value: float


def _hardy_problem(model: RadialModel, support: Interval, epsilon: float) -> WeightedProblem:
    eps2 = epsilon * epsilon

    def potential(x: float, _m=model) -> float:
        rho = _m.rho(x)
        return _m.weight(x) / (rho * rho + eps2)

    if model.kind == EUCLIDEAN:
        if support.lo < 0.0:
            raise ValueError("Euclidean radial support must lie in r >= 0")
        left = NATURAL if support.lo == 0.0 else DIRICHLET
        bc = BoundaryCondition(left, DIRICHLET)
    else:
        bc = BoundaryCondition(DIRICHLET, DIRICHLET)
    return WeightedProblem(interval=support, weight=model.weight, bc=bc,
                           potential_weight=potential)


def hardy_infimum(
    model: RadialModel,
    support: Interval,
    *,
    cells: int = 8000,
    epsilon: Optional[float] = None,
    grading: float = 2.0,
) -> HardyReport:
    """Discrete infimum of the regularized Hardy quotient over the support.

    epsilon defaults to 1e-3 of the support width; the mesh is power-graded
    toward rho = 0 so the logarithmic near-optimizers are resolvable.
    """
    mu_eff = model.mu_effective
    if mu_eff <= 2.0:
        raise MeaninglessConstant(f"sharp constant meaningless for mu = {mu_eff} <= 2")
    eps = 1e-3 * support.width if epsilon is None else float(epsilon)
    problem = _hardy_problem(model, support, eps)
    if model.kind == EUCLIDEAN and support.lo == 0.0 and grading > 1.0:
        mesh = Mesh.graded(support, cells, grading)
    else:
        mesh = Mesh.uniform(support, cells)
    sol = first_eigen_fem(problem, mesh)
    kappa2 = ((mu_eff - 2.0) / 2.0) ** 2
    return HardyReport(mu_effective=mu_eff, discrete_infimum=sol.lam,
                       sharp_constant=kappa2, epsilon=eps, support=support,
                       cells=cells, minimizer=sol)


def near_optimizer_quotient(n: int, r_in: float, r_out: float) -> float:
    """Quotient of u = rho**(-(n-2)/2) * sin-taper(log rho) on the annulus
    (r_in, r_out), by direct quadrature in the logarithmic variable.

    Approaches the sharp constant like pi^2 / log(r_out/r_in)^2, so the
    annulus ratio controls how near-optimal the trial function is.
    """
    if n <= 2:
        raise MeaninglessConstant("need n > 2")
    if not (0.0 < r_in < r_out):
        raise ValueError("need 0 < r_in < r_out")
    kappa = 0.5 * (n - 2.0)
    span = math.log(r_out / r_in)

    def zeta(x: float) -> float:
        return math.sin(math.pi * x / span)

    def zeta_prime(x: float) -> float:
        return math.pi / span * math.cos(math.pi * x / span)

    tol = Tolerance(abs=1e-12, rel=1e-12)
    num = integrate(lambda x: (zeta_prime(x) - kappa * zeta(x)) ** 2,
                    Interval(0.0, span), tol)
    den = integrate(lambda x: zeta(x) ** 2, Interval(0.0, span), tol)
    return num / den


@dataclass(frozen=True)
class Prop17Report:
    n: int
    r: float
    lam_fem: float
    lam_expected: float
    rel_error: float
    passed: bool


def check_prop17(n: int, r: float, *, cells: int = 4000, tolerance: float = 5e-3) -> Prop17Report:
    """Euclidean radial ball check: lambda_1(B(0, r)) * r**2 against the
    Bessel constant of index n, asserted to the given relative tolerance."""
    if not (2 <= n <= 20):
        raise ValueError("supported dimensions are 2 <= n <= 20")
    if r <= 0.0:
        raise ValueError("radius must be positive")
    problem = WeightedProblem(
        interval=Interval(0.0, r),
        weight=lambda s: s ** (n - 1),
        bc=BoundaryCondition(NATURAL, DIRICHLET),
    )
    sol = first_eigen_fem(problem, Mesh.uniform(problem.interval, cells))
    expected = lambda_mu(float(n)).lam / (r * r)
    rel = abs(sol.lam - expected) / expected
    return Prop17Report(n=n, r=r, lam_fem=sol.lam, lam_expected=expected,
                        rel_error=rel, passed=rel <= tolerance)


def _sphere_area(n: int) -> float:
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def capacity(model: RadialModel, r0: float, R: float = math.inf) -> CapacityValue:
    """Capacity of the ball {rho <= r0} relative to {rho < R}.

    The radial minimizer is explicit, so the value is the closed form
    area / int_r0^R w(s)**-1 ds per end (0 when the resistance integral
    diverges).  R = inf is allowed whenever the tail is ruled by closed form.
    """
    if not (0.0 <= r0 < R):
        raise ValueError("need 0 <= r0 < R")
    tol = Tolerance(abs=1e-12, rel=1e-10, max_depth=60)

    if model.kind == EUCLIDEAN:
        n = model.n
        if r0 == 0.0:
            raise ValueError("Euclidean capacity needs r0 > 0")
        if n == 2:
            resistance = math.log(R / r0) if math.isfinite(R) else math.inf
        else:
            upper = R ** (2.0 - n) if math.isfinite(R) else 0.0
            resistance = (r0 ** (2.0 - n) - upper) / (n - 2.0)
        value = 0.0 if math.isinf(resistance) else _sphere_area(n) / resistance
        return CapacityValue(r0=r0, R=R, value=value)

    profile = model.profile
    value = 0.0
    for side in (+1, -1):
        if math.isfinite(R):
            resistance = integrate(lambda s: 1.0 / profile.eta_prime(side * s),
                                   Interval(r0, R), tol)
        else:
            convergent = profile.h_tail_convergent(side)
            if convergent is None:
                from .profiles import InconclusiveTail

                raise InconclusiveTail("cannot rule the h-tail for this profile")
            if not convergent:
                continue  # infinite resistance: this end contributes 0
            resistance = _tail_resistance(profile, side, r0)
        if resistance > 0.0:
            value += 2.0 * math.pi / resistance
    return CapacityValue(r0=r0, R=R, value=value)


def _tail_resistance(profile: Profile, side: int, r0: float) -> float:
    """int_{r0}^{inf} dt/eta'(side*t) for a tail known to converge: cutoffs
    are doubled until the increments become negligible."""
    tol = Tolerance(abs=1e-12, rel=1e-10, max_depth=60)
    cap = profile.scan_r_cap() or 700.0
    total = 0.0
    lo = r0
    hi = min(max(2.0 * max(r0, 1.0), 8.0), cap)
    while lo < hi:
        inc = integrate(lambda s: 1.0 / profile.eta_prime(side * s), Interval(lo, hi), tol)
        total += inc
        if inc <= 1e-12 * total or hi >= cap:
            break
        lo, hi = hi, min(2.0 * hi, cap)
    return total


def verify_hardy_scan(
    model: RadialModel,
    support: Interval,
    mesh_schedule: Sequence[int] = (2000, 4000, 8000),
) -> "HardyScanReport":
    """Discrete infimum of the non-sharp quotient with denominator weight
    w/(1 + rho^2) across a mesh schedule; requires a hyperbolic model."""
    if model.kind == EUCLIDEAN:
        hyperbolic = model.n >= 3
    else:
        tail_pos = model.profile.h_tail_convergent(+1)
        tail_neg = model.profile.h_tail_convergent(-1)
        hyperbolic = bool(tail_pos) or bool(tail_neg)
    if not hyperbolic:
        raise MeaninglessConstant("model is parabolic: no positive Hardy constant exists")

    def potential(x: float, _m=model) -> float:
        rho = _m.rho(x)
        return _m.weight(x) / (1.0 + rho * rho)

    if model.kind == EUCLIDEAN:
        bc = BoundaryCondition(NATURAL if support.lo == 0.0 else DIRICHLET, DIRICHLET)
    else:
        bc = BoundaryCondition(DIRICHLET, DIRICHLET)
    problem = WeightedProblem(interval=support, weight=model.weight, bc=bc,
                              potential_weight=potential)
    rows = []
    for cells in mesh_schedule:
        sol = first_eigen_fem(problem, Mesh.uniform(support, int(cells)))
        rows.append((int(cells), sol.lam))
    values = [v for _, v in rows]
    stable = len(values) < 2 or abs(values[-1] - values[-2]) <= 0.05 * values[-1]
    return HardyScanReport(rows=tuple(rows), constant=min(values), stable=stable,
                           support=support)


@dataclass(frozen=True)
class HardyScanReport:
    rows: tuple
    constant: float
    stable: bool
    support: Interval
