"""First-eigenvalue solvers for weighted 1-D Rayleigh quotients

    lambda_1 = inf  int u'^2 w ds  /  int u^2 q ds

over functions satisfying Dirichlet conditions at one or both endpoints
(q defaults to w).  Two independent routes are provided: a piecewise-linear
Galerkin discretization solved by inverse iteration on the tridiagonal
pencil, and a shooting method on the underlying ODE (w u')' + lambda q u = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .numerics import Interval, Tolerance

DIRICHLET = "dirichlet"
NATURAL = "natural"

#: Cells whose weight falls below this fraction of the max weight get merged
#: into a neighbour to keep the assembled pencil well scaled.
DEFAULT_MERGE_THRESHOLD = 1e-14


class SingularMass(ArithmeticError):
    """A mass-matrix cell came out non-positive (weight vanished on a cell)."""


class NoConvergence(RuntimeError):
    """Inverse iteration hit its iteration cap."""


class StiffnessFailure(RuntimeError):
    """The shooting integrator's step size underflowed."""


class ZeroDenominator(ZeroDivisionError):
    """Rayleigh quotient of a function with vanishing weighted norm."""


@dataclass(frozen=True)
class BoundaryCondition:
    """Endpoint conditions; at least one side must be Dirichlet, otherwise the
    first eigenvalue is 0 with constant eigenfunction."""

    left: str = NATURAL
    right: str = DIRICHLET

    def __post_init__(self) -> None:
        for side in (self.left, self.right):
            if side not in (DIRICHLET, NATURAL):
                raise ValueError(f"unknown boundary condition {side!r}")
        if self.left != DIRICHLET and self.right != DIRICHLET:
            raise ValueError("at least one endpoint must be Dirichlet")


@dataclass(frozen=True)
class WeightedProblem:
    """Quotient int u'^2 weight / int u^2 (potential_weight or weight)."""

    interval: Interval
    weight: Callable[[float], float]
    bc: BoundaryCondition = BoundaryCondition()
    potential_weight: Optional[Callable[[float], float]] = None

    def denominator_weight(self) -> Callable[[float], float]:
        return self.potential_weight if self.potential_weight is not None else self.weight


@dataclass(frozen=True)
class Mesh:
    """Strictly increasing node coordinates with at least 16 interior nodes."""

    nodes: np.ndarray
    grading: str = "uniform"

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or len(nodes) < 18:
            raise ValueError("mesh needs at least 16 interior nodes")
        if not np.all(np.diff(nodes) > 0.0):
            raise ValueError("mesh nodes must be strictly increasing")

    @property
    def cells(self) -> int:
        return len(self.nodes) - 1

    @staticmethod
    def uniform(iv: Interval, cells: int) -> "Mesh":
        return Mesh(np.linspace(iv.lo, iv.hi, cells + 1), grading="uniform")

    @staticmethod
    def graded(iv: Interval, cells: int, exponent: float, end: str = "lo") -> "Mesh":
        """Power-graded nodes x = u**exponent, clustered toward ``end``."""
        if exponent < 1.0:
            raise ValueError("grading exponent must be >= 1")
        u = np.linspace(0.0, 1.0, cells + 1) ** exponent
        if end == "lo":
            nodes = iv.lo + iv.width * u
        elif end == "hi":
            nodes = np.sort(iv.hi - iv.width * u)
        else:
            raise ValueError("end must be 'lo' or 'hi'")
        nodes[0], nodes[-1] = iv.lo, iv.hi
        return Mesh(nodes, grading=f"power:{exponent}:{end}")


@dataclass(frozen=True)
class EigenSolution:
    """First eigenpair: eigenvalue, non-negative per-node eigenfunction
    normalized to unit weighted L2 norm, and a solver residual."""

    lam: float
    eigenfunction: np.ndarray
    residual: float
    mesh: Mesh
    iterations: int = 0
    method: str = "fem"


def default_grading(mu: float, cells: int) -> float:
    """Grading exponent for a weight s**(mu-1) degenerate at s = 0.

    2/mu restores the second-order convergence rate for mu < 1, but the
    exponent is capped so the smallest cell width stays around 1e-10 of the
    interval; finer than that, the assembled stiffness ratios exceed what
    double precision can carry.
    """
    want = max(1.0, 2.0 / mu)
    cap = max(1.0, 10.0 / math.log10(max(cells, 10)))
    return min(want, cap)


def _midpoint_weights(problem: WeightedProblem, nodes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mids = 0.5 * (nodes[:-1] + nodes[1:])
    w = np.array([problem.weight(x) for x in mids], dtype=float)
    qfun = problem.denominator_weight()
    if problem.potential_weight is None:
        q = w
    else:
        q = np.array([qfun(x) for x in mids], dtype=float)
    return w, q


def _merge_tiny_cells(nodes: np.ndarray, w: np.ndarray, threshold: float) -> np.ndarray:
    """Collapse runs of cells with relative weight below threshold into single
    cells, so exponentially dead regions do not produce denormal pencil rows."""
    wmax = float(np.max(w))
    if wmax <= 0.0:
        raise SingularMass("weight non-positive on every cell")
    tiny = w < threshold * wmax
    if not bool(np.any(tiny)):
        return nodes
    keep = [0]
    i = 0
    ncells = len(w)
    while i < ncells:
        if tiny[i]:
            j = i
            while j < ncells and tiny[j]:
                j += 1
            keep.append(min(j, ncells))  # right node of the merged run
            i = j
        else:
            keep.append(i + 1)
            i += 1
    idx = sorted(set(keep))
    return nodes[idx]


def _assemble(nodes: np.ndarray, w: np.ndarray, q: np.ndarray):
    """Tridiagonal stiffness/mass pencil for P1 elements with per-cell
    midpoint-sampled weights (consistent mass)."""
    h = np.diff(nodes)
    aw = w / h
    n = len(nodes)
    a_diag = np.zeros(n)
    a_off = -aw
    a_diag[:-1] += aw
    a_diag[1:] += aw
    m = q * h / 6.0
    b_diag = np.zeros(n)
    b_off = m.copy()
    b_diag[:-1] += 2.0 * m
    b_diag[1:] += 2.0 * m
    return a_diag, a_off, b_diag, b_off


def _tridiag_factor(diag: np.ndarray, off: np.ndarray):
    """LDL^T factorization of a symmetric tridiagonal matrix (no pivoting;
    fine for the SPD matrices assembled here)."""
    n = len(diag)
    d = np.empty(n)
    l = np.empty(max(n - 1, 0))
    d[0] = diag[0]
    for i in range(n - 1):
        if d[i] == 0.0:
            raise SingularMass("singular stiffness pivot")
        l[i] = off[i] / d[i]
        d[i + 1] = diag[i + 1] - l[i] * off[i]
    return d, l


def _tridiag_solve(d: np.ndarray, l: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    n = len(d)
    x = rhs.astype(float).copy()
    for i in range(1, n):
        x[i] -= l[i - 1] * x[i - 1]
    x /= d
    for i in range(n - 2, -1, -1):
        x[i] -= l[i] * x[i + 1]
    return x


def _tridiag_apply(diag: np.ndarray, off: np.ndarray, x: np.ndarray) -> np.ndarray:
    y = diag * x
    y[:-1] += off * x[1:]
    y[1:] += off * x[:-1]
    return y


def first_eigen_fem(
    problem: WeightedProblem,
    mesh: Mesh,
    *,
    merge_threshold: float = DEFAULT_MERGE_THRESHOLD,
    eig_tol: float = 1e-12,
    max_iterations: int = 200,
) -> EigenSolution:
    """Smallest eigenpair of the P1 Galerkin discretization.

    Weights are normalized by their maxima before assembly (the eigenvalue is
    scaled back), and inverse iteration runs with shift 0 from the all-ones
    start vector, so results are deterministic.
    """
    nodes = mesh.nodes
    w, q = _midpoint_weights(problem, nodes)
    if np.any(q <= 0.0):
        raise SingularMass("denominator weight non-positive on a cell")
    if np.any(w < 0.0):
        raise SingularMass("weight negative on a cell")

    merged = _merge_tiny_cells(nodes, w, merge_threshold)
    if len(merged) != len(nodes):
        if len(merged) < 18:
            raise SingularMass("weight below merge threshold on almost every cell")
        mesh = Mesh(merged, grading=mesh.grading + "+merged")
        nodes = mesh.nodes
        w, q = _midpoint_weights(problem, nodes)
        if np.any(q <= 0.0):
            raise SingularMass("denominator weight non-positive on a merged cell")

    cw = float(np.max(w))
    cq = float(np.max(q))
    a_diag, a_off, b_diag, b_off = _assemble(nodes, w / cw, q / cq)

    lo_fixed = problem.bc.left == DIRICHLET
    hi_fixed = problem.bc.right == DIRICHLET
    sl = slice(1 if lo_fixed else 0, -1 if hi_fixed else None)
    # the same slice lands correctly on the (n-1)-long off-diagonal arrays
    ad, ao = a_diag[sl].copy(), a_off[sl].copy()
    bd, bo = b_diag[sl].copy(), b_off[sl].copy()

    d, l = _tridiag_factor(ad, ao)
    h = np.diff(nodes)
    wt, qt = w / cw, q / cq
    full = np.zeros(len(nodes))

    def quotient(v: np.ndarray) -> float:
        # cell-wise positive forms: free of the cancellation that a v.(Av)
        # evaluation suffers, so the increment test below is meaningful
        full[sl] = v
        num = float(np.sum(wt * np.diff(full) ** 2 / h))
        den = _denominator_form(full, nodes, qt)
        if den <= 0.0:
            raise SingularMass("mass form non-positive during iteration")
        return num / den

    u = np.ones(len(ad))
    lam = math.inf
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        bu = _tridiag_apply(bd, bo, u)
        v = _tridiag_solve(d, l, bu)
        lam_new = quotient(v)
        v /= math.sqrt(float(v @ _tridiag_apply(bd, bo, v)))
        done = abs(lam_new - lam) <= eig_tol * abs(lam_new)
        u, lam = v, lam_new
        if done:
            break
    else:
        raise NoConvergence(f"inverse iteration did not converge in {max_iterations} steps")

    av = _tridiag_apply(ad, ao, u)
    bv = _tridiag_apply(bd, bo, u)
    residual = float(np.linalg.norm(av - lam * bv) / np.linalg.norm(bv))

    full = np.zeros(len(nodes))
    full[sl] = u
    full = full.copy()
    # orient non-negative, then normalize in the physical metric
    if full[np.argmax(np.abs(full))] < 0.0:
        full = -full
    lam_phys = lam * cw / cq
    norm2 = _denominator_form(full, nodes, q)
    full /= math.sqrt(norm2)
    # store the Rayleigh quotient of the returned vector as the eigenvalue so
    # the two reproduce each other exactly
    lam_phys = rayleigh_quotient(full, problem, mesh, _weights=(w, q))
    return EigenSolution(lam=lam_phys, eigenfunction=full, residual=residual,
                         mesh=mesh, iterations=iterations, method="fem")


def _denominator_form(u: np.ndarray, nodes: np.ndarray, q: np.ndarray) -> float:
    h = np.diff(nodes)
    ul, ur = u[:-1], u[1:]
    return float(np.sum(q * h * (ul * ul + ul * ur + ur * ur) / 3.0))


def rayleigh_quotient(
    u: np.ndarray,
    problem: WeightedProblem,
    mesh: Mesh,
    *,
    _weights: Optional[tuple[np.ndarray, np.ndarray]] = None,
) -> float:
    """Discrete quotient of a piecewise-linear function on the mesh, with the
    same per-cell midpoint weights the assembly uses (so the solver's
    eigenvector reproduces its eigenvalue exactly)."""
    u = np.asarray(u, dtype=float)
    nodes = mesh.nodes
    if u.shape != nodes.shape:
        raise ValueError("u must have one value per mesh node")
    scale = float(np.max(np.abs(u)))
    if scale == 0.0:
        raise ZeroDenominator("u is identically zero")
    if problem.bc.left == DIRICHLET and abs(u[0]) > 1e-12 * scale:
        raise ValueError("u violates the left Dirichlet condition")
    if problem.bc.right == DIRICHLET and abs(u[-1]) > 1e-12 * scale:
        raise ValueError("u violates the right Dirichlet condition")
    w, q = _midpoint_weights(problem, nodes) if _weights is None else _weights
    h = np.diff(nodes)
    du = np.diff(u)
    num = float(np.sum(w * du * du / h))
    den = _denominator_form(u, nodes, q)
    if den <= 0.0:
        raise ZeroDenominator("weighted norm of u vanishes")
    return num / den


def sign_changes(u: np.ndarray, rel_floor: float = 1e-9) -> int:
    """Count sign changes ignoring entries negligible relative to max |u|."""
    u = np.asarray(u, dtype=float)
    floor = rel_floor * float(np.max(np.abs(u)))
    signs = [1 if x > floor else (-1 if x < -floor else 0) for x in u]
    signs = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


# --------------------------------------------------------------------------
# shooting


_CK_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (3 / 10, -9 / 10, 6 / 5),
    (-11 / 54, 5 / 2, -70 / 27, 35 / 27),
    (1631 / 55296, 175 / 512, 575 / 13824, 44275 / 110592, 253 / 4096),
)
_CK_B5 = (37 / 378, 0.0, 250 / 621, 125 / 594, 0.0, 512 / 1771)
_CK_B4 = (2825 / 27648, 0.0, 18575 / 48384, 13525 / 55296, 277 / 14336, 1 / 4)


def _integrate_shoot(problem: WeightedProblem, lam: float, rtol: float,
                     record: bool = False):
    """Integrate u' = p/w, p' = -lam q u across the interval (Cash-Karp 4/5).

    Returns (u_end, interior sign-change count, trajectory or None).
    Degenerate left endpoints (w -> 0 or w -> inf) are handled by a series
    start at a small interior offset.
    """
    a, b = problem.interval.lo, problem.interval.hi
    w = problem.weight
    q = problem.denominator_weight()
    span = b - a

    eps = 1e-8 * span
    if problem.bc.left == NATURAL:
        u0 = 1.0
        p0 = -lam * q(a + 0.5 * eps) * u0 * eps
    else:
        u0 = eps
        p0 = w(a + 0.5 * eps)  # unit slope through the Dirichlet end
    t = a + eps
    y = np.array([u0, p0])

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        wt = w(t)
        return np.array([y[1] / wt, -lam * q(t) * y[0]])

    h = span / 200.0
    h_min = span * 1e-14
    crossings = 0
    prev_sign = 1.0 if y[0] > 0 else -1.0
    traj = [(t, y[0])] if record else None
    guard = 0
    while t < b:
        guard += 1
        if guard > 2_000_000:
            raise StiffnessFailure("step budget exhausted")
        h = min(h, b - t)
        k = [rhs(t, y)]
        for i in range(1, 6):
            yi = y + h * sum(c * k[j] for j, c in enumerate(_CK_A[i]))
            k.append(rhs(t + h * sum(_CK_A[i]), yi))
        y5 = y + h * sum(c * k[i] for i, c in enumerate(_CK_B5) if c)
        y4 = y + h * sum(c * k[i] for i, c in enumerate(_CK_B4) if c)
        scale = rtol * (np.abs(y5) + np.abs(y) + 1e-300)
        err = float(np.max(np.abs(y5 - y4) / scale))
        if err <= 1.0:
            t += h
            y = y5
            s = 1.0 if y[0] > 0 else (-1.0 if y[0] < 0 else prev_sign)
            if s * prev_sign < 0 and t < b - 1e-12 * span:
                crossings += 1
            prev_sign = s
            if record:
                traj.append((t, float(y[0])))
        h *= min(5.0, max(0.2, 0.9 * err ** -0.2 if err > 0 else 5.0))
        if h < h_min:
            raise StiffnessFailure(f"step underflow at t={t}")
    return float(y[0]), crossings, traj


def first_eigen_shoot(problem: WeightedProblem, tol: Tolerance = Tolerance(rel=1e-9, abs=0.0)) -> EigenSolution:
    """First eigenvalue by shooting with sign-change counting.

    Requires a continuously differentiable weight on the open interval
    (closed-form profiles); the returned eigenvalue is the ODE eigenvalue,
    generally sharper than the quotient of the sampled trajectory.
    """
    if problem.bc.right != DIRICHLET:
        raise ValueError("shooting requires a Dirichlet condition at the right endpoint")
    rtol = max(tol.rel, 1e-12)

    def endpoint(lam: float) -> tuple[float, int]:
        u_end, crossings, _ = _integrate_shoot(problem, lam, rtol)
        return u_end, crossings

    # grow an upper bound until the solution oscillates or overshoots
    width = problem.interval.width
    lam_hi = (math.pi / width) ** 2
    for _ in range(200):
        u_end, crossings = endpoint(lam_hi)
        if crossings > 0 or u_end < 0.0:
            break
        lam_hi *= 2.0
    else:
        raise StiffnessFailure("failed to bracket the first eigenvalue from above")

    lam_lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lam_lo + lam_hi)
        u_end, crossings = endpoint(mid)
        if crossings > 0 or u_end < 0.0:
            lam_hi = mid
        else:
            lam_lo = mid
        if lam_hi - lam_lo <= 1e-12 * lam_hi:
            break
    lam = 0.5 * (lam_lo + lam_hi)

    u_end, crossings, traj = _integrate_shoot(problem, lam, rtol, record=True)
    ts = np.array([p[0] for p in traj])
    us = np.array([p[1] for p in traj])
    if problem.bc.left == DIRICHLET:
        ts = np.concatenate(([problem.interval.lo], ts))
        us = np.concatenate(([0.0], us))
    ts[-1] = problem.interval.hi
    us[-1] = 0.0
    if len(ts) < 18:  # mesh contract needs 16 interior nodes
        dense = np.linspace(problem.interval.lo, problem.interval.hi, 33)
        us = np.interp(dense, ts, us)
        ts = dense
    mesh = Mesh(ts, grading="shooting-trajectory")
    if us[np.argmax(np.abs(us))] < 0.0:
        us = -us
    _, qmid = _midpoint_weights(problem, ts)
    us = us / math.sqrt(_denominator_form(us, ts, qmid))
    residual = abs(u_end) / float(np.max(np.abs([p[1] for p in traj])))
    return EigenSolution(lam=lam, eigenfunction=us, residual=residual, mesh=mesh,
                         iterations=0, method="shooting")
