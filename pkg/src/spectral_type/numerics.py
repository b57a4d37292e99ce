"""Shared numerical utilities: quadrature, bracketed root finding, log-log fits.

Everything here is pure and reentrant; all value types are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence


class NumericsError(Exception):
    """Base class for failures raised by this package's numerical kernels."""


class NonConvergence(NumericsError):
    """Adaptive refinement hit its depth cap with the error still too large."""


class NonFinite(NumericsError):
    """An integrand returned NaN or +/-inf inside the integration domain."""


class InvalidBracket(NumericsError):
    """Root bracket endpoints do not straddle a sign change."""


class InsufficientSamples(NumericsError):
    """Fewer samples than the fit requires."""


@dataclass(frozen=True)
class Interval:
    """Finite interval [lo, hi] with lo < hi."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError(f"interval endpoints must be finite, got ({self.lo}, {self.hi})")
        if not self.lo < self.hi:
            raise ValueError(f"interval requires lo < hi, got ({self.lo}, {self.hi})")

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative tolerance pair plus a recursion depth cap."""

    abs: float = 1e-10
    rel: float = 1e-10
    max_depth: int = 60

    def __post_init__(self) -> None:
        if self.abs < 0 or self.rel < 0:
            raise ValueError("tolerances must be nonnegative")
        if self.abs + self.rel <= 0:
            raise ValueError("at least one of abs/rel must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be a positive integer")


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares line through (log x, log y) with residual diagnostics."""

    slope: float
    intercept: float
    max_abs_residual: float
    window: Interval


def _simpson(fa: float, fm: float, fb: float, h: float) -> float:
    return h / 6.0 * (fa + 4.0 * fm + fb)


def _eval(f: Callable[[float], float], x: float) -> float:
    try:
        y = f(x)
    except (ZeroDivisionError, OverflowError, ValueError) as exc:
        raise NonFinite(f"integrand failed at x={x!r}: {exc}") from exc
    if not math.isfinite(y):
        raise NonFinite(f"integrand returned {y!r} at x={x!r}")
    return y


def integrate(
    f: Callable[[float], float],
    iv: Interval,
    tol: Tolerance = Tolerance(),
    *,
    grade: float = 1.0,
    grade_end: str = "lo",
) -> float:
    """Adaptive Simpson quadrature with Richardson error control.

    ``grade`` > 1 substitutes s = u**grade near the chosen endpoint so that
    integrable endpoint singularities (weights like s**(mu-1) with small mu)
    become smooth.  The substitution must render the integrand bounded; the
    graded endpoint itself is sampled at a 2**-40 interior offset, so an
    insufficient grade surfaces as NonFinite rather than a silent error.
    """
    if grade < 1.0:
        raise ValueError("grade must be >= 1")
    if grade == 1.0:
        g = f
        lo, hi = iv.lo, iv.hi
    else:
        width = iv.width
        if grade_end not in ("lo", "hi"):
            raise ValueError("grade_end must be 'lo' or 'hi'")
        end = iv.lo if grade_end == "lo" else iv.hi
        # smallest u at which end +/- width*u**grade is still distinguishable
        # from the endpoint in double precision
        if end == 0.0:
            u_floor = 2.0**-40
        else:
            u_floor = max(2.0**-40, (16.0 * 2.0**-52 * abs(end) / width) ** (1.0 / grade))
        if grade_end == "lo":
            def g(u: float, _f=f, _lo=iv.lo, _w=width, _k=grade) -> float:
                u = max(u, u_floor)
                return _f(_lo + _w * u**_k) * _k * _w * u ** (_k - 1.0)
        else:
            def g(u: float, _f=f, _hi=iv.hi, _w=width, _k=grade) -> float:
                u = max(u, u_floor)
                return _f(_hi - _w * u**_k) * _k * _w * u ** (_k - 1.0)
        lo, hi = 0.0, 1.0

    fa = _eval(g, lo)
    fb = _eval(g, hi)
    mid = 0.5 * (lo + hi)
    fm = _eval(g, mid)
    whole = _simpson(fa, fm, fb, hi - lo)
    eps = max(tol.abs, tol.rel * abs(whole))

    def recurse(a: float, fa: float, m: float, fm: float, b: float, fb: float,
                whole: float, eps: float, depth: int) -> float:
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm = _eval(g, lm)
        frm = _eval(g, rm)
        left = _simpson(fa, flm, fm, m - a)
        right = _simpson(fm, frm, fb, b - m)
        err = (left + right - whole) / 15.0
        if abs(err) <= eps:
            return left + right + err
        if depth >= tol.max_depth:
            raise NonConvergence(
                f"adaptive quadrature exceeded depth {tol.max_depth} on [{a}, {b}]"
            )
        half = 0.5 * eps
        return (recurse(a, fa, lm, flm, m, fm, left, half, depth + 1)
                + recurse(m, fm, rm, frm, b, fb, right, half, depth + 1))

    return recurse(lo, fa, mid, fm, hi, fb, whole, eps, 0)


def find_root(
    f: Callable[[float], float],
    bracket: Interval,
    tol: Tolerance = Tolerance(abs=1e-13, rel=0.0),
) -> float:
    """Hybrid bisection/secant root finder that never leaves the bracket.

    Requires a sign change across the bracket; converges unconditionally
    because a bisection step is forced whenever the secant step stalls.
    """
    lo, hi = bracket.lo, bracket.hi
    flo = f(lo)
    fhi = f(hi)
    if not (math.isfinite(flo) and math.isfinite(fhi)):
        raise InvalidBracket("function not finite at bracket endpoints")
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise InvalidBracket(f"no sign change on [{lo}, {hi}]: f={flo:g}, {fhi:g}")

    width_goal = max(tol.abs, tol.rel * max(abs(lo), abs(hi)))
    prev_width = hi - lo
    for _ in range(400):
        if hi - lo <= width_goal:
            break
        # Secant proposal, kept strictly interior; fall back to bisection
        # whenever it degenerates or stops shrinking the bracket quickly.
        x = 0.5 * (lo + hi)
        if fhi != flo:
            xs = (lo * fhi - hi * flo) / (fhi - flo)
            margin = 0.01 * (hi - lo)
            if lo + margin < xs < hi - margin and (hi - lo) < 0.7 * prev_width:
                x = xs
        prev_width = hi - lo
        fx = f(x)
        if not math.isfinite(fx):
            raise NonFinite(f"function returned {fx!r} at x={x!r}")
        if fx == 0.0:
            return x
        if flo * fx < 0.0:
            hi, fhi = x, fx
        else:
            lo, flo = x, fx
    return 0.5 * (lo + hi)


def fit_log_slope(samples: Sequence[tuple[float, float]]) -> SlopeFit:
    """Least-squares slope of log y against log x.

    Recovers the exponent of a pure power law exactly; the reported maximum
    absolute residual (in log y) is a diagnostic for how power-like the data
    actually is.
    """
    if len(samples) < 3:
        raise InsufficientSamples(f"need >= 3 samples, got {len(samples)}")
    xs = [s[0] for s in samples]
    ys = [s[1] for s in samples]
    for i, (x, y) in enumerate(zip(xs, ys)):
        if x <= 0.0 or y <= 0.0:
            raise ValueError(f"sample {i} not strictly positive: ({x}, {y})")
        if i > 0 and x <= xs[i - 1]:
            raise ValueError("sample abscissae must be strictly increasing")
    lx = [math.log(x) for x in xs]
    ly = [math.log(y) for y in ys]
    n = len(lx)
    mx = math.fsum(lx) / n
    my = math.fsum(ly) / n
    sxx = math.fsum((u - mx) ** 2 for u in lx)
    sxy = math.fsum((u - mx) * (v - my) for u, v in zip(lx, ly))
    slope = sxy / sxx
    intercept = my - slope * mx
    resid = max(abs(v - (intercept + slope * u)) for u, v in zip(lx, ly))
    return SlopeFit(slope=slope, intercept=intercept, max_abs_residual=resid,
                    window=Interval(xs[0], xs[-1]))
