"""Bessel functions of the first kind, their first positive zeros, and the
eigenvalue constants and extremal profiles built from them.

The evaluation strategy for J_nu(t), nu in (-1, 120], t in [0, 300]:

* t <= 34: the ascending power series, summed in double-double arithmetic.
  Plain double summation loses ~12 digits to cancellation already at t = 30
  (the largest term is ~1e11 times the result), so every term is carried as
  an (hi, lo) pair; only the final rounding is double.
* t > 34, order below 2: Hankel's large-argument asymptotic expansion,
  truncated at its smallest term (well under 1e-16 in this regime).
* t > 34, order >= 2: seeds at the fractional order in [0, 2) from the
  Hankel expansion, then the three-term recurrence upward in the order when
  the target order is <= t/2 (oscillatory regime, stable), otherwise a
  Miller-style normalized downward recurrence from above the turning point.

Zero finding brackets the *first* zero explicitly: an initial guess
j_nu ~ nu + 1.8557 nu^(1/3) for nu >= 1, and a scaled scan from near 0 for
nu < 1 (which tracks j_nu ~ 2 sqrt(nu+1) as nu -> -1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .numerics import Interval, Tolerance, find_root, integrate

NU_MAX = 120.0
MU_MAX = 240.0
T_MAX = 300.0

_FIRST_ZERO_GUESS_COEFF = 1.8557  # leading correction of j_nu for large nu


class OutOfSupportedRange(ValueError):
    """Argument outside the order/argument box this module supports."""


class BracketingFailure(RuntimeError):
    """The first-zero scan found no sign change where one was expected."""


@dataclass(frozen=True)
class BesselOrder:
    """Order nu of J_nu; only nu > -1 is meaningful here."""

    nu: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.nu) or self.nu <= -1.0:
            raise OutOfSupportedRange(f"order must satisfy nu > -1, got {self.nu}")


@dataclass(frozen=True)
class DimensionParam:
    """Dimension-like parameter mu > 0 of the weighted 1-D eigenproblem."""

    mu: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.mu) or self.mu <= 0.0:
            raise OutOfSupportedRange(f"dimension parameter must be positive, got {self.mu}")

    @property
    def order(self) -> BesselOrder:
        return BesselOrder(self.mu / 2.0 - 1.0)


@dataclass(frozen=True)
class EigenConstant:
    """First zero j of J_{mu/2-1} together with lambda = j**2."""

    mu: DimensionParam
    j: float
    lam: float

    def __post_init__(self) -> None:
        if self.lam != self.j * self.j:
            raise ValueError("lam must equal j**2 exactly as stored")


# --------------------------------------------------------------------------
# double-double helpers (error-free transformations; Dekker/Knuth)

_SPLITTER = 134217729.0  # 2**27 + 1


def _two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _two_prod(a: float, b: float) -> tuple[float, float]:
    p = a * b
    ta = _SPLITTER * a
    ahi = ta - (ta - a)
    alo = a - ahi
    tb = _SPLITTER * b
    bhi = tb - (tb - b)
    blo = b - bhi
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


def _dd_add(xh: float, xl: float, yh: float, yl: float) -> tuple[float, float]:
    s, e = _two_sum(xh, yh)
    e += xl + yl
    h, l = _two_sum(s, e)
    return h, l


def _dd_mul(xh: float, xl: float, yh: float, yl: float) -> tuple[float, float]:
    p, e = _two_prod(xh, yh)
    e += xh * yl + xl * yh
    h, l = _two_sum(p, e)
    return h, l


def _dd_div(xh: float, xl: float, yh: float, yl: float) -> tuple[float, float]:
    q1 = xh / yh
    ph, pl = _dd_mul(q1, 0.0, yh, yl)
    rh, rl = _dd_add(xh, xl, -ph, -pl)
    q2 = (rh + rl) / yh
    return _two_sum(q1, q2)


def _series_ratio_denom(m: int, nu: float) -> tuple[float, float]:
    # m * (m + nu) carried exactly: two_sum is error-free, so is int * dd here
    sh, sl = _two_sum(float(m), nu)
    return _dd_mul(float(m), 0.0, sh, sl)


# --------------------------------------------------------------------------
# core J_nu evaluation


def _jv_series(nu: float, t: float) -> float:
    """Ascending series for J_nu(t), double-double accumulation.

    Accurate for t <= ~34 at any order nu > -1 (larger orders only make the
    series converge faster).
    """
    # common factor (t/2)^nu / Gamma(nu+1); a pure scale, so double suffices
    a0 = math.exp(nu * math.log(0.5 * t) - math.lgamma(nu + 1.0))
    qh, ql = _two_prod(0.5 * t, 0.5 * t)
    term_h, term_l = 1.0, 0.0
    sum_h, sum_l = 1.0, 0.0
    for m in range(1, 400):
        term_h, term_l = _dd_mul(term_h, term_l, -qh, -ql)
        dh, dl = _series_ratio_denom(m, nu)
        term_h, term_l = _dd_div(term_h, term_l, dh, dl)
        sum_h, sum_l = _dd_add(sum_h, sum_l, term_h, term_l)
        if abs(term_h) < 1e-35 * abs(sum_h) + 1e-305:
            break
    return a0 * (sum_h + sum_l)


def _jv_hankel(nu: float, t: float) -> float:
    """Large-argument asymptotic expansion; truncation at the smallest term.

    Intended for t >= ~30 with |nu| < 2, where the optimal truncation error
    is far below double precision.
    """
    fournu2 = 4.0 * nu * nu
    p_sum = 1.0
    q_sum = 0.0
    a = 1.0
    prev = math.inf
    for m in range(1, 40):
        a *= (fournu2 - (2.0 * m - 1.0) ** 2) / (8.0 * m)
        c = a / t**m
        if abs(c) >= prev:
            break
        prev = abs(c)
        k, r = divmod(m, 2)
        sign = -1.0 if k % 2 == 1 else 1.0
        if r == 0:
            p_sum += sign * c
        else:
            # m = 2k+1 contributes (-1)^k to the Q sum
            q_sum += (-1.0 if (m // 2) % 2 == 1 else 1.0) * c
        if abs(c) < 1e-19:
            break
    omega = t - (0.5 * nu + 0.25) * math.pi
    return math.sqrt(2.0 / (math.pi * t)) * (p_sum * math.cos(omega) - q_sum * math.sin(omega))


def _jv_direct_smallorder(nu: float, t: float) -> float:
    return _jv_series(nu, t) if t <= 34.0 else _jv_hankel(nu, t)


def _jv(nu: float, t: float) -> float:
    """J_nu(t) without the public range caps (internal workhorse)."""
    if t == 0.0:
        if nu == 0.0:
            return 1.0
        return 0.0 if nu > 0.0 else math.inf
    if t <= 34.0 or nu < 2.0:
        return _jv_direct_smallorder(nu, t)

    n = int(math.floor(nu))
    nu0 = nu - n  # fractional order in [0, 1)
    if nu <= 0.5 * t:
        # upward recurrence, stable while the order stays below t
        jm = _jv_direct_smallorder(nu0, t)
        jp = _jv_direct_smallorder(nu0 + 1.0, t)
        for k in range(1, n):
            jm, jp = jp, (2.0 * (nu0 + k) / t) * jp - jm
        return jp

    # Miller: downward from above the turning point, then normalize against
    # directly computed values at the fractional order.
    top = int(math.ceil(max(nu, t) - nu0)) + 30 + int(12.0 * (0.5 * t) ** (1.0 / 3.0))
    fp = 0.0  # f at order nu0 + top + 1
    fc = 1e-300  # f at order nu0 + top
    f_target = 0.0
    f0 = f1 = 0.0
    for k in range(top, 0, -1):
        fm = (2.0 * (nu0 + k) / t) * fc - fp
        fp, fc = fc, fm
        if abs(fc) > 1e280:
            scale = 1e-280
            fp *= scale
            fc *= scale
            f_target *= scale
            f0 *= scale
            f1 *= scale
        if k - 1 == n:
            f_target = fc
        if k - 1 == 1:
            f1 = fc
        if k - 1 == 0:
            f0 = fc
    j0 = _jv_direct_smallorder(nu0, t)
    j1 = _jv_direct_smallorder(nu0 + 1.0, t)
    # anchor on whichever true value is larger to avoid dividing near a zero
    if abs(j0) >= abs(j1):
        scale = j0 / f0
    else:
        scale = j1 / f1
    return f_target * scale


def bessel_j(order: BesselOrder | float, t: float) -> float:
    """J_nu(t) for nu in (-1, 120], t in [0, 300]."""
    nu = order.nu if isinstance(order, BesselOrder) else BesselOrder(order).nu
    if nu > NU_MAX:
        raise OutOfSupportedRange(f"order {nu} above supported cap {NU_MAX}")
    if not (0.0 <= t <= T_MAX):
        raise OutOfSupportedRange(f"argument {t} outside [0, {T_MAX}]")
    return _jv(nu, t)


def first_zero(order: BesselOrder | float) -> float:
    """First positive zero j_nu of J_nu, with the bracket scanned so that the
    zero found is genuinely the first one."""
    nu = order.nu if isinstance(order, BesselOrder) else BesselOrder(order).nu
    if nu > NU_MAX:
        raise OutOfSupportedRange(f"order {nu} above supported cap {NU_MAX}")

    if nu >= 1.0:
        guess = nu + _FIRST_ZERO_GUESS_COEFF * nu ** (1.0 / 3.0)
        start, step, stop = guess - 1.0, 0.2, guess + 4.0
    else:
        scale = math.sqrt(nu + 1.0)
        start, step, stop = 0.4 * scale, 0.12 * scale, 8.0

    lo = start
    flo = _jv(nu, lo)
    if flo <= 0.0:
        raise BracketingFailure(f"J_{nu} not positive at scan start t={lo}")
    hi = lo
    bracket = None
    while hi < stop:
        hi = hi + step
        fhi = _jv(nu, hi)
        if fhi <= 0.0:
            bracket = (lo, hi)
            break
        lo, flo = hi, fhi
    if bracket is None:
        raise BracketingFailure(f"no sign change of J_{nu} found on scan up to t={stop}")

    root = find_root(lambda x: _jv(nu, x), Interval(*bracket), Tolerance(abs=1e-13, rel=0.0))
    if abs(_jv(nu, root)) > 1e-10:
        raise BracketingFailure(f"residual |J_{nu}({root})| too large")
    for i in range(1, 65):  # positivity up to the zero, sampled
        s = root * i / 65.0
        if s > 0.0 and _jv(nu, s) <= 0.0:
            raise BracketingFailure(f"J_{nu} non-positive at t={s} inside (0, {root})")
    return root


@lru_cache(maxsize=256)
def _eigen_constant_cached(mu: float) -> EigenConstant:
    j = first_zero(mu / 2.0 - 1.0)
    return EigenConstant(mu=DimensionParam(mu), j=j, lam=j * j)


def lambda_mu(mu: DimensionParam | float) -> EigenConstant:
    """Eigenvalue constant of the weighted problem: lambda = j_{mu/2-1}**2."""
    m = mu.mu if isinstance(mu, DimensionParam) else DimensionParam(mu).mu
    if m > MU_MAX:
        raise OutOfSupportedRange(f"mu {m} above supported cap {MU_MAX}")
    return _eigen_constant_cached(float(m))


def mu_matching_lambda(lam: float) -> float:
    """Inverse of mu -> lambda_mu on mu >= 2, where the map is strictly increasing."""
    lam2 = lambda_mu(2.0).lam
    if lam < lam2:
        raise OutOfSupportedRange(f"lambda {lam} below lambda_2 = {lam2}")
    lo, hi = 2.0, MU_MAX
    if lam > lambda_mu(hi).lam:
        raise OutOfSupportedRange(f"lambda {lam} above lambda_{MU_MAX}")
    return find_root(lambda m: lambda_mu(m).lam - lam, Interval(lo, hi),
                     Tolerance(abs=1e-10, rel=0.0))


# --------------------------------------------------------------------------
# extremal profiles psi_mu and Phi


def _jv_scaled(nu: float, k: float, s: float) -> float:
    """s**(-nu) * J_nu(k*s), finite at s = 0.

    Evaluated by its even power series for small k*s (where the direct
    product would be 0/0 or inf*0) and by the direct product otherwise.
    """
    ks = k * s
    if ks <= 20.0:
        a0 = math.exp(nu * math.log(0.5 * k) - math.lgamma(nu + 1.0))
        qh, ql = _two_prod(0.5 * ks, 0.5 * ks)
        term_h, term_l = 1.0, 0.0
        sum_h, sum_l = 1.0, 0.0
        for m in range(1, 200):
            term_h, term_l = _dd_mul(term_h, term_l, -qh, -ql)
            dh, dl = _series_ratio_denom(m, nu)
            term_h, term_l = _dd_div(term_h, term_l, dh, dl)
            sum_h, sum_l = _dd_add(sum_h, sum_l, term_h, term_l)
            if abs(term_h) < 1e-35 * abs(sum_h) + 1e-305:
                break
        return a0 * (sum_h + sum_l)
    return s ** (-nu) * _jv(nu, ks)


def _check_mu_s(mu: float, s: float) -> tuple[float, float, float]:
    m = DimensionParam(mu).mu
    if m > MU_MAX:
        raise OutOfSupportedRange(f"mu {m} above supported cap {MU_MAX}")
    if not (0.0 <= s <= 1.0):
        raise OutOfSupportedRange(f"s must lie in [0, 1], got {s}")
    const = lambda_mu(m)
    return m / 2.0 - 1.0, const.j, const.lam


def psi(mu: float, s: float) -> float:
    """Extremal profile s**(1-mu/2) * J_{mu/2-1}(sqrt(lambda_mu) s).

    Realizes the infimum of the weighted quotient; psi(1) = 0 by construction
    and psi is finite at s = 0 for every mu > 0 (series evaluation).
    """
    nu, k, _ = _check_mu_s(mu, s)
    return _jv_scaled(nu, k, s)


def psi_prime(mu: float, s: float) -> float:
    """d/ds of psi, via the order-raising recurrence (never finite differences).

    psi'(s) = -sqrt(lambda) * s**(1-mu/2) * J_{mu/2}(sqrt(lambda) s), which
    vanishes at s = 0 and is strictly negative on (0, 1].
    """
    nu, k, _ = _check_mu_s(mu, s)
    return -k * s * _jv_scaled(nu + 1.0, k, s)


def psi_second(mu: float, s: float) -> float:
    """Second derivative of psi by two applications of the same recurrence."""
    nu, k, _ = _check_mu_s(mu, s)
    return -k * _jv_scaled(nu + 1.0, k, s) + k * k * s * s * _jv_scaled(nu + 2.0, k, s)


def phi(mu: float, s: float) -> float:
    """Companion profile J_{mu/2-1}(sqrt(lambda_mu) s); for mu > 2 it vanishes
    at both endpoints of [0, 1]."""
    nu, k, _ = _check_mu_s(mu, s)
    return _jv(nu, k * s)


def phi_prime(mu: float, s: float) -> float:
    """d/ds of phi.  Unbounded at s = 0 when mu < 4 (exponent mu/2 - 2 < 0)."""
    nu, k, _ = _check_mu_s(mu, s)
    if s == 0.0:
        if nu > 1.0:
            return 0.0
        if nu == 1.0:
            return 0.5 * k * k
        return math.inf if nu > 0.0 else (0.0 if nu == 0.0 else -math.inf)
    t = k * s
    return (nu / s) * _jv(nu, t) - k * _jv(nu + 1.0, t)


def phi_second(mu: float, s: float) -> float:
    """Second derivative of phi from order recurrences alone (independent of
    the ODE phi satisfies, so ODE residuals are a real check)."""
    nu, k, _ = _check_mu_s(mu, s)
    if s == 0.0:
        raise OutOfSupportedRange("phi_second is singular at s = 0 for general mu")
    t = k * s
    j0 = _jv(nu, t)
    j1 = _jv(nu + 1.0, t)
    j2 = _jv(nu + 2.0, t)
    jpp = (nu * (nu - 1.0) / (t * t)) * j0 - ((2.0 * nu + 1.0) / t) * j1 + j2
    return k * k * jpp


# --------------------------------------------------------------------------
# built-in identity checkers


def _grade_for(mu_exponent: float) -> float:
    """Grading exponent making s**p integrable-smooth after s = u**k."""
    if mu_exponent >= 1.0:
        return 1.0
    return math.ceil(2.0 / (mu_exponent + 1.0))


def check_lemma21(mu: float, a: float, b: float) -> float:
    """Residual of the integration-by-parts identity for psi on [a, b] plus
    the flux form of the derivative at b; both should vanish analytically.

    Returns max(|LHS - RHS| of the interval identity,
                |psi'(b) b**(mu-1) + lambda * int_0^b psi t**(mu-1) dt|).
    """
    m = DimensionParam(mu).mu
    if not (0.0 <= a <= b <= 1.0):
        raise ValueError(f"need 0 <= a <= b <= 1, got a={a}, b={b}")
    if a == b:
        return 0.0
    lam = lambda_mu(m).lam
    tol = Tolerance(abs=1e-12, rel=1e-12, max_depth=44)

    def integrand(s: float) -> float:
        ps = psi(m, s)
        dps = psi_prime(m, s)
        return (lam * ps * ps - dps * dps) * s ** (m - 1.0)

    grade = _grade_for(m - 1.0) if a == 0.0 else 1.0
    lhs = integrate(integrand, Interval(a, b), tol, grade=grade, grade_end="lo")

    def boundary(s: float) -> float:
        if s == 0.0:
            return 0.0  # psi'(s) s**(mu-1) -> 0 for every mu > 0
        return psi_prime(m, s) * psi(m, s) * s ** (m - 1.0)

    rhs = -boundary(b) + boundary(a)
    res1 = abs(lhs - rhs)

    flux = integrate(lambda t: psi(m, t) * t ** (m - 1.0), Interval(0.0, b), tol,
                     grade=_grade_for(m - 1.0), grade_end="lo")
    res2 = abs(psi_prime(m, b) * b ** (m - 1.0) + lam * flux)
    return max(res1, res2)


def check_lemma23(mu: float, x: float) -> float:
    """Residual of the weighted Phi identity on [0, x] for mu > 2:

        int Phi'^2 s ds = lambda int Phi^2 s ds
                          - ((mu-2)/2)^2 int Phi^2 / s ds + Phi'(x) Phi(x) x
    """
    m = DimensionParam(mu).mu
    if m <= 2.0:
        raise OutOfSupportedRange(f"identity requires mu > 2, got {m}")
    if not (0.0 < x <= 1.0):
        raise ValueError(f"need x in (0, 1], got {x}")
    lam = lambda_mu(m).lam
    kappa2 = ((m - 2.0) / 2.0) ** 2
    tol = Tolerance(abs=1e-12, rel=1e-12, max_depth=44)
    # integrands behave like s**(mu-3) near 0; grade them smooth
    grade = max(1.0, math.ceil(2.0 / (m - 2.0)))
    iv = Interval(0.0, x)

    lhs = integrate(lambda s: phi_prime(m, s) ** 2 * s, iv, tol, grade=grade)
    t1 = integrate(lambda s: phi(m, s) ** 2 * s, iv, tol, grade=grade)
    t2 = integrate(lambda s: phi(m, s) ** 2 / s if s > 0.0 else 0.0, iv, tol, grade=grade)
    rhs = lam * t1 - kappa2 * t2 + phi_prime(m, x) * phi(m, x) * x
    return abs(lhs - rhs)
