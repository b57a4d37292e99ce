"""Warped-product surface profiles: R x S^1 with metric dt^2 + eta'(t)^2 dtheta^2.

Each family stores eta' in closed form and eta as its exact antiderivative
(quadrature-backed only where no closed form exists).  All families satisfy
eta' > 0 everywhere and eta(t) -> 0 as t -> -infinity, except Tabulated,
whose tails are simply unknown beyond the table span.

The families with pieces prescribed only for |t| > 1 (power-law, slowly
varying) are bridged across (-1, 1) by a continuous piecewise-linear eta'
whose plateau level is solved so that the bridge integral matches
eta(1) - eta(-1) exactly; eta stays C^1 and strictly increasing.  (A single
cubic matching both endpoint values and slopes is impossible there once the
slopes exceed the mean slope enough - its derivative is a parabola that dips
negative - so the bridge is built in eta' space instead.)
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .special import OutOfSupportedRange

#: staircase pieces are built out to here; e**t overflows not far beyond
STAIRCASE_T_CAP = 700.0


class InconclusiveTail(RuntimeError):
    """Tabulated data ends before a tail-behaviour heuristic stabilizes."""


# --------------------------------------------------------------------------
# bridge across (-1, 1)


@dataclass(frozen=True)
class _LinearBridge:
    """Continuous piecewise-linear eta' on [-1, 1]: endpoint values a, b with
    an interior plateau m chosen so the integral is exactly ``total``."""

    a: float
    b: float
    delta: float
    m: float

    @staticmethod
    def build(a: float, b: float, total: float = 1.0) -> "_LinearBridge":
        delta = min(0.5, total / (a + b))
        m = (total - 0.5 * delta * (a + b)) / (2.0 - delta)
        if m <= 0.0:
            raise ValueError(f"bridge plateau not positive for endpoint slopes {a}, {b}")
        return _LinearBridge(a=a, b=b, delta=delta, m=m)

    def value(self, t: float) -> float:
        d, a, b, m = self.delta, self.a, self.b, self.m
        if t <= -1.0 + d:
            u = (t + 1.0) / d
            return a + (m - a) * u
        if t >= 1.0 - d:
            u = (t - (1.0 - d)) / d
            return m + (b - m) * u
        return m

    def integral_from_left(self, t: float) -> float:
        """Integral of value over [-1, t]."""
        d, a, b, m = self.delta, self.a, self.b, self.m
        if t <= -1.0 + d:
            u = t + 1.0
            return a * u + 0.5 * (m - a) * u * u / d
        head = d * 0.5 * (a + m)
        if t <= 1.0 - d:
            return head + m * (t - (-1.0 + d))
        u = t - (1.0 - d)
        return head + m * (2.0 - 2.0 * d) + m * u + 0.5 * (b - m) * u * u / d


# --------------------------------------------------------------------------
# profile families


class Profile:
    """Accessors eta(t), eta_prime(t) plus the closed-form facts the surface
    operations need (tail convergence of the h-integral, volume limits)."""

    family = "abstract"

    def eta(self, t: float) -> float:
        raise NotImplementedError

    def eta_prime(self, t: float) -> float:
        raise NotImplementedError

    def eta_limit_pos(self) -> Optional[float]:
        """lim eta(t) as t -> +inf; math.inf if unbounded, None if unknown."""
        return math.inf

    def h_tail_convergent(self, side: int) -> Optional[bool]:
        """Does int dt/eta' converge toward +inf (side=+1) / -inf (side=-1)?
        None means no closed-form ruling (tabulated data)."""
        return None

    def scan_r_cap(self) -> Optional[float]:
        """Largest radius recommended for eigenvalue scans, if any."""
        return None

    def describe(self) -> str:
        return self.family


@dataclass(frozen=True)
class PowerLawProfile(Profile):
    """eta = (-t)**-alpha on t < -1 and 2 t**alpha on t > 1, bridged."""

    alpha: float
    _bridge: _LinearBridge = field(init=False, repr=False, compare=False)

    family = "power_law"

    def __post_init__(self) -> None:
        if self.alpha <= 0.0:
            raise ValueError("power-law exponent must be positive")
        bridge = _LinearBridge.build(self.alpha, 2.0 * self.alpha, total=1.0)
        object.__setattr__(self, "_bridge", bridge)

    def eta(self, t: float) -> float:
        if t <= -1.0:
            return (-t) ** -self.alpha
        if t >= 1.0:
            return 2.0 * t**self.alpha
        return 1.0 + self._bridge.integral_from_left(t)

    def eta_prime(self, t: float) -> float:
        if t <= -1.0:
            return self.alpha * (-t) ** (-self.alpha - 1.0)
        if t >= 1.0:
            return 2.0 * self.alpha * t ** (self.alpha - 1.0)
        return self._bridge.value(t)

    def h_tail_convergent(self, side: int) -> bool:
        # 1/eta' ~ t**(1-alpha)/(2 alpha) on the right: converges iff alpha > 2;
        # ~ (-t)**(alpha+1)/alpha on the left: always diverges
        return self.alpha > 2.0 if side > 0 else False

    def describe(self) -> str:
        return f"power_law alpha={self.alpha:g}"


@dataclass(frozen=True)
class ExponentialDecayProfile(Profile):
    """eta'(t) = exp(-alpha |t|): finite total area, both h-tails divergent."""

    alpha: float

    family = "exp_decay"

    def __post_init__(self) -> None:
        if self.alpha <= 0.0:
            raise ValueError("decay rate must be positive")

    def eta(self, t: float) -> float:
        a = self.alpha
        if t <= 0.0:
            return math.exp(a * t) / a
        return (2.0 - math.exp(-a * t)) / a

    def eta_prime(self, t: float) -> float:
        return math.exp(-self.alpha * abs(t))

    def eta_limit_pos(self) -> float:
        return 2.0 / self.alpha

    def h_tail_convergent(self, side: int) -> bool:
        return False

    def scan_r_cap(self) -> float:
        # keeps min eta' / max eta' representable comfortably in double
        return 25.0 / self.alpha

    def describe(self) -> str:
        return f"exp_decay alpha={self.alpha:g}"


@dataclass(frozen=True)
class DprsProfile(Profile):
    """eta = e**t: the constant-curvature cusp end with eta'/eta = 1."""

    family = "dprs"

    def eta(self, t: float) -> float:
        self._check(t)
        return math.exp(t)

    def eta_prime(self, t: float) -> float:
        self._check(t)
        return math.exp(t)

    @staticmethod
    def _check(t: float) -> None:
        if abs(t) > STAIRCASE_T_CAP:
            raise OutOfSupportedRange(f"|t| = {abs(t)} beyond double-precision range for e**t")

    def h_tail_convergent(self, side: int) -> bool:
        return side > 0  # int e**-t converges, int e**+t does not

    def describe(self) -> str:
        return "dprs"


def _hermite_value(u: float, h: float, y0: float, y1: float, d0: float, d1: float) -> float:
    u2 = u * u
    u3 = u2 * u
    return ((2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * h * d0
            + (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * h * d1)


def _hermite_integral(u: float, h: float, y0: float, y1: float, d0: float, d1: float) -> float:
    """Integral of the Hermite cubic from the left edge to parameter u."""
    u2 = u * u
    u3 = u2 * u
    u4 = u3 * u
    return h * ((0.5 * u4 - u3 + u) * y0 + (0.25 * u4 - 2 * u3 / 3 + 0.5 * u2) * h * d0
                + (-0.5 * u4 + u3) * y1 + (0.25 * u4 - u3 / 3) * h * d1)


@dataclass(frozen=True)
class StaircaseProfile(Profile):
    """Alternating plateaus eta' = n^2 on (2^n, 2^n + 1) and stretches
    eta' = e**t on (2^n + 2, 2^(n+1) - 1), joined by monotone Hermite cubics
    that keep eta' >= n^2 across [2^n - 1, 2^n + 2]; eta' = e**t below t = 3.

    The concrete bridges make the profile reproducible bit for bit: each is
    the cubic with zero slope on its plateau side and the e**t slope on an
    increasing exponential side (slopes that would break monotonicity are
    clamped to zero, leaving eta' continuous and eta C^1).
    """

    _pieces: tuple = field(init=False, repr=False, compare=False)

    family = "staircase"

    def __post_init__(self) -> None:
        pieces = []  # (t_lo, t_hi, kind, payload, eta_at_lo)
        eta_acc = math.exp(3.0)  # eta(3), exact for the pure e**t left tail
        n = 2
        while 2.0**n - 1.0 < STAIRCASE_T_CAP:
            plateau = float(n * n)
            lo, hi = 2.0**n - 1.0, 2.0**n  # descend e**t -> n^2
            segs = [
                (lo, hi, "hermite", (math.exp(lo), plateau, 0.0, 0.0)),
                (hi, hi + 1.0, "const", plateau),
                (hi + 1.0, hi + 2.0, "hermite",
                 (plateau, math.exp(hi + 2.0), 0.0, math.exp(hi + 2.0))),
                (hi + 2.0, 2.0 ** (n + 1) - 1.0, "exp", None),
            ]
            for (a, b, kind, payload) in segs:
                # only exp stretches ever get clipped: bridges and plateaus of
                # every built group end well inside the cap
                b = min(b, STAIRCASE_T_CAP)
                if a >= STAIRCASE_T_CAP:
                    break
                pieces.append((a, b, kind, payload, eta_acc))
                eta_acc += self._piece_integral(a, b, kind, payload)
            n += 1
        object.__setattr__(self, "_pieces", tuple(pieces))

    @staticmethod
    def _piece_integral(a: float, b: float, kind: str, payload) -> float:
        if kind == "exp":
            return math.exp(b) - math.exp(a)
        if kind == "const":
            return payload * (b - a)
        y0, y1, d0, d1 = payload
        return _hermite_integral(1.0, b - a, y0, y1, d0, d1)

    def _locate(self, t: float):
        lo, hi = 0, len(self._pieces)
        while lo < hi:
            mid = (lo + hi) // 2
            if self._pieces[mid][1] <= t:
                lo = mid + 1
            else:
                hi = mid
        return self._pieces[min(lo, len(self._pieces) - 1)]

    def eta_prime(self, t: float) -> float:
        if t > STAIRCASE_T_CAP or t < -STAIRCASE_T_CAP:
            raise OutOfSupportedRange(f"t = {t} outside staircase support")
        if t <= 3.0:
            return math.exp(t)
        a, b, kind, payload, _ = self._locate(t)
        if kind == "exp":
            return math.exp(t)
        if kind == "const":
            return payload
        y0, y1, d0, d1 = payload
        return _hermite_value((t - a) / (b - a), b - a, y0, y1, d0, d1)

    def eta(self, t: float) -> float:
        if t > STAIRCASE_T_CAP or t < -STAIRCASE_T_CAP:
            raise OutOfSupportedRange(f"t = {t} outside staircase support")
        if t <= 3.0:
            return math.exp(t)
        a, b, kind, payload, eta_lo = self._locate(t)
        if kind == "exp":
            return eta_lo + math.exp(t) - math.exp(a)
        if kind == "const":
            return eta_lo + payload * (t - a)
        y0, y1, d0, d1 = payload
        return eta_lo + _hermite_integral((t - a) / (b - a), b - a, y0, y1, d0, d1)

    def h_tail_convergent(self, side: int) -> bool:
        # plateaus contribute sum 1/n^2 on the right; e**-t blows up on the left
        return side > 0

    def scan_r_cap(self) -> float:
        return STAIRCASE_T_CAP

    def describe(self) -> str:
        return "staircase"


class _CumulativeIntegral:
    """Lazily extended cumulative Simpson table for smooth positive rates."""

    def __init__(self, fn, t0: float, step: float = 0.05):
        self._fn = fn
        self._t0 = t0
        self._step = step
        self._cum = [0.0]  # cumulative at t0 + i*step

    def _extend(self, n_panels: int) -> None:
        fn, h = self._fn, self._step
        t = self._t0 + (len(self._cum) - 1) * h
        acc = self._cum[-1]
        for _ in range(len(self._cum) - 1, n_panels):
            acc += h / 6.0 * (fn(t) + 4.0 * fn(t + 0.5 * h) + fn(t + h))
            self._cum.append(acc)
            t += h
        if len(self._cum) > 400_000:
            raise OutOfSupportedRange("cumulative rate integral grew past its table cap")

    def value(self, t: float) -> float:
        if t < self._t0:
            raise ValueError(f"t = {t} below integral base {self._t0}")
        x = (t - self._t0) / self._step
        i = int(x)
        if i + 1 >= len(self._cum):
            self._extend(i + 2)
        base = self._cum[i]
        a = self._t0 + i * self._step
        frac = t - a
        if frac == 0.0:
            return base
        # local Simpson on the partial panel
        return base + frac / 6.0 * (self._fn(a) + 4.0 * self._fn(a + 0.5 * frac) + self._fn(a + frac))


_SLOW_CHOICES = ("log_power", "power", "log_log")


@dataclass(frozen=True)
class SlowlyVaryingProfile(Profile):
    """eta = 2 exp(int_1^t rate) on t > 1, exp(-int_1^(-t) rate) on t < -1.

    The decay rate mu(t) is positive, eventually decreasing, with divergent
    integral, so volume still grows but eta'/eta = mu(|t|) -> 0 slowly.
    Choices: log_power ((1+log t)^beta / t), power (t^-alpha, 0<alpha<1),
    log_log ((log(t+1))^-gamma).  The log_power rate is the classical
    (log t)^beta / t shifted by one log unit so it is positive and finite at
    t = 1 (the unshifted rate vanishes there, which would break eta' > 0);
    tail asymptotics are unchanged.
    """

    choice: str
    param: float
    _table: Optional[_CumulativeIntegral] = field(init=False, repr=False, compare=False)
    _bridge: _LinearBridge = field(init=False, repr=False, compare=False)

    family = "slowly_varying"

    def __post_init__(self) -> None:
        if self.choice not in _SLOW_CHOICES:
            raise ValueError(f"choice must be one of {_SLOW_CHOICES}")
        if self.choice == "power" and not (0.0 < self.param < 1.0):
            raise ValueError("power choice needs 0 < alpha < 1")
        if self.choice in ("log_power", "log_log") and self.param <= 0.0:
            raise ValueError("rate parameter must be positive")
        table = _CumulativeIntegral(self.rate, 1.0) if self.choice == "log_log" else None
        object.__setattr__(self, "_table", table)
        r1 = self.rate(1.0)
        object.__setattr__(self, "_bridge", _LinearBridge.build(r1, 2.0 * r1, total=1.0))

    def rate(self, t: float) -> float:
        if self.choice == "log_power":
            return (1.0 + math.log(t)) ** self.param / t
        if self.choice == "power":
            return t ** -self.param
        return math.log(t + 1.0) ** -self.param

    def rate_integral(self, t: float) -> float:
        """int_1^t rate(s) ds, closed form except for the log_log choice."""
        if t < 1.0:
            raise ValueError("rate integral defined for t >= 1")
        if self.choice == "log_power":
            b = self.param
            return ((1.0 + math.log(t)) ** (b + 1.0) - 1.0) / (b + 1.0)
        if self.choice == "power":
            a = self.param
            return (t ** (1.0 - a) - 1.0) / (1.0 - a)
        return self._table.value(t)

    def monotone_from(self) -> float:
        """Smallest c >= 1 past which the rate decreases and t*rate(t) increases."""
        if self.choice == "power":
            return 1.0
        if self.choice == "log_power":
            return max(1.0, math.exp(self.param - 1.0))
        # log_log: t*rate increasing iff (t+1) log(t+1) > gamma t
        c = 1.0
        while (c + 1.0) * math.log(c + 1.0) <= self.param * c:
            c *= 1.5
            if c > 1e12:
                raise OutOfSupportedRange("monotonicity onset unreachable")
        return c

    def _exponent(self, t: float) -> float:
        val = self.rate_integral(t)
        if val > 700.0:
            raise OutOfSupportedRange(f"eta overflows double precision at t = {t}")
        return val

    def eta(self, t: float) -> float:
        if t >= 1.0:
            return 2.0 * math.exp(self._exponent(t))
        if t <= -1.0:
            return math.exp(-self._exponent(-t))
        return 1.0 + self._bridge.integral_from_left(t)

    def eta_prime(self, t: float) -> float:
        if t >= 1.0:
            return self.eta(t) * self.rate(t)
        if t <= -1.0:
            return self.eta(t) * self.rate(-t)
        return self._bridge.value(t)

    def h_tail_convergent(self, side: int) -> bool:
        # 1/eta' = e**(-I(t))/rate on the right with I divergent and rate
        # sub-exponential: converges; the mirrored left tail diverges
        return side > 0

    def describe(self) -> str:
        return f"slowly_varying choice={self.choice} param={self.param:g}"


def _pchip_slopes(ts: Sequence[float], ys: Sequence[float]) -> list[float]:
    """Fritsch-Carlson shape-preserving slopes (keeps the interpolant inside
    the local data range, hence positive for positive data)."""
    n = len(ts)
    h = [ts[i + 1] - ts[i] for i in range(n - 1)]
    delta = [(ys[i + 1] - ys[i]) / h[i] for i in range(n - 1)]
    d = [0.0] * n
    for i in range(1, n - 1):
        if delta[i - 1] * delta[i] > 0.0:
            w1 = 2.0 * h[i] + h[i - 1]
            w2 = h[i] + 2.0 * h[i - 1]
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i])
    # one-sided endpoint slopes, clipped to preserve shape
    def end_slope(h0, h1, d0, d1):
        s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1)
        if s * d0 <= 0.0:
            return 0.0
        if d0 * d1 < 0.0 and abs(s) > 3.0 * abs(d0):
            return 3.0 * d0
        return s
    if n >= 3:
        d[0] = end_slope(h[0], h[1], delta[0], delta[1])
        d[-1] = end_slope(h[-1], h[-2], delta[-1], delta[-2])
    else:
        d[0] = d[-1] = delta[0]
    return d


@dataclass(frozen=True)
class TabulatedProfile(Profile):
    """eta' given at sample points, interpolated by a monotone cubic; eta is
    the interpolant's exact antiderivative with eta(t_min) taken as 0 (the
    table is assumed to start far enough left that the true value is small).
    Tail behaviour outside the span is unknown: h-classification falls back
    to a ratio heuristic and volume limits report None."""

    ts: tuple
    etaps: tuple
    _slopes: tuple = field(init=False, repr=False, compare=False)
    _cum: tuple = field(init=False, repr=False, compare=False)

    family = "tabulated"

    def __post_init__(self) -> None:
        ts = tuple(float(t) for t in self.ts)
        ys = tuple(float(y) for y in self.etaps)
        if len(ts) != len(ys) or len(ts) < 4:
            raise ValueError("tabulated profile needs >= 4 (t, eta') samples")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("tabulated t values must be strictly increasing")
        if any(y <= 0.0 for y in ys):
            raise ValueError("tabulated eta' values must be positive")
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "etaps", ys)
        d = _pchip_slopes(ts, ys)
        cum = [0.0]
        for i in range(len(ts) - 1):
            h = ts[i + 1] - ts[i]
            cum.append(cum[-1] + _hermite_integral(1.0, h, ys[i], ys[i + 1], d[i], d[i + 1]))
        object.__setattr__(self, "_slopes", tuple(d))
        object.__setattr__(self, "_cum", tuple(cum))

    def _segment(self, t: float) -> int:
        if t < self.ts[0] or t > self.ts[-1]:
            raise OutOfSupportedRange(f"t = {t} outside the tabulated span "
                                      f"[{self.ts[0]}, {self.ts[-1]}]")
        lo, hi = 0, len(self.ts) - 2
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.ts[mid] <= t:
                lo = mid
            else:
                hi = mid - 1
        return lo

    def eta_prime(self, t: float) -> float:
        i = self._segment(t)
        h = self.ts[i + 1] - self.ts[i]
        return _hermite_value((t - self.ts[i]) / h, h, self.etaps[i], self.etaps[i + 1],
                              self._slopes[i], self._slopes[i + 1])

    def eta(self, t: float) -> float:
        i = self._segment(t)
        h = self.ts[i + 1] - self.ts[i]
        return self._cum[i] + _hermite_integral((t - self.ts[i]) / h, h,
                                                self.etaps[i], self.etaps[i + 1],
                                                self._slopes[i], self._slopes[i + 1])

    def eta_limit_pos(self) -> None:
        return None

    def scan_r_cap(self) -> float:
        return min(-self.ts[0], self.ts[-1])

    def describe(self) -> str:
        return f"tabulated n={len(self.ts)} span=[{self.ts[0]:g}, {self.ts[-1]:g}]"


# --------------------------------------------------------------------------
# config-file loading (line-oriented key=value)


def parse_profile_options(options: dict[str, str], base_dir: Optional[Path] = None) -> Profile:
    opts = dict(options)
    family = opts.pop("family", None)
    if family is None:
        raise ValueError("profile config must set family=...")

    def need_float(key: str) -> float:
        if key not in opts:
            raise ValueError(f"{family} profile requires {key}=...")
        return float(opts.pop(key))

    if family == "power_law":
        profile: Profile = PowerLawProfile(alpha=need_float("alpha"))
    elif family == "exp_decay":
        profile = ExponentialDecayProfile(alpha=need_float("alpha"))
    elif family == "dprs":
        profile = DprsProfile()
    elif family == "staircase":
        profile = StaircaseProfile()
    elif family == "slowly_varying":
        choice = opts.pop("mu_choice", None)
        if choice not in _SLOW_CHOICES:
            raise ValueError(f"slowly_varying requires mu_choice in {_SLOW_CHOICES}")
        key = {"log_power": "beta", "power": "alpha", "log_log": "gamma"}[choice]
        profile = SlowlyVaryingProfile(choice=choice, param=need_float(key))
    elif family == "tabulated":
        if "csv" not in opts:
            raise ValueError("tabulated profile requires csv=<path>")
        csv_path = Path(opts.pop("csv"))
        if base_dir is not None and not csv_path.is_absolute():
            csv_path = base_dir / csv_path
        ts, ys = [], []
        with open(csv_path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().startswith("#"):
                    continue
                try:
                    t, y = float(row[0]), float(row[1])
                except ValueError:
                    continue  # header line
                ts.append(t)
                ys.append(y)
        profile = TabulatedProfile(ts=tuple(ts), etaps=tuple(ys))
    else:
        raise ValueError(f"unknown profile family {family!r}")

    if opts:
        raise ValueError(f"unused profile options: {sorted(opts)}")
    return profile


def load_profile(path: str | Path) -> Profile:
    """Read a line-oriented key=value profile config file."""
    path = Path(path)
    options: dict[str, str] = {}
    for raw in path.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"malformed profile config line: {raw!r}")
        key, value = line.split("=", 1)
        options[key.strip()] = value.strip()
    return parse_profile_options(options, base_dir=path.parent)
