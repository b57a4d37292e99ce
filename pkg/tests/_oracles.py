"""Independent high-precision oracles used by the test suite.

Everything here goes through mpmath's arbitrary-precision series evaluation,
deliberately sharing no code with the package under test.
"""

from __future__ import annotations

import mpmath


def oracle_besselj(nu: float, t: float, dps: int = 30) -> float:
    with mpmath.workdps(dps):
        return float(mpmath.besselj(nu, t))


def oracle_first_zero(nu: float, dps: int = 25) -> float:
    """First positive zero of J_nu by scan + bisection on the mpmath series."""
    with mpmath.workdps(dps):
        f = lambda t: mpmath.besselj(nu, t)
        # scan upward from a point known to precede the first zero
        if nu >= 1.0:
            lo = mpmath.mpf(nu)
            step = mpmath.mpf("0.1")
        else:
            lo = mpmath.mpf("0.35") * mpmath.sqrt(nu + 1)
            step = mpmath.mpf("0.1") * mpmath.sqrt(nu + 1)
        flo = f(lo)
        assert flo > 0
        hi = lo
        for _ in range(5000):
            hi = hi + step
            fhi = f(hi)
            if fhi <= 0:
                break
            lo, flo = hi, fhi
        else:
            raise AssertionError(f"oracle scan failed for nu={nu}")
        for _ in range(120):
            mid = (lo + hi) / 2
            fm = f(mid)
            if fm == 0:
                return float(mid)
            if flo * fm < 0:
                hi = mid
            else:
                lo, flo = mid, fm
        return float((lo + hi) / 2)


def oracle_integral(f, a: float, b: float, dps: int = 30) -> float:
    """Gauss-Legendre quadrature at high precision (for smooth integrands)."""
    with mpmath.workdps(dps):
        return float(mpmath.quad(f, [a, b]))
