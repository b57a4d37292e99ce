import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_type.numerics import (
    Interval,
    InsufficientSamples,
    InvalidBracket,
    NonConvergence,
    NonFinite,
    SlopeFit,
    Tolerance,
    find_root,
    fit_log_slope,
    integrate,
)

TOL = Tolerance(abs=1e-10, rel=1e-10)

# 1e6-point trapezoid of psi_4(s)^2 on (0,1), frozen from the dev run
PSI4_SQ_TRAPEZOID = 1.5877585256703879


class TestInterval:
    def test_rejects_reversed(self):
        with pytest.raises(ValueError):
            Interval(1.0, 0.5)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            Interval(0.0, math.inf)

    def test_tolerance_requires_positive_budget(self):
        with pytest.raises(ValueError):
            Tolerance(abs=0.0, rel=0.0)


class TestIntegrate:
    def test_linear(self):
        assert integrate(lambda s: s, Interval(0, 1), TOL) == pytest.approx(0.5, abs=1e-12)

    def test_inverse_sqrt_with_grading(self):
        val = integrate(lambda s: s**-0.5, Interval(0, 1), TOL, grade=2)
        assert val == pytest.approx(2.0, abs=1e-8)

    def test_psi4_squared_matches_trapezoid_oracle(self):
        from spectral_type.special import psi

        val = integrate(lambda s: psi(4.0, s) ** 2, Interval(0, 1), TOL)
        assert val == pytest.approx(PSI4_SQ_TRAPEZOID, abs=1e-7)

    def test_grading_at_upper_end(self):
        val = integrate(lambda s: (1 - s) ** -0.5, Interval(0, 1), TOL, grade=2, grade_end="hi")
        assert val == pytest.approx(2.0, abs=1e-8)

    def test_nonfinite_integrand_raises(self):
        with pytest.raises(NonFinite):
            integrate(lambda s: 1.0 / s, Interval(0, 1), TOL)

    def test_depth_cap_raises(self):
        shallow = Tolerance(abs=1e-14, rel=0.0, max_depth=2)
        with pytest.raises(NonConvergence):
            integrate(lambda s: math.sin(100.0 * s) ** 2, Interval(0, 3), shallow)

    @settings(max_examples=25, deadline=None)
    @given(
        a=st.floats(-2, 2), b=st.floats(-2, 2), c=st.floats(-2, 2),
        wa=st.floats(-3, 3), wb=st.floats(-3, 3),
    )
    def test_linearity_on_polynomials(self, a, b, c, wa, wb):
        f = lambda s: a * s * s + b * s + c
        g = lambda s: b * s * s - c * s + a
        combined = integrate(lambda s: wa * f(s) + wb * g(s), Interval(0, 2), TOL)
        separate = wa * integrate(f, Interval(0, 2), TOL) + wb * integrate(g, Interval(0, 2), TOL)
        assert combined == pytest.approx(separate, abs=1e-8)

    def test_adjacent_intervals_sum_to_union(self):
        f = lambda s: math.exp(-s) * math.cos(3 * s)
        left = integrate(f, Interval(0.0, 0.7), TOL)
        right = integrate(f, Interval(0.7, 2.0), TOL)
        union = integrate(f, Interval(0.0, 2.0), TOL)
        assert left + right == pytest.approx(union, abs=2e-10)


class TestFindRoot:
    def test_sqrt2(self):
        x = find_root(lambda x: x * x - 2.0, Interval(1, 2))
        assert x == pytest.approx(math.sqrt(2), abs=1e-12)

    def test_cosine(self):
        x = find_root(math.cos, Interval(1, 2))
        assert x == pytest.approx(math.pi / 2, abs=1e-12)

    def test_sign_change_across_result(self):
        f = lambda x: math.tanh(x - 0.3) + 0.1 * (x - 0.3)
        tol = Tolerance(abs=1e-11, rel=0.0)
        x = find_root(f, Interval(-1, 2), tol)
        assert f(x - 1e-10) * f(x + 1e-10) < 0

    def test_invalid_bracket(self):
        with pytest.raises(InvalidBracket):
            find_root(lambda x: x * x + 1.0, Interval(0, 1))

    def test_endpoint_root(self):
        assert find_root(lambda x: x - 1.0, Interval(1, 2)) == 1.0


class TestFitLogSlope:
    @pytest.mark.parametrize("p", [-2, -1, 0, 1, 2, 3])
    def test_recovers_exact_power(self, p):
        samples = [(x, 1.7 * x**p) for x in (0.5, 1.0, 2.0, 4.0, 8.0)]
        fit = fit_log_slope(samples)
        assert fit.slope == pytest.approx(p, abs=1e-12)
        assert fit.max_abs_residual < 1e-12

    def test_quadratic_example(self):
        fit = fit_log_slope([(1, 1), (2, 4), (4, 16)])
        assert fit.slope == pytest.approx(2.0, abs=1e-12)

    def test_constant(self):
        fit = fit_log_slope([(1, 2), (2, 2), (4, 2)])
        assert fit.slope == pytest.approx(0.0, abs=1e-12)

    def test_window_reported(self):
        fit = fit_log_slope([(1, 1), (2, 2), (4, 4), (9, 9)])
        assert (fit.window.lo, fit.window.hi) == (1, 9)
        assert isinstance(fit, SlopeFit)

    def test_too_few_samples(self):
        with pytest.raises(InsufficientSamples):
            fit_log_slope([(1, 1), (2, 2)])

    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            fit_log_slope([(1, 1), (3, 2), (2, 4)])

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            fit_log_slope([(1, 1), (2, -2), (3, 4)])
