import math
import random

import pytest

from spectral_type.special import (
    BesselOrder,
    BracketingFailure,
    DimensionParam,
    OutOfSupportedRange,
    bessel_j,
    check_lemma21,
    check_lemma23,
    first_zero,
    lambda_mu,
    mu_matching_lambda,
    phi,
    phi_prime,
    phi_second,
    psi,
    psi_prime,
    psi_second,
)

from _oracles import oracle_besselj, oracle_first_zero


class TestBesselJ:
    def test_at_origin(self):
        assert bessel_j(0.0, 0.0) == 1.0
        assert bessel_j(2.5, 0.0) == 0.0
        assert bessel_j(-0.5, 0.0) == math.inf

    def test_half_order_closed_form(self):
        # J_{1/2}(t) = sqrt(2/(pi t)) sin t, so J_{1/2}(pi) = 0
        assert abs(bessel_j(0.5, math.pi)) < 1e-12
        t = 2.3
        assert bessel_j(0.5, t) == pytest.approx(
            math.sqrt(2.0 / (math.pi * t)) * math.sin(t), rel=1e-13
        )

    def test_j0_of_one(self):
        assert bessel_j(0.0, 1.0) == pytest.approx(0.7651976865579666, rel=1e-13)

    @pytest.mark.parametrize("nu", [-0.99, -0.5, 0.0, 0.5, 1.0, 1.7, 5.0, 20.0, 60.0, 119.0])
    @pytest.mark.parametrize("t", [0.01, 1.0, 8.0, 25.0, 30.0])
    def test_small_argument_relative_accuracy(self, nu, t):
        ref = oracle_besselj(nu, t)
        mine = bessel_j(nu, t)
        assert abs(mine - ref) <= 1e-12 * max(abs(ref), 1e-13)

    @pytest.mark.parametrize("nu", [-0.9, 0.0, 2.0, 10.3, 37.2, 60.0, 120.0])
    @pytest.mark.parametrize("t", [34.1, 50.0, 100.0, 200.0, 300.0])
    def test_large_argument_absolute_accuracy(self, nu, t):
        assert abs(bessel_j(nu, t) - oracle_besselj(nu, t)) <= 1e-10

    def test_out_of_range(self):
        with pytest.raises(OutOfSupportedRange):
            bessel_j(-1.0, 1.0)
        with pytest.raises(OutOfSupportedRange):
            bessel_j(121.0, 1.0)
        with pytest.raises(OutOfSupportedRange):
            bessel_j(0.0, -0.1)
        with pytest.raises(OutOfSupportedRange):
            bessel_j(0.0, 301.0)


class TestFirstZero:
    @pytest.mark.parametrize("nu", [-0.9, -0.5, 0.0, 0.5, 1.0, 2.0, 5.0, 20.0, 60.0])
    def test_matches_series_bisection_oracle(self, nu):
        assert first_zero(nu) == pytest.approx(oracle_first_zero(nu), abs=1e-9)

    def test_closed_forms(self):
        assert first_zero(0.5) == pytest.approx(math.pi, abs=1e-10)
        assert first_zero(-0.5) == pytest.approx(math.pi / 2, abs=1e-10)
        assert first_zero(0.0) == pytest.approx(2.4048255577, abs=1e-9)

    def test_near_order_minus_one(self):
        # j_nu ~ 2 sqrt(nu+1) as nu -> -1
        z = first_zero(-0.99)
        assert 0.19 < z < 0.21

    def test_residual_small_and_positive_before(self):
        z = first_zero(3.7)
        assert abs(bessel_j(3.7, z)) <= 1e-10
        for i in range(1, 64):
            assert bessel_j(3.7, z * i / 64.0) > 0.0

    @pytest.mark.parametrize("nu", [40.0, 80.0, 120.0])
    def test_large_order_asymptotics(self, nu):
        assert 0.9 < first_zero(nu) / nu < 1.4


class TestLambdaMu:
    def test_mu_two_matches_paper_rounding(self):
        assert lambda_mu(2.0).lam == pytest.approx(5.7832, abs=1e-3)

    def test_mu_three_is_pi_squared(self):
        assert lambda_mu(3.0).lam == pytest.approx(math.pi**2, abs=1e-8)

    def test_mu_four(self):
        assert lambda_mu(4.0).lam == pytest.approx(14.6819706, abs=1e-6)

    def test_constant_invariants(self):
        c = lambda_mu(7.3)
        assert c.lam == c.j * c.j
        assert abs(bessel_j(c.mu.order, c.j)) <= 1e-10

    def test_strictly_increasing_on_grid(self):
        grid = [2.0 + 0.5 * i for i in range(77)]  # 2.0 .. 40.0
        vals = [lambda_mu(m).lam for m in grid]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_inverse(self):
        lam = lambda_mu(6.0).lam
        assert mu_matching_lambda(lam) == pytest.approx(6.0, abs=1e-7)

    def test_out_of_range(self):
        with pytest.raises(OutOfSupportedRange):
            lambda_mu(0.0)
        with pytest.raises(OutOfSupportedRange):
            lambda_mu(241.0)


class TestProfiles:
    @pytest.mark.parametrize("mu", [0.5, 2.0, 3.0, 4.0, 10.0, 40.0])
    def test_psi_vanishes_at_one(self, mu):
        assert abs(psi(mu, 1.0)) < 1e-10

    @pytest.mark.parametrize("mu", [0.5, 2.0, 3.0, 4.0, 10.0])
    def test_psi_prime_zero_at_origin(self, mu):
        assert psi_prime(mu, 0.0) == 0.0

    def test_psi_matches_direct_formula(self):
        k = math.sqrt(lambda_mu(4.0).lam)
        direct = (1.0 / 0.5) * bessel_j(1.0, k * 0.5)
        assert psi(4.0, 0.5) == pytest.approx(direct, abs=1e-10)

    def test_psi_prime_negative_inside(self):
        for mu in (0.7, 2.0, 3.0, 8.0, 25.0):
            for s in (0.05, 0.3, 0.6, 0.9, 1.0):
                assert psi_prime(mu, s) < 0.0

    def test_psi_ode_residual(self):
        rng = random.Random(31)
        for _ in range(100):
            mu = rng.uniform(0.05, 50.0)
            s = rng.uniform(0.01, 0.99)
            lam = lambda_mu(mu).lam
            res = psi_second(mu, s) + (mu - 1.0) / s * psi_prime(mu, s) + lam * psi(mu, s)
            assert abs(res) <= 1e-7

    def test_phi_boundary_values(self):
        assert phi(4.0, 0.0) == 0.0
        assert abs(phi(4.0, 1.0)) < 1e-10

    def test_phi_half_order_closed_form(self):
        # mu = 3: Phi(s) = J_{1/2}(pi s); at s = 1/2 this is 2/pi
        assert phi(3.0, 0.5) == pytest.approx(2.0 / math.pi, abs=1e-12)

    def test_phi_ode_residual(self):
        rng = random.Random(77)
        for _ in range(100):
            mu = rng.uniform(2.1, 50.0)
            s = rng.uniform(0.01, 0.99)
            lam = lambda_mu(mu).lam
            nu = mu / 2.0 - 1.0
            res = phi_second(mu, s) + phi_prime(mu, s) / s + (lam - nu * nu / s**2) * phi(mu, s)
            assert abs(res) <= 1e-7

    def test_s_out_of_range(self):
        with pytest.raises(OutOfSupportedRange):
            psi(3.0, 1.5)
        with pytest.raises(OutOfSupportedRange):
            phi(3.0, -0.1)


class TestLemmaIdentities:
    def test_lemma21_examples(self):
        assert check_lemma21(3.0, 0.0, 1.0) < 1e-8
        assert check_lemma21(2.0, 0.25, 0.75) < 1e-8
        assert check_lemma21(5.5, 0.4, 0.4) == 0.0

    def test_lemma23_examples(self):
        assert check_lemma23(4.0, 1.0) < 1e-8
        assert check_lemma23(3.0, 0.5) < 1e-8

    def test_lemma23_vanishing_near_zero(self):
        # all three integrals vanish with x; residual follows
        assert check_lemma23(4.0, 1e-3) < 1e-9

    def test_lemma23_requires_mu_above_two(self):
        with pytest.raises(OutOfSupportedRange):
            check_lemma23(2.0, 0.5)

    def test_random_configurations(self):
        rng = random.Random(2024)
        for _ in range(10):
            mu = rng.uniform(0.3, 40.0)
            a = rng.uniform(0.0, 0.5)
            b = rng.uniform(a + 0.1, 1.0)
            assert check_lemma21(mu, a, b) < 1e-8
        for _ in range(10):
            mu = rng.uniform(2.3, 40.0)
            x = rng.uniform(0.05, 1.0)
            assert check_lemma23(mu, x) < 1e-8


def test_domain_types_validate():
    with pytest.raises(OutOfSupportedRange):
        BesselOrder(-1.5)
    with pytest.raises(OutOfSupportedRange):
        DimensionParam(-2.0)
    assert DimensionParam(6.0).order.nu == 2.0
