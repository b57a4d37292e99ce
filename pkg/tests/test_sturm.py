import math
import random

import numpy as np
import pytest

from spectral_type.numerics import Interval, Tolerance
from spectral_type.special import lambda_mu
from spectral_type.sturm import (
    DIRICHLET,
    NATURAL,
    BoundaryCondition,
    Mesh,
    SingularMass,
    WeightedProblem,
    ZeroDenominator,
    default_grading,
    first_eigen_fem,
    first_eigen_shoot,
    rayleigh_quotient,
    sign_changes,
)

UNIT = Interval(0.0, 1.0)


def radial_problem(mu: float, r: float = 1.0) -> WeightedProblem:
    return WeightedProblem(
        interval=Interval(0.0, r),
        weight=lambda s, m=mu: s ** (m - 1.0),
        bc=BoundaryCondition(NATURAL, DIRICHLET),
    )


class TestTypes:
    def test_bc_requires_a_dirichlet_end(self):
        with pytest.raises(ValueError):
            BoundaryCondition(NATURAL, NATURAL)
        with pytest.raises(ValueError):
            BoundaryCondition("robin", DIRICHLET)

    def test_mesh_needs_interior_nodes(self):
        with pytest.raises(ValueError):
            Mesh(np.linspace(0, 1, 10))

    def test_mesh_strictly_increasing(self):
        nodes = np.linspace(0, 1, 30)
        nodes[4] = nodes[5]
        with pytest.raises(ValueError):
            Mesh(nodes)

    def test_graded_mesh_clusters(self):
        m = Mesh.graded(UNIT, 100, 2.0)
        widths = np.diff(m.nodes)
        assert widths[0] < widths[-1]
        assert m.nodes[0] == 0.0 and m.nodes[-1] == 1.0

    def test_default_grading_capped(self):
        assert default_grading(3.0, 4000) == 1.0
        assert 1.0 < default_grading(0.5, 4000) <= 4.0


class TestFirstEigenFem:
    def test_vibrating_string(self):
        p = WeightedProblem(UNIT, lambda s: 1.0, BoundaryCondition(DIRICHLET, DIRICHLET))
        sol = first_eigen_fem(p, Mesh.uniform(UNIT, 2000))
        assert math.pi**2 - 0.01 <= sol.lam <= math.pi**2 + 0.01

    @pytest.mark.parametrize("mu,rtol", [(2.0, 2e-3), (3.0, 2e-3)])
    def test_radial_weights_match_bessel_constant(self, mu, rtol):
        sol = first_eigen_fem(radial_problem(mu), Mesh.uniform(UNIT, 4000))
        assert sol.lam == pytest.approx(lambda_mu(mu).lam, rel=rtol)

    def test_eigenfunction_reproduces_lambda(self):
        p = radial_problem(2.0)
        sol = first_eigen_fem(p, Mesh.uniform(UNIT, 2000))
        rq = rayleigh_quotient(sol.eigenfunction, p, sol.mesh)
        assert abs(rq - sol.lam) <= 1e-10 * sol.lam

    def test_eigenfunction_positive_first_mode(self):
        sol = first_eigen_fem(radial_problem(4.0), Mesh.uniform(UNIT, 1000))
        assert sign_changes(sol.eigenfunction) == 0
        assert sol.eigenfunction.min() >= -1e-12

    def test_scaling_law(self):
        # weight s**(mu-1) on (0, r): lambda * r^2 is the r-free constant
        vals = []
        for r in (0.5, 1.0, 2.0, 5.0):
            p = radial_problem(2.0, r)
            sol = first_eigen_fem(p, Mesh.uniform(p.interval, 3000))
            vals.append(sol.lam * r * r)
        spread = (max(vals) - min(vals)) / min(vals)
        assert spread < 2e-3

    def test_mesh_convergence_second_order(self):
        exact = lambda_mu(3.0).lam
        errs = []
        for cells in (500, 1000):
            sol = first_eigen_fem(radial_problem(3.0), Mesh.uniform(UNIT, cells))
            errs.append(abs(sol.lam - exact))
        assert errs[0] / errs[1] >= 3.0

    def test_domain_monotonicity(self):
        rng = random.Random(5)
        for _ in range(5):
            a, b, c = rng.uniform(0.5, 1.5), rng.uniform(-0.4, 0.4), rng.uniform(0, 3)
            weight = lambda s, a=a, b=b, c=c: a + b * math.sin(c * s)
            lam_small = first_eigen_fem(
                WeightedProblem(Interval(0.2, 1.2), weight,
                                BoundaryCondition(DIRICHLET, DIRICHLET)),
                Mesh.uniform(Interval(0.2, 1.2), 600)).lam
            lam_big = first_eigen_fem(
                WeightedProblem(Interval(0.0, 1.5), weight,
                                BoundaryCondition(DIRICHLET, DIRICHLET)),
                Mesh.uniform(Interval(0.0, 1.5), 600)).lam
            assert lam_big <= lam_small

    def test_minimality_against_random_test_vectors(self):
        p = radial_problem(3.0)
        mesh = Mesh.uniform(UNIT, 400)
        sol = first_eigen_fem(p, mesh)
        rng = random.Random(11)
        for _ in range(20):
            u = np.array([rng.uniform(-1, 1) for _ in mesh.nodes])
            u[-1] = 0.0  # right Dirichlet end
            assert rayleigh_quotient(u, p, mesh) >= sol.lam * (1.0 - 1e-12)

    def test_tiny_cells_get_merged(self):
        # weight spans ~e^66: the dead tail collapses into a few cells
        p = WeightedProblem(Interval(-33.0, 33.0), lambda t: math.exp(t),
                            BoundaryCondition(DIRICHLET, DIRICHLET))
        sol = first_eigen_fem(p, Mesh.uniform(p.interval, 2000), merge_threshold=1e-14)
        assert sol.mesh.cells < 2000
        assert "merged" in sol.mesh.grading
        assert sol.lam == pytest.approx(0.25 + math.pi**2 / (4 * 33.0**2), rel=1e-2)

    def test_singular_mass_raises(self):
        p = WeightedProblem(UNIT, lambda s: 1.0, BoundaryCondition(DIRICHLET, DIRICHLET),
                            potential_weight=lambda s: 0.0 if 0.4 < s < 0.6 else 1.0)
        with pytest.raises(SingularMass):
            first_eigen_fem(p, Mesh.uniform(UNIT, 100))


class TestFirstEigenShoot:
    def test_string_tight(self):
        p = WeightedProblem(UNIT, lambda s: 1.0, BoundaryCondition(DIRICHLET, DIRICHLET))
        sol = first_eigen_shoot(p)
        assert sol.lam == pytest.approx(math.pi**2, abs=1e-6)

    @pytest.mark.parametrize("mu", [2.0, 3.0, 4.0])
    def test_agrees_with_fem_and_oracle(self, mu):
        p = radial_problem(mu)
        shoot = first_eigen_shoot(p)
        fem = first_eigen_fem(p, Mesh.uniform(UNIT, 4000))
        assert shoot.lam == pytest.approx(fem.lam, rel=1e-3)
        assert shoot.lam == pytest.approx(lambda_mu(mu).lam, rel=1e-3)

    def test_eigenfunction_sampled_without_sign_change(self):
        sol = first_eigen_shoot(radial_problem(3.0))
        assert sign_changes(sol.eigenfunction) == 0


class TestRayleighQuotient:
    def test_hat_function_is_twelve(self):
        mesh = Mesh(np.linspace(0, 1, 21))
        u = np.maximum(0.0, 1.0 - 2.0 * np.abs(mesh.nodes - 0.5))
        p = WeightedProblem(UNIT, lambda s: 1.0, BoundaryCondition(DIRICHLET, DIRICHLET))
        assert rayleigh_quotient(u, p, mesh) == pytest.approx(12.0, rel=1e-12)

    def test_scale_invariance(self):
        mesh = Mesh(np.linspace(0, 1, 41))
        u = np.sin(math.pi * mesh.nodes)
        p = WeightedProblem(UNIT, lambda s: 1.0, BoundaryCondition(DIRICHLET, DIRICHLET))
        assert rayleigh_quotient(3.0 * u, p, mesh) == pytest.approx(
            rayleigh_quotient(u, p, mesh), rel=1e-14)

    def test_rejects_constraint_violation(self):
        mesh = Mesh(np.linspace(0, 1, 41))
        u = np.ones(41)
        p = WeightedProblem(UNIT, lambda s: 1.0, BoundaryCondition(DIRICHLET, DIRICHLET))
        with pytest.raises(ValueError):
            rayleigh_quotient(u, p, mesh)

    def test_zero_function_rejected(self):
        mesh = Mesh(np.linspace(0, 1, 41))
        p = WeightedProblem(UNIT, lambda s: 1.0, BoundaryCondition(DIRICHLET, DIRICHLET))
        with pytest.raises(ZeroDenominator):
            rayleigh_quotient(np.zeros(41), p, mesh)
