import math

import numpy as np
import pytest
from scipy import optimize

import factories
from closedform.perron import solve_geometric_one_phase, solve_perron_one_phase
from closedform.threephase import analytic_weight, solve_analytic_three_phase
from periodic.functions import make_reference_psi
from spectral.exceptions import AdjointMismatchError, ConvergenceError, GaugeShiftError, NonPrimitiveError
from spectral.services import adjoint_eigen, average_identity, floquet_eigen, gauge_shift, power_iteration
from .fixtures import (REFERENCE_AGES, REFERENCE_K, flat_family, flat_solution, one_phase_family,  # noqa
                       psi_sin_family, three_phase_family, three_phase_solutions)


def discrete_flat_rate(K0, a, n_time, T=1.0):
    """ Growth rate of the constant-coefficient scheme from its characteristic equation """
    dt = T / n_time
    m = round(a / dt)
    q = 1 + dt * K0

    def fn(mu):
        return mu ** m * (mu * q - 1) - 2 * dt * K0

    mu = optimize.brentq(fn, 1 / q, 2.0, xtol=1e-15)
    return math.log(mu) / dt


class TestPowerIteration:

    def test_detects_oscillation(self):
        with pytest.raises(NonPrimitiveError):
            power_iteration(lambda v: np.array([2 * v[1], v[0]]), np.array([0.5, 0.5]), tol=1e-12, max_iter=100)

    def test_reports_residual_when_out_of_iterations(self):
        with pytest.raises(ConvergenceError) as exc:
            power_iteration(lambda v: np.array([v[0], 0.999999 * v[1]]), np.array([0.5, 0.5]), max_iter=5)
        assert exc.value.iterations == 5
        assert exc.value.residual > 0

    def test_annihilated_iterate(self):
        with pytest.raises(NonPrimitiveError):
            power_iteration(np.zeros_like, np.ones(3))

    def test_dominant_eigenvalue(self):
        matrix = np.array([[2.0, 1.0], [1.0, 2.0]])
        result = power_iteration(lambda v: matrix @ v, np.array([1.0, 0.0]))
        assert result.rho == pytest.approx(3.0, rel=1e-12)
        np.testing.assert_allclose(result.vector, [0.5, 0.5], atol=1e-12)


class TestFloquet:

    def test_matches_discrete_characteristic_equation(self, flat_solution):
        assert flat_solution.lam == pytest.approx(discrete_flat_rate(2.0, 1.0, 200), abs=1e-10)

    def test_flat_control_approaches_perron(self):
        solution = floquet_eigen(one_phase_family(n_time=400))
        assert abs(solution.lam - solve_perron_one_phase(2.0, 1.0).lam) < 2e-3

    def test_first_order_grid_convergence(self):
        exact = solve_perron_one_phase(2.0, 1.0).lam
        errors = [abs(floquet_eigen(one_phase_family(n_time=n)).lam - exact) for n in (100, 200, 400)]
        assert errors[0] / errors[1] > 1.7
        assert errors[1] / errors[2] > 1.7

    def test_eigenfunction_is_periodic_and_normalized(self, flat_solution):
        assert flat_solution.N0.sum() == pytest.approx(1.0, abs=1e-14)
        assert flat_solution.periodicity_residual < 1e-9
        profiles = flat_solution.eigenfunction()
        assert profiles.shape == (201, 1, flat_solution.family.grid.n_age + 1)
        assert (profiles >= 0).all()
        np.testing.assert_allclose(profiles[-1], profiles[0], atol=1e-10)

    def test_positive_control_gives_positive_eigenfunction(self, psi_sin_family):
        solution = floquet_eigen(psi_sin_family)
        assert (solution.eigenfunction() > 0).all()

    def test_mass_normalization(self, flat_solution):
        scaled = flat_solution.normalize_mass()
        assert scaled.lam == flat_solution.lam
        assert scaled.masses()[:-1].sum() * scaled.family.dt == pytest.approx(1.0, rel=1e-12)

    def test_warm_start(self, flat_family, flat_solution):
        again = floquet_eigen(flat_family, start=flat_solution.N0)
        assert again.iterations < flat_solution.iterations
        assert again.lam == pytest.approx(flat_solution.lam, abs=1e-12)

    @pytest.mark.parametrize('kind', ['sin', 'square', 'peak'])
    def test_equality_at_the_period(self, kind):
        solution = floquet_eigen(one_phase_family(psi=make_reference_psi(kind), a=1.0, n_time=800))
        assert abs(solution.lam - solve_perron_one_phase(2.0, 1.0).lam) < 2.5e-3

    @pytest.mark.parametrize('kind', ['sin', 'square', 'peak'])
    @pytest.mark.parametrize('a, sign', [(0.9, 1), (0.95, 1), (1.05, -1), (1.1, -1)])
    def test_local_sign_pattern(self, kind, a, sign):
        solution = floquet_eigen(one_phase_family(psi=make_reference_psi(kind), a=a, n_time=400))
        assert sign * (solution.lam - solve_perron_one_phase(2.0, a).lam) > 1e-4

    @pytest.mark.parametrize('kind', ['sin', 'square', 'peak'])
    @pytest.mark.parametrize('a', [0.5, 1.0, 1.5])
    def test_geometric_lower_bound(self, kind, a):
        psi = make_reference_psi(kind)
        solution = floquet_eigen(one_phase_family(psi=psi, a=a, n_time=200))
        assert solution.lam >= solve_geometric_one_phase(2.0, a, psi).lam - 2e-3

    def test_three_phase_matches_closed_form(self):
        # every maturation age on a node
        direct = floquet_eigen(three_phase_family(psi=make_reference_psi('sin'), n_time=3072))
        analytic = solve_analytic_three_phase(REFERENCE_K, REFERENCE_AGES, make_reference_psi('sin'))
        assert abs(direct.lam - analytic.lam) <= 1e-3


class TestAdjoint:

    def test_eigenvalues_agree(self, flat_family, flat_solution):
        adjoint = adjoint_eigen(flat_family, flat_solution)
        assert adjoint.rho == pytest.approx(flat_solution.rho, rel=1e-10)

    def test_joint_normalization(self, psi_sin_family):
        direct = floquet_eigen(psi_sin_family)
        adjoint = adjoint_eigen(psi_sin_family, direct)
        assert adjoint.duality == pytest.approx(1.0, rel=1e-10)
        assert (adjoint.weights >= 0).all()
        np.testing.assert_allclose(adjoint.weights[-1], adjoint.weights[0], rtol=1e-8)

    def test_profiles_pair_with_weights(self, psi_sin_family):
        direct = floquet_eigen(psi_sin_family)
        adjoint = adjoint_eigen(psi_sin_family, direct)
        phi, N = adjoint.eigenfunction(), direct.eigenfunction()
        products = (phi * N).sum(axis=-1) * psi_sin_family.grid.dx
        np.testing.assert_allclose(products, adjoint.weights, rtol=1e-10)

    def test_autonomous_weights_are_constant(self, flat_family, flat_solution):
        adjoint = adjoint_eigen(flat_family, flat_solution)
        np.testing.assert_allclose(adjoint.weight(1), adjoint.weight(1)[0], rtol=1e-8)
        assert adjoint.weight(1)[0] == pytest.approx(1.0, rel=1e-10)

    def test_mismatched_direct_solution(self, flat_solution, psi_sin_family):
        with pytest.raises(AdjointMismatchError):
            adjoint_eigen(psi_sin_family, flat_solution)

    def test_weights_sum_is_constant_in_time(self, three_phase_solutions):
        _, adjoint = three_phase_solutions
        totals = adjoint.weights.sum(axis=1)
        np.testing.assert_allclose(totals, totals[0], rtol=1e-9)

    def test_second_phase_weight_matches_closed_form(self, three_phase_solutions):
        direct, adjoint = three_phase_solutions
        analytic = solve_analytic_three_phase(REFERENCE_K, REFERENCE_AGES, make_reference_psi('sin'))
        times = direct.family.times
        expected = analytic_weight(analytic, 2, times)
        measured = adjoint.weight(2)
        assert np.linalg.norm(measured - expected) / np.linalg.norm(expected) < 0.05
        # w_2 = C' + C_2' sin(2 pi t) peaks a quarter period in
        assert times[np.argmax(measured)] == pytest.approx(0.25, abs=0.05)


class TestGauge:

    def test_constant_death_shifts_rate(self, psi_sin_family):
        base, shifted = gauge_shift(psi_sin_family, factories.PeriodicFn(flat=True).scaled(0.3))
        assert shifted.lam == pytest.approx(base.lam - 0.3, abs=1e-10)

    @pytest.mark.parametrize('theta', [0.0, 0.25, 0.6])
    def test_only_the_dose_matters(self, psi_sin_family, theta):
        gamma = factories.PeriodicFn(kind='cos-power', params=(6, 2)).shifted(theta)
        base, shifted = gauge_shift(psi_sin_family, gamma)
        assert shifted.lam == pytest.approx(base.lam - 5 / 16, abs=1e-9)

    def test_vanishing_death_keeps_rate(self, psi_sin_family):
        base, shifted = gauge_shift(psi_sin_family, factories.PeriodicFn(kind='constant', params=(0.0,)))
        assert shifted.lam == pytest.approx(base.lam, abs=1e-12)

    def test_piecewise_death_shifts_by_its_mean(self, psi_sin_family):
        night = factories.PeriodicFn(kind='samples', params=(0.2, 0.0))
        base, shifted = gauge_shift(psi_sin_family, night)
        assert shifted.lam == pytest.approx(base.lam - 0.1, abs=1e-9)

    def test_eigenfunctions_differ_by_the_gauge(self, psi_sin_family):
        gamma = factories.PeriodicFn(kind='cos-power', params=(6, 1))
        base, shifted = gauge_shift(psi_sin_family, gamma)
        integrals = np.concatenate([[0.0], np.cumsum(psi_sin_family.step_integrals(gamma))])
        gauge = np.exp(-integrals + (base.lam - shifted.lam) * psi_sin_family.times)
        expected = base.eigenfunction() * gauge[:, None, None]
        measured = shifted.eigenfunction()
        np.testing.assert_allclose(measured / measured[0].sum(), expected / expected[0].sum(), rtol=1e-6, atol=1e-10)

    def test_rejects_multiphase(self):
        with pytest.raises(GaugeShiftError):
            gauge_shift(three_phase_family(n_time=24), factories.PeriodicFn(flat=True))


class TestAverageIdentity:

    def test_holds_at_the_period(self):
        solution = floquet_eigen(one_phase_family(psi=make_reference_psi('sin'), n_time=400))
        lhs, rhs = average_identity(solution)
        assert rhs == pytest.approx(1.0, abs=1e-12)
        assert lhs == pytest.approx(rhs, abs=5e-3)

    def test_holds_off_the_period(self):
        solution = floquet_eigen(one_phase_family(psi=make_reference_psi('square'), a=0.8, n_time=400))
        lhs, rhs = average_identity(solution)
        assert lhs == pytest.approx(rhs, rel=2e-2)
