import math

import numpy as np
import pytest
from scipy import optimize

from closedform.exceptions import AgeSumError, ClosedFormError
from closedform.roots import sign_changes
from closedform.threephase import analytic_sensitivity, analytic_weight, solve_analytic_three_phase
from periodic.functions import make_drug_profile, make_reference_psi
from .fixtures import REFERENCE_AGES, REFERENCE_K, three_phase_flat, three_phase_sin  # noqa


def reference_root(K):
    return optimize.brentq(lambda lam: (K + lam) ** 3 - 2 * K ** 3 * math.exp(-lam), 0.0, 5.0, xtol=1e-14)


class TestRoot:

    def test_reference_configuration(self, three_phase_sin):
        assert three_phase_sin.lam == pytest.approx(0.536, abs=1e-3)
        assert three_phase_sin.lam == pytest.approx(reference_root(10.0), abs=1e-10)
        assert three_phase_sin.residual < 1e-12

    def test_independent_of_control(self, three_phase_sin, three_phase_flat):
        assert three_phase_sin.lam == three_phase_flat.lam

    def test_faster_division_grows_faster(self, three_phase_sin):
        slower = solve_analytic_three_phase((5, 5, 5), REFERENCE_AGES, make_reference_psi('sin'))
        assert three_phase_sin.lam > slower.lam
        assert slower.lam == pytest.approx(reference_root(5.0), abs=1e-10)

    def test_single_sign_change(self):
        def fn(lam):
            return (10 + lam) ** 3 - 2000 * math.exp(-lam)

        assert sign_changes(fn, 0.0, 5.0) == 1

    def test_positive_factors(self, three_phase_sin):
        assert min(three_phase_sin.U) > 0
        assert min(three_phase_sin.V) > 0

    def test_age_sum_violation(self):
        with pytest.raises(AgeSumError):
            solve_analytic_three_phase(REFERENCE_K, (0.5, 0.5, 0.5), make_reference_psi('sin'))

    def test_phase_count(self):
        with pytest.raises(ClosedFormError):
            solve_analytic_three_phase((10, 10), (0.5, 0.5), make_reference_psi('sin'))


class TestWeights:

    def test_constant_for_flat_control(self, three_phase_flat):
        t = np.linspace(0, 1, 25)
        for phase in (1, 2, 3):
            expected = three_phase_flat.C * REFERENCE_AGES[phase - 1] + three_phase_flat.phase_constants[phase - 1]
            np.testing.assert_allclose(analytic_weight(three_phase_flat, phase, t, normalized=False), expected,
                                       rtol=1e-12)

    def test_reference_constants(self, three_phase_sin):
        assert three_phase_sin.C == pytest.approx(13.17, abs=1e-2)
        assert three_phase_sin.phase_constants[1] == pytest.approx(1.25, abs=1e-2)

    def test_sinusoidal_second_phase(self, three_phase_sin):
        C = three_phase_sin.C
        C_mean = C * 0.5 + three_phase_sin.phase_constants[1]
        C_amplitude = 2 * C * 0.9 / (2 * math.pi)
        t = np.linspace(0, 1, 101)
        np.testing.assert_allclose(analytic_weight(three_phase_sin, 2, t, normalized=False),
                                   C_mean + C_amplitude * np.sin(2 * np.pi * t), atol=1e-6)

    def test_phase_sum_is_constant(self, three_phase_sin):
        t = np.linspace(0, 1, 37)
        total = sum(analytic_weight(three_phase_sin, phase, t, normalized=False) for phase in (1, 2, 3))
        np.testing.assert_allclose(total, three_phase_sin.weight_total, rtol=1e-8)

    def test_normalization(self, three_phase_sin):
        t = (np.arange(1000) + 0.5) / 1000
        integral = sum(analytic_weight(three_phase_sin, phase, t).mean() for phase in (1, 2, 3))
        assert integral == pytest.approx(1.0, abs=1e-9)
        raw = sum(analytic_weight(three_phase_sin, phase, t, normalized=False).mean() for phase in (1, 2, 3))
        assert raw > 0

    def test_translation_invariance(self, three_phase_sin):
        shifted = solve_analytic_three_phase(REFERENCE_K, REFERENCE_AGES, make_reference_psi('sin').shifted(0.3))
        t = (np.arange(500) + 0.5) / 500
        totals = [sum(analytic_weight(sol, phase, t, normalized=False).mean() for phase in (1, 2, 3))
                  for sol in (three_phase_sin, shifted)]
        assert totals[0] == pytest.approx(totals[1], rel=1e-8)

    def test_positive(self, three_phase_sin):
        t = np.linspace(0, 1, 101)
        for phase in (1, 2, 3):
            assert np.all(analytic_weight(three_phase_sin, phase, t) > 0)

    def test_phase_out_of_range(self, three_phase_sin):
        with pytest.raises(ClosedFormError):
            analytic_weight(three_phase_sin, 4, 0.0)


class TestSensitivity:

    def test_constant_drug(self, three_phase_sin):
        drug = make_reference_psi('constant', [0.7])
        t = (np.arange(2000) + 0.5) / 2000
        expected = -0.7 * analytic_weight(three_phase_sin, 2, t).mean()
        for theta in (0.0, 0.3, 0.8):
            assert analytic_sensitivity(three_phase_sin, drug, theta) == pytest.approx(expected, abs=1e-10)

    def test_optimal_offset(self, three_phase_sin):
        drug = make_drug_profile()
        thetas = np.arange(256) / 256
        values = np.array([analytic_sensitivity(three_phase_sin, drug, theta) for theta in thetas])
        assert thetas[np.argmax(values)] == pytest.approx(0.25, abs=1 / 256)

    def test_sine_coefficient(self, three_phase_sin):
        drug = make_drug_profile()
        amplitude = 2 * three_phase_sin.C * 0.9 / (2 * math.pi)
        expected = 2 * (15 / 64) * amplitude / three_phase_sin.weight_total
        morning, evening = (analytic_sensitivity(three_phase_sin, drug, theta) for theta in (0.25, 0.75))
        difference = morning - evening
        assert difference == pytest.approx(expected, rel=1e-6)

    def test_periodic_and_continuous(self, three_phase_sin):
        drug = make_drug_profile()
        thetas = np.arange(257) / 256
        values = np.array([analytic_sensitivity(three_phase_sin, drug, theta) for theta in thetas])
        assert values[-1] == pytest.approx(values[0], abs=1e-10)
        amplitude = (values.max() - values.min()) / 2
        assert np.max(np.abs(np.diff(values))) <= 1.01 * amplitude * 2 * np.pi / 256

    def test_second_harmonic_drug_is_flat(self, three_phase_sin):
        drug = make_drug_profile(harmonic=2)
        values = [analytic_sensitivity(three_phase_sin, drug, theta) for theta in np.linspace(0, 1, 9)]
        assert max(values) - min(values) < 1e-8
