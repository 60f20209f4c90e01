import math
import pickle

import numpy as np
import pytest

import factories
from periodic import functions
from periodic.exceptions import ControlDomainError, UnknownControlKind
from periodic.functions import (PeriodicFn, arithmetic_mean, geometric_mean, make_drug_profile,
                                make_reference_psi, sampled, second_moment, zero_fraction)
from .fixtures import psi_flat, psi_peak, psi_sin, psi_square, reference_psi  # noqa


def test_sinusoidal_values(psi_sin):
    assert psi_sin(0) == pytest.approx(1.9)
    assert psi_sin(0.5) == pytest.approx(0.1)
    assert make_reference_psi('sinusoidal') == psi_sin


def test_constant_control(psi_flat):
    assert arithmetic_mean(psi_flat) == pytest.approx(1.0)
    assert second_moment(psi_flat) == pytest.approx(1.0)
    assert geometric_mean(psi_flat) == pytest.approx(1.0)


def test_unknown_kind():
    with pytest.raises(UnknownControlKind):
        make_reference_psi('triangle')


@pytest.mark.parametrize('kind, params', [
    ('sin', [1.2]),
    ('square', [1.9, -0.1, 0.5]),
    ('square', [1.9, 0.1, 1.0]),
    ('peak', [3.0, 0.6, 0.1]),
    ('constant', [-1.0]),
    ('cos-power', [5, 1]),
    ('samples', [1.0, -2.0]),
])
def test_params_violating_positivity(kind, params):
    with pytest.raises(ControlDomainError):
        make_reference_psi(kind, params)


def test_wrong_arity():
    with pytest.raises(ControlDomainError):
        PeriodicFn('sin', (0.5, 0.5))


def test_nonpositive_period():
    with pytest.raises(ControlDomainError):
        PeriodicFn('sin', period=0.0)


class TestAverages:

    def test_arithmetic_mean_of_reference_controls(self, reference_psi):
        assert abs(arithmetic_mean(reference_psi) - 1) < 1e-9

    def test_sin_mean(self, psi_sin):
        assert arithmetic_mean(psi_sin) == pytest.approx(1.0, abs=1e-12)

    def test_peak_mean(self, psi_peak):
        assert arithmetic_mean(psi_peak) == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize('kind, expected', [('sin', 1.405), ('peak', 1.99), ('square', 1.81)])
    def test_second_moment(self, kind, expected):
        assert second_moment(make_reference_psi(kind)) == pytest.approx(expected, abs=1e-6)

    def test_second_moment_excess(self, reference_psi, psi_flat):
        assert second_moment(reference_psi) - 1 > 0
        assert second_moment(psi_flat) - 1 == pytest.approx(0.0, abs=1e-12)

    def test_geometric_mean_sin(self, psi_sin):
        expected = (1 + math.sqrt(1 - 0.81)) / 2
        assert geometric_mean(psi_sin) == pytest.approx(expected, abs=1e-9)
        assert geometric_mean(psi_sin) == pytest.approx(0.71795, abs=1e-5)

    def test_geometric_mean_square(self, psi_square):
        assert geometric_mean(psi_square) == pytest.approx(math.sqrt(0.19), abs=1e-10)

    def test_geometric_mean_of_constant(self):
        assert geometric_mean(make_reference_psi('constant', [2.5])) == pytest.approx(2.5)

    def test_geometric_mean_rejects_zero(self):
        with pytest.raises(ControlDomainError):
            geometric_mean(make_reference_psi('square', [2.0, 0.0, 0.5]))

    def test_zero_fraction_of_on_off_control(self, psi_sin):
        assert zero_fraction(make_reference_psi('square', [2.0, 0.0, 0.3])) == pytest.approx(0.7, abs=1e-12)
        assert zero_fraction(psi_sin) == 0.0

    @pytest.mark.parametrize('harmonic', [1, 2])
    def test_drug_profile_mean(self, harmonic):
        assert arithmetic_mean(make_drug_profile(harmonic)) == pytest.approx(5 / 16, abs=1e-12)

    def test_am_gm_on_random_trigonometric_polynomials(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            coefficients = rng.uniform(-1, 1, size=3)
            coefficients *= 0.9 / np.abs(coefficients).sum()
            t = (np.arange(256) + 0.5) / 256
            values = 1 + sum(c * np.cos(2 * np.pi * (n + 1) * t + n) for n, c in enumerate(coefficients))
            f = sampled(values)
            assert geometric_mean(f) <= arithmetic_mean(f) + 1e-15

    def test_quadrature_resolution_is_configurable(self, psi_sin, settings):
        settings.QUADRATURE_NODES = 64
        assert arithmetic_mean(psi_sin) == pytest.approx(1.0, abs=1e-12)
        assert arithmetic_mean(psi_sin, nodes=16) == pytest.approx(1.0, abs=1e-12)


class TestEvaluation:

    @pytest.mark.parametrize('kind', ['sin', 'square', 'peak', 'constant', 'cos-power'])
    def test_periodicity(self, kind):
        f = factories.PeriodicFn(kind=kind, params=())
        t = np.random.default_rng(3).uniform(-5, 5, size=1000)
        assert np.max(np.abs(f(t + f.period) - f(t))) < 1e-12

    def test_nonnegative(self, reference_psi):
        t = np.linspace(-2, 2, 4001)
        assert np.all(reference_psi(t) >= 0)

    def test_peak_shape(self, psi_peak):
        assert psi_peak(0.0) == pytest.approx(0.1)
        assert psi_peak(0.3) == pytest.approx(3.1)
        assert psi_peak(0.15) == pytest.approx(1.6)
        assert psi_peak(0.8) == pytest.approx(0.1)

    def test_square_levels(self, psi_square):
        assert psi_square(0.25) == 1.9
        assert psi_square(0.75) == 0.1

    def test_samples_are_piecewise_constant(self):
        f = sampled([1.0, 2.0, 3.0, 4.0])
        assert f(0.0) == 1.0
        assert f(0.3) == 2.0
        assert f(0.99) == 4.0
        assert f(1.3) == 2.0

    def test_shifted_and_scaled(self, psi_sin):
        g = psi_sin.shifted(0.25).scaled(2.0)
        t = np.linspace(0, 1, 17)
        np.testing.assert_allclose(g(t), 2.0 * psi_sin(t + 0.25))

    def test_longer_period(self):
        f = make_reference_psi('sin', period=24.0)
        assert f(12.0) == pytest.approx(0.1)
        assert arithmetic_mean(f) == pytest.approx(1.0)

    def test_picklable(self, psi_sin):
        assert pickle.loads(pickle.dumps(psi_sin)) == psi_sin

    def test_drug_profile_shapes(self):
        t = np.linspace(0, 1, 33)
        np.testing.assert_allclose(make_drug_profile(1)(t), np.cos(np.pi * t) ** 6, atol=1e-15)
        np.testing.assert_allclose(make_drug_profile(2)(t), np.cos(2 * np.pi * t) ** 6, atol=1e-15)


class TestPrimitive:

    def test_sin_primitive(self, psi_sin):
        t = np.linspace(-1, 2, 61)
        expected = 0.9 / (2 * np.pi) * np.sin(2 * np.pi * t)
        np.testing.assert_allclose(psi_sin.primitive_deviation(t), expected, atol=1e-8)

    def test_primitive_is_periodic_and_vanishes_at_zero(self, reference_psi):
        assert reference_psi.primitive_deviation(0.0) == pytest.approx(0.0, abs=1e-12)
        assert reference_psi.primitive_deviation(1.0) == pytest.approx(0.0, abs=1e-7)

    def test_square_primitive(self, psi_square):
        assert psi_square.primitive_deviation(0.5) == pytest.approx(0.45, abs=1e-7)

    def test_shifted_primitive(self, psi_sin):
        shifted = psi_sin.shifted(0.3)
        t = np.linspace(0, 1, 11)
        expected = psi_sin.primitive_deviation(t + 0.3) - psi_sin.primitive_deviation(0.3)
        np.testing.assert_allclose(shifted.primitive_deviation(t), expected, atol=1e-10)


def test_default_parameters_match_reference_table():
    assert functions.DEFAULT_PARAMS['square'] == (1.9, 0.1, 0.5)
    assert functions.DEFAULT_PARAMS['peak'] == (3.0, 0.3, 0.1)
