import numpy as np
import pytest

import factories
from monodromy.grid import GridSpec
from monodromy.propagators import PropagatorFamily


@pytest.fixture
def rng():
    return np.random.default_rng(20181)


@pytest.fixture
def one_phase_family():
    model = factories.OnePhaseModel(a=0.5)
    return PropagatorFamily(GridSpec(period=1.0, n_time=4, n_age=8), model)


@pytest.fixture
def three_phase_family():
    model = factories.MultiPhaseModel(psi=factories.PeriodicFn(square=True))
    return PropagatorFamily(GridSpec(period=1.0, n_time=8, n_age=16), model)


def _treated_family(loss_scheme):
    gamma = factories.PeriodicFn(drug=True)
    model = factories.MultiPhaseModel().with_therapy(phase=2, epsilon=0.7, theta=0.3, gamma=gamma)
    model = model.with_extra_death(factories.PeriodicFn(flat=True).scaled(0.2), phase=3)
    return PropagatorFamily(GridSpec(period=1.0, n_time=8, n_age=16), model, loss_scheme=loss_scheme)


@pytest.fixture
def treated_exponential_family():
    return _treated_family('exponential')


@pytest.fixture
def treated_implicit_family():
    return _treated_family('implicit')
