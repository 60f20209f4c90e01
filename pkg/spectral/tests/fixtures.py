import pytest

import factories
from monodromy.grid import GridSpec
from monodromy.propagators import PropagatorFamily
from spectral.services import adjoint_eigen, floquet_eigen

REFERENCE_K = (10.0, 10.0, 10.0)
REFERENCE_AGES = (10 / 24, 12 / 24, 2 / 24)


def one_phase_family(psi=None, a=1.0, n_time=400, K0=2.0, **kwargs):
    model = factories.OnePhaseModel(K0=K0, a=a, psi=psi or factories.PeriodicFn(flat=True))
    return PropagatorFamily(GridSpec.for_model(model, n_time=n_time), model, **kwargs)


def three_phase_family(psi=None, n_time=480, **kwargs):
    model = factories.MultiPhaseModel(psi=psi or factories.PeriodicFn(), rates=REFERENCE_K, ages=REFERENCE_AGES)
    return PropagatorFamily(GridSpec.for_model(model, n_time=n_time), model, **kwargs)


@pytest.fixture
def flat_family():
    return one_phase_family(n_time=200)


@pytest.fixture
def flat_solution(flat_family):
    return floquet_eigen(flat_family)


@pytest.fixture(scope='module')
def three_phase_solutions():
    family = three_phase_family()
    direct = floquet_eigen(family)
    return direct, adjoint_eigen(family, direct)


@pytest.fixture
def psi_sin_family():
    return one_phase_family(psi=factories.PeriodicFn(), n_time=100)
