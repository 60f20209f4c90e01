import pytest

import factories
from chrono.services import sweep
from periodic.functions import make_drug_profile

REFERENCE_EPSILONS = (0.0, 0.1, 0.5, 1.0)


@pytest.fixture(scope='module')
def drug():
    return make_drug_profile()


@pytest.fixture(scope='module')
def reference_sweep(drug):
    return sweep(factories.MultiPhaseModel(), drug, phase=2, epsilons=REFERENCE_EPSILONS,
                 thetas=[i / 16 for i in range(16)], n_time=192)


@pytest.fixture(scope='module')
def fine_slopes(drug):
    """ Untreated solution on a finer grid, no treated solves """
    return sweep(factories.MultiPhaseModel(), drug, phase=2, epsilons=(), thetas=[i / 32 for i in range(32)],
                 n_time=480)


@pytest.fixture
def one_phase_model():
    return factories.OnePhaseModel(a=0.5)
