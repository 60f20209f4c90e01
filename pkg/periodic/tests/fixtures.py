import pytest

import factories
from periodic.functions import make_reference_psi


@pytest.fixture
def psi_sin():
    return make_reference_psi('sin')


@pytest.fixture
def psi_square():
    return make_reference_psi('square')


@pytest.fixture
def psi_peak():
    return make_reference_psi('peak')


@pytest.fixture
def psi_flat():
    return factories.PeriodicFn(flat=True)


@pytest.fixture(params=['sin', 'square', 'peak'])
def reference_psi(request):
    return make_reference_psi(request.param)
