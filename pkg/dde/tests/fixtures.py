import pytest

import factories
from dde.services import integrate_dde


@pytest.fixture
def flat_trajectory():
    return integrate_dde(2.0, 1.0, factories.PeriodicFn(flat=True), t_end=60.0, h=1 / 200)


@pytest.fixture
def sin_trajectory():
    return integrate_dde(2.0, 1.0, factories.PeriodicFn(), t_end=60.0, h=1 / 200)
