import pytest

from closedform.threephase import solve_analytic_three_phase
from periodic.functions import make_reference_psi

REFERENCE_K = (10.0, 10.0, 10.0)
REFERENCE_AGES = (10 / 24, 12 / 24, 2 / 24)


@pytest.fixture
def three_phase_sin():
    return solve_analytic_three_phase(REFERENCE_K, REFERENCE_AGES, make_reference_psi('sin'))


@pytest.fixture
def three_phase_flat():
    return solve_analytic_three_phase(REFERENCE_K, REFERENCE_AGES, make_reference_psi('constant'))
