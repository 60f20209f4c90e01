import pytest

from chrono import services as chrono_services
from experiments import validation
from experiments.config import CHECKS
from experiments.validation import REGISTRY, run_validate
from spectral.exceptions import SpectralError
from .fixtures import make_config  # noqa

CHEAP_CHECKS = ['perron-positivity', 'gauge-shift', 'discrete-structure']


def entries(result):
    return {entry.name: entry for entry in result.documents['validate']['checks']}


def test_every_check_is_registered():
    assert sorted(REGISTRY) == sorted(CHECKS)


def test_cheap_checks_pass():
    result = run_validate(make_config('validate', checks=CHEAP_CHECKS, grid={'n_time': 48}))
    assert result.converged
    assert result.documents['validate']['passed']
    assert list(result.frame['name']) == CHEAP_CHECKS
    assert result.frame['passed'].all()
    for entry in entries(result).values():
        assert entry.measured is not None
        assert 'wall_time' in entry.detail


def test_random_checks_follow_the_seed():
    first = run_validate(make_config('validate', checks=['perron-positivity'], seed=3))
    second = run_validate(make_config('validate', checks=['perron-positivity'], seed=3))
    other = run_validate(make_config('validate', checks=['perron-positivity'], seed=4))
    assert first.frame['measured'][0] == second.frame['measured'][0]
    assert first.frame['measured'][0] != other.frame['measured'][0]


def test_convergence_table():
    result = run_validate(make_config('validate', checks=['period-equality'], grid={'n_time': 64}))
    table = result.tables['convergence']
    assert list(table.columns) == ['control', 'n_time', 'lambda_floquet', 'lambda_perron', 'error', 'ratio']
    assert sorted(set(table['n_time'])) == [16, 32, 64]
    assert len(table) == 9
    assert (table['error'] == (table['lambda_floquet'] - table['lambda_perron']).abs()).all()
    assert table['ratio'].isna().sum() == 3


def test_raising_check_is_a_failed_entry(monkeypatch):
    def broken(ctx):
        raise SpectralError('no dominant eigenvalue')

    monkeypatch.setitem(validation.REGISTRY, 'perron-positivity', broken)
    result = run_validate(make_config('validate', checks=['perron-positivity']))
    entry = entries(result)['perron-positivity']
    assert not entry.passed
    assert entry.detail['error'] == 'no dominant eigenvalue'
    assert result.failures == ('perron-positivity',)


def test_first_order_check_passes():
    result = run_validate(make_config('validate', checks=['chrono-first-order'], grid={'n_time': 96}))
    assert result.converged, result.documents


def test_wrong_sensitivity_sign_is_flagged(monkeypatch):
    correct = chrono_services.first_order_slope

    def flipped(*args, **kwargs):
        return -correct(*args, **kwargs)

    monkeypatch.setattr(chrono_services, 'first_order_slope', flipped)
    result = run_validate(make_config('validate', checks=['chrono-first-order'], grid={'n_time': 96}))
    entry = entries(result)['chrono-first-order']
    assert not entry.passed
    assert entry.measured > 1
    assert result.failures == ('chrono-first-order',)


def test_three_phase_entry_rounds_up_to_the_age_lattice():
    result = run_validate(make_config('validate', checks=['three-phase-analytic'], grid={'n_time': 50}))
    entry = entries(result)['three-phase-analytic']
    assert entry.detail['lambda_analytic'] == pytest.approx(0.536, abs=1e-3)
    assert entry.measured == abs(entry.detail['lambda'] - entry.detail['lambda_analytic'])
    assert entry.detail['n_time'] == 72


def test_three_phase_entry_passes_at_the_default_resolution():
    result = run_validate(make_config('validate', checks=['three-phase-analytic']))
    entry = entries(result)['three-phase-analytic']
    assert entry.detail['n_time'] == 3072
    assert entry.measured <= 1e-3
    assert entry.passed
    assert result.failures == ()
