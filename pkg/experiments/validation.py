"""
Cross-checks of the solvers against each other and against the closed
forms on the reference configurations. Every check yields one report entry;
a check that raises is reported as failed rather than aborting the report.
"""
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict

import numpy as np
import pandas as pd
from django.conf import settings

from chrono import services as chrono_services
from closedform.perron import (floquet_slope_gap_at_T, solve_geometric_one_phase, solve_perron_one_phase)
from closedform.threephase import analytic_weight, solve_analytic_three_phase
from core.exceptions import GrowthRateError
from dde.services import estimate_growth, integrate_dde
from monodromy.grid import GridSpec
from monodromy.models import MultiPhaseModel, OnePhaseModel
from monodromy.propagators import PropagatorFamily, dense_monodromy, dense_step_matrix, monodromy_apply
from periodic.functions import REFERENCE_CONTROLS, PeriodicFn, make_drug_profile, make_reference_psi
from spectral.services import adjoint_eigen, floquet_eigen, gauge_shift
from .config import CHECKS, VALIDATE, ExperimentConfig
from .runners import ExperimentResult

logger = logging.getLogger(__name__)

K0 = 2.0
THREE_PHASE_K = (10.0, 10.0, 10.0)
THREE_PHASE_AGES = (10 / 24, 12 / 24, 2 / 24)
# the three ages sit on the lattice when N_T is a multiple of this
THREE_PHASE_LATTICE = 24

# N_T used by each check unless the configuration sets grid.n_time
RESOLUTION = {
    'period-equality': 2048,
    'period-local-sign': 1024,
    'slope-gap': 1024,
    'geometric-bound': 1024,
    'gauge-shift': 256,
    'three-phase-analytic': 3072,
    'chrono-optimum': 256,
    'chrono-first-order': 256,
    'oracle-triangle': 2048,
}

POWER_ITERATION_CAP = 100000
DERIVATIVE_THETAS = (0.0, 0.25, 0.5)
# step integrals of the death rate are quadratures, so the gauge bound has a floor
GAUGE_FLOOR = 1e-9


@dataclass
class CheckEntry:
    name: str
    passed: bool
    measured: float
    threshold: float
    detail: dict = field(default_factory=dict)


@dataclass
class CheckContext:
    config: ExperimentConfig
    rng: np.random.Generator
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)

    @property
    def tol(self) -> float:
        return self.config.solver.tol or settings.FLOQUET_TOL

    def n_time(self, name: str) -> int:
        return self.config.grid.n_time or RESOLUTION[name]

    def family(self, model, n_time: int) -> PropagatorFamily:
        grid = GridSpec.for_model(model, n_time=n_time, tail_factor=self.config.grid.tail_factor)
        return PropagatorFamily(grid, model, loss_scheme=self.config.solver.loss_scheme)

    def floquet(self, model, n_time: int):
        return floquet_eigen(self.family(model, n_time), self.config.solver.tol, POWER_ITERATION_CAP)


def _one_phase(kind: str, a: float = 1.0) -> OnePhaseModel:
    return OnePhaseModel(K0=K0, a=a, psi=make_reference_psi(kind))


def _three_phase() -> MultiPhaseModel:
    return MultiPhaseModel.commuting(THREE_PHASE_K, THREE_PHASE_AGES, make_reference_psi('sin'))


def _lattice_step(n_time: int, target: float = 0.02) -> float:
    return max(1, round(target * n_time)) / n_time


def check_equality(ctx: CheckContext) -> CheckEntry:
    n_time = ctx.n_time('period-equality')
    exact = solve_perron_one_phase(K0, 1.0).lam
    rows = []
    for kind in REFERENCE_CONTROLS:
        previous = None
        for n in (n_time // 4, n_time // 2, n_time):
            lam = ctx.floquet(_one_phase(kind), n).lam
            error = abs(lam - exact)
            rows.append({'control': kind, 'n_time': n, 'lambda_floquet': lam, 'lambda_perron': exact,
                         'error': error, 'ratio': previous / error if previous else math.nan})
            previous = error
    table = pd.DataFrame(rows)
    ctx.tables['convergence'] = table
    finest = table[table['n_time'] == n_time]
    worst = float(finest['error'].max())
    ratio = float(finest['ratio'].min())
    return CheckEntry(name='period-equality', passed=worst <= 1e-3 and ratio >= 1.8, measured=worst,
                      threshold=1e-3, detail={'n_time': n_time, 'min_ratio': ratio, 'min_ratio_threshold': 1.8})


def check_local_sign(ctx: CheckContext) -> CheckEntry:
    n_time = ctx.n_time('period-local-sign')
    signs = {0.90: 1, 0.95: 1, 1.05: -1, 1.10: -1}
    margins = {}
    for kind in REFERENCE_CONTROLS:
        for a, sign in signs.items():
            difference = ctx.floquet(_one_phase(kind, a), n_time).lam - solve_perron_one_phase(K0, a).lam
            margins[f'{kind}@{a}'] = sign * difference
    worst = min(margins.values())
    return CheckEntry(name='period-local-sign', passed=worst > 1e-4, measured=worst, threshold=1e-4,
                      detail={'n_time': n_time, 'margins': margins})


def check_slope_gap(ctx: CheckContext) -> CheckEntry:
    n_time = ctx.n_time('slope-gap')
    h = _lattice_step(n_time)
    perron_slope = (solve_perron_one_phase(K0, 1 + h).lam - solve_perron_one_phase(K0, 1 - h).lam) / (2 * h)
    slopes = {}
    for kind in REFERENCE_CONTROLS:
        upper = ctx.floquet(_one_phase(kind, 1 + h), n_time).lam
        lower = ctx.floquet(_one_phase(kind, 1 - h), n_time).lam
        slopes[kind] = (upper - lower) / (2 * h)
    expected = floquet_slope_gap_at_T(K0, 1.0, make_reference_psi('sin'))
    error = abs(perron_slope - slopes['sin'] - expected) / abs(expected)
    ordered = slopes['peak'] < slopes['square'] < slopes['sin'] < 0
    return CheckEntry(name='slope-gap', passed=error < 0.05 and ordered, measured=error, threshold=0.05,
                      detail={'n_time': n_time, 'h': h, 'floquet_slopes': slopes, 'perron_slope': perron_slope,
                              'expected_gap': expected, 'ordered': ordered})


def check_geometric_bound(ctx: CheckContext) -> CheckEntry:
    n_time = ctx.n_time('geometric-bound')
    margins = {}
    for kind in REFERENCE_CONTROLS:
        psi = make_reference_psi(kind)
        for a in (0.5, 1.0, 1.5):
            geometric = solve_geometric_one_phase(K0, a, psi).lam
            margins[f'{kind}@{a}'] = ctx.floquet(_one_phase(kind, a), n_time).lam - geometric
    worst = min(margins.values())
    return CheckEntry(name='geometric-bound', passed=worst >= -2e-3, measured=worst, threshold=-2e-3,
                      detail={'n_time': n_time, 'margins': margins})


def check_perron_positivity(ctx: CheckContext) -> CheckEntry:
    # (0, 10] rather than [0, 10)
    samples = 10.0 * (1.0 - ctx.rng.random((100, 2)))
    lowest, residual = math.inf, 0.0
    for K, a in samples:
        result = solve_perron_one_phase(float(K), float(a))
        lowest = min(lowest, result.lam)
        residual = max(residual, result.residual)
    return CheckEntry(name='perron-positivity', passed=lowest > 0 and residual < 1e-10, measured=lowest,
                      threshold=0.0, detail={'max_residual': residual, 'residual_threshold': 1e-10,
                                             'samples': len(samples)})


def check_gauge_shift(ctx: CheckContext) -> CheckEntry:
    n_time = ctx.n_time('gauge-shift')
    family = ctx.family(_one_phase('sin', 0.5), n_time)
    deaths = {'constant 0.3': PeriodicFn(kind='constant', params=(0.3,))}
    for theta in (0.0, 0.25, 0.6):
        deaths[f'cos6 theta={theta}'] = make_drug_profile(harmonic=2).shifted(theta)
    errors, shifted_rates = {}, []
    for label, gamma in deaths.items():
        base, shifted = gauge_shift(family, gamma, ctx.config.solver.tol, POWER_ITERATION_CAP)
        mean = float(family.step_integrals(gamma).sum()) / family.grid.period
        errors[label] = abs(shifted.lam - (base.lam - mean))
        if label.startswith('cos6'):
            shifted_rates.append(shifted.lam)
    worst = max(errors.values())
    threshold = max(2 * ctx.tol, GAUGE_FLOOR)
    spread = float(np.ptp(shifted_rates))
    return CheckEntry(name='gauge-shift', passed=worst <= threshold and spread < 1e-6, measured=worst,
                      threshold=threshold, detail={'n_time': n_time, 'errors': errors, 'theta_spread': spread,
                                                   'theta_spread_threshold': 1e-6})


def check_three_phase(ctx: CheckContext) -> CheckEntry:
    n_time = THREE_PHASE_LATTICE * math.ceil(ctx.n_time('three-phase-analytic') / THREE_PHASE_LATTICE)
    analytic = solve_analytic_three_phase(THREE_PHASE_K, THREE_PHASE_AGES, make_reference_psi('sin'))
    family = ctx.family(_three_phase(), n_time)
    direct = floquet_eigen(family, ctx.config.solver.tol, POWER_ITERATION_CAP)
    adjoint = adjoint_eigen(family, direct, ctx.config.solver.tol, POWER_ITERATION_CAP)
    expected = analytic_weight(analytic, 2, family.times)
    weight_error = float(np.linalg.norm(adjoint.weight(2) - expected) / np.linalg.norm(expected))
    error = abs(direct.lam - analytic.lam)
    return CheckEntry(name='three-phase-analytic', passed=error <= 1e-3 and weight_error < 0.02, measured=error,
                      threshold=1e-3, detail={'n_time': n_time, 'lambda': direct.lam, 'lambda_analytic': analytic.lam,
                                              'weight_error': weight_error, 'weight_error_threshold': 0.02})


def check_chrono_optimum(ctx: CheckContext) -> CheckEntry:
    n_time = ctx.n_time('chrono-optimum')
    model = _three_phase()
    thetas = chrono_services.default_thetas(model.period, ctx.config.sweep.theta_points)
    cell = model.period / len(thetas)
    result = chrono_services.sweep(model, make_drug_profile(), 2, epsilons=(0.1, 0.5, 1.0), thetas=thetas,
                                   n_time=n_time, tol=ctx.config.solver.tol, jobs=ctx.config.solver.jobs,
                                   loss_scheme=ctx.config.solver.loss_scheme)
    offsets = {}
    for epsilon in result.epsilons:
        optimum = chrono_services.locate_optimum(result, epsilon)
        offsets[repr(epsilon)] = math.nan if optimum.degenerate else optimum.theta
    worst = max(abs(theta - 0.25) if math.isfinite(theta) else math.inf for theta in offsets.values())
    error = np.abs(result.lam - result.first_order)
    ordered = bool((error[result.row(0.1)] < error[result.row(1.0)]).all())
    return CheckEntry(name='chrono-optimum', passed=worst <= cell and ordered and not result.failures,
                      measured=worst, threshold=cell,
                      detail={'n_time': n_time, 'theta_opt': offsets, 'first_order_error_ordered': ordered,
                              'failures': len(result.failures)})


def check_chrono_first_order(ctx: CheckContext) -> CheckEntry:
    n_time = ctx.n_time('chrono-first-order')
    check = chrono_services.derivative_check(_three_phase(), make_drug_profile(), 2, thetas=DERIVATIVE_THETAS,
                                             n_time=n_time, tol=ctx.config.solver.tol)
    error = check.max_relative_error
    return CheckEntry(name='chrono-first-order', passed=error < 2e-2, measured=error, threshold=2e-2,
                      detail={'n_time': n_time, 'thetas': list(DERIVATIVE_THETAS),
                              'finite_difference': check.finite_difference, 'first_order': check.first_order})


def check_oracle_triangle(ctx: CheckContext) -> CheckEntry:
    n_time = ctx.n_time('oracle-triangle')
    spectral = ctx.floquet(_one_phase('sin'), n_time).lam
    estimate = estimate_growth(integrate_dde(K0, 1.0, make_reference_psi('sin')))
    perron = solve_perron_one_phase(K0, 1.0).lam
    rates = {'spectral': spectral, 'dde': estimate.rate, 'perron': perron}
    worst = max(abs(x - y) for x in rates.values() for y in rates.values())
    return CheckEntry(name='oracle-triangle', passed=worst <= 2e-3, measured=worst, threshold=2e-3,
                      detail={'n_time': n_time, 'rates': rates, 'dde_spread': estimate.spread})


def check_discrete_structure(ctx: CheckContext) -> CheckEntry:
    grid = GridSpec(period=1.0, n_time=8, n_age=16)
    treated = _three_phase().with_therapy(2, 0.7, 0.3, make_drug_profile())
    families = [PropagatorFamily(grid, _one_phase('sin', 0.5), loss_scheme=ctx.config.solver.loss_scheme),
                PropagatorFamily(grid, treated, loss_scheme=ctx.config.solver.loss_scheme)]
    dense_error, duality_error = 0.0, 0.0
    for family in families:
        v = ctx.rng.random(family.shape)
        for k in range(family.n_time):
            w = ctx.rng.random(family.shape)
            stepped = family.step(k, v)
            scale = np.abs(stepped).max()
            dense_error = max(dense_error, np.abs(dense_step_matrix(family, k) @ v.ravel() - stepped.ravel()).max()
                              / scale)
            lhs = np.vdot(w, stepped)
            duality_error = max(duality_error, abs(lhs - np.vdot(family.step_adjoint(k, w), v)) / abs(lhs))
        applied = monodromy_apply(family, v)
        dense_error = max(dense_error, np.abs(dense_monodromy(family) @ v.ravel() - applied.ravel()).max()
                          / np.abs(applied).max())

    iterations = {}
    for kind in REFERENCE_CONTROLS:
        iterations[kind] = ctx.floquet(_one_phase(kind), 64).iterations
    iterations['three-phase'] = ctx.floquet(_three_phase(), 64).iterations
    passed = dense_error <= 1e-13 and duality_error <= 1e-12 and max(iterations.values()) <= POWER_ITERATION_CAP
    return CheckEntry(name='discrete-structure', passed=passed, measured=float(dense_error), threshold=1e-13,
                      detail={'duality_error': float(duality_error), 'duality_threshold': 1e-12,
                              'iterations': iterations, 'iteration_cap': POWER_ITERATION_CAP})


REGISTRY: Dict[str, Callable[[CheckContext], CheckEntry]] = {
    'period-equality': check_equality,
    'period-local-sign': check_local_sign,
    'slope-gap': check_slope_gap,
    'geometric-bound': check_geometric_bound,
    'perron-positivity': check_perron_positivity,
    'gauge-shift': check_gauge_shift,
    'three-phase-analytic': check_three_phase,
    'chrono-optimum': check_chrono_optimum,
    'chrono-first-order': check_chrono_first_order,
    'oracle-triangle': check_oracle_triangle,
    'discrete-structure': check_discrete_structure,
}


def _run_check(ctx: CheckContext, name: str) -> CheckEntry:
    started = time.perf_counter()
    try:
        entry = REGISTRY[name](ctx)
    except GrowthRateError as e:
        logger.error(f'Check {name} raised: {e.detail}')
        entry = CheckEntry(name=name, passed=False, measured=math.nan, threshold=math.nan,
                           detail={'error': e.detail})
    entry.detail['wall_time'] = time.perf_counter() - started
    logger.info(f'{name}: {"passed" if entry.passed else "FAILED"} (measured {entry.measured}, '
                f'threshold {entry.threshold})')
    return entry


def run_validate(config: ExperimentConfig) -> ExperimentResult:
    """
    Runs the requested checks (all of them when ``config.checks`` is empty).
    Failed checks are listed in ``failures``; the report itself never raises.
    """
    started = time.perf_counter()
    ctx = CheckContext(config=config, rng=np.random.default_rng(config.seed))
    entries = []
    for name in config.checks or CHECKS:
        entries.append(_run_check(ctx, name))
    frame = pd.DataFrame([{'name': e.name, 'passed': e.passed, 'measured': e.measured, 'threshold': e.threshold}
                          for e in entries], columns=['name', 'passed', 'measured', 'threshold'])
    report = {'passed': all(e.passed for e in entries), 'checks': entries}
    failures = tuple(e.name for e in entries if not e.passed)
    return ExperimentResult(experiment=VALIDATE, frame=frame, tables=ctx.tables, documents={'validate': report},
                            meta={'seed': config.seed, 'wall_time': time.perf_counter() - started},
                            failures=failures)
