"""
One runner per experiment. Every runner takes a validated ``ExperimentConfig``
and returns an ``ExperimentResult`` holding the main table, extra tables keyed
by file suffix and the provenance written to the meta sidecar.
"""
import logging
import time
from dataclasses import dataclass, field
from functools import partial
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd
from django.conf import settings

from chrono import services as chrono_services
from closedform.perron import solve_geometric_one_phase, solve_perron_one_phase
from closedform.threephase import solve_analytic_three_phase
from core.pool import map_ordered
from monodromy.grid import GridSpec
from monodromy.propagators import PropagatorFamily
from spectral.services import adjoint_eigen, floquet_eigen
from .config import CHRONO, FLOQUET, PERRON, SWEEP_A, ExperimentConfig
from .exceptions import ConfigurationError

logger = logging.getLogger(__name__)


@dataclass
class ExperimentResult:
    experiment: str
    frame: pd.DataFrame
    meta: dict = field(default_factory=dict)
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    documents: Dict[str, object] = field(default_factory=dict)
    failures: Tuple[str, ...] = ()

    @property
    def converged(self) -> bool:
        return not self.failures


@dataclass
class SweepResult(ExperimentResult):
    """
    Rows sorted by the maturation age; ``crossings`` lists every sign change
    of lambda_floquet - lambda_perron with the local order of the curves.
    """
    crossings: Tuple[dict, ...] = ()


def _grid_meta(grid: GridSpec) -> dict:
    return {'period': grid.period, 'n_time': grid.n_time, 'n_age': grid.n_age, 'dt': grid.dt}


def _solver_meta(config: ExperimentConfig, family: PropagatorFamily = None) -> dict:
    solver = config.solver
    return {
        'tol': solver.tol or settings.FLOQUET_TOL,
        'max_iter': solver.max_iter or settings.FLOQUET_MAX_ITER,
        'loss_scheme': family.loss_scheme if family is not None else solver.loss_scheme or settings.LOSS_SCHEME,
    }


def _family(config: ExperimentConfig, model) -> PropagatorFamily:
    grid = GridSpec.for_model(model, n_time=config.grid.n_time, tail_factor=config.grid.tail_factor)
    return PropagatorFamily(grid, model, loss_scheme=config.solver.loss_scheme)


def _floquet_at(config: ExperimentConfig, a: float) -> float:
    family = _family(config, config.build_model(a=float(a)))
    return floquet_eigen(family, config.solver.tol, config.solver.max_iter).lam


def _require_one_phase(config: ExperimentConfig):
    if config.model.is_multiphase:
        raise ConfigurationError(f'The {config.experiment} experiment needs a one-phase model')


def run_floquet(config: ExperimentConfig) -> ExperimentResult:
    """
    Floquet eigenvalue of the configured model; multiphase runs also tabulate
    the phase weights of the adjoint pairing.
    """
    started = time.perf_counter()
    model = config.build_model()
    family = _family(config, model)
    solution = floquet_eigen(family, config.solver.tol, config.solver.max_iter)
    row = {
        'lambda': solution.lam,
        'rho': solution.rho,
        'iterations': solution.iterations,
        'residual': solution.residual,
        'periodicity_residual': solution.periodicity_residual,
    }
    tables = {}
    if config.model.is_multiphase:
        adjoint = adjoint_eigen(family, solution, config.solver.tol, config.solver.max_iter)
        weights = {'t': family.times}
        for phase in range(1, family.n_phases + 1):
            weights[f'w_{phase}'] = adjoint.weight(phase)
        tables['weights'] = pd.DataFrame(weights)
        row['duality'] = adjoint.duality
    else:
        row['lambda_perron'] = solve_perron_one_phase(model.K0, model.a, config.model.death).lam
    logger.info(f'Floquet growth rate {solution.lam} after {solution.iterations} applications')
    meta = {'grid': _grid_meta(family.grid), 'solver': _solver_meta(config, family),
            'wall_time': time.perf_counter() - started}
    return ExperimentResult(experiment=FLOQUET, frame=pd.DataFrame([row]), meta=meta, tables=tables)


def run_perron(config: ExperimentConfig) -> ExperimentResult:
    """
    Closed-form growth rates: Perron and geometric for one-phase models, the
    transcendental root for the commuting three-phase construction.
    """
    started = time.perf_counter()
    model = config.model
    if not model.is_multiphase:
        perron = solve_perron_one_phase(model.K0, model.a, model.death)
        geometric = solve_geometric_one_phase(model.K0, model.a, config.control.psi, model.death)
        frame = pd.DataFrame([{'K0': model.K0, 'a': model.a, 'lambda_perron': perron.lam,
                               'lambda_geometric': geometric.lam, 'residual': perron.residual}])
    else:
        if not model.commuting or model.death is not None:
            raise ConfigurationError('A closed form exists for the commuting three-phase model without extra '
                                     'death only')
        solution = solve_analytic_three_phase(model.K, model.ages, config.control.psi)
        frame = pd.DataFrame([{'lambda': solution.lam, 'C': solution.C, 'weight_total': solution.weight_total,
                               'residual': solution.residual}])
    return ExperimentResult(experiment=PERRON, frame=frame, meta={'wall_time': time.perf_counter() - started})


def find_crossings(a: np.ndarray, difference: np.ndarray) -> List[dict]:
    """
    Linear interpolation of every sign change of ``difference``; ``order``
    tells which curve is above before the crossing.
    """
    crossings = []
    finite = np.flatnonzero(np.isfinite(difference))
    for left, right in zip(finite[:-1], finite[1:]):
        d0, d1 = difference[left], difference[right]
        if d0 == 0 and (not crossings or crossings[-1]['a'] != a[left]):
            crossings.append({'a': float(a[left]), 'order': 'touch'})
        if d0 * d1 < 0:
            location = a[left] - d0 * (a[right] - a[left]) / (d1 - d0)
            order = 'floquet-above' if d0 > 0 else 'perron-above'
            crossings.append({'a': float(location), 'order': order})
    return crossings


def run_sweep_a(config: ExperimentConfig) -> SweepResult:
    """
    lambda_F(a), lambda_P(a) and lambda_g(a) over the configured age range of
    a one-phase model. Floquet solves go to the worker pool.
    """
    _require_one_phase(config)
    started = time.perf_counter()
    ages = np.linspace(config.sweep.a_min, config.sweep.a_max, config.sweep.a_points)

    outcomes = map_ordered(partial(_floquet_at, config), ages, config.solver.jobs)
    model = config.model
    rows, failures = [], []
    for a, outcome in zip(ages, outcomes):
        if not outcome.ok:
            failures.append(f'a={a}: {outcome.error}')
        rows.append({
            'a': float(a),
            'lambda_floquet': outcome.value if outcome.ok else np.nan,
            'lambda_perron': solve_perron_one_phase(model.K0, float(a), model.death).lam,
            'lambda_geometric': solve_geometric_one_phase(model.K0, float(a), config.control.psi, model.death).lam,
            'converged': outcome.ok,
        })
    frame = pd.DataFrame(rows).sort_values('a', kind='stable').reset_index(drop=True)
    frame['difference'] = frame['lambda_floquet'] - frame['lambda_perron']
    crossings = find_crossings(frame['a'].to_numpy(), frame['difference'].to_numpy())
    logger.info(f'Age sweep over [{ages[0]}, {ages[-1]}]: {len(crossings)} crossing(s), {len(failures)} failure(s)')

    grid = GridSpec.for_model(config.build_model(), n_time=config.grid.n_time, tail_factor=config.grid.tail_factor)
    meta = {'grid': _grid_meta(grid), 'solver': _solver_meta(config), 'crossings': crossings,
            'wall_time': time.perf_counter() - started}
    return SweepResult(experiment=SWEEP_A, frame=frame, meta=meta, failures=tuple(failures),
                       crossings=tuple(crossings))


def run_chrono(config: ExperimentConfig) -> ExperimentResult:
    """
    Growth rate over the drug amplitude and offset, with the first-order
    prediction and the optimal offset per amplitude.
    """
    started = time.perf_counter()
    model = config.build_model()
    phase = config.sweep.phase if config.model.is_multiphase else 1
    grid = GridSpec.for_model(model, n_time=config.grid.n_time, tail_factor=config.grid.tail_factor)
    thetas = chrono_services.default_thetas(model.period, config.sweep.theta_points)
    result = chrono_services.sweep(model, config.control.gamma, phase, epsilons=config.sweep.epsilons,
                                   thetas=thetas, grid=grid, tol=config.solver.tol, jobs=config.solver.jobs,
                                   loss_scheme=config.solver.loss_scheme)
    optima = {}
    for epsilon in result.epsilons:
        if epsilon <= 0 or np.isnan(result.lam[result.row(epsilon)]).all():
            continue
        optimum = chrono_services.locate_optimum(result, epsilon)
        optima[repr(epsilon)] = {'theta': optimum.theta, 'interval': list(optimum.interval),
                                 'degenerate': optimum.degenerate}
    failures = tuple(f'epsilon={eps}, theta={theta}: {error}' for eps, theta, error in result.failures)
    meta = {'grid': _grid_meta(grid), 'solver': _solver_meta(config, result.base.family), 'phase': phase,
            'lambda_untreated': result.base_lam, 'theta_opt': optima, 'wall_time': time.perf_counter() - started}
    return ExperimentResult(experiment=CHRONO, frame=result.to_frame(), meta=meta, failures=failures)


RUNNERS = {
    FLOQUET: run_floquet,
    PERRON: run_perron,
    SWEEP_A: run_sweep_a,
    CHRONO: run_chrono,
}
