"""
Chronotherapy: the drug adds the death rate epsilon * gamma(t + theta) to one
phase of a multiphase model, and the growth rate is tabulated over the
amplitude epsilon and the offset theta. The exact surface is compared with
the first-order prediction built from the untreated direct and adjoint
eigenfunctions.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import partial
from typing import Dict, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from django.conf import settings

from core.pool import map_ordered
from monodromy.grid import GridSpec
from monodromy.models import MultiPhaseModel, OnePhaseModel
from monodromy.propagators import PropagatorFamily
from periodic.functions import PeriodicFn
from spectral.services import AdjointSolution, FloquetSolution, adjoint_eigen, floquet_eigen, phase_pairings
from .exceptions import ChronoError, UnknownEpsilon

logger = logging.getLogger(__name__)

Model = Union[OnePhaseModel, MultiPhaseModel]

# plateaus wider than this many grid cells are reported as degenerate
PLATEAU_CELLS = 3


@dataclass(frozen=True)
class OptimumResult:
    theta: float
    interval: Tuple[float, float]
    degenerate: bool = False


def default_thetas(period: float = 1.0, points: int = None) -> np.ndarray:
    points = points or settings.DEFAULT_THETA_POINTS
    return np.arange(points) * period / points


def first_order_slope(direct: FloquetSolution, adjoint: AdjointSolution, gamma: PeriodicFn, theta: float,
                      phase: int) -> float:
    """
    d lambda / d epsilon at epsilon = 0 for the death rate epsilon * gamma(t + theta)
    on ``phase``: -sum_k g_k w_phase(k + 1), with g_k the integral of
    gamma(. + theta) over step k.
    """
    family = direct.family
    g = family.step_integrals(gamma.shifted(theta))
    return -float(np.dot(g, adjoint.weight(phase)[1:]))


def first_order_prediction(direct: FloquetSolution, adjoint: AdjointSolution, gamma: PeriodicFn, theta: float,
                           phase: int, epsilon: float) -> float:
    """ lambda - epsilon * int_0^T gamma(t + theta) w_phase(t) dt """
    return direct.lam + epsilon * first_order_slope(direct, adjoint, gamma, theta, phase)


def drop_identity(direct_eps: FloquetSolution, adjoint0: AdjointSolution, gamma: PeriodicFn, theta: float,
                  phase: int, epsilon: float) -> float:
    """
    Decrease lambda_0 - lambda_eps evaluated from the treated direct and the
    untreated adjoint eigenfunctions. On the grid the identity reads

        (exp(F dt) - 1) / dt = sum_k (exp(epsilon g_k) - 1) <N_eps, phi>_phase(k + 1) / sum_k <N_eps, phi>(k) dt

    and tends to F = epsilon int gamma(t + theta) int N_j phi_j / sum_i int int N_i phi_i.
    """
    family = direct_eps.family
    pairs = phase_pairings(direct_eps, adjoint0)
    g = family.step_integrals(gamma.shifted(theta))
    numerator = float(np.dot(np.expm1(epsilon * g), pairs[1:, phase - 1]))
    denominator = float(pairs[:-1].sum()) * family.dt
    return math.log1p(family.dt * numerator / denominator) / family.dt


def _locate(thetas: np.ndarray, values: np.ndarray, period: float) -> OptimumResult:
    if np.isnan(values).all():
        raise ChronoError('No converged point to locate an optimum on')
    best = int(np.nanargmax(values))
    top = values[best]
    tolerance = settings.PLATEAU_TOLERANCE * max(1.0, abs(top))
    plateau = np.flatnonzero(values >= top - tolerance)
    if len(plateau) > PLATEAU_CELLS:
        interval = (float(thetas[plateau].min()), float(thetas[plateau].max()))
        logger.info(f'Flat optimum over theta in {interval}')
        return OptimumResult(theta=float(thetas[best]), interval=interval, degenerate=True)

    width = period / len(thetas)
    below, above = values[best - 1], values[(best + 1) % len(values)]
    curvature = below - 2 * top + above
    shift = 0.5 * (below - above) / curvature if curvature < 0 else 0.0
    theta = float((thetas[best] + shift * width) % period)
    return OptimumResult(theta=theta, interval=(theta - width, theta + width))


@dataclass(frozen=True)
class ChronoSweep:
    """
    lam[e, t] is the growth rate with amplitude epsilons[e] at offset
    thetas[t]; points whose solve failed hold NaN and are listed in ``failures``.
    """
    model: Model = field(repr=False)
    gamma: PeriodicFn
    phase: int
    epsilons: Tuple[float, ...]
    thetas: np.ndarray = field(repr=False)
    lam: np.ndarray = field(repr=False)
    slopes: np.ndarray = field(repr=False)
    base: FloquetSolution = field(repr=False)
    adjoint: AdjointSolution = field(repr=False)
    failures: Tuple[Tuple[float, float, str], ...] = ()

    @property
    def base_lam(self) -> float:
        return self.base.lam

    @property
    def first_order(self) -> np.ndarray:
        return self.base.lam + np.outer(self.epsilons, self.slopes)

    def row(self, epsilon: float) -> int:
        matches = np.flatnonzero(np.isclose(self.epsilons, epsilon, rtol=0, atol=1e-12))
        if not len(matches):
            raise UnknownEpsilon(f'Amplitude {epsilon} is not part of the sweep {list(self.epsilons)}')
        return int(matches[0])

    @property
    def theta_opt(self) -> Dict[float, OptimumResult]:
        return {eps: locate_optimum(self, eps) for eps in self.epsilons if eps > 0}

    def to_frame(self) -> pd.DataFrame:
        rows = len(self.epsilons) * len(self.thetas)
        return pd.DataFrame({
            'epsilon': np.repeat(self.epsilons, len(self.thetas)),
            'theta': np.tile(self.thetas, len(self.epsilons)),
            'lambda': self.lam.reshape(rows),
            'lambda_first_order': self.first_order.reshape(rows),
        })


def locate_optimum(sweep: ChronoSweep, epsilon: float, first_order: bool = False) -> OptimumResult:
    """
    Offset maximizing the growth rate of the treated population over the theta
    grid, refined by the parabola through the best point and its neighbours.
    """
    row = sweep.row(epsilon)
    values = (sweep.first_order if first_order else sweep.lam)[row]
    return _locate(sweep.thetas, values, sweep.model.period)


def _check_target(model: Model, phase: int):
    if not 1 <= phase <= model.n_phases:
        raise ChronoError(f'Target phase {phase} is not one of 1..{model.n_phases}')


def _treated_rate(model: Model, gamma: PeriodicFn, phase: int, grid: GridSpec, loss_scheme: str, tol: float,
                  start: np.ndarray, point: Tuple[float, float]) -> float:
    epsilon, theta = point
    treated = model.with_therapy(phase=phase, epsilon=epsilon, theta=theta, gamma=gamma)
    return floquet_eigen(PropagatorFamily(grid, treated, loss_scheme=loss_scheme), tol, start=start).lam


def sweep(model: Model, gamma: PeriodicFn, phase: int, epsilons: Sequence[float] = None,
          thetas: Sequence[float] = None, n_time: int = None, grid: GridSpec = None, tol: float = None,
          jobs: int = None, loss_scheme: str = None) -> ChronoSweep:
    """
    Full spectral solve at every (epsilon, theta) with epsilon > 0; the
    epsilon = 0 row is the untreated growth rate.

    :param model: untreated model
    :param gamma: drug profile, nonnegative with the model's period
    :param phase: phase the drug acts on, numbered from 1
    :param epsilons: amplitudes, nonnegative
    :param thetas: offsets in [0, T)
    :param jobs: worker pool size
    """
    _check_target(model, phase)
    epsilons = tuple(float(eps) for eps in (settings.DEFAULT_EPSILONS if epsilons is None else epsilons))
    if any(eps < 0 or not math.isfinite(eps) for eps in epsilons):
        raise ChronoError(f'Amplitudes must be nonnegative, got {list(epsilons)}')
    thetas = default_thetas(model.period) if thetas is None else np.asarray(thetas, dtype=float)
    grid = grid or GridSpec.for_model(model, n_time=n_time)
    model = model.without_therapy()

    family = PropagatorFamily(grid, model, loss_scheme=loss_scheme)
    base = floquet_eigen(family, tol)
    adjoint = adjoint_eigen(family, base, tol)
    slopes = np.array([first_order_slope(base, adjoint, gamma, theta, phase) for theta in thetas])
    logger.info(f'Untreated growth rate {base.lam}, sweeping {len(epsilons)} amplitudes x {len(thetas)} offsets')

    points = [(eps, float(theta)) for eps in epsilons if eps > 0 for theta in thetas]
    solve = partial(_treated_rate, model, gamma, phase, grid, family.loss_scheme, tol, base.N0)
    outcomes = iter(map_ordered(solve, points, jobs))
    lam = np.full((len(epsilons), len(thetas)), base.lam)
    failures = []
    for e, eps in enumerate(epsilons):
        if eps == 0:
            continue
        for t, theta in enumerate(thetas):
            outcome = next(outcomes)
            if outcome.ok:
                lam[e, t] = outcome.value
            else:
                lam[e, t] = np.nan
                failures.append((eps, float(theta), str(outcome.error)))
        logger.info(f'epsilon={eps}: lambda in [{np.nanmin(lam[e])}, {np.nanmax(lam[e])}]')

    return ChronoSweep(model=model, gamma=gamma, phase=phase, epsilons=epsilons, thetas=thetas, lam=lam,
                       slopes=slopes, base=base, adjoint=adjoint, failures=tuple(failures))


@dataclass(frozen=True)
class DerivativeCheck:
    thetas: np.ndarray
    finite_difference: np.ndarray
    first_order: np.ndarray

    @property
    def max_relative_error(self) -> float:
        scale = np.max(np.abs(self.first_order))
        return float(np.max(np.abs(self.finite_difference - self.first_order)) / scale)


def derivative_check(model: Model, gamma: PeriodicFn, phase: int, thetas: Sequence[float], h: float = 1e-3,
                     n_time: int = None, tol: float = None) -> DerivativeCheck:
    """
    One-sided difference (lambda(h, theta) - lambda(0)) / h against the
    first-order slope. Negative amplitudes are avoided since they make the
    death rate negative.
    """
    _check_target(model, phase)
    thetas = np.asarray(thetas, dtype=float)
    result = sweep(model, gamma, phase, epsilons=(h,), thetas=thetas, n_time=n_time, tol=tol, jobs=1)
    difference = (result.lam[0] - result.base_lam) / h
    return DerivativeCheck(thetas=thetas, finite_difference=difference, first_order=result.slopes)
