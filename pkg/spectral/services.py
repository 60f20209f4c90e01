"""
Floquet eigenelements of the discrete monodromy operator by power iteration.

The direct eigenfunction is N^{k+1} = exp(-lambda dt) M_k N^k started from the
Perron vector of the monodromy, the adjoint one is
phi^k = exp(-lambda dt) M_k^T phi^{k+1} started from the Perron vector of its
transpose. Both sequences are T-periodic, and the products N^k phi^k summed
over ages give the phase weights w_j(k).
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, List, Tuple

import numpy as np
from django.conf import settings

from monodromy.propagators import PropagatorFamily, monodromy_apply, monodromy_apply_adjoint
from periodic.functions import PeriodicFn
from .exceptions import AdjointMismatchError, ConvergenceError, GaugeShiftError, NonPrimitiveError, SpectralError

logger = logging.getLogger(__name__)

# ratios averaged for the eigenvalue estimate
RATIO_WINDOW = 3
# ratios inspected when deciding whether a non-converged iteration oscillates
OSCILLATION_WINDOW = 16


@dataclass(frozen=True)
class PowerIteration:
    vector: np.ndarray
    rho: float
    iterations: int
    residual: float
    ratios: Tuple[float, ...]


def _oscillates(ratios: List[float]) -> bool:
    if len(ratios) < 2 * OSCILLATION_WINDOW:
        return False
    recent = np.ptp(ratios[-OSCILLATION_WINDOW:])
    earlier = np.ptp(ratios[-2 * OSCILLATION_WINDOW:-OSCILLATION_WINDOW])
    return recent > 0.5 * earlier and recent > 1e-8 * abs(ratios[-1])


def power_iteration(apply: Callable[[np.ndarray], np.ndarray], start: np.ndarray, tol: float = None,
                    max_iter: int = None) -> PowerIteration:
    """
    Normalized power iteration in the nonnegative cone.

    :param apply: the linear map
    :param start: nonnegative nonzero start vector
    :param tol: bound on the l1 change of successive normalized iterates
    :param max_iter: number of applications allowed
    :return: Perron vector with unit l1 norm and its eigenvalue
    """
    tol = tol or settings.FLOQUET_TOL
    max_iter = max_iter or settings.FLOQUET_MAX_ITER
    v = start / np.abs(start).sum()
    ratios, residual = [], math.inf
    for iteration in range(1, max_iter + 1):
        w = apply(v)
        ratio = float(w.sum())
        if not ratio > 0:
            raise NonPrimitiveError(f'The monodromy annihilated the iterate after {iteration} applications')
        w /= ratio
        residual = float(np.abs(w - v).sum())
        ratios.append(ratio)
        v = w
        if residual < tol:
            rho = float(np.mean(ratios[-RATIO_WINDOW:]))
            logger.debug(f'Power iteration converged after {iteration} applications, rho={rho}')
            return PowerIteration(vector=v, rho=rho, iterations=iteration, residual=residual,
                                  ratios=tuple(ratios))
        if iteration % 1000 == 0:
            logger.debug(f'Power iteration at {iteration} applications, residual {residual}')

    if _oscillates(ratios):
        raise NonPrimitiveError(f'The eigenvalue ratio keeps oscillating after {max_iter} applications, '
                                f'the configuration is not primitive')
    raise ConvergenceError(f'Power iteration did not reach tol={tol} in {max_iter} applications '
                           f'(residual {residual})', residual=residual, iterations=max_iter)


@dataclass(frozen=True)
class FloquetSolution:
    """
    Discrete Floquet eigenvalue with the eigenfunction at k = 0. The whole
    periodic sequence is regenerated from ``N0`` on demand.
    """
    family: PropagatorFamily = field(repr=False)
    lam: float
    rho: float
    N0: np.ndarray = field(repr=False)
    iterations: int
    residual: float

    @property
    def period(self) -> float:
        return self.family.grid.period

    def profiles(self) -> Iterator[np.ndarray]:
        """ Yields N^0, N^1, ..., N^{N_T} """
        decay = math.exp(-self.lam * self.family.dt)
        state = self.N0
        yield state
        for k in range(self.family.n_time):
            state = decay * self.family.step(k, state)
            yield state

    def eigenfunction(self) -> np.ndarray:
        """ Array of shape (n_time + 1, phases, n_age + 1) """
        return np.stack(list(self.profiles()))

    @property
    def periodicity_residual(self) -> float:
        """ || exp(-lambda T) M N^0 - N^0 ||_1 """
        end = monodromy_apply(self.family, self.N0) / self.rho
        return float(np.abs(end - self.N0).sum())

    def masses(self) -> np.ndarray:
        """ Per-phase population sum_i N_i^k dx, shape (n_time + 1, phases) """
        dx = self.family.grid.dx
        return np.array([state.sum(axis=-1) * dx for state in self.profiles()])

    def normalize_mass(self) -> 'FloquetSolution':
        """ Rescaled so that the space-time integral of the population over one period is one """
        masses = self.masses()
        total = float(masses[:-1].sum()) * self.family.dt
        return replace(self, N0=self.N0 / total)


def floquet_eigen(family: PropagatorFamily, tol: float = None, max_iter: int = None, start: np.ndarray = None,
                  normalize_mass: bool = False) -> FloquetSolution:
    """
    Dominant eigenvalue rho of the monodromy and lambda = log(rho) / T.
    The eigenfunction is scaled so that its entries at k = 0 sum to one.
    """
    start = family.initial_state() if start is None else family.as_state(start)
    result = power_iteration(lambda v: monodromy_apply(family, v), start, tol, max_iter)
    lam = math.log(result.rho) / family.grid.period
    logger.debug(f'{family!r}: lambda={lam} after {result.iterations} applications')
    solution = FloquetSolution(family=family, lam=lam, rho=result.rho, N0=result.vector,
                               iterations=result.iterations, residual=result.residual)
    return solution.normalize_mass() if normalize_mass else solution


@dataclass(frozen=True)
class AdjointSolution:
    """
    Adjoint eigenfunction at k = 0 and the phase weights
    w_j(k) = sum_i N_j,i^k phi_j,i^k dx for k = 0..N_T, normalized so that
    sum_k sum_j w_j(k) dt over one period is one.
    """
    direct: FloquetSolution = field(repr=False)
    rho: float
    phi0: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    iterations: int
    residual: float

    def profiles(self) -> Iterator[np.ndarray]:
        """ Yields phi^{N_T}, phi^{N_T - 1}, ..., phi^0 """
        family = self.direct.family
        decay = math.exp(-self.direct.lam * family.dt)
        state = self.phi0
        yield state
        for k in reversed(range(family.n_time)):
            state = decay * family.step_adjoint(k, state)
            yield state

    def eigenfunction(self) -> np.ndarray:
        """ Array of shape (n_time + 1, phases, n_age + 1) ordered by increasing k """
        return np.stack(list(self.profiles())[::-1])

    def weight(self, phase: int) -> np.ndarray:
        """ w_phase(k) for k = 0..N_T, phases numbered from 1 """
        return self.weights[:, phase - 1]

    @property
    def duality(self) -> float:
        """ sum over one period of sum_j w_j(k) dt """
        return float(self.weights[:-1].sum()) * self.direct.family.dt


def _phase_products(forward: PropagatorFamily, forward_lam: float, N0: np.ndarray, backward: PropagatorFamily,
                    backward_lam: float, phi_end: np.ndarray) -> np.ndarray:
    """
    Per-phase sums of N^k phi^k for k = 0..N_T. The forward sequence is kept at
    checkpoints only and recomputed segment by segment during the backward sweep.
    """
    n_time = forward.n_time
    decay = math.exp(-forward_lam * forward.dt)
    adjoint_decay = math.exp(-backward_lam * backward.dt)
    stride = max(1, int(math.sqrt(n_time)))
    checkpoints = {0: N0}
    state = N0
    for k in range(n_time):
        state = decay * forward.step(k, state)
        if (k + 1) % stride == 0:
            checkpoints[k + 1] = state

    products = np.empty((n_time + 1, forward.n_phases))
    phi = phi_end
    products[n_time] = (checkpoints.get(n_time, state) * phi).sum(axis=-1).reshape(-1)
    for begin in reversed(range(0, n_time, stride)):
        end = min(begin + stride, n_time)
        segment = [checkpoints[begin]]
        for k in range(begin, end - 1):
            segment.append(decay * forward.step(k, segment[-1]))
        for k in reversed(range(begin, end)):
            phi = adjoint_decay * backward.step_adjoint(k, phi)
            products[k] = (segment[k - begin] * phi).sum(axis=-1).reshape(-1)
    return products


def adjoint_eigen(family: PropagatorFamily, direct: FloquetSolution, tol: float = None,
                  max_iter: int = None) -> AdjointSolution:
    """
    Perron vector of the transposed monodromy, checked against the direct
    eigenvalue and normalized jointly with the direct eigenfunction.
    """
    tol = tol or settings.FLOQUET_TOL
    result = power_iteration(lambda w: monodromy_apply_adjoint(family, w), family.initial_state(), tol, max_iter)
    mismatch = abs(result.rho - direct.rho) / direct.rho
    allowed = max(10 * tol, settings.ADJOINT_MISMATCH_FLOOR)
    if mismatch > allowed:
        raise AdjointMismatchError(f'Adjoint eigenvalue {result.rho} differs from the direct one {direct.rho} '
                                   f'by {mismatch:.3e} (allowed {allowed:.1e})')

    grid = family.grid
    # phi^{N_T} = phi^0, and <phi^k, N^k> is constant in k
    pairing = float(np.vdot(result.vector, direct.N0))
    phi0 = result.vector / (pairing * grid.dx * grid.period)
    weights = _phase_products(direct.family, direct.lam, direct.N0, family, direct.lam, phi0) * grid.dx
    logger.debug(f'Adjoint solve: rho={result.rho}, mismatch {mismatch:.3e}, {result.iterations} applications')
    return AdjointSolution(direct=direct, rho=result.rho, phi0=phi0, weights=weights,
                           iterations=result.iterations, residual=result.residual)


def gauge_shift(family: PropagatorFamily, gamma: PeriodicFn, tol: float = None,
                max_iter: int = None) -> Tuple[FloquetSolution, FloquetSolution]:
    """
    Solves a one-phase model with and without the extra age-independent death
    rate ``gamma``. The growth rates differ by the mean of gamma and the
    eigenfunctions by the factor exp(-int_0^t (gamma - <gamma>)).
    """
    if family.n_phases != 1:
        raise GaugeShiftError(f'The gauge shift holds for one-phase models only, got {family.n_phases} phases')
    shifted = PropagatorFamily(family.grid, family.model.with_extra_death(gamma), loss_scheme=family.loss_scheme,
                               quadrature_order=family.quadrature_order)
    return floquet_eigen(family, tol, max_iter), floquet_eigen(shifted, tol, max_iter)


def average_identity(solution: FloquetSolution) -> Tuple[float, float]:
    """
    Both sides of (lambda + K0) / (2 K0) exp(lambda a) = < psi(t - a) P(t - a) / P(t) >
    for a one-phase solution, with P(k) = sum_{i dx >= a} N_i^k dx.
    """
    family = solution.family
    if family.n_phases != 1:
        raise GaugeShiftError('The averaged-ratio identity is stated for one-phase models')
    spec = family.model.as_multiphase().phases[0]
    maturation = family.maturation[0]
    lhs = (solution.lam + spec.K) / (2 * spec.K) * math.exp(solution.lam * spec.a)

    dx = family.grid.dx
    P = np.array([state.reshape(-1)[maturation:].sum() * dx for state in solution.profiles()])[:-1]
    k = np.arange(family.n_time)
    lagged = (k - maturation) % family.n_time
    psi_lagged = spec.psi(family.times[:-1] - maturation * dx)
    ratio = psi_lagged * P[lagged] / P
    rhs = float(ratio.mean())
    return lhs, rhs


def phase_pairings(direct: FloquetSolution, adjoint: AdjointSolution) -> np.ndarray:
    """
    sum_i N_j,i^k phi_j,i^k dx for k = 0..N_T, pairing a direct solution with
    the adjoint of a possibly different model on the same grid.
    """
    if direct.family.grid != adjoint.direct.family.grid:
        raise SpectralError('Direct and adjoint solutions live on different grids')
    products = _phase_products(direct.family, direct.lam, direct.N0, adjoint.direct.family, adjoint.direct.lam,
                               adjoint.phi0)
    return products * direct.family.grid.dx
