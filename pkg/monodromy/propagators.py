"""
Matrix-free one-step propagators of the upwind scheme with dt = dx.

For phase p with rate K_p, maturation index m_p and control psi_p, one step
maps the state n^k to

    n_p,i^{k+1} = n_p,i-1^k / (1 + dt K_p chi(i >= m_p) psi_p^{k+1}),   1 <= i <= I
    n_p+1,0^{k+1} = c_p psi_p^k dt K_p sum_{i >= m_p} n_p,i^k

with c_p = 2 for the last phase and 1 otherwise. Age-independent death rates
and therapy are either applied as the exact factor exp(-int_{t_k}^{t_k+1} rate)
on the whole phase (``exponential``) or added to the interior denominator
(``implicit``).
"""
import logging
from typing import Union

import numpy as np
from django.conf import settings
from numpy.polynomial.legendre import leggauss

from periodic.functions import PeriodicFn
from .exceptions import DimensionMismatch, GridSpecError, ZeroVectorError
from .grid import GridSpec
from .models import MultiPhaseModel, OnePhaseModel

logger = logging.getLogger(__name__)

EXPONENTIAL = 'exponential'
IMPLICIT = 'implicit'
LOSS_SCHEMES = (EXPONENTIAL, IMPLICIT)

Model = Union[OnePhaseModel, MultiPhaseModel]


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


class PropagatorFamily:
    """
    The N_T-periodic family M_0, ..., M_{N_T - 1} for one model on one grid.
    Immutable after construction; states have shape (phases, n_age + 1).
    """

    def __init__(self, grid: GridSpec, model: Model, loss_scheme: str = None, quadrature_order: int = None):
        self.grid = grid
        self.model = model
        self.loss_scheme = loss_scheme or settings.LOSS_SCHEME
        if self.loss_scheme not in LOSS_SCHEMES:
            raise GridSpecError(f'Unknown loss scheme "{self.loss_scheme}", expected one of {LOSS_SCHEMES}')
        self.quadrature_order = quadrature_order or settings.STEP_QUADRATURE_ORDER
        grid.check_model(model)

        phases = model.as_multiphase().phases
        self.n_phases = len(phases)
        self.shape = (self.n_phases, grid.n_age + 1)
        self.maturation = tuple(grid.maturation_index(spec.a) for spec in phases)
        self._interior_start = tuple(max(m, 1) for m in self.maturation)

        dt = grid.dt
        times = np.arange(grid.n_time + 1) * grid.period / grid.n_time
        self.times = _frozen(times)
        rates = np.array([spec.K for spec in phases])
        psi = np.array([spec.psi(times) for spec in phases])
        self.psi_samples = _frozen(psi)

        cycle_factor = np.ones(self.n_phases)
        cycle_factor[-1] = 2.0
        # (n_time, phases) coefficient tables, row k describes M_k
        self._births = _frozen((cycle_factor * rates * dt) * psi[:, :-1].T)
        implicit = np.zeros((grid.n_time, self.n_phases))
        decay = np.ones((grid.n_time, self.n_phases))
        for index in range(self.n_phases):
            losses = model.as_multiphase().loss_rates(index + 1)
            if not losses:
                continue
            if self.loss_scheme == IMPLICIT:
                implicit[:, index] = sum(rate(times[1:]) for rate in losses)
            else:
                decay[:, index] = np.exp(-sum(self.step_integrals(rate) for rate in losses))
        self._young = _frozen(1.0 / (1.0 + dt * implicit))
        self._old = _frozen(1.0 / (1.0 + dt * (rates * psi[:, 1:].T + implicit)))
        self._decay = _frozen(decay)

    def __repr__(self):
        return (f'PropagatorFamily(phases={self.n_phases}, n_time={self.grid.n_time}, n_age={self.grid.n_age}, '
                f'loss_scheme={self.loss_scheme})')

    @property
    def n_time(self) -> int:
        return self.grid.n_time

    @property
    def dt(self) -> float:
        return self.grid.dt

    def step_integrals(self, fn: PeriodicFn) -> np.ndarray:
        """ int_{t_k}^{t_k+1} fn for k = 0..n_time-1 by Gauss-Legendre quadrature """
        nodes, weights = leggauss(self.quadrature_order)
        dt = self.grid.dt
        starts = np.arange(self.grid.n_time) * self.grid.period / self.grid.n_time
        samples = fn(starts[:, None] + 0.5 * dt * (nodes + 1.0))
        return 0.5 * dt * samples @ weights

    def initial_state(self) -> np.ndarray:
        """ Uniform positive state with unit l1 norm """
        return np.full(self.shape, 1.0 / (self.shape[0] * self.shape[1]))

    def as_state(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape == self.shape:
            return v
        if v.ndim == 1 and self.n_phases == 1 and v.shape[0] == self.shape[1]:
            return v.reshape(self.shape)
        raise DimensionMismatch(f'State of shape {v.shape} does not match the grid shape {self.shape}')

    def step(self, k: int, v: np.ndarray) -> np.ndarray:
        """ n^{k+1} = M_k n^k """
        state = self.as_state(v)
        k %= self.grid.n_time
        out = np.empty_like(state)
        births = np.empty(self.n_phases)
        for p in range(self.n_phases):
            start = self._interior_start[p]
            out[p, 1:start] = state[p, :start - 1] * self._young[k, p]
            out[p, start:] = state[p, start - 1:-1] * self._old[k, p]
            births[p] = self._births[k, p] * state[p, self.maturation[p]:].sum()
        out[:, 0] = np.roll(births, 1)
        out *= self._decay[k][:, None]
        return out.reshape(np.shape(v))

    def step_adjoint(self, k: int, w: np.ndarray) -> np.ndarray:
        """ M_k^T w """
        state = self.as_state(w) * self._decay[k % self.grid.n_time][:, None]
        k %= self.grid.n_time
        out = np.empty_like(state)
        newborn = np.roll(state[:, 0], -1)
        for p in range(self.n_phases):
            start = self._interior_start[p]
            out[p, :start - 1] = state[p, 1:start] * self._young[k, p]
            out[p, start - 1:-1] = state[p, start:] * self._old[k, p]
            out[p, -1] = 0.0
            out[p, self.maturation[p]:] += self._births[k, p] * newborn[p]
        return out.reshape(np.shape(w))


def _check_nonzero(v: np.ndarray):
    if not np.any(v):
        raise ZeroVectorError('Cannot propagate the zero vector')


def step(family: PropagatorFamily, k: int, v: np.ndarray) -> np.ndarray:
    return family.step(k, v)


def step_adjoint(family: PropagatorFamily, k: int, w: np.ndarray) -> np.ndarray:
    return family.step_adjoint(k, w)


def monodromy_apply(family: PropagatorFamily, v: np.ndarray) -> np.ndarray:
    """ M_{N_T-1} ... M_1 M_0 v without forming any matrix """
    _check_nonzero(v)
    for k in range(family.n_time):
        v = family.step(k, v)
    return v


def monodromy_apply_adjoint(family: PropagatorFamily, w: np.ndarray) -> np.ndarray:
    """ M_0^T M_1^T ... M_{N_T-1}^T w """
    _check_nonzero(w)
    for k in reversed(range(family.n_time)):
        w = family.step_adjoint(k, w)
    return w


def dense_step_matrix(family: PropagatorFamily, k: int) -> np.ndarray:
    """
    Assembles M_k entry by entry from the model, for cross-checking the
    matrix-free application on small grids. Rows and columns are ordered
    phase-major.
    """
    grid = family.grid
    model = family.model.as_multiphase()
    k %= grid.n_time
    dt, size = grid.dt, grid.n_age + 1
    t_now, t_next = family.times[k], family.times[k + 1]
    matrix = np.zeros((family.n_phases * size, family.n_phases * size))
    for p, spec in enumerate(model.phases):
        kappa = np.array([spec.K if i * grid.dx >= spec.a - 1e-9 * grid.dx else 0.0 for i in range(size)])
        losses = model.loss_rates(p + 1)
        implicit = sum(rate(t_next) for rate in losses) if family.loss_scheme == IMPLICIT else 0.0
        target = ((p + 1) % family.n_phases) * size
        factor = 2.0 if p == family.n_phases - 1 else 1.0
        matrix[target, p * size:(p + 1) * size] = factor * spec.psi(t_now) * kappa * dt
        for i in range(1, size):
            matrix[p * size + i, p * size + i - 1] = 1.0 / (1.0 + dt * (kappa[i] * spec.psi(t_next) + implicit))
    if family.loss_scheme == EXPONENTIAL:
        for p in range(family.n_phases):
            loss = sum(family.step_integrals(rate)[k] for rate in model.loss_rates(p + 1))
            matrix[p * size:(p + 1) * size, :] *= np.exp(-loss)
    return matrix


def dense_monodromy(family: PropagatorFamily) -> np.ndarray:
    size = family.n_phases * (family.grid.n_age + 1)
    product = np.eye(size)
    for k in range(family.n_time):
        product = dense_step_matrix(family, k) @ product
    return product


def primitivity_power(family: PropagatorFamily, max_power: int = 64) -> int:
    """ Smallest q with every entry of the q-th monodromy power positive, 0 if none up to ``max_power`` """
    pattern = dense_monodromy(family) > 0
    power = pattern.copy()
    for q in range(1, max_power + 1):
        if power.all():
            return q
        power = (power.astype(np.int64) @ pattern.astype(np.int64)) > 0
    return 0
