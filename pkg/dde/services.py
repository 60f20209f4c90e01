"""
Method-of-steps integration of the delay equation for the dividing population

    p'(t) = -K0 psi(t) p(t) + 2 K0 psi(t - a) p(t - a),    p = 1 on [-a, 0]

with the classical fourth-order Runge-Kutta scheme. Delayed values come from
the stored solution through cubic Hermite interpolation, which is exact on
grid nodes. The step divides the period, so each step sees the control on one
smooth piece and the per-step control samples repeat every period.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from django.conf import settings
from scipy.integrate import trapezoid

from periodic.functions import PeriodicFn
from .exceptions import DdeError, InsufficientPeriods, NegativePopulation, NonCommensurateStep

logger = logging.getLogger(__name__)

# relative slack for commensurability and node placement
COMMENSURATE_TOLERANCE = 1e-12
# control samples are taken this far inside the step, in units of the step
EDGE = 1e-9
# buffer is rescaled once the population passes this value
RESCALE_ABOVE = 1e100
# periods averaged by the growth estimate
GROWTH_WINDOW = 10

STAGES = (0.0, 0.5, 0.5, 1.0)


def _steps_per_period(period: float, h: float) -> int:
    if not (math.isfinite(h) and h > 0):
        raise DdeError(f'Step must be positive, got h={h}')
    steps = round(period / h)
    if steps < 1 or abs(steps * h - period) > COMMENSURATE_TOLERANCE * period:
        raise NonCommensurateStep(f'Step {h} does not divide the period {period}')
    return steps


@dataclass(frozen=True)
class DdeTrajectory:
    """
    P at t_n = n * step for n = 0..len(values) - 1, stored as
    values[n] * exp(log_offset) to keep long runs in floating range.
    """
    step: float
    period: float
    values: np.ndarray = field(repr=False)
    log_offset: float = 0.0

    @classmethod
    def from_samples(cls, values, step: float, period: float) -> 'DdeTrajectory':
        values = np.asarray(values, dtype=float)
        _steps_per_period(period, step)
        if (values <= 0).any():
            raise NegativePopulation('Population samples must be positive')
        return cls(step=step, period=period, values=values)

    @property
    def steps_per_period(self) -> int:
        return _steps_per_period(self.period, self.step)

    @property
    def n_periods(self) -> int:
        return (len(self.values) - 1) // self.steps_per_period

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.values)) * self.step

    def log_values(self) -> np.ndarray:
        return np.log(self.values) + self.log_offset

    @property
    def growth_estimates(self) -> np.ndarray:
        """ log(P(t + T) / P(t)) / T at t = 0, T, 2T, ... """
        nodes = self.log_values()[::self.steps_per_period][:self.n_periods + 1]
        return np.diff(nodes) / self.period


def _hermite(s: float) -> Tuple[float, float, float, float]:
    s2, s3 = s * s, s * s * s
    return 2 * s3 - 3 * s2 + 1, s3 - 2 * s2 + s, -2 * s3 + 3 * s2, s3 - s2


def integrate_dde(K0: float, a: float, psi: PeriodicFn, t_end: float = None, h: float = None) -> DdeTrajectory:
    """
    Integrates the delay equation up to ``t_end``.

    :param K0: division rate
    :param a: maturation delay, zero or at least one step
    :param psi: division control
    :param t_end: final time, a whole number of steps is taken
    :param h: step, must divide the period of ``psi``
    :return: the sampled trajectory
    """
    period = psi.period
    h = h or period / settings.DDE_STEPS_PER_PERIOD
    t_end = settings.DDE_PERIODS * period if t_end is None else t_end
    if not (math.isfinite(K0) and K0 > 0):
        raise DdeError(f'Division rate must be positive, got K0={K0}')
    if not (math.isfinite(a) and a >= 0):
        raise DdeError(f'Delay must be nonnegative, got a={a}')
    per_period = _steps_per_period(period, h)
    if 0 < a < h * (1 - COMMENSURATE_TOLERANCE):
        raise DdeError(f'Delay {a} is shorter than the step {h}')
    n_steps = math.ceil(t_end / h - COMMENSURATE_TOLERANCE)
    if n_steps < 1:
        raise DdeError(f'Final time must be positive, got t_end={t_end}')

    # control samples at the stage times of every step within one period
    base = np.arange(per_period) * h
    inside = np.clip(np.array(STAGES), EDGE, 1 - EDGE)
    psi_now = psi(base[:, None] + inside * h)
    psi_lag = psi(base[:, None] + inside * h - a)
    # one-sided samples at the nodes for the stored derivatives
    psi_right = (psi(base + EDGE * h), psi(base + EDGE * h - a))
    psi_left = (psi(base + h - EDGE * h), psi(base + h - EDGE * h - a))

    # where each stage falls in the stored solution
    delay_steps = a / h
    if abs(delay_steps - round(delay_steps)) < 1e-9:
        delay_steps = float(round(delay_steps))
    lookups = []
    for c in STAGES:
        offset = c - delay_steps
        j = math.floor(offset + 1e-9)
        s = offset - j
        lookups.append((j, 0.0 if s < 1e-9 else s, _hermite(s)))

    p = np.empty(n_steps + 1)
    dp_right = np.zeros(n_steps + 1)
    dp_left = np.zeros(n_steps + 1)
    p[0] = 1.0
    history = 1.0
    log_offset = 0.0

    def rhs(now, lag, value, delayed):
        return -K0 * now * value + 2 * K0 * lag * delayed

    def delayed_value(n, stage):
        j, s, weights = lookups[stage]
        j += n
        if j < 0:
            return history
        if s == 0.0:
            return p[j]
        h00, h10, h01, h11 = weights
        return h00 * p[j] + h10 * h * dp_right[j] + h01 * p[j + 1] + h11 * h * dp_left[j + 1]

    zero_delay = a == 0
    dp_right[0] = rhs(psi_right[0][0], psi_right[1][0], 1.0, 1.0)
    for n in range(n_steps):
        r = n % per_period
        now, lag = psi_now[r], psi_lag[r]
        value = p[n]
        slopes = []
        for stage, c in enumerate(STAGES):
            if stage == 0:
                state = value
            elif stage == 3:
                state = value + h * slopes[-1]
            else:
                state = value + 0.5 * h * slopes[-1]
            delayed = state if zero_delay else delayed_value(n, stage)
            slopes.append(rhs(now[stage], lag[stage], state, delayed))
        k1, k2, k3, k4 = slopes
        p[n + 1] = value + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not (math.isfinite(p[n + 1]) and p[n + 1] > 0):
            raise NegativePopulation(f'Population became {p[n + 1]} at t={(n + 1) * h}, reduce the step {h}')

        delayed = p[n + 1] if zero_delay else delayed_value(n, 3)
        dp_left[n + 1] = rhs(psi_left[0][r], psi_left[1][r], p[n + 1], delayed)
        nxt = (n + 1) % per_period
        dp_right[n + 1] = rhs(psi_right[0][nxt], psi_right[1][nxt], p[n + 1], delayed)

        if p[n + 1] > RESCALE_ABOVE:
            scale = p[n + 1]
            p[:n + 2] /= scale
            dp_right[:n + 2] /= scale
            dp_left[:n + 2] /= scale
            history /= scale
            log_offset += math.log(scale)

    logger.debug(f'DDE integrated over {n_steps} steps of {h}, log offset {log_offset}')
    return DdeTrajectory(step=h, period=period, values=p, log_offset=log_offset)


@dataclass(frozen=True)
class GrowthEstimate:
    rate: float
    spread: float
    periods: int


def estimate_growth(traj: DdeTrajectory, burn_in: int = None, window: int = GROWTH_WINDOW) -> GrowthEstimate:
    """
    Mean of the per-period growth estimates over the last ``window`` periods,
    with their spread (max - min) as the convergence indicator.
    """
    burn_in = settings.DDE_BURN_IN if burn_in is None else burn_in
    estimates = traj.growth_estimates
    available = len(estimates) - burn_in
    if available < window:
        raise InsufficientPeriods(f'Need {window} periods after a burn-in of {burn_in}, '
                                  f'the trajectory has {len(estimates)} periods')
    last = estimates[-window:]
    return GrowthEstimate(rate=float(last.mean()), spread=float(np.ptp(last)), periods=window)


def periodic_profile(traj: DdeTrajectory, rate: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    The periodic factor P(t) exp(-rate t) over the last full period, scaled so
    that it integrates to one over the period.

    :return: times in [0, T] and the profile values
    """
    per_period = traj.steps_per_period
    if traj.n_periods < 1:
        raise InsufficientPeriods('The trajectory does not cover a full period')
    end = traj.n_periods * per_period
    start = end - per_period
    local = np.arange(per_period + 1) * traj.step
    logs = traj.log_values()[start:end + 1] - rate * local
    profile = np.exp(logs - logs.max())
    profile /= trapezoid(profile, local)
    return local, profile
