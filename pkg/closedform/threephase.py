"""
Closed forms for the commuting three-phase model.

With maturation ages summing to the period and controls psi_1 = psi,
psi_2 = psi(. - a_2), psi_3 = psi(. - a_2 - a_3), the phase populations past
maturation satisfy a commuting linear ODE system; the growth rate solves

    (K1 + lambda)(K2 + lambda)(K3 + lambda) = 2 K1 K2 K3 exp(-lambda T)

and the weights int N_i phi_i dx are explicit in Psi = int_0^t (psi - 1).
"""
import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from periodic.functions import PeriodicFn, arithmetic_mean, quadrature_rule
from .exceptions import AgeSumError, ClosedFormError
from .roots import increasing_root

logger = logging.getLogger(__name__)

PHASES = 3


@dataclass(frozen=True)
class AnalyticThreePhase:
    K: Tuple[float, float, float]
    a: Tuple[float, float, float]
    psi: PeriodicFn
    lam: float
    U: Tuple[float, float, float]
    V: Tuple[float, float, float]
    residual: float = 0.0
    iterations: int = 0

    @property
    def period(self) -> float:
        return self.psi.period

    @property
    def C(self) -> float:
        return (self.K[0] + self.lam) * math.exp(self.lam * self.a[0])

    @property
    def phase_constants(self) -> Tuple[float, float, float]:
        return tuple(u * v * math.exp(self.lam * age) for u, v, age in zip(self.U, self.V, self.a))

    @property
    def weight_total(self) -> float:
        """ sum_i w_i(t), constant in t """
        return self.C * self.period + sum(self.phase_constants)

    def Psi(self, t):
        return self.psi.primitive_deviation(t)

    def window(self, phase: int, t):
        """ Integral of psi over the phase's age window, written with Psi """
        a1, a2, a3 = self.a
        t = np.asarray(t, dtype=float)
        if phase == 1:
            upper, lower = t + a1, t
        elif phase == 2:
            upper, lower = t, t - a2
        else:
            upper, lower = t - a2, t - a2 - a3
        return self.a[phase - 1] + self.Psi(upper) - self.Psi(lower)


def solve_analytic_three_phase(K: Sequence[float], a: Sequence[float], psi: PeriodicFn) -> AnalyticThreePhase:
    K = tuple(float(k) for k in K)
    a = tuple(float(age) for age in a)
    if len(K) != PHASES or len(a) != PHASES:
        raise ClosedFormError(f'The commuting closed form needs exactly {PHASES} phases')
    if min(K) <= 0 or min(a) <= 0:
        raise ClosedFormError(f'Rates and ages must be positive, got K={K}, a={a}')
    if abs(sum(a) - psi.period) > 1e-9:
        raise AgeSumError(f'Maturation ages must sum to the period {psi.period}, got {sum(a)}')
    mean = arithmetic_mean(psi)
    if abs(mean - 1) > 1e-9:
        logger.warning(f'Commuting closed form assumes a unit-mean control, got <psi> = {mean}')

    K1, K2, K3 = K
    a1, a2, a3 = a
    T = psi.period
    product = K1 * K2 * K3

    def fn(lam):
        return (K1 + lam) * (K2 + lam) * (K3 + lam) - 2 * product * math.exp(-lam * T)

    def dfn(lam):
        return ((K2 + lam) * (K3 + lam) + (K1 + lam) * (K3 + lam) + (K1 + lam) * (K2 + lam)
                + 2 * T * product * math.exp(-lam * T))

    result = increasing_root(fn, dfn, 0.0, hi=1.0)
    lam = result.root
    U = (1.0, K1 * math.exp(-lam * a2) / (K2 + lam), (K1 + lam) / (2 * K3 * math.exp(-lam * a1)))
    V = (1.0, (K1 + lam) / (K1 * math.exp(-lam * a1)), 2 * K3 * math.exp(-lam * a3) / (K3 + lam))
    residual = abs(fn(lam)) / (2 * product)
    logger.debug(f'Three-phase root {lam} after {result.iterations} iterations, residual {residual}')
    return AnalyticThreePhase(K=K, a=a, psi=psi, lam=lam, U=U, V=V, residual=residual,
                              iterations=result.iterations)


def analytic_weight(sol: AnalyticThreePhase, phase: int, t, normalized: bool = True):
    """
    w_i(t) = int_0^inf N_i phi_i dx = C (a_i + Psi-difference) + C_i.
    Normalized weights integrate to one over a period when summed over phases.

    :param sol: solved commuting configuration
    :param phase: 1, 2 or 3
    :param t: time or array of times
    """
    if phase not in (1, 2, 3):
        raise ClosedFormError(f'Phase index must be 1, 2 or 3, got {phase}')
    values = sol.C * sol.window(phase, t) + sol.phase_constants[phase - 1]
    if normalized:
        values = values / (sol.period * sol.weight_total)
    return values if np.ndim(values) else float(values)


def analytic_sensitivity(sol: AnalyticThreePhase, gamma: PeriodicFn, theta: float, phase: int = 2,
                         nodes: int = None) -> float:
    """
    First-order change of lambda per unit amplitude of the death rate
    gamma(t + theta) added to ``phase``: -int_0^T gamma(t + theta) w(t) dt.
    """
    phases, weights = quadrature_rule(gamma, nodes)
    s = phases * gamma.period - gamma.offset
    # int_0^T gamma(t + theta) w(t) dt = int_0^T gamma(s) w(s - theta) ds
    integrand = gamma(s) * analytic_weight(sol, phase, s - theta)
    return -float(np.dot(weights, integrand)) * gamma.period
