"""
One-phase stationary problems: the Perron eigenvalue of the time-averaged
division model and its geometric-mean variant, both roots of

    (lambda + K0) exp(lambda a) = 2 K0 g

with g = 1 (Perron) or g = geometric mean of the control.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from periodic.functions import PeriodicFn, arithmetic_mean, geometric_mean, second_moment, zero_fraction
from .exceptions import ClosedFormError
from .roots import increasing_root

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PerronResult:
    lam: float
    residual: float
    iterations: int


def _check_inputs(K0: float, a: float):
    if not (math.isfinite(K0) and math.isfinite(a)):
        raise ClosedFormError(f'Non-finite model parameters K0={K0}, a={a}')
    if K0 <= 0:
        raise ClosedFormError(f'Division rate must be positive, got K0={K0}')
    if a < 0:
        raise ClosedFormError(f'Maturation age must be nonnegative, got a={a}')


def _solve(K0: float, a: float, gain: float) -> PerronResult:
    def fn(lam):
        return (lam + K0) * math.exp(lam * a) - 2 * K0 * gain

    def dfn(lam):
        return (1 + (lam + K0) * a) * math.exp(lam * a)

    lo = -K0 + 1e-12 * max(1.0, K0)
    result = increasing_root(fn, dfn, lo, hi=max(1.0, K0))
    lam = result.root
    residual = abs((lam + K0) / (2 * K0 * gain) * math.exp(lam * a) - 1)
    return PerronResult(lam=lam, residual=residual, iterations=result.iterations)


def _death_mean(death: PeriodicFn = None) -> float:
    return arithmetic_mean(death) if death is not None else 0.0


def solve_perron_one_phase(K0: float, a: float, death: PeriodicFn = None) -> PerronResult:
    """
    Perron eigenvalue of the averaged one-phase model. A periodic death rate
    enters through its arithmetic mean only.
    """
    _check_inputs(K0, a)
    result = _solve(K0, a, 1.0)
    shift = _death_mean(death)
    if shift:
        result = PerronResult(lam=result.lam - shift, residual=result.residual, iterations=result.iterations)
    return result


def solve_geometric_one_phase(K0: float, a: float, psi: PeriodicFn, death: PeriodicFn = None) -> PerronResult:
    """
    Growth rate obtained when the birth rate is replaced by its geometric
    average. A control that is off on part of the period has geometric mean
    zero, and the root is then its limit -K0.
    """
    _check_inputs(K0, a)
    shift = _death_mean(death)
    off = zero_fraction(psi)
    if off > 0:
        logger.info(f'Control vanishes on {off:.3g} of the period, geometric growth rate is the limit -K0')
        return PerronResult(lam=-K0 - shift, residual=0.0, iterations=0)
    result = _solve(K0, a, geometric_mean(psi))
    if shift:
        result = PerronResult(lam=result.lam - shift, residual=result.residual, iterations=result.iterations)
    return result


def perron_eigenfunction(K0: float, a: float, x):
    """ Stationary age profile normalized to one at age zero """
    _check_inputs(K0, a)
    decay = solve_perron_one_phase(K0, a).lam
    x = np.asarray(x, dtype=float)
    values = np.where(x < a, np.exp(-decay * x), np.exp(-(decay + K0) * x + K0 * a))
    return values if values.ndim else float(values)


def _slope_denominator(K0: float, T: float, lam: float) -> float:
    return T + math.exp(lam * T) / (2 * K0)


def perron_slope_at_T(K0: float, T: float) -> float:
    """ d lambda_P / d a evaluated at a = T """
    if T <= 0:
        raise ClosedFormError(f'Period must be positive, got T={T}')
    lam = solve_perron_one_phase(K0, T).lam
    return -lam / _slope_denominator(K0, T, lam)


def _warn_unless_unit_mean(psi: PeriodicFn):
    mean = arithmetic_mean(psi)
    if abs(mean - 1) > 1e-9:
        logger.warning(f'Slope formulas assume a unit-mean control, got <psi> = {mean}')


def floquet_slope_gap_at_T(K0: float, T: float, psi: PeriodicFn) -> float:
    """ lambda_P'(T) - lambda_F'(T), positive unless psi is constant """
    if T <= 0:
        raise ClosedFormError(f'Period must be positive, got T={T}')
    _warn_unless_unit_mean(psi)
    lam = solve_perron_one_phase(K0, T).lam
    return lam * (second_moment(psi) - 1) / _slope_denominator(K0, T, lam)


def floquet_slope_at_T(K0: float, T: float, psi: PeriodicFn) -> float:
    """ d lambda_F / d a at a = T """
    if T <= 0:
        raise ClosedFormError(f'Period must be positive, got T={T}')
    _warn_unless_unit_mean(psi)
    lam = solve_perron_one_phase(K0, T).lam
    return -lam * second_moment(psi) / _slope_denominator(K0, T, lam)
