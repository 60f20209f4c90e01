"""
T-periodic nonnegative controls.

A control is described by a shape on the unit phase interval [0, 1) plus a
period, a time offset and a multiplicative scale, so that

    f(t) = scale * shape(((t + offset) mod period) / period)

Shapes are closed forms except ``samples``, which is piecewise constant on a
uniform partition of the period.
"""
import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Sequence, Tuple, Union

import numpy as np
from django.conf import settings
from scipy.integrate import cumulative_trapezoid

from .exceptions import ControlDomainError, UnknownControlKind

logger = logging.getLogger(__name__)

SIN = 'sin'
SQUARE = 'square'
PEAK = 'peak'
CONSTANT = 'constant'
COS_POWER = 'cos-power'
SAMPLES = 'samples'

KINDS = (SIN, SQUARE, PEAK, CONSTANT, COS_POWER, SAMPLES)

KIND_ALIASES = {
    'sinusoidal': SIN,
    'custom-sampled': SAMPLES,
}

DEFAULT_PARAMS = {
    SIN: (0.9,),
    SQUARE: (1.9, 0.1, 0.5),
    PEAK: (3.0, 0.3, 0.1),
    CONSTANT: (1.0,),
    COS_POWER: (6.0, 2.0),
}

REFERENCE_CONTROLS = (SIN, SQUARE, PEAK)

# tabulation density of the periodic primitive
PRIMITIVE_NODES = 2 ** 14

Number = Union[float, np.ndarray]


def _check_sin(params):
    amplitude, = params
    if abs(amplitude) > 1:
        raise ControlDomainError(f'Sinusoidal amplitude {amplitude} makes the control negative')


def _check_square(params):
    high, low, duty = params
    if high < 0 or low < 0:
        raise ControlDomainError(f'Square wave levels must be nonnegative, got {high} and {low}')
    if not 0 < duty < 1:
        raise ControlDomainError(f'Square wave duty cycle must lie in (0, 1), got {duty}')


def _check_peak(params):
    height, width, base = params
    if height < 0 or base < 0:
        raise ControlDomainError(f'Peak height and base must be nonnegative, got {height} and {base}')
    if not 0 < 2 * width <= 1:
        raise ControlDomainError(f'Peak half-width must lie in (0, 1/2], got {width}')


def _check_constant(params):
    value, = params
    if value < 0:
        raise ControlDomainError(f'Constant control must be nonnegative, got {value}')


def _check_cos_power(params):
    power, harmonic = params
    if power <= 0 or not float(power).is_integer() or int(power) % 2:
        raise ControlDomainError(f'Cosine power must be a positive even integer, got {power}')
    if harmonic <= 0 or not float(harmonic).is_integer():
        raise ControlDomainError(f'Cosine frequency multiplier must be a positive integer, got {harmonic}')


def _check_samples(params):
    if not params:
        raise ControlDomainError('A sampled control needs at least one sample')
    if min(params) < 0:
        raise ControlDomainError('Sampled control values must be nonnegative')


_CHECKS = {
    SIN: (1, _check_sin),
    SQUARE: (3, _check_square),
    PEAK: (3, _check_peak),
    CONSTANT: (1, _check_constant),
    COS_POWER: (2, _check_cos_power),
    SAMPLES: (None, _check_samples),
}


def canonical_kind(kind: str) -> str:
    kind = KIND_ALIASES.get(kind, kind)
    if kind not in KINDS:
        raise UnknownControlKind(f'Unknown control kind "{kind}", expected one of {", ".join(KINDS)}')
    return kind


@dataclass(frozen=True)
class PeriodicFn:
    kind: str
    params: Tuple[float, ...] = ()
    period: float = 1.0
    offset: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        kind = canonical_kind(self.kind)
        params = tuple(float(p) for p in self.params) or DEFAULT_PARAMS.get(kind, ())
        if not all(math.isfinite(p) for p in params):
            raise ControlDomainError(f'Control parameters must be finite, got {params}')
        arity, check = _CHECKS[kind]
        if arity is not None and len(params) != arity:
            raise ControlDomainError(f'Control "{kind}" takes {arity} parameters, got {len(params)}')
        check(params)
        if not (math.isfinite(self.period) and self.period > 0):
            raise ControlDomainError(f'Period must be positive, got {self.period}')
        if not (math.isfinite(self.scale) and self.scale >= 0):
            raise ControlDomainError(f'Scale must be nonnegative, got {self.scale}')
        if not math.isfinite(self.offset):
            raise ControlDomainError(f'Offset must be finite, got {self.offset}')
        # normalized values bypass the frozen setattr
        object.__setattr__(self, 'kind', kind)
        object.__setattr__(self, 'params', params)
        object.__setattr__(self, 'period', float(self.period))
        object.__setattr__(self, 'offset', float(self.offset))
        object.__setattr__(self, 'scale', float(self.scale))

    def __call__(self, t: Number) -> Number:
        t = np.asarray(t, dtype=float)
        u = np.mod(t + self.offset, self.period) / self.period
        u = np.where(u >= 1.0, 0.0, u)
        values = self.scale * self.shape(u)
        return values if values.ndim else float(values)

    def shape(self, u: np.ndarray) -> np.ndarray:
        """ Unscaled profile on the phase interval [0, 1) """
        u = np.asarray(u, dtype=float)
        p = self.params
        if self.kind == SIN:
            return 1.0 + p[0] * np.cos(2 * np.pi * u)
        if self.kind == SQUARE:
            return np.where(u < p[2], p[0], p[1])
        if self.kind == PEAK:
            height, width, base = p
            rising = height * u / width
            falling = 2 * height - height * u / width
            return base + np.where(u < width, rising, np.where(u < 2 * width, falling, 0.0))
        if self.kind == CONSTANT:
            return np.full_like(u, p[0])
        if self.kind == COS_POWER:
            return np.cos(p[1] * np.pi * u) ** int(p[0])
        samples = np.asarray(p)
        index = np.minimum((u * len(samples)).astype(int), len(samples) - 1)
        return samples[index]

    @property
    def breakpoints(self) -> np.ndarray:
        """ Phases in [0, 1] where the shape is not smooth """
        if self.kind == SQUARE:
            points = [0.0, self.params[2], 1.0]
        elif self.kind == PEAK:
            width = self.params[1]
            points = [0.0, width, 2 * width, 1.0]
        elif self.kind == SAMPLES:
            points = np.linspace(0.0, 1.0, len(self.params) + 1)
        else:
            points = [0.0, 1.0]
        return np.unique(np.asarray(points, dtype=float))

    def shifted(self, offset: float) -> 'PeriodicFn':
        """ t -> f(t + offset) """
        return replace(self, offset=self.offset + offset)

    def scaled(self, factor: float) -> 'PeriodicFn':
        return replace(self, scale=self.scale * factor)

    def primitive_deviation(self, t: Number) -> Number:
        """
        Periodic primitive of the deviation from the mean, int_0^t (f - <f>) ds.
        When f is a control with unit mean this is the function Psi.
        """
        grid, table = _primitive_table(replace(self, offset=0.0))
        values = (_periodic_interp(np.asarray(t, dtype=float) + self.offset, grid, table)
                  - _periodic_interp(np.asarray(self.offset), grid, table))
        return values if np.ndim(values) else float(values)

    def to_json(self) -> dict:
        return {
            'kind': self.kind,
            'params': list(self.params),
            'period': self.period,
            'offset': self.offset,
            'scale': self.scale,
        }


def _periodic_interp(t: np.ndarray, grid: np.ndarray, table: np.ndarray) -> np.ndarray:
    period = grid[-1]
    return np.interp(np.mod(t, period), grid, table)


@lru_cache(maxsize=64)
def _primitive_table(f: PeriodicFn) -> Tuple[np.ndarray, np.ndarray]:
    mean = arithmetic_mean(f)
    grids, tables, total = [], [], 0.0
    for lo, hi in zip(f.breakpoints[:-1], f.breakpoints[1:]):
        u = np.linspace(lo, hi, max(2, int(PRIMITIVE_NODES * (hi - lo))) + 1)
        # stay inside the piece so jumps are integrated one-sidedly
        nudge = 1e-12 * (hi - lo)
        integrand = f.scale * f.shape(np.clip(u, lo + nudge, hi - nudge)) - mean
        table = total + cumulative_trapezoid(integrand, u * f.period, initial=0.0)
        total = table[-1]
        start = 1 if grids else 0
        grids.append(u[start:] * f.period)
        tables.append(table[start:])
    return np.concatenate(grids), np.concatenate(tables)


def quadrature_rule(f: PeriodicFn, nodes: int = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Composite midpoint rule on [0, 1) split at the breakpoints of ``f``.
    Returns phases and weights summing to one.
    """
    nodes = nodes or settings.QUADRATURE_NODES
    phases, weights = [], []
    for lo, hi in zip(f.breakpoints[:-1], f.breakpoints[1:]):
        count = max(1, int(round(nodes * (hi - lo))))
        width = (hi - lo) / count
        phases.append(lo + width * (np.arange(count) + 0.5))
        weights.append(np.full(count, width))
    return np.concatenate(phases), np.concatenate(weights)


def period_average(f: PeriodicFn, transform: Callable[[np.ndarray], np.ndarray] = None, nodes: int = None) -> float:
    """ (1/T) int_0^T transform(f) by breakpoint-aware midpoint quadrature """
    phases, weights = quadrature_rule(f, nodes)
    values = f.scale * f.shape(phases)
    if transform is not None:
        values = transform(values)
    return float(np.dot(weights, values))


def arithmetic_mean(f: PeriodicFn, nodes: int = None) -> float:
    return period_average(f, nodes=nodes)


def second_moment(f: PeriodicFn, nodes: int = None) -> float:
    return period_average(f, np.square, nodes)


def geometric_mean(f: PeriodicFn, nodes: int = None) -> float:
    """ exp((1/T) int_0^T log f), defined for strictly positive controls only """
    phases, _ = quadrature_rule(f, nodes)
    lowest = float(np.min(f.scale * f.shape(phases)))
    if lowest <= 0:
        raise ControlDomainError(f'Geometric mean needs a strictly positive control, sampled minimum is {lowest}')
    return math.exp(period_average(f, np.log, nodes))


def zero_fraction(f: PeriodicFn, nodes: int = None) -> float:
    """ Share of the period on which f vanishes, by the same quadrature as the means """
    phases, weights = quadrature_rule(f, nodes)
    return float(np.dot(weights, f.scale * f.shape(phases) == 0))


def is_unit_mean(f: PeriodicFn, tolerance: float = 1e-9) -> bool:
    return abs(arithmetic_mean(f) - 1.0) < tolerance


def make_reference_psi(kind: str, params: Sequence[float] = None, period: float = 1.0) -> PeriodicFn:
    """
    Builds one of the reference division controls

    :param kind: sin, square, peak or constant (samples and cos-power are accepted too)
    :param params: shape parameters, kind defaults when omitted
    :param period: control period
    :return: the control
    """
    return PeriodicFn(kind=kind, params=tuple(params or ()), period=period)


def make_drug_profile(harmonic: int = 1, power: int = 6, period: float = 1.0) -> PeriodicFn:
    """
    cos^power(harmonic * pi * t / T). The default has a first harmonic and is the
    chronotherapy reference; ``harmonic=2`` gives cos^6(2 pi t) with the same mean.
    """
    return PeriodicFn(kind=COS_POWER, params=(power, harmonic), period=period)


def sampled(values: Sequence[float], period: float = 1.0) -> PeriodicFn:
    return PeriodicFn(kind=SAMPLES, params=tuple(values), period=period)
