"""
Parameter bundles of the age-structured division models.

Phases are numbered from 1 in every public signature; phase I closes the cycle
onto phase 1 through division, which doubles the newborn flux.
"""
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

from periodic.functions import PeriodicFn
from .exceptions import ModelError


@dataclass(frozen=True)
class Therapy:
    """ Death rate epsilon * gamma(t + theta) acting on one phase """
    phase: int
    epsilon: float
    theta: float
    gamma: PeriodicFn

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and self.epsilon >= 0):
            raise ModelError(f'Therapy amplitude must be nonnegative, got {self.epsilon}')
        if not math.isfinite(self.theta):
            raise ModelError(f'Therapy offset must be finite, got {self.theta}')

    @property
    def rate(self) -> PeriodicFn:
        return self.gamma.shifted(self.theta).scaled(self.epsilon)


@dataclass(frozen=True)
class PhaseSpec:
    K: float
    a: float
    psi: PeriodicFn
    deaths: Tuple[PeriodicFn, ...] = ()

    def __post_init__(self):
        if not (math.isfinite(self.K) and self.K > 0):
            raise ModelError(f'Transition rate must be positive, got K={self.K}')
        if not (math.isfinite(self.a) and self.a >= 0):
            raise ModelError(f'Maturation age must be nonnegative, got a={self.a}')
        object.__setattr__(self, 'K', float(self.K))
        object.__setattr__(self, 'a', float(self.a))
        object.__setattr__(self, 'deaths', tuple(self.deaths))


@dataclass(frozen=True)
class MultiPhaseModel:
    phases: Tuple[PhaseSpec, ...]
    therapy: Optional[Therapy] = None

    def __post_init__(self):
        phases = tuple(self.phases)
        if not phases:
            raise ModelError('A model needs at least one phase')
        periods = {spec.psi.period for spec in phases}
        periods.update(death.period for spec in phases for death in spec.deaths)
        if self.therapy is not None:
            periods.add(self.therapy.gamma.period)
            if not 1 <= self.therapy.phase <= len(phases):
                raise ModelError(f'Therapy phase {self.therapy.phase} is not one of 1..{len(phases)}')
        if len(periods) != 1:
            raise ModelError(f'All controls must share one period, got {sorted(periods)}')
        object.__setattr__(self, 'phases', phases)

    @classmethod
    def commuting(cls, K: Sequence[float], a: Sequence[float], psi: PeriodicFn) -> 'MultiPhaseModel':
        """
        Three phases with psi_1 = psi, psi_2 = psi(. - a_2), psi_3 = psi(. - a_2 - a_3).
        """
        if len(K) != 3 or len(a) != 3:
            raise ModelError('The shifted-control construction needs exactly three phases')
        controls = (psi, psi.shifted(-a[1]), psi.shifted(-a[1] - a[2]))
        return cls(phases=tuple(PhaseSpec(K=k, a=age, psi=control) for k, age, control in zip(K, a, controls)))

    @property
    def n_phases(self) -> int:
        return len(self.phases)

    @property
    def period(self) -> float:
        return self.phases[0].psi.period

    @property
    def max_age(self) -> float:
        return max(spec.a for spec in self.phases)

    @property
    def min_rate(self) -> float:
        return min(spec.K for spec in self.phases)

    def with_therapy(self, phase: int, epsilon: float, theta: float, gamma: PeriodicFn) -> 'MultiPhaseModel':
        return replace(self, therapy=Therapy(phase=phase, epsilon=epsilon, theta=theta, gamma=gamma))

    def without_therapy(self) -> 'MultiPhaseModel':
        return replace(self, therapy=None)

    def with_extra_death(self, gamma: PeriodicFn, phase: int = None) -> 'MultiPhaseModel':
        """ Adds an age-independent death rate to one phase, or to every phase when ``phase`` is None """
        phases = tuple(
            replace(spec, deaths=spec.deaths + (gamma,)) if phase is None or index == phase else spec
            for index, spec in enumerate(self.phases, start=1)
        )
        return replace(self, phases=phases)

    def loss_rates(self, phase: int) -> Tuple[PeriodicFn, ...]:
        """ Age-independent death rates acting on ``phase``, therapy included """
        rates = self.phases[phase - 1].deaths
        if self.therapy is not None and self.therapy.phase == phase and self.therapy.epsilon > 0:
            rates = rates + (self.therapy.rate,)
        return rates

    def as_multiphase(self) -> 'MultiPhaseModel':
        return self


@dataclass(frozen=True)
class OnePhaseModel:
    K0: float
    a: float
    psi: PeriodicFn
    deaths: Tuple[PeriodicFn, ...] = ()
    therapy: Optional[Therapy] = None

    def __post_init__(self):
        object.__setattr__(self, 'deaths', tuple(self.deaths))
        self.as_multiphase()

    def as_multiphase(self) -> MultiPhaseModel:
        return MultiPhaseModel(phases=(PhaseSpec(K=self.K0, a=self.a, psi=self.psi, deaths=self.deaths),),
                               therapy=self.therapy)

    @property
    def n_phases(self) -> int:
        return 1

    @property
    def period(self) -> float:
        return self.psi.period

    @property
    def max_age(self) -> float:
        return self.a

    @property
    def min_rate(self) -> float:
        return self.K0

    def with_therapy(self, epsilon: float, theta: float, gamma: PeriodicFn, phase: int = 1) -> 'OnePhaseModel':
        return replace(self, therapy=Therapy(phase=phase, epsilon=epsilon, theta=theta, gamma=gamma))

    def without_therapy(self) -> 'OnePhaseModel':
        return replace(self, therapy=None)

    def with_extra_death(self, gamma: PeriodicFn, phase: int = None) -> 'OnePhaseModel':
        return replace(self, deaths=tuple(self.deaths) + (gamma,))

    def with_age(self, a: float) -> 'OnePhaseModel':
        return replace(self, a=a)
