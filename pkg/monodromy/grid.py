import logging
import math
from dataclasses import dataclass

from django.conf import settings

from .exceptions import GridSpecError

logger = logging.getLogger(__name__)

# relative slack when placing an age on the lattice
NODE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class GridSpec:
    """
    Lattice with dt = dx = period / n_time and ages 0..n_age * dx.
    """
    period: float
    n_time: int
    n_age: int

    def __post_init__(self):
        if not (math.isfinite(self.period) and self.period > 0):
            raise GridSpecError(f'Grid period must be positive, got {self.period}')
        if self.n_time < 1:
            raise GridSpecError(f'Need at least one time step per period, got n_time={self.n_time}')
        if self.n_age + 1 <= self.n_time:
            raise GridSpecError(f'Primitivity needs n_age + 1 > n_time, got n_age={self.n_age}, n_time={self.n_time}')
        object.__setattr__(self, 'period', float(self.period))
        object.__setattr__(self, 'n_time', int(self.n_time))
        object.__setattr__(self, 'n_age', int(self.n_age))

    @property
    def dt(self) -> float:
        return self.period / self.n_time

    @property
    def dx(self) -> float:
        return self.dt

    @property
    def max_age(self) -> float:
        return self.n_age * self.dx

    def maturation_index(self, a: float) -> int:
        """ First node i with i * dx >= a """
        return max(0, math.ceil(a / self.dx - NODE_TOLERANCE))

    def on_node(self, a: float) -> bool:
        return abs(a / self.dx - round(a / self.dx)) < NODE_TOLERANCE

    def check_model(self, model):
        if abs(model.period - self.period) > NODE_TOLERANCE * self.period:
            raise GridSpecError(f'Grid period {self.period} differs from the control period {model.period}')
        needed = self.maturation_index(model.max_age) + 2
        if self.n_age < needed:
            raise GridSpecError(f'Age range {self.max_age} must exceed the maturation age {model.max_age} '
                                f'by two cells: need n_age >= {needed}, got {self.n_age}')

    @classmethod
    def for_model(cls, model, n_time: int = None, tail_factor: float = None) -> 'GridSpec':
        """
        Truncates ages at max(a) + tail_factor / min(K), which leaves the
        post-maturation survival below exp(-tail_factor).
        """
        n_time = n_time or settings.DEFAULT_N_TIME
        tail_factor = settings.AGE_TAIL_FACTOR if tail_factor is None else tail_factor
        if tail_factor < 0:
            raise GridSpecError(f'Age tail factor must be nonnegative, got {tail_factor}')
        dx = model.period / n_time
        reach = model.max_age + tail_factor / model.min_rate
        n_age = max(math.ceil(reach / dx - NODE_TOLERANCE), math.ceil(model.max_age / dx - NODE_TOLERANCE) + 2,
                    n_time)
        grid = cls(period=model.period, n_time=n_time, n_age=n_age)
        for age in {spec.a for spec in model.as_multiphase().phases}:
            if not grid.on_node(age):
                logger.debug(f'Maturation age {age} is not on the lattice, rounded up to '
                             f'{grid.maturation_index(age) * dx}')
        return grid
