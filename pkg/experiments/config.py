"""
Immutable experiment configuration, as produced by the config serializers.
"""
from dataclasses import dataclass, replace
from typing import Optional, Tuple, Union

from monodromy.models import MultiPhaseModel, OnePhaseModel, PhaseSpec
from periodic.functions import PeriodicFn, make_drug_profile, make_reference_psi

FLOQUET = 'floquet'
PERRON = 'perron'
SWEEP_A = 'sweep-a'
CHRONO = 'chrono'
VALIDATE = 'validate'

EXPERIMENTS = (FLOQUET, PERRON, SWEEP_A, CHRONO, VALIDATE)

ONE_PHASE = 'one-phase'
MULTIPHASE = 'multiphase'

CSV = 'csv'
JSON = 'json'

CHECKS = (
    'period-equality',
    'period-local-sign',
    'slope-gap',
    'geometric-bound',
    'perron-positivity',
    'gauge-shift',
    'three-phase-analytic',
    'chrono-optimum',
    'chrono-first-order',
    'oracle-triangle',
    'discrete-structure',
)


@dataclass(frozen=True)
class ModelConfig:
    kind: str = ONE_PHASE
    K0: float = 2.0
    a: float = 1.0
    K: Tuple[float, ...] = (10.0, 10.0, 10.0)
    ages: Tuple[float, ...] = (10 / 24, 12 / 24, 2 / 24)
    commuting: bool = True
    death: Optional[PeriodicFn] = None

    @property
    def is_multiphase(self) -> bool:
        return self.kind == MULTIPHASE


@dataclass(frozen=True)
class ControlConfig:
    psi: PeriodicFn = make_reference_psi('sin')
    gamma: PeriodicFn = make_drug_profile()


@dataclass(frozen=True)
class GridConfig:
    n_time: Optional[int] = None
    tail_factor: Optional[float] = None


@dataclass(frozen=True)
class SweepConfig:
    a_min: float = 0.85
    a_max: float = 1.15
    a_points: int = 31
    theta_points: Optional[int] = None
    epsilons: Optional[Tuple[float, ...]] = None
    phase: int = 2


@dataclass(frozen=True)
class SolverConfig:
    tol: Optional[float] = None
    max_iter: Optional[int] = None
    loss_scheme: Optional[str] = None
    jobs: Optional[int] = None


@dataclass(frozen=True)
class OutputConfig:
    prefix: str = 'growthrate'
    format: str = CSV


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    model: ModelConfig = ModelConfig()
    control: ControlConfig = ControlConfig()
    grid: GridConfig = GridConfig()
    sweep: SweepConfig = SweepConfig()
    solver: SolverConfig = SolverConfig()
    output: OutputConfig = OutputConfig()
    seed: int = 0
    checks: Tuple[str, ...] = ()

    def build_model(self, a: float = None) -> Union[OnePhaseModel, MultiPhaseModel]:
        """
        The configured model; ``a`` replaces the one-phase maturation age.
        """
        model = self.model
        deaths = (model.death,) if model.death is not None else ()
        psi = self.control.psi
        if not model.is_multiphase:
            return OnePhaseModel(K0=model.K0, a=model.a if a is None else a, psi=psi, deaths=deaths)
        if model.commuting:
            built = MultiPhaseModel.commuting(model.K, model.ages, psi)
        else:
            built = MultiPhaseModel(phases=tuple(PhaseSpec(K=k, a=age, psi=psi) for k, age in zip(model.K, model.ages)))
        if model.death is not None:
            built = built.with_extra_death(model.death)
        return built

    def with_experiment(self, experiment: str) -> 'ExperimentConfig':
        return replace(self, experiment=experiment)
