from rest_framework import serializers

from monodromy.propagators import LOSS_SCHEMES
from periodic.serializers import PeriodicFnSerializer
from .config import (CHECKS, CSV, EXPERIMENTS, JSON, MULTIPHASE, ONE_PHASE, ControlConfig, ExperimentConfig,
                     GridConfig, ModelConfig, OutputConfig, SolverConfig, SweepConfig)


def _control(attrs):
    return attrs['control'] if attrs is not None else None


class ModelConfigSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=[ONE_PHASE, MULTIPHASE], default=ONE_PHASE)
    K0 = serializers.FloatField(default=2.0, min_value=0.0)
    a = serializers.FloatField(default=1.0, min_value=0.0)
    K = serializers.ListField(child=serializers.FloatField(min_value=0.0), default=[10.0, 10.0, 10.0],
                              min_length=1)
    ages = serializers.ListField(child=serializers.FloatField(min_value=0.0), default=[10 / 24, 12 / 24, 2 / 24],
                                 min_length=1)
    commuting = serializers.BooleanField(default=True)
    death = PeriodicFnSerializer(required=False, allow_null=True, default=None)

    def validate_K0(self, value):
        if value <= 0:
            raise serializers.ValidationError('Division rate must be positive.')
        return value

    def validate_K(self, value):
        if min(value) <= 0:
            raise serializers.ValidationError('Transition rates must be positive.')
        return value

    def validate(self, attrs):
        if attrs['kind'] == MULTIPHASE:
            if len(attrs['K']) != len(attrs['ages']):
                raise serializers.ValidationError({'ages': ['Need one maturation age per transition rate.']})
            if attrs['commuting'] and len(attrs['K']) != 3:
                raise serializers.ValidationError({'K': ['The shifted-control construction needs three phases.']})
        return ModelConfig(kind=attrs['kind'], K0=attrs['K0'], a=attrs['a'], K=tuple(attrs['K']),
                           ages=tuple(attrs['ages']), commuting=attrs['commuting'], death=_control(attrs['death']))


class ControlConfigSerializer(serializers.Serializer):
    psi = PeriodicFnSerializer(required=False)
    gamma = PeriodicFnSerializer(required=False)

    def validate(self, attrs):
        defaults = ControlConfig()
        psi = _control(attrs.get('psi')) or defaults.psi
        gamma = _control(attrs.get('gamma')) or defaults.gamma
        if psi.period != gamma.period:
            raise serializers.ValidationError({'gamma': [f'Drug period {gamma.period} differs from the control '
                                                         f'period {psi.period}.']})
        return ControlConfig(psi=psi, gamma=gamma)


class GridConfigSerializer(serializers.Serializer):
    n_time = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    tail_factor = serializers.FloatField(min_value=0.0, required=False, allow_null=True, default=None)

    def validate(self, attrs):
        return GridConfig(**attrs)


class SweepConfigSerializer(serializers.Serializer):
    a_min = serializers.FloatField(min_value=0.0, default=0.85)
    a_max = serializers.FloatField(min_value=0.0, default=1.15)
    a_points = serializers.IntegerField(min_value=2, default=31)
    theta_points = serializers.IntegerField(min_value=3, required=False, allow_null=True, default=None)
    epsilons = serializers.ListField(child=serializers.FloatField(min_value=0.0), required=False, allow_null=True,
                                     default=None)
    phase = serializers.IntegerField(min_value=1, default=2)

    def validate(self, attrs):
        if attrs['a_max'] <= attrs['a_min']:
            raise serializers.ValidationError({'a_max': ['Upper end of the age range must exceed the lower end.']})
        epsilons = attrs['epsilons']
        return SweepConfig(a_min=attrs['a_min'], a_max=attrs['a_max'], a_points=attrs['a_points'],
                           theta_points=attrs['theta_points'], phase=attrs['phase'],
                           epsilons=tuple(epsilons) if epsilons is not None else None)


class SolverConfigSerializer(serializers.Serializer):
    tol = serializers.FloatField(required=False, allow_null=True, default=None)
    max_iter = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    loss_scheme = serializers.ChoiceField(choices=LOSS_SCHEMES, required=False, allow_null=True, default=None)
    jobs = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)

    def validate_tol(self, value):
        if value is not None and not 0 < value < 1:
            raise serializers.ValidationError('Tolerance must lie in (0, 1).')
        return value

    def validate(self, attrs):
        return SolverConfig(**attrs)


class OutputConfigSerializer(serializers.Serializer):
    prefix = serializers.CharField(default='growthrate')
    format = serializers.ChoiceField(choices=[CSV, JSON], default=CSV)

    def validate(self, attrs):
        return OutputConfig(**attrs)


class ExperimentConfigSerializer(serializers.Serializer):
    """
    Experiment configuration document. Every block is optional; ``save()``
    returns an ``ExperimentConfig``.
    """
    experiment = serializers.ChoiceField(choices=EXPERIMENTS)
    model = ModelConfigSerializer(required=False)
    control = ControlConfigSerializer(required=False)
    grid = GridConfigSerializer(required=False)
    sweep = SweepConfigSerializer(required=False)
    solver = SolverConfigSerializer(required=False)
    output = OutputConfigSerializer(required=False)
    seed = serializers.IntegerField(min_value=0, default=0)
    checks = serializers.ListField(child=serializers.ChoiceField(choices=CHECKS), default=list)

    def validate(self, attrs):
        model = attrs.get('model', ModelConfig())
        sweep = attrs.get('sweep', SweepConfig())
        if model.is_multiphase and not 1 <= sweep.phase <= len(model.K):
            raise serializers.ValidationError({'sweep': {'phase': [f'Phase {sweep.phase} is not one of '
                                                                   f'1..{len(model.K)}.']}})
        control = attrs.get('control', ControlConfig())
        if model.death is not None and model.death.period != control.psi.period:
            message = 'Death rate period differs from the control period.'
            raise serializers.ValidationError({'model': {'death': [message]}})
        return attrs

    def create(self, validated_data) -> ExperimentConfig:
        validated_data['checks'] = tuple(validated_data.get('checks', ()))
        return ExperimentConfig(**validated_data)
