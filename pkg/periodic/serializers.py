from rest_framework import serializers

from .exceptions import ControlError
from .functions import KINDS, KIND_ALIASES, PeriodicFn


class PeriodicFnSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=list(KINDS) + list(KIND_ALIASES))
    params = serializers.ListField(child=serializers.FloatField(), required=False, default=list)
    period = serializers.FloatField(required=False, default=1.0)
    offset = serializers.FloatField(required=False, default=0.0)
    scale = serializers.FloatField(required=False, default=1.0)

    def validate_period(self, value):
        if value <= 0:
            raise serializers.ValidationError('Period must be positive.')
        return value

    def validate(self, attrs):
        try:
            attrs['control'] = PeriodicFn(kind=attrs['kind'], params=tuple(attrs.get('params', ())),
                                          period=attrs.get('period', 1.0), offset=attrs.get('offset', 0.0),
                                          scale=attrs.get('scale', 1.0))
        except ControlError as e:
            raise serializers.ValidationError({'params': [e.detail]})
        return attrs

    def create(self, validated_data) -> PeriodicFn:
        return validated_data['control']

    def to_representation(self, instance):
        if isinstance(instance, PeriodicFn):
            return instance.to_json()
        return super(PeriodicFnSerializer, self).to_representation(instance)
