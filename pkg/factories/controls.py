from factory import Factory, Trait

from periodic.functions import PeriodicFn as PeriodicFnT


class PeriodicFn(Factory):
    class Meta:
        model = PeriodicFnT

    kind = 'sin'
    params = (0.9,)
    period = 1.0

    class Params:
        square = Trait(kind='square', params=(1.9, 0.1, 0.5))
        peak = Trait(kind='peak', params=(3.0, 0.3, 0.1))
        flat = Trait(kind='constant', params=(1.0,))
        drug = Trait(kind='cos-power', params=(6.0, 1.0))
