from factory import Factory, LazyAttribute, SubFactory, Trait

from monodromy.grid import GridSpec as GridSpecT
from monodromy.models import MultiPhaseModel as MultiPhaseModelT
from monodromy.models import OnePhaseModel as OnePhaseModelT
from monodromy.models import PhaseSpec as PhaseSpecT
from .controls import PeriodicFn


class OnePhaseModel(Factory):
    class Meta:
        model = OnePhaseModelT

    K0 = 2.0
    a = 1.0
    psi = SubFactory(PeriodicFn)

    class Params:
        flat = Trait(psi=SubFactory(PeriodicFn, flat=True))
        square = Trait(psi=SubFactory(PeriodicFn, square=True))
        peak = Trait(psi=SubFactory(PeriodicFn, peak=True))


class PhaseSpec(Factory):
    class Meta:
        model = PhaseSpecT

    K = 10.0
    a = 0.5
    psi = SubFactory(PeriodicFn)


class MultiPhaseModel(Factory):
    """ The reference 10 h / 12 h / 2 h cycle in units of one day """
    class Meta:
        model = MultiPhaseModelT

    class Params:
        psi = SubFactory(PeriodicFn)
        rates = (10.0, 10.0, 10.0)
        ages = (10 / 24, 12 / 24, 2 / 24)

    phases = LazyAttribute(lambda o: MultiPhaseModelT.commuting(o.rates, o.ages, o.psi).phases)


class GridSpec(Factory):
    class Meta:
        model = GridSpecT

    period = 1.0
    n_time = 96
    n_age = LazyAttribute(lambda o: 4 * o.n_time)
