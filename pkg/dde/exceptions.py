from core.exceptions import GrowthRateError


class DdeError(GrowthRateError):
    default_exit_code = 3


class NonCommensurateStep(DdeError):
    pass


class NegativePopulation(DdeError):
    default_exit_code = 4


class InsufficientPeriods(DdeError):
    pass
