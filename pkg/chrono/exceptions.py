from core.exceptions import GrowthRateError


class ChronoError(GrowthRateError):
    default_exit_code = 3


class UnknownEpsilon(ChronoError):
    pass
