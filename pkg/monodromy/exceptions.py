from core.exceptions import GrowthRateError


class MonodromyError(GrowthRateError):
    default_exit_code = 2


class ModelError(MonodromyError):
    default_exit_code = 3


class GridSpecError(MonodromyError):
    default_exit_code = 3


class DimensionMismatch(MonodromyError):
    pass


class ZeroVectorError(MonodromyError):
    pass
