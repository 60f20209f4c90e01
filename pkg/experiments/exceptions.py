from core.exceptions import GrowthRateError


class ConfigurationError(GrowthRateError):
    default_exit_code = 2


class ValidationFailed(GrowthRateError):
    default_exit_code = 5


class IncompleteRun(GrowthRateError):
    default_exit_code = 4
