from core.exceptions import GrowthRateError


class ClosedFormError(GrowthRateError):
    default_exit_code = 2


class BracketError(ClosedFormError):
    pass


class AgeSumError(ClosedFormError):
    pass
