from core.exceptions import GrowthRateError


class ControlError(GrowthRateError):
    default_exit_code = 3


class UnknownControlKind(ControlError):
    pass


class ControlDomainError(ControlError):
    pass
