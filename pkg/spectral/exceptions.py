from core.exceptions import GrowthRateError


class SpectralError(GrowthRateError):
    default_exit_code = 4


class ConvergenceError(SpectralError):

    def __init__(self, msg, residual: float, iterations: int, exit_code: int = None):
        super(ConvergenceError, self).__init__(msg, exit_code)
        self.residual = residual
        self.iterations = iterations


class NonPrimitiveError(SpectralError):
    pass


class AdjointMismatchError(SpectralError):
    pass


class GaugeShiftError(SpectralError):
    default_exit_code = 3
