class PredInfoError(Exception):
    """Base class for all errors raised by predinfo."""

    exit_code = 1


class InputError(PredInfoError, ValueError):
    """Malformed or out-of-contract input (CLI exit code 2)."""

    exit_code = 2


class NumericalError(PredInfoError, ArithmeticError):
    """A numerical routine failed to meet its accuracy contract (exit code 3)."""

    exit_code = 3


class NonStationaryError(InputError):
    def __init__(self, radius, message=None):
        self.radius = float(radius)
        super().__init__(
            message or f"model is not stationary: spectral radius {self.radius:.6g} >= 1"
        )


class NotPositiveDefiniteError(InputError):
    pass


class SingularMatrixError(NumericalError):
    pass


class ConsistencyError(NumericalError):
    """An information identity was violated beyond tolerance."""
