"""Exception types shared across the package."""


class DomainError(ValueError):
    """Inputs lie outside the mathematical domain of an operation."""


class NoPeakError(DomainError):
    """The trajectory contains no success-probability peak at the requested height."""


class ConvergenceError(RuntimeError):
    """An iterative scheme could not reach the requested tolerance.

    The best available estimate is attached so callers can decide whether
    to accept it anyway.
    """

    def __init__(self, message: str, estimate: float | None = None):
        super().__init__(message)
        self.estimate = estimate
