"""Exception and warning types raised by the solver."""


class ParameterDomainError(ValueError):
    """A model or discretization parameter lies outside its admissible range."""


class ShapeError(ValueError):
    """Array dimensions do not match the operator or state they are combined with."""


class CapabilityError(RuntimeError):
    """The requested backend cannot handle a problem of this size."""


class ConvergenceError(RuntimeError):
    """An iterative method stopped before reaching its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NumericalError(FloatingPointError):
    """Non-finite values appeared during time stepping."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class ConfigError(ValueError):
    """Experiment configuration could not be parsed or validated."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DegeneracyWarning(RuntimeWarning):
    """The coefficient matrix of a low-rank state is numerically singular."""
