"""Exception hierarchy. CLI exit codes hang off these classes."""


class DipbatError(Exception):
    exit_code = 1


class ConfigurationError(DipbatError, ValueError):
    """Invalid parameters, bounds, config file entries or scenario layout."""

    exit_code = 2


class NumericalError(DipbatError, ArithmeticError):
    """Degenerate parameters, singular matrices, failed eigen-solves."""

    exit_code = 3


class DegenerateParametersError(NumericalError):
    pass


class SynthesisError(NumericalError):
    """Pole placement could not be carried out (e.g. uncontrollable pair)."""


class DivergenceError(DipbatError):
    """A simulated state became non-finite."""

    exit_code = 4

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time
