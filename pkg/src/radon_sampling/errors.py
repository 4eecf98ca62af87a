"""Exception types shared by the numerical and simulation modules."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of a function."""


class ConfigError(ValueError):
    """An experiment or table was requested with inconsistent parameters."""


class NumericalError(RuntimeError):
    """An iterative routine failed to converge."""
