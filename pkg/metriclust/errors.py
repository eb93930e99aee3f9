"""
Exceptions raised by metriclust. Every error carries the process exit code
that the command line reports for it.
"""


class MetriclustError(ValueError):
    """Base class for all metriclust errors."""
    exit_code = 1


class ConfigError(MetriclustError):
    """Invalid parameters or run configuration."""
    exit_code = 2

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class DataError(MetriclustError):
    """Empty, malformed or inconsistent data."""
    exit_code = 3


class NumericalError(MetriclustError):
    """A numerical procedure could not produce a valid result."""
    exit_code = 4


class SingularMatrixError(NumericalError):
    """Raised by `invert_spd` so callers can fall back to a pseudo-inverse."""
