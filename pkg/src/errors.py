"""
Exception hierarchy shared by the library and the command-line front end.

Every exception carries the process exit code the CLI reports for it.
"""


class HomophilyError(Exception):
    """Base class for all toolkit errors"""
    exit_code = 1


class ValidationError(HomophilyError, ValueError):
    """Invalid domain values (shapes, signs, ordering)"""
    exit_code = 1


class ConfigError(HomophilyError):
    """Malformed configuration file or value"""
    exit_code = 1

    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        location = ""
        if path is not None:
            location = str(path)
            if line is not None:
                location += f":{line}"
                if column is not None:
                    location += f":{column}"
            location += ": "
        super().__init__(location + message)


class UsageError(HomophilyError):
    """Bad command-line usage"""
    exit_code = 1


class DataIOError(HomophilyError, OSError):
    """Missing, unreadable or malformed input files, unwritable outputs"""
    exit_code = 2


class NumericalError(HomophilyError, ArithmeticError):
    """Numerical failure"""
    exit_code = 3


class NonStationaryError(NumericalError):
    """Raised when rho(A/beta) >= 1, so no stationary mean intensity exists"""

    def __init__(self, spectral_radius, regime="supercritical"):
        self.spectral_radius = float(spectral_radius)
        self.regime = regime
        super().__init__(
            f"no stationary means exist: rho(A/beta) = {self.spectral_radius:.12g} ({regime})"
        )


class IllConditionedError(NumericalError):
    """I - A/beta is too ill-conditioned for a reliable stationary solve"""

    def __init__(self, condition_number):
        self.condition_number = float(condition_number)
        super().__init__(f"I - A/beta is ill-conditioned (cond = {self.condition_number:.3e})")


class SpectralConvergenceError(NumericalError):
    """Power iteration did not converge"""


class UndefinedBiasError(HomophilyError, ZeroDivisionError):
    """A bias ratio is 0/0 or a parity conditioning set is empty"""
    exit_code = 3


class PolicyError(HomophilyError):
    """A recommender policy failed to score candidates"""
    exit_code = 3
