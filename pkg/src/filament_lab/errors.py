"""Exception hierarchy.

Each class carries the CLI exit code it maps to, so front ends do not need a
lookup table.
"""


class FilamentLabError(Exception):
    exit_code = 1


class InvalidInputError(FilamentLabError, ValueError):
    """Rejected input (bad constants, bad grid size, malformed files)."""

    exit_code = 2


class ConfigError(InvalidInputError):
    exit_code = 2


class NumericalError(FilamentLabError, ArithmeticError):
    exit_code = 3


class ProjectionError(NumericalError):
    """Alternating projection did not reach the constraint surface."""

    def __init__(self, message, unit_norm_residual=None, mean_residual=None):
        super().__init__(message)
        self.unit_norm_residual = unit_norm_residual
        self.mean_residual = mean_residual


class StepFailure(NumericalError):
    """A time step produced a near-zero sample (gross instability)."""


class ConvergenceError(NumericalError):
    """Implicit-midpoint fixed-point iteration did not converge."""

    def __init__(self, message, contraction=None):
        super().__init__(message)
        self.contraction = contraction


class EvolutionAborted(NumericalError):
    """A step failed during ``evolve``; ``trajectory`` holds what was computed."""

    def __init__(self, message, trajectory=None, cause=None):
        super().__init__(message)
        self.trajectory = trajectory
        self.cause = cause


class DegenerateError(FilamentLabError):
    exit_code = 4


class DegenerateInputError(DegenerateError, ProjectionError):
    """A zero-length sample was met while normalizing."""

    exit_code = 4


class DegenerateGeometryError(DegenerateError):
    """Tangent vanishes somewhere on the curve."""


class DegenerateDirectionError(DegenerateError):
    """|f| is too small for the direction n_f to be defined."""


class NotInOmegaError(FilamentLabError, ValueError):
    """The (q, p, j) point violates the collinearity constraint."""

    exit_code = 4


class InapplicableOracleError(FilamentLabError):
    """An oracle was asked to judge an input outside its domain."""

    exit_code = 4
