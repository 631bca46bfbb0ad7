# coding=utf-8
"""
Exception hierarchy shared by every module of the package
"""

__license__ = "GPLv3"
__version__ = "0.1"
__status__ = "Production"


class SteklovError(Exception):
    """Base class for every error raised by pysteklov."""


class ParameterDomainError(SteklovError, ValueError):
    """A scalar parameter lies outside the domain where the quantity is defined."""


class UnsupportedOutlineError(SteklovError):
    """The operation only exists for a different outline kind."""


class GeometryError(SteklovError):
    """The annular domain is degenerate (hole touches the outline, self-intersection, ...)."""


class ResolutionError(SteklovError):
    """Requested mesh size cannot resolve a feature of the domain."""


class MeshParseError(SteklovError):
    """Malformed mesh text file."""

    def __init__(self, message, line_number):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class AssemblyError(SteklovError):
    pass


class TaggingError(SteklovError):
    pass


class SingularityError(SteklovError):
    """A sparse factorization failed or produced an unacceptable residual."""


class ConstraintError(SteklovError):
    pass


class WeightError(SteklovError):
    pass


class DimensionMismatchError(SteklovError, ValueError):
    pass


class DivisionDomainError(SteklovError, ZeroDivisionError):
    pass


class ConfigError(SteklovError):
    """Run configuration or domain JSON failed validation."""


class SolverStageError(SteklovError):
    """Wraps a solver failure with the name of the stage that failed."""

    def __init__(self, stage, cause):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause
