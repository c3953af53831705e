"""Exception hierarchy shared by all modules."""


class DynError(Exception):
    """Base class for every error raised by dynrays."""


class DomainError(DynError, ValueError):
    """An argument lies outside the domain of the operation."""


class OverflowGuard(DynError, OverflowError):
    """A computation would leave the double-precision range.

    The caller should treat the point as escaped, or shrink the problem.
    """


class BranchDomainError(DynError, ValueError):
    """The target value lies on (or too close to) the slit of an inverse branch."""

    def __init__(self, message, depth=None):
        super().__init__(message)
        self.depth = depth


class VerificationError(DynError, ArithmeticError):
    """A round-trip check failed; indicates a branch-selection bug."""


class DegenerateFit(DynError, ValueError):
    """Not enough information to fit a scaling law."""


class InfeasibleRemoval(DynError, ValueError):
    """A Cantor removal step is longer than its host interval."""


class GeometryError(DynError, ValueError):
    """A construction schedule produces overlapping pieces."""


class ConfigError(DynError, ValueError):
    """A configuration file could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
