"""Exception hierarchy."""


class QWBoostError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(QWBoostError, ValueError):
    pass


class InvalidFamilyError(QWBoostError, ValueError):
    """Graph is not of the family an operation requires (or not regular)."""


class DimensionError(QWBoostError, ValueError):
    pass


class ConsistencyError(QWBoostError, ArithmeticError):
    """A numerical or structural consistency check failed."""


class DegenerateSolverError(ConsistencyError):
    """The 2x2 perturbation block has no usable splitting."""
