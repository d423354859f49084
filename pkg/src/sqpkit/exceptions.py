"""Exception hierarchy for sqpkit.

Every error raised by this package derives from :class:`SqpError`, so callers
can catch one type.  I/O failures are reported with the interpreter's native
``OSError`` (aliased here as ``IoError``).
"""

__all__ = [
    "SqpError",
    "InvalidBounds",
    "DimensionMismatch",
    "NonFiniteInitialGuess",
    "NonFiniteFunctionValue",
    "NonPositiveScaler",
    "IterationLimit",
    "Infeasible",
    "RankDeficient",
    "Unsolvable",
    "LineSearchFailed",
    "MissingHistory",
    "HistoryMismatch",
    "FormatError",
    "InvalidVarName",
    "UnknownSeries",
    "IndexOutOfRange",
    "IoError",
]


class SqpError(Exception):
    """Base class for all sqpkit errors."""


class InvalidBounds(SqpError, ValueError):
    """A lower bound exceeds the matching upper bound."""


class DimensionMismatch(SqpError, ValueError):
    """An array or callable result has the wrong shape."""


class NonFiniteInitialGuess(SqpError, ValueError):
    """The initial guess contains NaN or infinite entries."""


class NonFiniteFunctionValue(SqpError, ArithmeticError):
    """A user callable returned NaN or an infinite value."""


class NonPositiveScaler(SqpError, ValueError):
    """A scale factor is zero, negative, or non-finite."""


class IterationLimit(SqpError, RuntimeError):
    """An active-set iteration guard tripped (possible cycling)."""


class Infeasible(SqpError, RuntimeError):
    """The constraints of a least-squares subproblem are incompatible."""


class RankDeficient(SqpError, RuntimeError):
    """A matrix that must have full rank is rank deficient at tolerance."""


class Unsolvable(SqpError, RuntimeError):
    """The QP subproblem failed even after infeasibility relaxation."""


class LineSearchFailed(SqpError, RuntimeError):
    """No acceptable step length was found (or the direction is not descent)."""


class MissingHistory(SqpError, ValueError):
    """A restart file contains no usable iterate."""


class HistoryMismatch(SqpError, ValueError):
    """A restart file was recorded for a different problem (n or m differ)."""


class FormatError(SqpError, ValueError):
    """A history file has a bad header, version, or record line."""


class InvalidVarName(SqpError, ValueError):
    """A requested save variable is not one of the allowed names."""


class UnknownSeries(SqpError, ValueError):
    """A plot selector names a variable absent from the history."""


class IndexOutOfRange(SqpError, IndexError):
    """An indexed plot selector exceeds the vector length."""


# File-system failures are reported with the interpreter's native exception.
IoError = OSError
