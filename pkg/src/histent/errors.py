"""Exception hierarchy.

Data problems (bad input files, invalid parameters) derive from
:class:`DataError`; numerical breakdowns derive from :class:`NumericalError`.
The CLI maps the two families to distinct exit codes.
"""


class HistentError(Exception):
    """Base class for all package errors."""


class DataError(HistentError, ValueError):
    pass


class NumericalError(HistentError, ArithmeticError):
    pass


class EmptySeries(DataError):
    pass


class NonPositivePrice(DataError):
    pass


class NonPositiveSigma(DataError):
    pass


class NonFiniteInput(DataError):
    pass


class NonPositiveExponent(DataError):
    pass


class NonPositiveQ(DataError):
    pass


class WrongBase(DataError):
    pass


class MissingColumn(DataError):
    pass


class UnparseableDate(DataError):
    pass


class UnparseableValue(DataError):
    pass


class DuplicateDate(DataError):
    pass


class EmptyFile(DataError):
    pass


class EmptyIntersection(DataError):
    pass


class InsufficientRecords(DataError):
    pass


class InsufficientOverlap(DataError):
    pass


class IoFailure(HistentError, OSError):
    pass


class IndefiniteMatrix(NumericalError):
    """An eigenvalue fell below the negative clamping window."""


class InternalMajorizationViolation(NumericalError):
    pass


class ConvergenceError(NumericalError):
    pass
