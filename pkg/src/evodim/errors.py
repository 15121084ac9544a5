"""Exception hierarchy.

``ValidationError`` subclasses signal bad input (CLI exit code 2);
``NumericalError`` subclasses signal that the data cannot support the
requested computation (CLI exit code 3).
"""


class EvodimError(Exception):
    """Base class for all package errors."""


class ValidationError(EvodimError, ValueError):
    """An input violates a type invariant.

    ``invariant`` names the violated condition and ``residual`` is the
    measured violation, when one exists.
    """

    def __init__(self, message, invariant=None, residual=None):
        super().__init__(message)
        self.invariant = invariant
        self.residual = residual


class NumericalError(EvodimError, ArithmeticError):
    """The computation is not possible for the given data."""


class SequenceTooShort(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class InvalidParameter(ValidationError):
    pass


class InconsistentDimension(ValidationError):
    """A claimed Hilbert-space dimension is refuted by the data."""


class NonRealSequence(ValidationError):
    pass


class NotAContraction(ValidationError):
    pass


class OutsideConvergence(ValidationError):
    pass


class PoleOutsideDisc(ValidationError):
    pass


class RankDeficiencyNotReached(NumericalError):
    """The Hankel matrix has full numerical rank; more data is needed."""


class UnboundedRealization(NumericalError):
    """The realization generates an unbounded sequence."""


class UnitCircleJordanBlock(UnboundedRealization):
    """A (near) unimodular eigenvalue carries a nontrivial Jordan block."""


class NearPole(NumericalError):
    pass
