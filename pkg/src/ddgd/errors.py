"""Exception hierarchy shared by the library and the CLI."""


class DDGDError(Exception):
    """Base class for all package errors."""


class InputError(DDGDError, ValueError):
    """Invalid user input: bad config keys, ids, dimensions, weights."""


class WeightValidationError(InputError):
    """A weight matrix is not row/column stochastic or has the wrong pattern.

    ``axis`` is ``"row"`` or ``"column"`` and ``index`` is the 1-based offending
    row/column, when known.
    """

    def __init__(self, message, axis=None, index=None):
        super().__init__(message)
        self.axis = axis
        self.index = index


class NumericError(DDGDError, ArithmeticError):
    """Numerical failure: eigensolver trouble, vanishing push-sum weights."""


class CertificationError(NumericError):
    """The augmented matrix does not have a simple unit eigenvalue."""


class FitError(NumericError):
    """Geometric decay fit failed (distances not decreasing)."""
