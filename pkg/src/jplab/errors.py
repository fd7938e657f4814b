"""Exception hierarchy shared by all jplab modules."""


class JplabError(Exception):
    """Base class for every error raised by jplab."""


class ConfigError(JplabError, ValueError):
    """Malformed or inconsistent configuration."""


class DimensionError(JplabError, ValueError):
    """Operands with incompatible shapes."""


class UnsupportedOrderError(JplabError, ValueError):
    """Regularization order outside the supported range."""


class NearSingularError(JplabError, ArithmeticError):
    """A matrix to be inverted is numerically singular.

    Attributes
    ----------
    condition : float
        Estimated 2-norm condition number.
    """

    def __init__(self, message, condition=float("inf")):
        super().__init__(message)
        self.condition = condition


class AccuracyEnvelopeError(JplabError, ValueError):
    """Arguments lie outside the range where accuracy is guaranteed."""


class ZeroCrossingError(JplabError, ArithmeticError):
    """Phase tracking failed because the function (nearly) vanishes.

    Attributes
    ----------
    bracket : tuple of float
        Path parameters enclosing the offending point.
    """

    def __init__(self, message, bracket=(float("nan"), float("nan"))):
        super().__init__(message)
        self.bracket = tuple(bracket)


class StiffnessError(JplabError, ArithmeticError):
    """Adaptive integrator step size underflowed."""


class EigenvalueHitError(JplabError, ArithmeticError):
    """Spectral parameter coincides with an eigenvalue (to working precision)."""


class TruncationWarning(UserWarning):
    """Mode truncation too small for the requested spectral window."""


class ConvergenceWarning(UserWarning):
    """A golden or reference quantity is outside its verified range."""


class TruncationError(JplabError, ValueError):
    """Angular-mode truncation cannot resolve the requested spectral window."""


class VerificationError(JplabError, ArithmeticError):
    """An internal cross-check failed."""
