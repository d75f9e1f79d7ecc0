"""Exception types raised across the package."""


class PSDEError(Exception):
    """Base class for all package errors."""


class SubstitutionOutOfFamily(PSDEError):
    """A coordinate map cannot be expressed inside the coefficient family."""


class SingularEvaluation(PSDEError):
    """Evaluation hit a pole of a t-factor."""


class NegativeBaseFractionalPower(PSDEError):
    """A half-integer power was evaluated on a negative base."""


class InvalidCoefficient(PSDEError):
    """A coefficient that must depend on t only involves x or p (or is zero)."""


class IndexOutOfRange(PSDEError):
    pass


class BasisNotClosed(PSDEError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NonIntegrableInFamily(PSDEError):
    """The antiderivative leaves the coefficient family (e.g. a logarithm)."""


class DegenerateMetric(PSDEError):
    pass


class SingularContraction(PSDEError):
    """A negative power of the contraction parameter survives."""


class InvalidWindow(PSDEError):
    pass


class InvalidParameter(PSDEError):
    pass


class PreconditionViolated(PSDEError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NoOperatorMatched(PSDEError):
    pass


class SingularFlow(PSDEError):
    pass


class NonConvergent(PSDEError):
    pass


class EvaluationFailure(PSDEError):
    pass


class ParseError(PSDEError):
    pass
