"""Exception hierarchy.

``DomainError`` marks bad inputs (outside an operation's domain); everything
under ``NumericError`` is a failure of the computation itself. The CLI maps
the two families to different exit codes.
"""


class NESError(Exception):
    kind = "error"


class DomainError(NESError, ValueError):
    kind = "domain"


class NumericError(NESError, ArithmeticError):
    kind = "numeric"


class SingularityError(NumericError):
    """Raised at the light cone, where |1 - sigma^2| vanishes."""

    kind = "singularity"


class BranchError(NumericError):
    """A velocity-ratio solution landed on the wrong side of 1."""

    kind = "branch"


class QuadratureError(NumericError):
    kind = "quadrature"

    def __init__(self, message, estimate=None, abserr=None):
        super().__init__(message)
        self.estimate = estimate
        self.abserr = abserr


class PoleError(NumericError):
    kind = "pole"


class WeakCouplingError(NumericError):
    kind = "weak_coupling"


class RankError(NumericError):
    kind = "rank"


class ModelError(NumericError):
    kind = "model"
