"""Exception hierarchy shared by every module of the package."""


class BshError(Exception):
    """Base class for all library errors."""


class StructureError(BshError):
    """Malformed structure description."""


class RepeatedVertexInEdge(StructureError):
    pass


class UnknownVertex(StructureError):
    pass


class ArityMismatch(StructureError):
    pass


class SignatureError(StructureError):
    pass


class SignatureMismatch(BshError):
    pass


class NotDisjointOverBase(BshError):
    pass


class BaseNotInduced(BshError):
    pass


class NotNested(BshError):
    pass


class NotInKalpha(BshError):
    pass


class BaseRankNotPositive(BshError):
    pass


class BaseNotStrong(BshError):
    pass


class EmptyBody(BshError):
    pass


class NegativeTarget(BshError):
    pass


class PreconditionRankOrder(BshError):
    pass


class NotANugget(BshError):
    pass


class RankTooLow(BshError):
    pass


class OracleBoundExceeded(BshError):
    pass


class UnknownSuite(BshError):
    pass


class BudgetExhausted(BshError):
    """Raised when a bounded search gives up. ``stats`` carries search counters."""

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = dict(stats or {})


class CertificationFailed(BshError):
    """A constructed object did not pass its own certificate check (a bug)."""
