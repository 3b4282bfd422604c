"""Exception hierarchy shared by the library and the CLI."""


class HedgeError(Exception):
    """Base class for all library errors."""


class InvalidLotteryError(HedgeError, ValueError):
    """Raised when outcomes or probabilities do not form a valid lottery."""


class DegenerateLotteryError(HedgeError, ValueError):
    """Raised when an operation needs a lottery with at least two outcomes."""


class SolverError(HedgeError, ArithmeticError):
    """Base class for root-finding failures."""


class NoSignChangeError(SolverError):
    """The bracket endpoints do not straddle a root."""


class MaxIterExceededError(SolverError):
    """The root finder ran out of iterations before converging."""


class RejectionBudgetExceeded(HedgeError, RuntimeError):
    """A rejection sampler hit its cap of consecutive rejections."""


class SpecParseError(HedgeError, ValueError):
    """A preference or sampler text encoding could not be parsed."""
