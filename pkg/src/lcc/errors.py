"""Exception hierarchy shared by every module in the package."""


class LCCError(Exception):
    """Base class for all errors raised by :mod:`lcc`."""


class DimensionMismatch(LCCError, ValueError):
    pass


class NonSymmetric(LCCError, ValueError):
    pass


class NotPositiveDefinite(LCCError, ArithmeticError):
    """A Cholesky pivot fell below the positivity threshold."""


class SingularHessian(NotPositiveDefinite):
    """Raised by Newton iterations when the negative Hessian cannot be factored.

    Typical causes are separable or collinear data with no ridge penalty.
    """


class NonFinite(LCCError, ArithmeticError):
    pass


class InvalidProbability(LCCError, ValueError):
    pass


class UnknownFamily(LCCError, KeyError):
    pass


class UnknownModel(LCCError, KeyError):
    pass


class TooManyLabels(LCCError, ValueError):
    pass


class ChainFitError(LCCError):
    """A link of a classifier chain failed to fit.

    ``link`` is the chain position (0-based), ``label`` the original label index.
    """

    def __init__(self, link, label, cause):
        self.link = link
        self.label = label
        self.cause = cause
        super().__init__(f"link {link} (label {label}) failed to fit: {cause}")


class FoldError(LCCError):
    def __init__(self, fold, cause):
        self.fold = fold
        self.cause = cause
        super().__init__(f"fold {fold}: {cause}")


class ParseError(LCCError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownLabelName(LCCError, KeyError):
    pass


class NonBinaryLabel(LCCError, ValueError):
    pass


class NoVariance(LCCError, ValueError):
    pass


class ConfigError(LCCError, ValueError):
    pass
