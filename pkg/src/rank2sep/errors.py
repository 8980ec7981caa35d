"""Exception hierarchy shared by every module of the package."""


class Rank2SepError(Exception):
    """Base class for all package errors."""


class NotHermitian(Rank2SepError, ValueError):
    pass


class NoConvergence(Rank2SepError, RuntimeError):
    pass


class DimensionMismatch(Rank2SepError, ValueError):
    pass


class AlphaOutOfRange(Rank2SepError, ValueError):
    pass


class NotNormalized(Rank2SepError, ValueError):
    pass


class NotUnitary(Rank2SepError, ValueError):
    pass


class NotOrthogonal(Rank2SepError, ValueError):
    pass


class NotRealInput(Rank2SepError, ValueError):
    pass


class RankDegenerate(Rank2SepError, ValueError):
    """Eigenvalue weight outside the open interval (0, 1)."""


class E2Product(Rank2SepError, ValueError):
    """Every alpha entry vanishes, so the pivot equation is not quadratic."""


class CommonRootViolation(Rank2SepError, ValueError):
    """A root of the pivot equation fails another equation of the system."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class WeightOutOfRange(Rank2SepError, ValueError):
    def __init__(self, message, p_prime=None):
        super().__init__(message)
        self.p_prime = p_prime


class NotProduct(Rank2SepError, ArithmeticError):
    pass


class InternalConsistencyError(Rank2SepError, ArithmeticError):
    pass


class NotDensityMatrix(Rank2SepError, ValueError):
    pass


class UnsupportedRank(Rank2SepError, ValueError):
    def __init__(self, message, rank=None):
        super().__init__(message)
        self.rank = rank


class ParseError(Rank2SepError, ValueError):
    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(Rank2SepError, ValueError):
    def __init__(self, message, invariant=None, amount=None):
        super().__init__(message)
        self.invariant = invariant
        self.amount = amount
