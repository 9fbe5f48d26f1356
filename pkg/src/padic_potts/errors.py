"""Exception hierarchy shared by every module of the package."""


class PadicError(ArithmeticError):
    """Base class for all errors raised by :mod:`padic_potts`."""


class PrimeMismatch(PadicError):
    pass


class DivisionByZero(PadicError, ZeroDivisionError):
    pass


class PrecisionExhausted(PadicError):
    pass


class ZeroAtPrecision(PadicError):
    """The value is indistinguishable from zero, so its norm is undecidable."""


class NoSquareRoot(PadicError):
    """Raised when a p-adic number is not a square.

    ``condition`` names the violated criterion: ``"valuation odd"``,
    ``"leading digit not a quadratic residue"`` or ``"a1, a2 not both zero"``.
    """

    def __init__(self, condition, value=None):
        super().__init__(condition)
        self.condition = condition
        self.value = value


class EnumerationTooLarge(PadicError):
    def __init__(self, count, cap):
        super().__init__(f"enumeration of {count} configurations exceeds cap {cap}")
        self.count = count
        self.cap = cap


class DegeneratePartitionFunction(PadicError):
    pass


class SingularRecursion(PadicError):
    pass


class NotARecursionSolution(PadicError):
    pass


class PoleEncountered(PadicError):
    def __init__(self, pole, message=None):
        super().__init__(message or f"pole encountered at {pole}")
        self.pole = pole


class NotAFixedPoint(PadicError):
    pass


class RegimeMismatch(PadicError):
    pass


class HypothesisNotMet(PadicError):
    pass


class MeasureUndefined(PadicError):
    pass
