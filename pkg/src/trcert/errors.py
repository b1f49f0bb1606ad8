"""Exception hierarchy shared by every trcert module."""


class TrcertError(Exception):
    """Base class for all errors raised by trcert."""


class NotSquarefree(TrcertError, ValueError):
    pass


class ZeroPolynomial(TrcertError, ValueError):
    pass


class ReducibleTower(TrcertError, ArithmeticError):
    """A nonzero zero divisor was met: some defining step is not irreducible."""

    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"tower step {step} does not define a field")


class DivisionByZero(TrcertError, ZeroDivisionError):
    pass


class TowerMismatch(TrcertError, ValueError):
    """Elements of towers where neither is a prefix of the other."""


class NotCMTower(TrcertError, ValueError):
    pass


class NotTotallyReal(TrcertError, ValueError):
    pass


class NotAlgebraicInteger(TrcertError, ValueError):
    pass


class NotTotallyNonnegative(TrcertError, ValueError):
    pass


class ConjugateInForbiddenInterval(TrcertError, ValueError):
    pass


class PreconditionFailed(TrcertError, ValueError):
    pass


class InternalContradiction(TrcertError, AssertionError):
    """A proven theorem was contradicted by computation: an arithmetic bug."""


class CellBudgetExceeded(TrcertError, RuntimeError):
    def __init__(self, needed, budget):
        self.needed = needed
        self.budget = budget
        super().__init__(
            f"coefficient box has {needed} cells, budget is {budget} "
            f"(raise TRCERT_CELL_BUDGET to at least {needed})"
        )
