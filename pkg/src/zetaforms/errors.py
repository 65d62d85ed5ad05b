"""Exception hierarchy shared by all modules."""


class ZetaFormsError(Exception):
    pass


class NonTerminating(ZetaFormsError):
    pass


class PoleInLowerParams(ZetaFormsError):
    pass


class InvalidParameters(ZetaFormsError, ValueError):
    pass


class PoleEvaluation(ZetaFormsError, ZeroDivisionError):
    pass


class DegenerateParameters(ZetaFormsError):
    pass


class PrecisionTooLow(ZetaFormsError):
    pass


class DegenerateCubic(ZetaFormsError):
    pass


class BranchPoint(ZetaFormsError):
    pass


class InsufficientData(ZetaFormsError):
    pass


class NoOperatorFound(ZetaFormsError):
    pass


class AmbiguousOperator(ZetaFormsError):
    def __init__(self, message, basis=None):
        super().__init__(message)
        self.basis = basis or []


class HypothesisViolated(ZetaFormsError):
    def __init__(self, condition, message):
        super().__init__(f"condition ({condition}) violated: {message}")
        self.condition = condition


class BudgetExhausted(ZetaFormsError):
    pass


class CacheCorrupt(ZetaFormsError):
    def __init__(self, n, message):
        super().__init__(f"cache entry for n={n} is corrupt: {message}")
        self.n = n
