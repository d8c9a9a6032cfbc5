class PsiclassError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(PsiclassError, ValueError):
    """A partition is off the dimension shell sum(d) = 3g - 3 + n."""


class BudgetExhausted(PsiclassError):
    """The recursion visited more new keys than the configured work budget."""

    def __init__(self, budget: int):
        super().__init__(f"recursion work budget of {budget} nodes exhausted")
        self.budget = budget


class CacheFormatError(PsiclassError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
