"""Shared exception types."""


class DimensionMismatchError(ValueError):
    """Two vectors that should share a length do not."""


class NonUniqueOptimumError(ValueError):
    """The weighted-best group is not unique (exact tie of weighted sums)."""


class GenerationBudgetError(RuntimeError):
    """Rejection sampling exhausted its attempt budget."""

    def __init__(self, message, attempts=0, diagnostics=None):
        super().__init__(message)
        self.attempts = attempts
        self.diagnostics = diagnostics or {}


class RoundBudgetError(RuntimeError):
    """An elimination algorithm exceeded max_rounds. Carries partial state."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NoThresholdError(RuntimeError):
    """A bisection predicate never flipped inside the search interval."""
