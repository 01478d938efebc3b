"""Exception hierarchy shared by all modules."""


class PolyfloatError(Exception):
    """Base class for all package errors."""


class ParameterError(PolyfloatError, ValueError):
    """Invalid distribution or solver parameter."""


class DomainError(PolyfloatError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class PreconditionError(PolyfloatError, ValueError):
    """A documented precondition (sample size, p-gate, ...) is not met."""


class MomentError(PolyfloatError, ValueError):
    """A requested moment does not exist for the distribution family."""


class UnsupportedError(PolyfloatError, NotImplementedError):
    """No closed form is available; use the Monte Carlo estimator instead."""


class SizeError(PolyfloatError, MemoryError):
    """Requested array exceeds the configured memory budget."""


class BudgetError(PolyfloatError, RuntimeError):
    """Enumeration would exceed the work budget."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class StateError(PolyfloatError, RuntimeError):
    """Object is in a state that does not support the operation."""


class SolverError(PolyfloatError, RuntimeError):
    """An LP / convex solve did not reach an optimal status."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
