"""Exception hierarchy shared across the package.

Validation errors cover bad inputs and unsatisfiable requests (CLI exit 2);
consistency and convergence errors signal that an internal cross-check
failed (CLI exit 3).
"""


class PrimelabError(Exception):
    """Base class for all package errors."""


class ValidationError(PrimelabError):
    """Input violates a documented precondition."""


class CapacityError(ValidationError):
    """Request exceeds the configured memory or size budget."""


class EmptyRangeError(ValidationError):
    """Range holds too few primes for the requested scan."""


class TupleSearchError(ValidationError):
    """Greedy tuple search ran out of survivors.

    Carries the survivor count so callers can widen the window.
    """

    def __init__(self, message: str, survivors: int):
        super().__init__(message)
        self.survivors = survivors


class InfeasibleError(ValidationError):
    """No parameter choice satisfies the stated constraints."""


class ConsistencyError(PrimelabError):
    """Two independent computations of the same quantity disagree."""


class ConvergenceError(PrimelabError):
    """Iterative solver failed to reach the requested residual.

    Carries the best residual achieved.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual
