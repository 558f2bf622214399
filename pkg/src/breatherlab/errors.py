"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the range a contract allows."""


class InputError(ValueError):
    """Malformed or incomplete input data (missing couplings, bad tables)."""


class StateError(RuntimeError):
    """An operation was requested before its prerequisites were computed."""


class GroundStateError(RuntimeError):
    """The periodic ground state came out degenerate or non-positive."""


class ConvergenceError(RuntimeError):
    """Iterative eigensolver failed to converge.

    The best available iterate is attached as ``best`` (may be None).
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class NumericalError(RuntimeError):
    """A factorization broke down beyond the retry policy."""


class PreconditionError(ValueError):
    """A configuration violates a stated hypothesis; names the violated one."""


class InsufficientDataError(RuntimeError):
    """Not enough admissible data points; names the window that was searched."""
