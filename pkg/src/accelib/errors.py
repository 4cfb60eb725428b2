"""Typed errors shared by the method drivers and checkers."""


class InvalidArgument(ValueError):
    """Arguments outside a method's stated preconditions."""


class UnsupportedOracle(TypeError):
    """The oracle lacks a capability the operation requires (prox, quadratic form, ...)."""


class DivergedError(RuntimeError):
    """An iterate became non-finite. Carries the partial trace."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class SingularSystemError(RuntimeError):
    """A small dense solve hit a pivot below the singularity threshold."""


class RunawayLError(RuntimeError):
    """Backtracking increased L more than 200 times within one iteration."""


class InnerSolveError(RuntimeError):
    """An inner subproblem solver failed. Carries the partial trace."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class ContractViolation(RuntimeError):
    """An inner solver broke its advertised linear convergence contract."""


class InconsistentCertificate(ValueError):
    """Stored residual does not match the one recomputed from (x, y, lambda, g)."""
