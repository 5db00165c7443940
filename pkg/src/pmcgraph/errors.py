"""Exception types shared across the package."""

from __future__ import annotations


class ParameterError(ValueError):
    """An input parameter lies outside its admissible range."""


class NoAdmissibleConstantError(ParameterError):
    """The curvature magnitude is too large for the requested annulus,
    so no integration constant produces a usable barrier profile."""


class OutOfDomainError(ValueError):
    """An evaluation point lies outside the domain of definition."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature could not reach the requested accuracy."""


class DisconnectedMaskError(ValueError):
    """A bitmap domain has a disconnected interior."""


class UnsupportedDomainError(ValueError):
    """The requested geometric quantity is not defined for this domain kind."""


class InfeasibleFitError(RuntimeError):
    """No translation was found placing the domain inside the annulus."""


class SolverError(RuntimeError):
    """Base class for nonlinear solver failures."""

    def __init__(self, message, trace=None, diagnostics=None):
        super().__init__(message)
        self.trace = trace if trace is not None else []
        self.diagnostics = diagnostics if diagnostics is not None else {}


class NonconvergenceError(SolverError):
    """Newton iteration did not reach the residual tolerance."""


class LineSearchStallError(NonconvergenceError):
    """Backtracking reached its floor without reducing the residual."""


class SingularSystemError(SolverError):
    """The linearized system could not be solved (singular or non-finite)."""


class ContinuationFailureError(SolverError):
    """The homotopy stalled before reaching the full problem.

    ``stall_t`` is the last parameter value that was solved successfully.
    Stalls are a numerical observation; they suggest, but do not prove,
    nonexistence past ``stall_t``.
    """

    def __init__(self, message, trace=None, stall_t=0.0, diagnostics=None):
        super().__init__(message, trace=trace, diagnostics=diagnostics)
        self.stall_t = stall_t
