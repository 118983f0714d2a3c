"""Exception types shared across the package."""


class DiscrimError(Exception):
    """Base class for all package errors."""


class DomainError(DiscrimError, ValueError):
    """An operator failed the PSD gate or another domain check."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class PreconditionError(DiscrimError, ValueError):
    """Inputs violate a documented precondition (shape, rank, range)."""


class DegenerateInputError(DiscrimError, ValueError):
    """The input is degenerate for the requested quantity (e.g. all zero)."""


class ResourceError(DiscrimError):
    """A configured size cap would be exceeded."""


class ConvergenceError(DiscrimError):
    """An iterative method did not converge.

    ``details`` carries whatever diagnostic the solver had, e.g. the
    residual of an eigensolver or the best primal/dual pair of the SDP.
    """

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details


class TheoremViolation(DiscrimError):
    """A theorem-flagged inequality was violated during fuzzing."""

    def __init__(self, message, entry=None, ensemble_json=None):
        super().__init__(message)
        self.entry = entry
        self.ensemble_json = ensemble_json
