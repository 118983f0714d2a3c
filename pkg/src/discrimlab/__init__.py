"""Numerical lab for symmetric quantum multiple-hypothesis discrimination."""

from .ensemble import CertifiedValue, Ensemble, MeasurementOps, Povm
from .errors import (ConvergenceError, DegenerateInputError, DiscrimError, DomainError,
                     PreconditionError, ResourceError, TheoremViolation)

__version__ = "0.1.0"

__all__ = [
    "CertifiedValue", "Ensemble", "MeasurementOps", "Povm",
    "ConvergenceError", "DegenerateInputError", "DiscrimError", "DomainError",
    "PreconditionError", "ResourceError", "TheoremViolation",
]
