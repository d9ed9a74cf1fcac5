"""Lie-Hamilton systems of sl(2) type on the plane and their hyperbolic
deformations: symplectic realizations, coalgebra-lifted invariants, adaptive
integration, chart transport, and verification suites."""

__version__ = "0.1.0"

from .backend import BACKEND, using_compiled
from .errors import (
    BranchError,
    CoeffEvalError,
    CoeffParseError,
    ConfigError,
    DomainError,
    LhdeformError,
    RangeOverflowError,
    SingularFormError,
    StiffnessError,
)
from .numkit import DEFAULT_TOLS, Diff2, Dual2, Tolerances, diff2, shc, shc_prime

__all__ = [
    "BACKEND",
    "BranchError",
    "CoeffEvalError",
    "CoeffParseError",
    "ConfigError",
    "DEFAULT_TOLS",
    "Diff2",
    "DomainError",
    "Dual2",
    "LhdeformError",
    "RangeOverflowError",
    "SingularFormError",
    "StiffnessError",
    "Tolerances",
    "diff2",
    "shc",
    "shc_prime",
    "using_compiled",
]
