"""Exponential lower-bound constants for forbidden-configuration chromatic numbers
and forbidden-intersection families, with exact small-instance certification."""

from __future__ import annotations

from .errors import (
    CapacityError,
    CertificationError,
    CornerboundError,
    DomainError,
    InfeasibleError,
    SearchFailure,
    UnsupportedError,
    UsageError,
)
from .rates import GrowthRate, RateParams, delta, entropy, log_delta

__all__ = [
    "CapacityError",
    "CertificationError",
    "CornerboundError",
    "DomainError",
    "GrowthRate",
    "InfeasibleError",
    "RateParams",
    "SearchFailure",
    "UnsupportedError",
    "UsageError",
    "delta",
    "entropy",
    "log_delta",
]

__version__ = "0.1.0"
