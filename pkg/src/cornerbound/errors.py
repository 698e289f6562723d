"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: domain-type errors exit 1, usage errors
exit 2 and certification failures exit 3.
"""

from __future__ import annotations


class CornerboundError(Exception):
    """Base class for all library errors."""


class DomainError(CornerboundError, ValueError):
    """Parameters fall outside the region where a formula is defined."""


class UnsupportedError(DomainError):
    """The configuration is valid geometry, but no bound is implemented for it."""


class UsageError(CornerboundError, ValueError):
    """Malformed call: wrong arity, unknown name, inconsistent dimensions."""


class CapacityError(CornerboundError):
    """An exact search would exceed its size or node budget."""


class SearchFailure(CornerboundError):
    """A randomized search could not find an object meeting its guarantee."""


class InfeasibleError(DomainError):
    """No object with the requested properties exists at this magnitude."""


class CertificationError(CornerboundError, AssertionError):
    """A brute-force certificate found a violation."""
