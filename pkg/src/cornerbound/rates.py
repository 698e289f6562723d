"""Entropy and the forbidden-intersection rate function.

All rates are carried as natural logarithms; a base is only exponentiated when
it is presented to a user.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

TOL = 1e-12

C_CLASSES = (1, 3, 4)


@dataclass(frozen=True)
class GrowthRate:
    """Per-dimension exponential base ``exp(log_base)``.

    Sub-exponential correction terms are never modelled: a ``GrowthRate`` of
    ``b`` stands for a quantity behaving like ``(b + o(1))**n``.
    """

    log_base: float
    tag: str = "plumbing"

    def __post_init__(self) -> None:
        if not math.isfinite(self.log_base):
            raise DomainError(f"log_base must be finite, got {self.log_base!r}")

    @property
    def base(self) -> float:
        return math.exp(self.log_base)

    @classmethod
    def from_base(cls, base: float, tag: str = "plumbing") -> "GrowthRate":
        if not base > 0:
            raise DomainError(f"base must be positive, got {base!r}")
        return cls(math.log(base), tag)

    def power(self, exponent: float, tag: str | None = None) -> "GrowthRate":
        return GrowthRate(self.log_base * exponent, self.tag if tag is None else tag)

    def as_dict(self) -> dict:
        return {"base": self.base, "log_base": self.log_base, "tag": self.tag}


@dataclass(frozen=True)
class RateParams:
    """Limiting proportions ``r/n -> rho``, ``s/n -> sigma`` and the prime class.

    ``c_class`` is 1 when ``r - s`` is a prime or prime power, 3 when it is
    another odd number and 4 when it is even.
    """

    rho: float
    sigma: float
    c_class: int = 1

    def __post_init__(self) -> None:
        _check_canonical(self.rho, self.sigma)
        if self.c_class not in C_CLASSES:
            raise DomainError(f"c_class must be one of {C_CLASSES}, got {self.c_class!r}")


def entropy(x: float) -> float:
    """Natural-log binary entropy ``-x ln x - (1-x) ln(1-x)`` with ``H(0) = H(1) = 0``."""
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"entropy is defined on [0, 1], got {x!r}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log(x) - (1.0 - x) * math.log1p(-x)


def _check_canonical(rho: float, sigma: float) -> None:
    if not (sigma > TOL and sigma < rho - TOL and rho <= 0.5 + TOL):
        raise DomainError(
            f"rate parameters must satisfy 0 < sigma < rho <= 1/2, got rho={rho!r}, sigma={sigma!r}"
        )


def log_delta(rho: float, sigma: float) -> float:
    """Natural log of :func:`delta`; always negative on the domain."""
    _check_canonical(rho, sigma)
    rho = min(rho, 0.5)
    if sigma < rho / 2:
        return entropy(rho - sigma) - entropy(rho)
    return entropy(rho - sigma) - entropy(min(2 * rho - 2 * sigma, 1.0))


def delta(rho: float, sigma: float) -> float:
    """Rate ``delta(rho, sigma)`` bounding s-avoiding families relative to ``C(n, r)``.

    The branch switches at ``sigma = rho / 2``; both branches agree there.
    """
    return math.exp(log_delta(rho, sigma))


def complement_params(rho: float, sigma: float) -> tuple[float, float]:
    """Proportions of the complemented family: ``(1 - rho, 1 - 2 rho + sigma)``.

    An r-uniform s-avoiding family on ``[n]`` complements to an
    ``(n - r)``-uniform ``(n - 2r + s)``-avoiding one, so this maps ``rho > 1/2``
    into the canonical region. The map is an involution.
    """
    if not (0.0 < sigma < rho < 1.0):
        raise DomainError(f"complement needs 0 < sigma < rho < 1, got rho={rho!r}, sigma={sigma!r}")
    new_sigma = 1.0 - 2.0 * rho + sigma
    if new_sigma <= TOL:
        raise DomainError(
            f"complemented sigma {new_sigma!r} is not positive (degenerate instance rho={rho!r}, sigma={sigma!r})"
        )
    return 1.0 - rho, new_sigma


def canonical_params(rho: float, sigma: float) -> tuple[float, float]:
    """Return ``(rho, sigma)`` unchanged if ``rho <= 1/2``, else its complement."""
    if rho > 0.5 + TOL:
        return complement_params(rho, sigma)
    return rho, sigma
