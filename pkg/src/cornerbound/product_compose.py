"""Rate arithmetic for the Cartesian-product composition of super-Ramsey sets.

A super-Ramsey witness family is summarized by three numbers: its size base
``c`` (``|V(n)| <= c^n``), its ratio base ``1 + eps`` (``|V|/alpha >= (1+eps)^n``)
and the configuration size ``m``. Composing two such families splits the
dimension as ``n1 = (1 - eta) n``, ``n2 = eta n`` and bounds the density of a
configuration-free set by the sum of two exponentials, ``(1+eps2)^(-eta n)``
and ``c2^((m-1) eta n) / (1+eps1)^((1-eta) n)``. Integrality of ``n1, n2`` is
ignored; it only affects lower-order terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

from .errors import DomainError
from .rates import GrowthRate


@dataclass(frozen=True)
class SuperRamseyParams:
    c: float
    epsilon: float
    m: int

    def __post_init__(self) -> None:
        # epsilon = 0 is admitted as the trivial (non-Ramsey) limit
        if not (self.c >= 1 and self.epsilon >= 0 and self.m >= 1):
            raise DomainError(f"need c >= 1, epsilon >= 0, m >= 1; got {self}")

    @property
    def log_c(self) -> float:
        return math.log(self.c)

    @property
    def log_ratio(self) -> float:
        return math.log1p(self.epsilon)


@dataclass(frozen=True)
class Composition:
    eta: float
    rate: GrowthRate
    params: SuperRamseyParams
    summand_log_rates: tuple[float, float]


def summand_log_rates(p1: SuperRamseyParams, p2: SuperRamseyParams, eta: float) -> tuple[float, float]:
    """Per-dimension log rates of the two terms bounding ``|W|/|V|`` at split ``eta``."""
    first = -eta * p2.log_ratio
    second = eta * (p2.m - 1) * p2.log_c - (1 - eta) * p1.log_ratio
    return first, second


def optimal_eta(p1: SuperRamseyParams, p2: SuperRamseyParams) -> float:
    """``ln(1+eps1) / ln((1+eps1)(1+eps2) c2^(m2-1))``, the split balancing both terms."""
    denom = p1.log_ratio + p2.log_ratio + (p2.m - 1) * p2.log_c
    if denom <= 0:
        raise DomainError(f"degenerate split: denominator {denom!r} <= 0 for {p1}, {p2}")
    return p1.log_ratio / denom


def composed_rate(p1: SuperRamseyParams, p2: SuperRamseyParams) -> Composition:
    """Ratio base ``(1+eps2)^eta`` of the product family, with its own parameters."""
    eta = optimal_eta(p1, p2)
    log_ratio = eta * p2.log_ratio
    params = SuperRamseyParams(
        c=math.exp((1 - eta) * p1.log_c + eta * p2.log_c),
        epsilon=math.expm1(log_ratio),
        m=p1.m * p2.m,
    )
    return Composition(
        eta=eta,
        rate=GrowthRate(log_ratio, "Theorem 1.2"),
        params=params,
        summand_log_rates=summand_log_rates(p1, p2, eta),
    )


def iterated_composition(factors: Sequence[SuperRamseyParams]) -> Composition:
    """Fold :func:`composed_rate` left to right over a k-fold product."""
    if not factors:
        raise DomainError("need at least one factor")
    if len(factors) == 1:
        p = factors[0]
        return Composition(1.0, GrowthRate(p.log_ratio, "Theorem 1.2"), p, (-p.log_ratio, -p.log_ratio))
    first = composed_rate(factors[0], factors[1])
    return reduce(lambda acc, p: composed_rate(acc.params, p), factors[2:], first)


def tree_concat_rate(ratio: GrowthRate, k: int) -> GrowthRate:
    """Semicross rate ``ratio^(1/k)`` obtained by orthogonal-star concatenation of k copies."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return ratio.power(1 / k, "Theorem 1.4")
