"""Partitioned forbidden-intersection bounds and their optimization.

A family in ``C([n], r)`` is cut along a partition ``[n] = N_1 + ... + N_k``;
each block sees an s_i-avoiding family with local proportions
``(r_i/n_i, s_i/n_i)``. The block graphs combine through the path version
of the concatenation lemma, so the density of the family is at most
``sum_i delta_i^(n_i)``. The sum is governed by its slowest-decaying term, so
rates below use ``max_i delta_i^(nu_i)`` where ``nu_i = n_i / n``.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from . import prime_split
from .errors import DomainError
from .rates import GrowthRate, canonical_params, entropy, log_delta

SHARE_TOL = 1e-9

# c = 2 (even r - s, two near-equal primes) would follow from a strong binary
# Goldbach statement; it is exposed only when explicitly requested
HYPOTHETICAL_C = 2


@dataclass(frozen=True)
class Block:
    nu: float
    rho_share: float
    sigma_share: float

    @property
    def local(self) -> tuple[float, float]:
        return self.rho_share / self.nu, self.sigma_share / self.nu


@dataclass(frozen=True)
class PartitionPlan:
    blocks: tuple[Block, ...]

    @classmethod
    def from_lists(cls, nus: Sequence[float], rhos: Sequence[float], sigmas: Sequence[float]) -> "PartitionPlan":
        if not (len(nus) == len(rhos) == len(sigmas)):
            raise DomainError("block share lists must have equal length")
        return cls(tuple(Block(*t) for t in zip(nus, rhos, sigmas)))

    @classmethod
    def symmetric(cls, rho: float, sigma: float, k: int) -> "PartitionPlan":
        return cls(tuple(Block(1 / k, rho / k, sigma / k) for _ in range(k)))

    @property
    def k(self) -> int:
        return len(self.blocks)

    def validate(self, rho: float, sigma: float, tol: float = SHARE_TOL) -> None:
        if not self.blocks:
            raise DomainError("a plan needs at least one block")
        for i, b in enumerate(self.blocks):
            if not (b.nu > 0 and b.rho_share > 0 and b.sigma_share > 0):
                raise DomainError(f"block {i}: all shares must be positive, got {b}")
        sums = (
            sum(b.nu for b in self.blocks),
            sum(b.rho_share for b in self.blocks),
            sum(b.sigma_share for b in self.blocks),
        )
        for name, got, want in zip(("nu", "rho", "sigma"), sums, (1.0, rho, sigma)):
            if abs(got - want) > tol:
                raise DomainError(f"{name} shares sum to {got!r}, expected {want!r}")

    def to_json(self) -> str:
        return json.dumps({"blocks": [asdict(b) for b in self.blocks]})

    @classmethod
    def from_json(cls, text: str) -> "PartitionPlan":
        data = json.loads(text)
        return cls(tuple(Block(**b) for b in data["blocks"]))


def block_log_rates(plan: PartitionPlan) -> list[float]:
    """``nu_i * ln delta(rho_i, sigma_i)`` per block, complementing blocks with ``rho_i > 1/2``."""
    out = []
    for i, b in enumerate(plan.blocks):
        rho_i, sigma_i = b.local
        try:
            out.append(b.nu * log_delta(*canonical_params(rho_i, sigma_i)))
        except DomainError as exc:
            raise DomainError(f"block {i} (rho={rho_i:.6g}, sigma={sigma_i:.6g}): {exc}") from None
    return out


def plan_rate(
    plan: PartitionPlan, rho: float, sigma: float | None = None, share_tol: float = SHARE_TOL
) -> GrowthRate:
    """Bound base ``exp(H(rho)) * max_i delta(rho_i, sigma_i)^nu_i`` for a partition plan.

    ``share_tol`` bounds how far the block shares may miss ``(1, rho, sigma)``;
    loosen it only for plans quoted with rounded shares.
    """
    if sigma is None:
        sigma = sum(b.sigma_share for b in plan.blocks)
    plan.validate(rho, sigma, share_tol)
    return GrowthRate(entropy(rho) + max(block_log_rates(plan)), "Theorem 1.8")


def forbidden_intersection_base(
    rho: float, sigma: float, c_class: int, allow_hypothetical: bool = False
) -> GrowthRate:
    """Base ``exp(H(rho)) * delta(rho, sigma)^(1/c)`` for s-avoiding r-uniform families.

    ``c_class=1`` needs ``r - s`` prime or a prime power; 3 covers other odd
    differences and 4 even ones. ``c_class=2`` is conjectural and only
    returned with ``allow_hypothetical``.
    """
    if c_class == HYPOTHETICAL_C:
        if not allow_hypothetical:
            raise DomainError("c_class=2 depends on an unproven binary Goldbach strengthening")
        tag = "hypothetical (c=2)"
    elif c_class == 1:
        tag = "Theorem 1.6"
    elif c_class in (3, 4):
        tag = "Theorem 1.8"
    else:
        raise DomainError(f"c_class must be 1, 3 or 4, got {c_class!r}")
    return GrowthRate(entropy(rho) + log_delta(rho, sigma) / c_class, tag)


def clique_base(rho: float, sigma: float, k: int, c_class: int) -> GrowthRate:
    """Per-coordinate base on ``[kn]`` for families avoiding k-cliques of intersection ``2s + (k-2)r``.

    Equals ``exp(H(rho)) * delta(rho, sigma)^(1/(k c))``.
    """
    if k < 3:
        raise DomainError(f"clique size must be >= 3, got {k}")
    if c_class not in (1, 3, 4):
        raise DomainError(f"c_class must be 1, 3 or 4, got {c_class!r}")
    return GrowthRate(entropy(rho) + log_delta(rho, sigma) / (k * c_class), "Theorem 1.9")


# -- optimization ---------------------------------------------------------------


def _softmax(z: Sequence[float]) -> list[float]:
    top = max(z)
    e = [math.exp(v - top) for v in z]
    total = sum(e)
    return [v / total for v in e]


def _decode_shares(x: Sequence[float], rho: float, sigma: float, k: int):
    nus = _softmax([0.0, *x[: k - 1]])
    rhos = [rho * v for v in _softmax([0.0, *x[k - 1 : 2 * k - 2]])]
    sigmas = [sigma * v for v in _softmax([0.0, *x[2 * k - 2 :]])]
    return nus, rhos, sigmas


def _decode(x: Sequence[float], rho: float, sigma: float, k: int) -> PartitionPlan:
    return PartitionPlan.from_lists(*_decode_shares(x, rho, sigma, k))


def _encode(plan: PartitionPlan, rho: float, sigma: float) -> np.ndarray:
    def logits(v):
        v = np.log(np.asarray(v, dtype=float))
        return v[1:] - v[0]

    return np.concatenate(
        (
            logits([b.nu for b in plan.blocks]),
            logits([b.rho_share / rho for b in plan.blocks]),
            logits([b.sigma_share / sigma for b in plan.blocks]),
        )
    )


def _block_terms(x: Sequence[float], rho: float, sigma: float, k: int) -> tuple[list[float], float]:
    """Per-block log rates and a nonnegative infeasibility measure (0 when feasible)."""
    terms, violation = [], 0.0
    for nu, r_share, s_share in zip(*_decode_shares(x, rho, sigma, k)):
        rho_i, sigma_i = r_share / nu, s_share / nu
        if rho_i > 0.5:
            rho_i, sigma_i = 1 - rho_i, 1 - 2 * rho_i + sigma_i
        gap = min(sigma_i - 1e-12, rho_i - sigma_i - 1e-12)
        if gap <= 0:
            violation += 1e-9 - gap
            continue
        terms.append(nu * log_delta(rho_i, sigma_i))
    return terms, violation


def _objective(x: Sequence[float], rho: float, sigma: float, k: int, tau: float = 0.0) -> float:
    """Max of block log rates, or its log-sum-exp smoothing at temperature ``tau``."""
    terms, violation = _block_terms(x, rho, sigma, k)
    if violation:
        return 1.0 + violation
    top = max(terms)
    if tau == 0.0:
        return top
    return top + tau * math.log(sum(math.exp((t - top) / tau) for t in terms))


# block rates form a nonsmooth max; annealing a smooth surrogate down to the
# exact max keeps the simplex from collapsing onto a kink
ANNEAL = (1e-2, 1e-3, 1e-4, 1e-5, 0.0)


@dataclass
class OptimizeResult:
    plan: PartitionPlan
    rate: GrowthRate
    symmetric_rate: GrowthRate
    starts: int
    seed: int
    evaluations: int = 0

    @property
    def improvement(self) -> float:
        return self.symmetric_rate.base - self.rate.base

    def as_dict(self) -> dict:
        return {
            "plan": json.loads(self.plan.to_json()),
            "rate": self.rate.as_dict(),
            "symmetric_rate": self.symmetric_rate.as_dict(),
            "improvement": self.improvement,
            "starts": self.starts,
            "seed": self.seed,
            "evaluations": self.evaluations,
        }


def _feasible_start(rng: random.Random, rho: float, sigma: float, k: int, dim: int) -> np.ndarray:
    for _ in range(10_000):
        x = np.array([rng.gauss(0.0, 1.0) for _ in range(dim)])
        if not _block_terms(x, rho, sigma, k)[1]:
            return x
    return np.zeros(dim)


def optimize_plan(
    rho: float,
    sigma: float,
    k_blocks: int = 3,
    starts: int = 64,
    seed: int = 0,
    xtol: float = 1e-8,
    max_iter: int = 4000,
) -> OptimizeResult:
    """Minimize :func:`plan_rate` over k-block plans by multistart Nelder-Mead.

    Shares are softmax logits, so every candidate already meets the sum
    constraints; plans leaving the rate domain get a graded penalty. Each
    start is refined through a decreasing sequence of smoothing temperatures.
    The symmetric plan is always the first start and the fallback, so the
    result is never worse than it.
    """
    if k_blocks < 1:
        raise DomainError(f"k_blocks must be >= 1, got {k_blocks}")
    canonical_params(rho, sigma)
    symmetric = PartitionPlan.symmetric(rho, sigma, k_blocks)
    sym_rate = plan_rate(symmetric, rho, sigma)
    if k_blocks == 1:
        return OptimizeResult(symmetric, sym_rate, sym_rate, 0, seed)

    dim = 3 * (k_blocks - 1)
    rng = random.Random(seed)
    seeds = [_encode(symmetric, rho, sigma)]
    seeds += [_feasible_start(rng, rho, sigma, k_blocks, dim) for _ in range(starts - 1)]

    best_x, best_f = seeds[0], _objective(seeds[0], rho, sigma, k_blocks)
    evaluations = 0
    options = {"xatol": xtol, "fatol": 1e-13, "maxiter": max_iter, "adaptive": True}
    for x in seeds:
        for tau in ANNEAL:
            res = minimize(_objective, x, args=(rho, sigma, k_blocks, tau), method="Nelder-Mead", options=options)
            x = res.x
            evaluations += res.nfev
        if res.fun < best_f:
            best_x, best_f = res.x, res.fun

    plan = _decode(best_x, rho, sigma, k_blocks)
    rate = plan_rate(plan, rho, sigma)
    if rate.log_base > sym_rate.log_base:
        plan, rate = symmetric, sym_rate
    return OptimizeResult(plan, rate, sym_rate, len(seeds), seed, evaluations)


# -- certificates at finite n ---------------------------------------------------


def finite_prime_certificate(plan: PartitionPlan, n: int, rho: float, sigma: float) -> dict:
    """Round a three-block plan to integers at size ``n`` and realize ``r - s`` as primes.

    Block sizes and r-shares are rounded; the three differences ``r_i - s_i``
    come from :func:`prime_split.proportional_prime_split`. Reports the
    achieved local proportions next to the plan's.
    """
    if plan.k != 3:
        raise DomainError("prime certificates are implemented for three-block plans")
    r, s = round(rho * n), round(sigma * n)
    diff = r - s
    if diff % 2 == 0:
        raise DomainError(f"r - s = {diff} is even at n={n}; the three-prime route needs it odd")
    sizes = _round_to_total([b.nu * n for b in plan.blocks], n)
    rs = _round_to_total([b.rho_share * n for b in plan.blocks], r)
    targets = [b.rho_share - b.sigma_share for b in plan.blocks]
    total = sum(targets)
    split = prime_split.proportional_prime_split(diff, [t / total for t in targets])
    ss = [ri - p for ri, p in zip(rs, split.parts)]
    return {
        "n": n,
        "r": r,
        "s": s,
        "sizes": sizes,
        "r_parts": rs,
        "s_parts": ss,
        "primes": list(split.parts),
        "prime_deviation": split.deviation,
        "local": [(ri / ni, si / ni) for ri, si, ni in zip(rs, ss, sizes)],
        "planned_local": [b.local for b in plan.blocks],
    }


def _round_to_total(values: Sequence[float], total: int) -> list[int]:
    floors = [math.floor(v) for v in values]
    order = sorted(range(len(values)), key=lambda i: floors[i] - values[i])
    for i in order[: total - sum(floors)]:
        floors[i] += 1
    return floors


# -- weak sunflower reduction chain ---------------------------------------------


@dataclass
class ChainStep:
    name: str
    log_rate: float
    polynomial: bool
    detail: str

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class SunflowerChain:
    k: int
    rho: float
    sigma: float
    c_class: int
    steps: list[ChainStep]
    rate: GrowthRate
    finite: dict | None = None

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "rho": self.rho,
            "sigma": self.sigma,
            "c_class": self.c_class,
            "steps": [s.as_dict() for s in self.steps],
            "rate": self.rate.as_dict(),
            "finite": self.finite,
        }


def sunflower_chain(k: int, n: int | None = None) -> SunflowerChain:
    """Reduction from weak-k-sunflower-free families to the clique bound.

    The chain: keep the largest uniform layer (loses a factor ``n + 1``); pad
    ``n`` to a multiple of ``2k``; shift by a symmetric difference into the
    middle layer (loses ``2^n / C(n, n/2)``, polynomial); pick the largest
    prime ``p < (2 - sqrt 2)/4 * n/k`` and forbid intersections of size
    ``n/2 - 2p``; apply the clique bound on ``k`` blocks of size ``n/k`` with
    ``rho = 1/2``, ``sigma = sqrt(2)/4`` and ``c = 1``.

    Polynomial losses carry ``log_rate = 0``. With ``n`` given, the concrete
    prime and intersection size at that ``n`` are reported too.
    """
    if k < 3:
        raise DomainError(f"weak sunflowers need k >= 3, got {k}")
    rho, sigma = 0.5, math.sqrt(2) / 4
    final = clique_base(rho, sigma, k, 1)
    final = GrowthRate(final.log_base, "Theorem 1.3")
    steps = [
        ChainStep("uniformize", 0.0, True, "largest layer keeps at least |F|/(n+1) sets"),
        ChainStep("pad", 0.0, True, "extend the ground set to the next multiple of 2k"),
        ChainStep("symmetric-difference shift", 0.0, True, "|F'| 2^n >= |F| C(n, n/2); middle layer"),
        ChainStep(
            "prime choice",
            0.0,
            False,
            f"p ~ (2 - sqrt 2)/4 * n/k, s = n/(2k) - p ~ sqrt(2)/4 * n/k; sigma = {sigma:.12g}",
        ),
        ChainStep(
            "clique bound",
            log_delta(rho, sigma) / k,
            False,
            f"C(n, n/2) delta(1/2, sqrt(2)/4)^(n/k), c = 1; base {final.base:.12g}",
        ),
    ]
    finite = None
    if n is not None:
        finite = _sunflower_finite(n, k)
    return SunflowerChain(k, rho, sigma, 1, steps, final, finite)


def _sunflower_finite(n: int, k: int) -> dict:
    n_padded = -(-n // (2 * k)) * (2 * k)
    bound = (2 - math.sqrt(2)) / 4 * n_padded / k
    p = next((q for q in range(math.ceil(bound) - 1, 1, -1) if prime_split.is_prime(q)), None)
    if p is None:
        raise DomainError(f"no prime below {bound:.3f}; n={n} is too small for k={k}")
    block = n_padded // k
    r = block // 2
    s = r - p
    return {
        "n": n,
        "n_padded": n_padded,
        "block_size": block,
        "block_r": r,
        "p": p,
        "s": s,
        "sigma_local": s / block,
        "forbidden_intersection": n_padded // 2 - 2 * p,
        "check": 2 * s + (k - 2) * r,
    }
