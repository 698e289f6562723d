"""Deterministic primality and exact searches for sums of primes near prescribed targets.

Asymptotic existence results for such splits are replaced by finite searches:
each function either returns the optimal split or raises.
"""

from __future__ import annotations

import bisect
import functools
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, InfeasibleError

# sufficient witnesses for every n < 3.3e24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all 64-bit inputs (and well beyond)."""
    if n < 0:
        raise DomainError(f"is_prime needs n >= 0, got {n}")
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@functools.lru_cache(maxsize=8)
def _sieve(limit: int) -> tuple[bytearray, tuple[int, ...]]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"[: min(2, limit + 1)]
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = bytearray(len(range(p * p, limit + 1, p)))
    return flags, tuple(i for i, f in enumerate(flags) if f)


def primes_upto(limit: int) -> tuple[int, ...]:
    if limit < 2:
        return ()
    primes = _sieve(_sieve_size(limit))[1]
    return primes[: bisect.bisect_right(primes, limit)]


def _sieve_size(limit: int) -> int:
    # round up so nearby targets share one cached sieve
    return max(1024, 1 << (limit - 1).bit_length())


@dataclass(frozen=True)
class PrimeSplit:
    target: int
    parts: tuple[int, ...]
    centers: tuple[float, ...]
    conjecture_conditional: bool = False

    @property
    def deviation(self) -> float:
        return max(abs(p - c) for p, c in zip(self.parts, self.centers))

    def as_dict(self) -> dict:
        return {
            "target": self.target,
            "parts": list(self.parts),
            "centers": list(self.centers),
            "deviation": self.deviation,
            "conjecture_conditional": self.conjecture_conditional,
        }


def _window_primes(center: float, radius: float, limit: int) -> list[int]:
    lo = max(2, math.ceil(center - radius))
    hi = min(limit, math.floor(center + radius))
    primes = primes_upto(max(hi, 2))
    return list(primes[bisect.bisect_left(primes, lo) : bisect.bisect_right(primes, hi)])


def _best_in_window(target: int, centers: Sequence[float], radius: float, ordered: bool):
    """Minimum-deviation prime tuple with every part within ``radius`` of its center.

    With ``ordered=False`` the centers are all equal and tuples are searched
    in sorted form. Ties go to the lexicographically smallest tuple.
    """
    k = len(centers)
    windows = [_window_primes(c, radius, target) for c in centers]
    best = None

    def consider(parts: tuple[int, ...]) -> None:
        nonlocal best
        dev = max(abs(p - c) for p, c in zip(parts, centers))
        key = (dev, parts)
        if best is None or key < best:
            best = key

    def rec(i: int, prefix: tuple[int, ...], remaining: int) -> None:
        if i == k - 1:
            last = remaining
            if last >= 2 and abs(last - centers[i]) <= radius and (ordered or last >= prefix[-1]):
                if is_prime(last):
                    consider(prefix + (last,))
            return
        for p in windows[i]:
            if not ordered and prefix and p < prefix[-1]:
                continue
            if p >= remaining:
                break
            rec(i + 1, prefix + (p,), remaining - p)

    rec(0, (), target)
    return best


def _min_deviation_split(target: int, centers: Sequence[float], ordered: bool) -> tuple[int, ...]:
    radius = 1.0
    while True:
        found = _best_in_window(target, centers, radius, ordered)
        if found is not None:
            return found[1]
        if radius > target:
            raise InfeasibleError(f"{target} is not a sum of {len(centers)} primes")
        radius *= 2


def near_equal_prime_split(target: int, parts: int) -> PrimeSplit:
    """Write ``target`` as a sum of 3 (odd targets > 5) or 4 (even targets >= 8) primes,
    each as close as possible to ``target / parts``.

    ``parts=2`` is also accepted for even targets >= 4; it relies on the binary
    Goldbach conjecture for existence in general and is flagged as such.
    The deviation ``max |p_i - target/parts|`` is minimized exactly.
    """
    if parts == 3:
        if target % 2 == 0 or target <= 5:
            raise DomainError(f"three-prime splits need an odd target > 5, got {target}")
    elif parts == 4:
        if target % 2 or target < 8:
            raise DomainError(f"four-prime splits need an even target >= 8, got {target}")
    elif parts == 2:
        if target % 2 or target < 4:
            raise DomainError(f"two-prime splits need an even target >= 4, got {target}")
    else:
        raise DomainError(f"parts must be 2, 3 or 4, got {parts}")
    centers = (target / parts,) * parts
    split = _min_deviation_split(target, centers, ordered=False)
    return PrimeSplit(target, split, centers, conjecture_conditional=parts == 2)


def four_prime_recipe(target: int) -> PrimeSplit:
    """Four primes built in two stages: one prime near ``target/4``, then the
    remainder as three primes near ``remainder/3``.

    First-stage candidates are tried in order of distance to ``target/4``
    until the remainder splits. ``parts[0]`` is the first-stage prime.
    """
    if target % 2 or target < 8:
        raise DomainError(f"the recipe needs an even target >= 8, got {target}")
    center = target / 4
    for p1 in sorted(primes_upto(target - 6), key=lambda p: (abs(p - center), p)):
        rest = target - p1
        try:
            tail = _min_deviation_split(rest, (rest / 3,) * 3, ordered=False)
        except InfeasibleError:
            continue
        return PrimeSplit(target, (p1,) + tail, (center,) * 4)
    raise InfeasibleError(f"no four-prime recipe split for {target}")


def proportional_prime_split(target: int, proportions: Sequence[float]) -> PrimeSplit:
    """Three primes summing to an odd ``target``, closest to ``proportion_i * target``.

    Minimizes ``max |p_i - proportion_i * target|``; ties go to the
    lexicographically smallest tuple (in the given order). Raises
    :class:`InfeasibleError` when no such triple exists.
    """
    if len(proportions) != 3:
        raise DomainError(f"need exactly three proportions, got {len(proportions)}")
    if any(not q > 0 for q in proportions) or abs(sum(proportions) - 1) > 1e-9:
        raise DomainError(f"proportions must be positive and sum to 1: {proportions}")
    if target % 2 == 0:
        raise DomainError(f"target must be odd, got {target}")
    centers = tuple(q * target for q in proportions)
    return PrimeSplit(target, _min_deviation_split(target, centers, ordered=True), centers)
