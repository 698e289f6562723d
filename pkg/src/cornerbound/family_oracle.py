"""Exact set-family checks on ground sets of at most 24 elements.

Subsets of ``range(n)`` are bitmasks. Families are lists of distinct masks.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import CapacityError, CertificationError, SearchFailure, UsageError

MAX_GROUND = 24
SUNFLOWER_BUDGET = 10**7
EXHAUSTIVE_PARTITION_N = 12
DEFAULT_SEED = 20240601


def popcount(x: int) -> int:
    return x.bit_count()


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << e
    return m


def elements_of(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


@dataclass(frozen=True)
class SetFamily:
    n: int
    members: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 0 <= self.n <= MAX_GROUND:
            raise CapacityError(f"ground set size must be in [0, {MAX_GROUND}], got {self.n}")
        if len(set(self.members)) != len(self.members):
            raise UsageError("family members must be distinct")
        if any(m < 0 or m >> self.n for m in self.members):
            raise UsageError(f"a member lies outside range({self.n})")

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> "SetFamily":
        return cls(n, tuple(mask_of(s) for s in sets))

    @property
    def uniformity(self) -> int | None:
        sizes = {popcount(m) for m in self.members}
        return sizes.pop() if len(sizes) == 1 else None

    def __len__(self) -> int:
        return len(self.members)

    def complements(self) -> "SetFamily":
        full = (1 << self.n) - 1
        return SetFamily(self.n, tuple(full ^ m for m in self.members))

    def to_text(self) -> str:
        """Family file format: ``n=<int>`` header then one hex mask per line."""
        return "\n".join([f"n={self.n}", *(format(m, "x") for m in self.members)]) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SetFamily":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
        if not lines or not lines[0].startswith("n="):
            raise UsageError("family file must start with an 'n=<int>' header")
        try:
            n = int(lines[0][2:])
            members = tuple(int(ln, 16) for ln in lines[1:])
        except ValueError as exc:
            raise UsageError(f"malformed family file: {exc}") from None
        return cls(n, members)


def find_weak_sunflower(f: SetFamily, k: int) -> tuple[int, ...] | None:
    """Indices of k members whose pairwise intersections all have one size, or ``None``.

    Returns the lexicographically smallest such index tuple. For each
    candidate size the search grows cliques in the graph "intersects in
    exactly t elements", which is exhaustive.
    """
    if k < 3:
        raise UsageError(f"weak sunflowers need k >= 3, got {k}")
    m = len(f.members)
    if m < k:
        return None
    if math.comb(m, k) > SUNFLOWER_BUDGET:
        raise CapacityError(f"C({m}, {k}) exceeds the search budget of {SUNFLOWER_BUDGET}")
    inter = [[popcount(a & b) for b in f.members] for a in f.members]
    best = None
    for t in sorted({inter[i][j] for i in range(m) for j in range(i + 1, m)}):
        nbr = [[j for j in range(i + 1, m) if inter[i][j] == t] for i in range(m)]

        def grow(clique: list[int], cands: list[int]) -> list[int] | None:
            if len(clique) == k:
                return clique
            for idx, j in enumerate(cands):
                if len(clique) + len(cands) - idx < k:
                    return None
                found = grow(clique + [j], [c for c in cands[idx + 1 :] if inter[j][c] == t])
                if found:
                    return found
            return None

        for i in range(m):
            if best is not None and i > best[0]:
                break
            found = grow([i], nbr[i])
            if found:
                cand = tuple(found)
                if best is None or cand < best:
                    best = cand
                break
    return best


def is_weak_sunflower(sets: Sequence[int]) -> bool:
    sizes = {popcount(a & b) for a, b in itertools.combinations(sets, 2)}
    return len(sizes) <= 1


def is_s_avoiding(f: SetFamily, s: int) -> bool:
    """True iff no two distinct members meet in exactly ``s`` elements."""
    if f.members and f.uniformity is None:
        raise UsageError("s-avoidance is defined for uniform families")
    return all(popcount(a & b) != s for a, b in itertools.combinations(f.members, 2))


@dataclass
class ShiftResult:
    family: SetFamily
    preimages: tuple[int, ...]
    pairs_checked: int


def symdiff_identity_holds(a: int, b: int, g: int) -> bool:
    """``2|A & B| - 2|(A^G) & (B^G)| == |A| + |B| - |A^G| - |B^G|``."""
    lhs = 2 * popcount(a & b) - 2 * popcount((a ^ g) & (b ^ g))
    rhs = popcount(a) + popcount(b) - popcount(a ^ g) - popcount(b ^ g)
    return lhs == rhs


def symdiff_shift(f: SetFamily, g: int, half: int | None = None) -> ShiftResult:
    """``{F ^ g : F in f}`` restricted to sets of size ``half`` (default ``n/2``).

    The intersection identity relating the original and shifted pairs is
    re-checked on every pair; a failure raises :class:`CertificationError`.
    ``preimages[i]`` is the index in ``f`` of the i-th shifted member.
    """
    if half is None:
        if f.n % 2:
            raise UsageError(f"the middle layer needs even n, got {f.n}")
        half = f.n // 2
    if g >> f.n:
        raise UsageError("shift set lies outside the ground set")
    pairs = 0
    for a, b in itertools.combinations(f.members, 2):
        pairs += 1
        if not symdiff_identity_holds(a, b, g):
            raise CertificationError(f"symmetric-difference identity fails for {a:x}, {b:x}, {g:x}")
    kept = [(i, m ^ g) for i, m in enumerate(f.members) if popcount(m ^ g) == half]
    return ShiftResult(SetFamily(f.n, tuple(m for _, m in kept)), tuple(i for i, _ in kept), pairs)


def best_shift(f: SetFamily) -> tuple[int, ShiftResult]:
    """A shift set ``g`` maximizing the middle-layer image; it meets ``|F'| 2^n >= |F| C(n, n/2)``."""
    if f.n % 2:
        raise UsageError(f"the middle layer needs even n, got {f.n}")
    half = f.n // 2
    counts = [0] * (1 << f.n)
    for m in f.members:
        for g in range(1 << f.n):
            if popcount(m ^ g) == half:
                counts[g] += 1
    g = max(range(1 << f.n), key=lambda x: (counts[x], -x))
    return g, symdiff_shift(f, g, half)


def uniformize(f: SetFamily) -> SetFamily:
    """Largest layer ``{F : |F| = r}``; it keeps at least ``|f| / (n + 1)`` members."""
    buckets: dict[int, list[int]] = {}
    for m in f.members:
        buckets.setdefault(popcount(m), []).append(m)
    if not buckets:
        return f
    size = max(buckets, key=lambda r: (len(buckets[r]), -r))
    return SetFamily(f.n, tuple(buckets[size]))


# -- partitions ---------------------------------------------------------------------


def ordered_partitions(n: int, sizes: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All ordered partitions of ``range(n)`` into blocks of the given sizes, as masks."""

    def rec(remaining: int, idx: int) -> Iterator[tuple[int, ...]]:
        if idx == len(sizes) - 1:
            yield (remaining,)
            return
        for combo in itertools.combinations(elements_of(remaining), sizes[idx]):
            block = mask_of(combo)
            for rest in rec(remaining & ~block, idx + 1):
                yield (block,) + rest

    yield from rec((1 << n) - 1, 0)


def _check_partition_args(f: SetFamily, sizes: Sequence[int], shares: Sequence[int]) -> int:
    r = f.uniformity
    if f.members and r is None:
        raise UsageError("best_partition needs a uniform family")
    if len(sizes) != len(shares) or not sizes:
        raise UsageError("sizes and shares must be nonempty and of equal length")
    if sum(sizes) != f.n:
        raise UsageError(f"sizes sum to {sum(sizes)}, expected n={f.n}")
    if any(not 0 <= ri <= ni for ri, ni in zip(shares, sizes)):
        raise UsageError("each share must satisfy 0 <= r_i <= n_i")
    if r is not None and sum(shares) != r:
        raise UsageError(f"shares sum to {sum(shares)}, expected r={r}")
    return sum(shares)


def subfamily(f: SetFamily, blocks: Sequence[int], shares: Sequence[int]) -> SetFamily:
    kept = tuple(m for m in f.members if all(popcount(m & b) == ri for b, ri in zip(blocks, shares)))
    return SetFamily(f.n, kept)


def meets_guarantee(f: SetFamily, sub: SetFamily, sizes: Sequence[int], shares: Sequence[int]) -> bool:
    """``|F'| C(n, r) >= |F| prod C(n_i, r_i)`` in exact integers."""
    r = sum(shares)
    rhs = len(f)
    for ni, ri in zip(sizes, shares):
        rhs *= math.comb(ni, ri)
    return len(sub) * math.comb(f.n, r) >= rhs


@dataclass
class PartitionResult:
    blocks: tuple[int, ...]
    subfamily: SetFamily
    mode: str
    seed: int | None = None
    tries: int = 0


def best_partition(
    f: SetFamily,
    sizes: Sequence[int],
    shares: Sequence[int],
    seed: int = DEFAULT_SEED,
    max_tries: int = 100_000,
) -> PartitionResult:
    """A partition with block sizes ``sizes`` whose subfamily meets the averaging guarantee.

    For ``n <= 12`` every ordered partition is enumerated and the largest
    subfamily is returned. Larger ground sets draw random partitions (seeded)
    until one meets the guarantee, raising :class:`SearchFailure` otherwise.
    """
    _check_partition_args(f, sizes, shares)
    if f.n <= EXHAUSTIVE_PARTITION_N:
        best = None
        for blocks in ordered_partitions(f.n, sizes):
            sub = subfamily(f, blocks, shares)
            if best is None or len(sub) > len(best[1]):
                best = (blocks, sub)
        blocks, sub = best
        if not meets_guarantee(f, sub, sizes, shares):
            raise CertificationError("exhaustive partition search fell short of the averaging bound")
        return PartitionResult(blocks, sub, "exhaustive")
    rng = random.Random(seed)
    ground = list(range(f.n))
    for attempt in range(1, max_tries + 1):
        rng.shuffle(ground)
        blocks, pos = [], 0
        for size in sizes:
            blocks.append(mask_of(ground[pos : pos + size]))
            pos += size
        sub = subfamily(f, blocks, shares)
        if meets_guarantee(f, sub, sizes, shares):
            return PartitionResult(tuple(blocks), sub, "random", seed, attempt)
    raise SearchFailure(f"no partition met the guarantee in {max_tries} random tries (seed {seed})")


def contribution_count(n: int, sizes: Sequence[int], shares: Sequence[int]) -> int:
    """Partitions to which a single r-set contributes: multinomials of the shares and their complements."""
    r = sum(shares)
    count = math.factorial(r) * math.factorial(n - r)
    for ni, ri in zip(sizes, shares):
        count //= math.factorial(ri) * math.factorial(ni - ri)
    return count


def partition_total(f: SetFamily, sizes: Sequence[int], shares: Sequence[int]) -> tuple[int, int]:
    """``(sum over all partitions of |F'|, |F| * contribution_count)``; equal by double counting."""
    _check_partition_args(f, sizes, shares)
    total = sum(len(subfamily(f, blocks, shares)) for blocks in ordered_partitions(f.n, sizes))
    return total, len(f) * contribution_count(f.n, sizes, shares)


# -- orthogonal stars of set blocks -------------------------------------------------


def star_sets(blocks: Sequence[tuple[set[int], set[int]]]) -> list[frozenset[int]]:
    """``F_0 = w_1 + ... + w_k`` and ``F_j`` with block j's ``w_j`` replaced by ``u_j``."""
    ws = [frozenset(w) for w, _ in blocks]
    us = [frozenset(u) for _, u in blocks]
    out = [frozenset().union(*ws)]
    for j in range(len(blocks)):
        out.append(frozenset().union(*(us[i] if i == j else ws[i] for i in range(len(blocks)))))
    return out


def star_intersection_identity(blocks: Sequence[tuple[Iterable[int], Iterable[int]]], r: int) -> bool:
    """True iff every pair among ``F_1..F_k`` meets in exactly ``2s + (k-2) r`` elements.

    Blocks are pairs ``(w_i, u_i)`` of r-sets with ``|w_i & u_i| = s`` (the same
    s for every block) living in pairwise disjoint universes.
    """
    blocks = [(set(w), set(u)) for w, u in blocks]
    k = len(blocks)
    if k < 2:
        raise UsageError("need at least two blocks")
    if any(len(w) != r or len(u) != r for w, u in blocks):
        raise UsageError(f"every w_i and u_i must have exactly r={r} elements")
    s_values = {len(w & u) for w, u in blocks}
    if len(s_values) != 1:
        raise UsageError(f"blocks have different overlaps {sorted(s_values)}")
    universes = [w | u for w, u in blocks]
    for a, b in itertools.combinations(universes, 2):
        if a & b:
            raise UsageError("block universes must be pairwise disjoint")
    s = s_values.pop()
    sets = star_sets(blocks)
    want = 2 * s + (k - 2) * r
    return all(len(a & b) == want for a, b in itertools.combinations(sets[1:], 2))


# -- randomized property suites -------------------------------------------------------


@dataclass
class SuiteReport:
    name: str
    trials: int = 0
    checks: int = 0
    violations: list = field(default_factory=list)
    seed: int | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "suite": self.name,
            "trials": self.trials,
            "checks": self.checks,
            "violations": len(self.violations),
            "seed": self.seed,
        }


def _random_mask(rng: random.Random, n: int, p: float) -> int:
    return mask_of(i for i in range(n) if rng.random() < p)


def _random_uniform_family(rng: random.Random, n: int, r: int, size: int) -> SetFamily:
    pool = set()
    limit = math.comb(n, r)
    while len(pool) < min(size, limit):
        pool.add(mask_of(rng.sample(range(n), r)))
    return SetFamily(n, tuple(sorted(pool)))


def symdiff_identity_suite(trials: int = 10_000, max_n: int = 16, seed: int = 0) -> SuiteReport:
    """Random ``(A, B, G)`` triples on ground sets of size up to ``max_n``."""
    rng = random.Random(seed)
    report = SuiteReport("symdiff-identity", seed=seed)
    for _ in range(trials):
        n = rng.randint(1, max_n)
        p = rng.random()
        a, b, g = (_random_mask(rng, n, p) for _ in range(3))
        report.trials += 1
        report.checks += 1
        if not symdiff_identity_holds(a, b, g):
            report.violations.append((n, a, b, g))
    return report


def shift_preservation_suite(
    trials: int = 10_000, max_n: int = 10, k: int = 3, seed: int = 0
) -> SuiteReport:
    """A weak k-sunflower in a shifted uniform family pulls back to one in its preimages."""
    rng = random.Random(seed)
    report = SuiteReport("shift-preservation", seed=seed)
    for _ in range(trials):
        n = 2 * rng.randint(2, max_n // 2)
        r = rng.randint(1, n - 1)
        f = _random_uniform_family(rng, n, r, rng.randint(k, 12))
        g = _random_mask(rng, n, rng.random())
        shifted = symdiff_shift(f, g)
        report.trials += 1
        found = find_weak_sunflower(shifted.family, k) if len(shifted.family) >= k else None
        if found is None:
            continue
        report.checks += 1
        pre = [f.members[shifted.preimages[i]] for i in found]
        if not is_weak_sunflower(pre):
            report.violations.append((n, f.members, g, found))
    return report


def complement_duality_suite(max_n: int = 6, seed: int = 0, families_per_layer: int = 20) -> SuiteReport:
    """``f`` is s-avoiding iff its complements are ``(n - 2r + s)``-avoiding.

    Avoidance is a condition on pairs, so every pair of r-sets is checked
    exhaustively; random whole families are checked on top.
    """
    rng = random.Random(seed)
    report = SuiteReport("complement-duality", seed=seed)
    for n in range(1, max_n + 1):
        full = (1 << n) - 1
        for r in range(n + 1):
            layer = [mask_of(c) for c in itertools.combinations(range(n), r)]
            for a, b in itertools.combinations(layer, 2):
                report.checks += 1
                if popcount((full ^ a) & (full ^ b)) != n - 2 * r + popcount(a & b):
                    report.violations.append((n, r, a, b))
        for r in range(n + 1):
            for _ in range(families_per_layer):
                f = _random_uniform_family(rng, n, r, rng.randint(1, math.comb(n, r)))
                report.trials += 1
                for s in range(r + 1):
                    report.checks += 1
                    if is_s_avoiding(f, s) != is_s_avoiding(f.complements(), n - 2 * r + s):
                        report.violations.append((n, r, s, f.members))
    return report


def partition_identity_suite(configs: int = 200, max_n: int = 8, max_k: int = 3, seed: int = 0) -> SuiteReport:
    """Exact double counting of ``sum |F'|`` over all partitions on random configurations."""
    rng = random.Random(seed)
    report = SuiteReport("partition-identity", seed=seed)
    while report.trials < configs:
        n = rng.randint(1, max_n)
        k = rng.randint(1, min(max_k, n))
        cuts = sorted(rng.sample(range(1, n), k - 1))
        sizes = [b - a for a, b in zip([0, *cuts], [*cuts, n])]
        shares = [rng.randint(0, ni) for ni in sizes]
        r = sum(shares)
        f = _random_uniform_family(rng, n, r, rng.randint(1, math.comb(n, r)))
        total, formula = partition_total(f, sizes, shares)
        report.trials += 1
        report.checks += 1
        if total != formula:
            report.violations.append((n, sizes, shares, f.members, total, formula))
    return report
