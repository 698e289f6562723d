"""Exact small-instance engine for tree concatenation over edge-indexed graphs.

Graphs are stored as tuples of row bitmasks. Everything here is exhaustive:
searches either return the exact answer or raise :class:`CapacityError`.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import CapacityError, CertificationError, DomainError, UsageError

MAX_VERTICES = 24
EXHAUSTIVE_PRODUCT = 20
DEFAULT_NODE_BUDGET = 1 << 24
SHAPES = ("star", "path")


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _as_mask(vertices: int | Iterable[int]) -> int:
    if isinstance(vertices, int):
        return vertices
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


@dataclass(frozen=True)
class SmallGraph:
    n_vertices: int
    adjacency: tuple[int, ...]

    def __post_init__(self) -> None:
        n = self.n_vertices
        if n > MAX_VERTICES:
            raise CapacityError(f"graphs are limited to {MAX_VERTICES} vertices, got {n}")
        if len(self.adjacency) != n:
            raise UsageError(f"adjacency has {len(self.adjacency)} rows for {n} vertices")
        full = (1 << n) - 1
        for v, row in enumerate(self.adjacency):
            if row & ~full:
                raise UsageError(f"row {v} references vertices outside range({n})")
            if row >> v & 1:
                raise UsageError(f"loop at vertex {v}")
            for u in _bits(row):
                if not self.adjacency[u] >> v & 1:
                    raise UsageError(f"adjacency is not symmetric at ({v}, {u})")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "SmallGraph":
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise UsageError(f"loop at vertex {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def from_adjacency_lists(cls, lists: Sequence[Sequence[int]]) -> "SmallGraph":
        return cls.from_edges(len(lists), ((u, v) for u, nbrs in enumerate(lists) for v in nbrs))

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n_vertices) for v in _bits(self.adjacency[u]) if u < v]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u] >> v & 1)

    def adjacency_lists(self) -> list[list[int]]:
        return [list(_bits(row)) for row in self.adjacency]


def complete_graph(n: int) -> SmallGraph:
    return SmallGraph.from_edges(n, itertools.combinations(range(n), 2))


def cycle_graph(n: int) -> SmallGraph:
    return SmallGraph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def random_graph(n: int, p: float, rng: random.Random) -> SmallGraph:
    return SmallGraph.from_edges(n, (e for e in itertools.combinations(range(n), 2) if rng.random() < p))


def max_independent_set(g: SmallGraph) -> int:
    """Bitmask of a maximum independent set (branch and bound on bitmasks)."""
    adj = g.adjacency
    best = [0, 0]  # size, mask

    def search(cand: int, chosen: int, size: int) -> None:
        if not cand:
            if size > best[0]:
                best[0], best[1] = size, chosen
            return
        if size + cand.bit_count() <= best[0]:
            return
        # isolated candidates can always be taken
        v = (cand & -cand).bit_length() - 1
        nb = adj[v] & cand
        search(cand & ~nb & ~(1 << v), chosen | 1 << v, size + 1)
        if nb:
            search(cand & ~(1 << v), chosen, size)

    search((1 << g.n_vertices) - 1, 0, 0)
    return best[1]


def independence_number(g: SmallGraph) -> int:
    """Exact alpha(G)."""
    return max_independent_set(g).bit_count()


@dataclass(frozen=True)
class EdgeOrderedTree:
    """Tree on vertices ``0..k``; ``edges[i]`` is the edge carrying label ``i``."""

    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        k = len(self.edges)
        if k < 1:
            raise DomainError("a tree needs at least one edge")
        verts = {v for e in self.edges for v in e}
        if verts != set(range(k + 1)):
            raise DomainError(f"tree with {k} edges must span vertices 0..{k}, got {sorted(verts)}")
        parent = list(range(k + 1))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.edges:
            ru, rv = find(u), find(v)
            if ru == rv:
                raise DomainError(f"edges {self.edges} contain a cycle")
            parent[ru] = rv

    @property
    def k(self) -> int:
        return len(self.edges)

    @classmethod
    def star(cls, k: int) -> "EdgeOrderedTree":
        return cls(tuple((0, i + 1) for i in range(k)))

    @classmethod
    def path(cls, k: int) -> "EdgeOrderedTree":
        return cls(tuple((i, i + 1) for i in range(k)))


def all_edge_ordered_trees(k: int) -> list[EdgeOrderedTree]:
    """Every tree on ``0..k`` with every ordering of its edges."""
    out = []
    for edges in itertools.combinations(itertools.combinations(range(k + 1), 2), k):
        try:
            EdgeOrderedTree(edges)
        except DomainError:
            continue
        out.extend(EdgeOrderedTree(perm) for perm in itertools.permutations(edges))
    return out


def _check_shared(graphs: Sequence[SmallGraph]) -> int:
    if not graphs:
        raise UsageError("need at least one graph")
    n = graphs[0].n_vertices
    if any(g.n_vertices != n for g in graphs):
        raise UsageError("graphs must share one vertex set")
    return n


def find_tree_homomorphism(
    graphs: Sequence[SmallGraph], tree: EdgeOrderedTree, w: int | Iterable[int]
) -> dict[int, int] | None:
    """Map tree vertices into ``w`` so that edge ``i`` lands on an edge of ``graphs[i]``.

    Images need not be distinct. Returns ``None`` when no such map exists; the
    search is exhaustive.
    """
    n = _check_shared(graphs)
    if len(graphs) != tree.k:
        raise UsageError(f"{len(graphs)} graphs given for a tree with {tree.k} edges")
    w = _as_mask(w) & ((1 << n) - 1)

    # BFS order from vertex 0, each later vertex attached through a labelled edge
    incident: dict[int, list[tuple[int, int]]] = {v: [] for v in range(tree.k + 1)}
    for label, (a, b) in enumerate(tree.edges):
        incident[a].append((b, label))
        incident[b].append((a, label))
    order, via, seen = [0], {}, {0}
    for v in order:
        for u, label in incident[v]:
            if u not in seen:
                seen.add(u)
                via[u] = (v, label)
                order.append(u)

    h: dict[int, int] = {}

    def extend(pos: int) -> bool:
        if pos == len(order):
            return True
        v = order[pos]
        if pos == 0:
            options = w
        else:
            parent, label = via[v]
            options = graphs[label].adjacency[h[parent]] & w
        for x in _bits(options):
            h[v] = x
            if extend(pos + 1):
                return True
        h.pop(v, None)
        return False

    return dict(h) if extend(0) else None


def is_tree_homomorphism(
    graphs: Sequence[SmallGraph], tree: EdgeOrderedTree, w: int | Iterable[int], mapping: dict[int, int]
) -> bool:
    """Independent re-check of the per-label edge-membership contract."""
    w = _as_mask(w)
    if set(mapping) != set(range(tree.k + 1)):
        return False
    if any(not w >> x & 1 for x in mapping.values()):
        return False
    return all(graphs[i].has_edge(mapping[a], mapping[b]) for i, (a, b) in enumerate(tree.edges))


# -- orthogonal configurations in Cartesian products ---------------------------


def _product_index(coords: Sequence[int], sizes: Sequence[int]) -> int:
    idx = 0
    for c, s in zip(coords, sizes):
        idx = idx * s + c
    return idx


def product_coords(index: int, sizes: Sequence[int]) -> tuple[int, ...]:
    coords = []
    for s in reversed(sizes):
        index, c = divmod(index, s)
        coords.append(c)
    return tuple(reversed(coords))


def orthogonal_configurations(graphs: Sequence[SmallGraph], shape: str) -> list[int]:
    """All orthogonal stars or paths as bitmasks over product indices.

    One oriented edge ``(u_i, w_i)`` is chosen per coordinate. Stars replace a
    single coordinate of ``(w_1, ..., w_k)`` by ``u_i``; paths replace prefixes.
    """
    if shape not in SHAPES:
        raise UsageError(f"shape must be one of {SHAPES}, got {shape!r}")
    sizes = [g.n_vertices for g in graphs]
    oriented = [[(u, v) for u, v in g.edges()] + [(v, u) for u, v in g.edges()] for g in graphs]
    configs = set()
    for choice in itertools.product(*oriented):
        us = [e[0] for e in choice]
        ws = [e[1] for e in choice]
        pts = [ws]
        for i in range(len(graphs)):
            if shape == "star":
                pts.append(ws[:i] + [us[i]] + ws[i + 1 :])
            else:
                pts.append(us[: i + 1] + ws[i + 1 :])
        mask = 0
        for p in pts:
            mask |= 1 << _product_index(p, sizes)
        configs.add(mask)
    return sorted(configs)


@dataclass
class OrthogonalFreeResult:
    size: int
    witness: int
    product_size: int
    nodes: int
    exhaustive: bool

    def witness_coords(self, sizes: Sequence[int]) -> list[tuple[int, ...]]:
        return [product_coords(i, sizes) for i in _bits(self.witness)]


def max_orthogonal_free(
    graphs: Sequence[SmallGraph],
    shape: str,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> OrthogonalFreeResult:
    """Largest subset of the product of vertex sets with no orthogonal star/path.

    Vertices are decided from the highest product index down, excluding before
    including, so the first maximum found is the one with the smallest bitmask.
    Products above :data:`EXHAUSTIVE_PRODUCT` are still solved exactly as long
    as the search stays inside ``node_budget``; otherwise :class:`CapacityError`.
    """
    sizes = [g.n_vertices for g in graphs]
    total = 1
    for s in sizes:
        total *= s
    n_configs = 1
    for g in graphs:
        n_configs *= 2 * len(g.edges())
    if n_configs > node_budget:
        raise CapacityError(f"{n_configs} orthogonal configurations exceed the budget of {node_budget}")
    configs = orthogonal_configurations(graphs, shape)
    by_vertex: list[list[int]] = [[] for _ in range(total)]
    for cfg in configs:
        for v in _bits(cfg):
            by_vertex[v].append(cfg & ~(1 << v))

    best = [-1, 0]
    nodes = [0]

    def search(v: int, chosen: int, size: int) -> None:
        nodes[0] += 1
        if nodes[0] > node_budget:
            raise CapacityError(f"search exceeded its budget of {node_budget} nodes")
        if v < 0:
            if size > best[0]:
                best[0], best[1] = size, chosen
            return
        if size + v + 1 <= best[0]:
            return
        search(v - 1, chosen, size)
        if all(rest & chosen != rest for rest in by_vertex[v]):
            search(v - 1, chosen | 1 << v, size + 1)

    # include-first order would find large sets sooner; a greedy pass seeds the bound instead
    greedy = 0
    for v in range(total):
        if all(rest & greedy != rest for rest in by_vertex[v]):
            greedy |= 1 << v
    best[0] = greedy.bit_count() - 1
    search(total - 1, 0, 0)
    return OrthogonalFreeResult(best[0], best[1], total, nodes[0], total <= EXHAUSTIVE_PRODUCT)


def concat_bound(graphs: Sequence[SmallGraph]) -> Fraction:
    """``|prod V_i| * sum alpha(G_i)/|V_i|`` as an exact rational."""
    total = 1
    for g in graphs:
        total *= g.n_vertices
    return total * sum(Fraction(independence_number(g), g.n_vertices) for g in graphs)


@dataclass
class ConcatReport:
    shape: str
    instances: int = 0
    violations: list = field(default_factory=list)
    worst_slack: Fraction | None = None
    tight: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "shape": self.shape,
            "instances": self.instances,
            "violations": len(self.violations),
            "worst_slack": None if self.worst_slack is None else float(self.worst_slack),
            "tight_instances": self.tight,
        }


def verify_concat_bound(
    instances: Iterable[Sequence[SmallGraph]] | None = None,
    shape: str = "star",
    trials: int = 100,
    k: int = 2,
    max_vertices: int = 4,
    max_product: int = 16,
    seed: int = 0,
    raise_on_violation: bool = True,
) -> ConcatReport:
    """Check the orthogonal-free maximum against the alpha-ratio bound on many instances.

    With ``instances=None``, ``trials`` random k-tuples of graphs are drawn with
    at most ``max_vertices`` vertices each and product size at most
    ``max_product``.
    """
    if instances is None:
        instances = random_instances(trials, k, max_vertices, max_product, seed)
    report = ConcatReport(shape)
    for graphs in instances:
        value = max_orthogonal_free(graphs, shape).size
        bound = concat_bound(graphs)
        slack = bound - value
        report.instances += 1
        if report.worst_slack is None or slack < report.worst_slack:
            report.worst_slack = slack
        if slack == 0:
            report.tight += 1
        if slack < 0:
            report.violations.append(([g.adjacency_lists() for g in graphs], value, bound))
    if report.violations and raise_on_violation:
        raise CertificationError(f"{len(report.violations)} instances exceed the concatenation bound")
    return report


def random_instances(
    trials: int, k: int, max_vertices: int, max_product: int, seed: int
) -> list[list[SmallGraph]]:
    rng = random.Random(seed)
    out = []
    while len(out) < trials:
        sizes = [rng.randint(1, max_vertices) for _ in range(k)]
        total = 1
        for s in sizes:
            total *= s
        if total > max_product:
            continue
        out.append([random_graph(s, rng.random(), rng) for s in sizes])
    return out


@dataclass
class TreeLemmaReport:
    graph_tuples: int = 0
    trees: int = 0
    subsets_checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "graph_tuples": self.graph_tuples,
            "trees": self.trees,
            "subsets_checked": self.subsets_checked,
            "violations": len(self.violations),
        }


def all_graphs(n: int) -> Iterator[SmallGraph]:
    """Every labelled graph on ``n`` vertices."""
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield SmallGraph.from_edges(n, (pairs[i] for i in _bits(mask)))


def certify_tree_lemma(
    trials: int = 500,
    k: int = 2,
    max_vertices: int = 4,
    seed: int = 0,
    exhaustive: bool = False,
    raise_on_violation: bool = True,
) -> TreeLemmaReport:
    """Every subset larger than ``sum alpha(G_i)`` must contain a labelled tree image.

    Graph k-tuples share a vertex set of size at most ``max_vertices``: either
    ``trials`` random tuples or, with ``exhaustive``, every labelled tuple.
    All edge-ordered trees with k edges and all large subsets are tried, and
    each mapping found is re-validated independently.
    """
    trees = all_edge_ordered_trees(k)
    report = TreeLemmaReport(trees=len(trees))
    if exhaustive:
        tuples = (
            list(gs)
            for n in range(1, max_vertices + 1)
            for gs in itertools.product(list(all_graphs(n)), repeat=k)
        )
    else:
        rng = random.Random(seed)

        def sampled() -> Iterator[list[SmallGraph]]:
            for _ in range(trials):
                n = rng.randint(1, max_vertices)
                yield [random_graph(n, rng.random(), rng) for _ in range(k)]

        tuples = sampled()
    for graphs in tuples:
        n = graphs[0].n_vertices
        threshold = sum(independence_number(g) for g in graphs)
        report.graph_tuples += 1
        for w in range(1 << n):
            if w.bit_count() <= threshold:
                continue
            for tree in trees:
                report.subsets_checked += 1
                h = find_tree_homomorphism(graphs, tree, w)
                if h is None or not is_tree_homomorphism(graphs, tree, w, h):
                    report.violations.append(([g.adjacency_lists() for g in graphs], tree.edges, w))
    if report.violations and raise_on_violation:
        raise CertificationError(f"{len(report.violations)} large subsets lack a tree homomorphism")
    return report
