from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from cornerbound import tree_concat as tc
from cornerbound.errors import CapacityError, DomainError, UsageError


def alpha_brute(g: tc.SmallGraph) -> int:
    n = g.n_vertices
    best = 0
    for mask in range(1 << n):
        verts = [v for v in range(n) if mask >> v & 1]
        if all(not g.has_edge(u, v) for u, v in itertools.combinations(verts, 2)):
            best = max(best, len(verts))
    return best


def hom_brute(graphs, tree, w) -> bool:
    verts = [v for v in range(graphs[0].n_vertices) if w >> v & 1]
    for images in itertools.product(verts, repeat=tree.k + 1):
        if all(graphs[i].has_edge(images[a], images[b]) for i, (a, b) in enumerate(tree.edges)):
            return True
    return False


def orthogonal_free_brute(graphs, shape) -> tuple[int, int]:
    """Maximum size and smallest-bitmask witness by enumerating every subset of the product."""
    configs = tc.orthogonal_configurations(graphs, shape)
    total = 1
    for g in graphs:
        total *= g.n_vertices
    best = (-1, 0)
    for mask in range(1 << total):
        if any(c & mask == c for c in configs):
            continue
        size = mask.bit_count()
        if size > best[0]:
            best = (size, mask)
    return best


def test_independence_examples():
    assert tc.independence_number(tc.SmallGraph.from_edges(5, [])) == 5
    assert tc.independence_number(tc.cycle_graph(5)) == 2
    assert tc.independence_number(tc.complete_graph(6)) == 1


def test_independence_against_brute_force():
    rng = random.Random(0)
    for _ in range(300):
        g = tc.random_graph(rng.randint(1, 10), rng.random(), rng)
        mis = tc.max_independent_set(g)
        assert mis.bit_count() == alpha_brute(g)
        verts = [v for v in range(g.n_vertices) if mis >> v & 1]
        assert all(not g.has_edge(u, v) for u, v in itertools.combinations(verts, 2))


def test_graph_validation():
    with pytest.raises(UsageError):
        tc.SmallGraph(2, (0b10, 0))
    with pytest.raises(UsageError):
        tc.SmallGraph.from_edges(2, [(1, 1)])
    with pytest.raises(CapacityError):
        tc.SmallGraph(25, (0,) * 25)


def test_tree_validation():
    assert tc.EdgeOrderedTree.star(3).k == 3
    with pytest.raises(DomainError):
        tc.EdgeOrderedTree(((0, 1), (1, 0)))
    with pytest.raises(DomainError):
        tc.EdgeOrderedTree(((0, 1), (2, 3)))
    assert len(tc.all_edge_ordered_trees(2)) == 6
    # 16 labelled trees on 4 vertices, 3! orders each
    assert len(tc.all_edge_ordered_trees(3)) == 96


def test_single_edge_base_case():
    g = tc.SmallGraph.from_edges(4, [(0, 1), (2, 3)])
    tree = tc.EdgeOrderedTree.path(1)
    for w in range(16):
        found = tc.find_tree_homomorphism([g], tree, w)
        has_edge = any(w >> u & 1 and w >> v & 1 for u, v in g.edges())
        assert (found is not None) == has_edge


def test_repeated_vertices_are_needed():
    """On a path a-b-c the 2-edge path maps as a -> b -> a; injective images are impossible with w={a,b}."""
    g = tc.SmallGraph.from_edges(3, [(0, 1), (1, 2)])
    tree = tc.EdgeOrderedTree.path(2)
    h = tc.find_tree_homomorphism([g, g], tree, 0b111)
    assert h is not None and tc.is_tree_homomorphism([g, g], tree, 0b111, h)
    h = tc.find_tree_homomorphism([g, g], tree, 0b011)
    assert h is not None
    assert len(set(h.values())) < 3


def test_homomorphism_against_brute_force():
    rng = random.Random(1)
    for _ in range(300):
        k = rng.randint(1, 3)
        n = rng.randint(1, 5)
        graphs = [tc.random_graph(n, rng.random(), rng) for _ in range(k)]
        tree = rng.choice(tc.all_edge_ordered_trees(k))
        w = rng.randrange(1 << n)
        h = tc.find_tree_homomorphism(graphs, tree, w)
        assert (h is not None) == hom_brute(graphs, tree, w)
        if h is not None:
            assert tc.is_tree_homomorphism(graphs, tree, w, h)


def test_large_subsets_admit_trees_k3():
    rng = random.Random(2)
    trees = tc.all_edge_ordered_trees(3)
    checked = 0
    for _ in range(40):
        # near-complete graphs keep sum(alpha) small enough for large subsets to exist
        n = rng.randint(4, 6)
        graphs = [tc.random_graph(n, rng.uniform(0.8, 1.0), rng) for _ in range(3)]
        threshold = sum(tc.independence_number(g) for g in graphs)
        for w in range(1 << n):
            if w.bit_count() > threshold:
                for tree in trees:
                    checked += 1
                    assert tc.find_tree_homomorphism(graphs, tree, w) is not None
    assert checked > 0


def test_tree_lemma_exhaustive_small():
    report = tc.certify_tree_lemma(k=2, max_vertices=3, exhaustive=True)
    assert report.ok and report.subsets_checked > 0


def test_k2_times_k2():
    k2 = tc.complete_graph(2)
    for shape in tc.SHAPES:
        res = tc.max_orthogonal_free([k2, k2], shape)
        assert res.size == 2
        assert (res.size, res.witness) == orthogonal_free_brute([k2, k2], shape)
    assert tc.concat_bound([k2, k2]) == 4


def test_single_factor_is_alpha():
    rng = random.Random(3)
    for _ in range(30):
        g = tc.random_graph(rng.randint(1, 8), rng.random(), rng)
        for shape in tc.SHAPES:
            assert tc.max_orthogonal_free([g], shape).size == tc.independence_number(g)


def test_orthogonal_free_against_brute_force():
    rng = random.Random(4)
    for graphs in tc.random_instances(60, 2, 4, 12, seed=9):
        for shape in tc.SHAPES:
            res = tc.max_orthogonal_free(graphs, shape)
            assert (res.size, res.witness) == orthogonal_free_brute(graphs, shape)
    for _ in range(10):
        graphs = [tc.random_graph(2, 1.0, rng) for _ in range(3)]
        res = tc.max_orthogonal_free(graphs, "star")
        assert (res.size, res.witness) == orthogonal_free_brute(graphs, "star")


def test_star_and_path_agree_for_two_factors():
    for graphs in tc.random_instances(50, 2, 4, 16, seed=11):
        assert tc.max_orthogonal_free(graphs, "star").size == tc.max_orthogonal_free(graphs, "path").size


def test_concat_bound_holds_and_empty_graphs():
    report = tc.verify_concat_bound(shape="path", trials=50, seed=3)
    assert report.ok and report.instances == 50
    empty = [tc.SmallGraph.from_edges(3, []), tc.SmallGraph.from_edges(2, [])]
    assert tc.concat_bound(empty) == Fraction(12)
    assert tc.max_orthogonal_free(empty, "star").size == 6


def test_capacity_refusal():
    graphs = [tc.complete_graph(6)] * 3
    with pytest.raises(CapacityError):
        tc.max_orthogonal_free(graphs, "star", node_budget=1000)


def test_witness_coords():
    k2 = tc.complete_graph(2)
    res = tc.max_orthogonal_free([k2, k2], "star")
    assert res.witness_coords([2, 2]) == [(0, 0), (0, 1)]
