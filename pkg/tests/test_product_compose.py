from __future__ import annotations

import math
import random

import pytest

from cornerbound.errors import DomainError
from cornerbound.product_compose import (
    SuperRamseyParams,
    composed_rate,
    iterated_composition,
    optimal_eta,
    summand_log_rates,
    tree_concat_rate,
)
from cornerbound.rates import GrowthRate


def test_eta_example():
    p1 = SuperRamseyParams(2, 0.2, 2)
    p2 = SuperRamseyParams(2, 0.2, 2)
    eta = optimal_eta(p1, p2)
    assert eta == pytest.approx(math.log(1.2) / math.log(1.44 * 2), abs=1e-15)
    assert eta == pytest.approx(0.17236, abs=1e-5)
    comp = composed_rate(p1, p2)
    assert comp.rate.base == pytest.approx(1.2**eta, abs=1e-15)
    assert comp.rate.base == pytest.approx(1.0319, abs=1e-4)
    assert comp.rate.tag == "Theorem 1.2"
    assert comp.params.m == 4


def test_trivial_second_factor():
    p1 = SuperRamseyParams(3, 0.5, 2)
    assert optimal_eta(p1, SuperRamseyParams(1, 0, 1)) == pytest.approx(1.0)
    # composing with a trivial configuration gives no ratio growth
    assert composed_rate(p1, SuperRamseyParams(1.5, 0.0, 2)).rate.base == pytest.approx(1.0)
    assert composed_rate(p1, SuperRamseyParams(1.5, 1e-9, 2)).rate.base == pytest.approx(1.0, abs=1e-8)


def test_eta_decreases_in_m():
    p1 = SuperRamseyParams(2, 0.3, 2)
    etas = [optimal_eta(p1, SuperRamseyParams(2, 0.3, m)) for m in range(1, 8)]
    assert all(a > b for a, b in zip(etas, etas[1:]))


def random_params(rng):
    return SuperRamseyParams(rng.uniform(1.0, 4.0), rng.uniform(0.01, 1.0), rng.randint(1, 6))


def test_balance_and_perturbation():
    rng = random.Random(0)
    for _ in range(300):
        p1, p2 = random_params(rng), random_params(rng)
        eta = optimal_eta(p1, p2)
        a, b = summand_log_rates(p1, p2, eta)
        assert abs(a - b) < 1e-9
        best = max(a, b)
        for d in (-0.01, 0.01):
            assert max(summand_log_rates(p1, p2, eta + d)) > best
        comp = composed_rate(p1, p2)
        assert comp.params.epsilon > 0
        assert comp.rate.log_base == pytest.approx(-best, abs=1e-12)


def test_iterated_composition():
    ps = [SuperRamseyParams(2, 0.2, 2)] * 4
    it = iterated_composition(ps)
    assert it.params.m == 16
    assert 1 < it.rate.base < 1.2
    two = iterated_composition(ps[:2])
    assert two.rate.base == pytest.approx(composed_rate(ps[0], ps[1]).rate.base)
    assert iterated_composition(ps[:1]).rate.base == pytest.approx(1.2)
    with pytest.raises(DomainError):
        iterated_composition([])


def test_tree_concat_rate_beats_chaining():
    """k-fold chaining loses to the semicross rate ratio^(1/k) for the two-point base."""
    ratio = GrowthRate(math.log(1.2))
    p = SuperRamseyParams(2, 0.2, 2)
    for k in (2, 3, 4):
        chained = iterated_composition([p] * k).rate.base
        assert tree_concat_rate(ratio, k).base > chained


def test_validation():
    with pytest.raises(DomainError):
        SuperRamseyParams(0.5, 0.1, 2)
    with pytest.raises(DomainError):
        SuperRamseyParams(2, -0.1, 2)
    with pytest.raises(DomainError):
        optimal_eta(SuperRamseyParams(1, 0, 1), SuperRamseyParams(1, 0, 1))
    with pytest.raises(DomainError):
        tree_concat_rate(GrowthRate(0.1), 0)
