from __future__ import annotations

import math
import random

import pytest

from cornerbound import partition_search as psr
from cornerbound.constants import sunflower_base
from cornerbound.errors import DomainError
from cornerbound.rates import complement_params, entropy, log_delta

QUOTED_PLAN = psr.PartitionPlan.from_lists(
    (0.774, 0.113, 0.113), (0.384, 0.062, 0.052), (0.084, 0.038, 0.028)
)


def test_symmetric_thirds():
    rate = psr.plan_rate(psr.PartitionPlan.symmetric(0.5, 0.15, 3), 0.5, 0.15)
    assert rate.base == pytest.approx(1.970, abs=5e-4)
    assert rate.tag == "Theorem 1.8"


def test_quoted_asymmetric_plan():
    # the quoted shares are rounded to three digits (rho shares sum to 0.498)
    with pytest.raises(DomainError):
        psr.plan_rate(QUOTED_PLAN, 0.5, 0.15)
    rate = psr.plan_rate(QUOTED_PLAN, 0.5, 0.15, share_tol=5e-3)
    assert rate.base <= 1.964
    assert rate.base == pytest.approx(1.964, abs=1e-3)


def test_single_block_is_base_rate():
    for rho, sigma in [(0.5, 0.15), (0.4, 0.1), (0.3, 0.2)]:
        plan = psr.PartitionPlan.from_lists((1.0,), (rho,), (sigma,))
        expected = math.exp(entropy(rho) + log_delta(rho, sigma))
        assert psr.plan_rate(plan, rho, sigma).base == pytest.approx(expected, abs=1e-12)


def test_symmetric_plan_equals_c_class():
    rng = random.Random(0)
    for _ in range(100):
        rho = rng.uniform(0.05, 0.5)
        sigma = rng.uniform(0.01, 0.99) * rho
        for k in (1, 3, 4):
            plan = psr.PartitionPlan.symmetric(rho, sigma, k)
            lhs = psr.plan_rate(plan, rho, sigma).log_base
            rhs = entropy(rho) + log_delta(rho, sigma) / k
            assert lhs == pytest.approx(rhs, abs=1e-12)
        assert psr.plan_rate(psr.PartitionPlan.symmetric(rho, sigma, 3), rho, sigma).log_base == pytest.approx(
            psr.forbidden_intersection_base(rho, sigma, 3).log_base, abs=1e-12
        )


def test_complemented_blocks_match_manual():
    plan = psr.PartitionPlan.from_lists((0.6, 0.4), (0.33, 0.17), (0.12, 0.03))
    rates = psr.block_log_rates(plan)
    r0, s0 = complement_params(0.33 / 0.6, 0.12 / 0.6)
    assert rates[0] == pytest.approx(0.6 * log_delta(r0, s0), abs=1e-15)
    assert rates[1] == pytest.approx(0.4 * log_delta(0.17 / 0.4, 0.03 / 0.4), abs=1e-15)


def test_forbidden_intersection_examples():
    assert psr.forbidden_intersection_base(0.5, 0.25, 3).base == pytest.approx(1.915, abs=5e-4)
    assert psr.forbidden_intersection_base(0.5, 0.25, 1).base == pytest.approx(1.755, abs=5e-4)
    assert psr.forbidden_intersection_base(0.5, 0.15, 1).base == pytest.approx(1.911, abs=5e-4)
    with pytest.raises(DomainError):
        psr.forbidden_intersection_base(0.5, 0.25, 2)
    hyp = psr.forbidden_intersection_base(0.5, 0.25, 2, allow_hypothetical=True)
    assert "hypothetical" in hyp.tag
    with pytest.raises(DomainError):
        psr.forbidden_intersection_base(0.5, 0.25, 5)


def test_monotone_in_c():
    for rho, sigma in [(0.5, 0.25), (0.5, 0.1), (0.3, 0.1)]:
        bases = [psr.forbidden_intersection_base(rho, sigma, c).base for c in (1, 3, 4)]
        assert bases[0] < bases[1] < bases[2]


def test_clique_base():
    clique = psr.clique_base(0.5, math.sqrt(2) / 4, 3, 1)
    assert clique.base == pytest.approx(1.879, abs=1e-3)
    assert clique.log_base == pytest.approx(sunflower_base(3).log_base, abs=1e-12)
    assert psr.clique_base(0.5, 0.2, 10**6, 1).base == pytest.approx(2, abs=1e-5)
    assert psr.clique_base(0.5, 0.2, 4, 1).base < psr.clique_base(0.5, 0.2, 4, 3).base
    with pytest.raises(DomainError):
        psr.clique_base(0.5, 0.2, 2, 1)


def random_plan_rate(rng, rho, sigma, k):
    def simplex():
        w = [rng.expovariate(1.0) for _ in range(k)]
        t = sum(w)
        return [x / t for x in w]

    nus, rs, ss = simplex(), [rho * x for x in simplex()], [sigma * x for x in simplex()]
    plan = psr.PartitionPlan.from_lists(nus, rs, ss)
    try:
        return psr.plan_rate(plan, rho, sigma).base
    except DomainError:
        return None


def test_optimizer_beats_random_plans():
    out = psr.optimize_plan(0.5, 0.15, 3, starts=16, seed=0)
    assert out.rate.base <= 1.964 + 5e-4
    assert out.rate.base >= psr.forbidden_intersection_base(0.5, 0.15, 1).base
    rng = random.Random(7)
    samples = [random_plan_rate(rng, 0.5, 0.15, 3) for _ in range(20_000)]
    assert out.rate.base <= min(b for b in samples if b is not None) + 1e-12
    out.plan.validate(0.5, 0.15)


def test_optimizer_no_gain_at_half():
    out = psr.optimize_plan(0.5, 0.25, 3, starts=8, seed=1)
    assert out.improvement == pytest.approx(0.0, abs=1e-9)
    assert out.rate.base == pytest.approx(out.symmetric_rate.base, abs=1e-9)


def test_optimizer_never_worse_than_symmetric():
    for rho, sigma, k in [(0.4, 0.1, 3), (0.3, 0.2, 2), (0.45, 0.05, 4)]:
        out = psr.optimize_plan(rho, sigma, k, starts=4, seed=2)
        assert out.rate.log_base <= out.symmetric_rate.log_base
        assert out.rate.base >= psr.forbidden_intersection_base(rho, sigma, 1).base - 1e-12
    one = psr.optimize_plan(0.4, 0.1, 1)
    assert one.rate == one.symmetric_rate


def test_optimizer_is_deterministic():
    a = psr.optimize_plan(0.5, 0.15, 3, starts=4, seed=3)
    b = psr.optimize_plan(0.5, 0.15, 3, starts=4, seed=3)
    assert a.rate.log_base == b.rate.log_base and a.plan == b.plan


def test_plan_json_roundtrip():
    assert psr.PartitionPlan.from_json(QUOTED_PLAN.to_json()) == QUOTED_PLAN


def test_finite_prime_certificate():
    cert = psr.finite_prime_certificate(QUOTED_PLAN, 1002, 0.5, 0.15)
    assert sum(cert["sizes"]) == 1002 and sum(cert["r_parts"]) == cert["r"]
    assert sum(cert["primes"]) == cert["r"] - cert["s"]
    assert all(psr.prime_split.is_prime(p) for p in cert["primes"])
    with pytest.raises(DomainError):
        psr.finite_prime_certificate(QUOTED_PLAN, 1000, 0.5, 0.15)


def test_sunflower_chain():
    for k in range(3, 21):
        chain = psr.sunflower_chain(k)
        assert abs(chain.rate.log_base - sunflower_base(k).log_base) <= 1e-12
        assert chain.c_class == 1
    chain = psr.sunflower_chain(3, n=600)
    f = chain.finite
    assert psr.prime_split.is_prime(f["p"])
    assert f["forbidden_intersection"] == f["check"]
    assert f["sigma_local"] == pytest.approx(math.sqrt(2) / 4, abs=0.02)
    with pytest.raises(DomainError):
        psr.sunflower_chain(2)
