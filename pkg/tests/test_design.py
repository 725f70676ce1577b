import numpy as np
import pytest

from sparsefft import (
    PrimePlan,
    SubsetAddress,
    generate_primes,
    plan_parameters,
    subset_membership,
    verify_k_majority,
    verify_lift_uniqueness,
)


@pytest.mark.parametrize(
    "n,k,m,p_primes,K,q1",
    [
        (1000, 5, 4, (2, 3, 5, 7), 61, 7),
        (512, 2, 5, (2, 3, 5, 7, 11), 55, 11),
        (30, 2, 3, (2, 3, 5), 25, 5),
    ],
)
def test_plan_examples(n, k, m, p_primes, K, q1):
    plan = plan_parameters(n, k)
    assert plan.m == m
    assert plan.p_primes == p_primes
    assert plan.K == K
    assert plan.q(1) == q1


@pytest.mark.parametrize("n,k", [(1000, 5), (512, 2), (30, 2), (4096, 27), (30030, 4)])
def test_plan_invariants(n, k):
    plan = plan_parameters(n, k)
    # fine-prime product brackets n/k (integer comparisons)
    product = plan.p_product
    assert product * k >= n
    partial = product // plan.p_primes[-1]
    assert partial * k <= n or plan.m == 1
    # coarse primes start at max(p_m, k) and are consecutive
    assert plan.q(1) >= max(plan.p_primes[-1], k)
    assert list(plan.q_primes) == generate_primes(plan.K, plan.q(1))
    # group count formula with integer floor-log
    exponent = 0
    power = k
    while power <= n:
        exponent += 1
        power *= k
    assert plan.K == 3 * k * exponent + 1
    # any in-window frequency is pinned by (q_1, p_1..p_m)
    assert plan.q(1) * product >= n


def test_plan_rejects_bad_arguments():
    with pytest.raises(ValueError):
        plan_parameters(10, 10)
    with pytest.raises(ValueError):
        plan_parameters(3, 2)
    with pytest.raises(ValueError):
        plan_parameters(100, 1)


def test_total_measurements_identity():
    for n, k in [(1000, 5), (512, 2), (30, 2)]:
        plan = plan_parameters(n, k)
        direct = sum(plan.p(l) * plan.q(j) for j, l in plan.pairs())
        assert plan.total_measurements == direct


def test_subset_membership_examples():
    plan = plan_parameters(30, 2)  # q_1 = 5, p_primes = (2, 3, 5)
    assert subset_membership(SubsetAddress(l=0, j=1, h=3), plan, 13)
    assert not subset_membership(SubsetAddress(l=0, j=1, h=3), plan, 14)
    # level with p_l = 3 against q_1 = 5: 23 mod 15 == 8
    assert plan.p(2) == 3
    assert subset_membership(SubsetAddress(l=2, j=1, h=8), plan, 23)


def test_subset_membership_signed_values():
    plan = plan_parameters(30, 2)
    # -2 mod 5 == 3
    assert subset_membership(SubsetAddress(l=0, j=1, h=3), plan, -2)


def test_subset_membership_validates_address():
    plan = plan_parameters(30, 2)
    with pytest.raises(ValueError):
        subset_membership(SubsetAddress(l=9, j=1, h=0), plan, 0)
    with pytest.raises(ValueError):
        subset_membership(SubsetAddress(l=0, j=0, h=0), plan, 0)
    with pytest.raises(ValueError):
        subset_membership(SubsetAddress(l=0, j=1, h=5), plan, 0)


def test_majority_singleton_is_isolated_everywhere():
    plan = plan_parameters(1000, 5)
    assert verify_k_majority(plan, [123]) == {123: plan.K}


def brute_isolation_counts(plan: PrimePlan, xs):
    counts = {}
    for x in xs:
        others = [y for y in xs if y != x]
        counts[x] = sum(
            1
            for q in plan.q_primes
            if all(x % q != y % q for y in others)
        )
    return counts


def test_majority_arithmetic_progression():
    plan = plan_parameters(1000, 5)
    xs = [0, 7, 14, 21, 28]
    counts = verify_k_majority(plan, xs)
    assert counts == brute_isolation_counts(plan, xs)
    assert all(c >= 41 for c in counts.values())  # > 2*61/3


def test_majority_pair_small_plan():
    plan = plan_parameters(30, 2)
    counts = verify_k_majority(plan, [1, 16])
    assert counts == brute_isolation_counts(plan, [1, 16])
    assert all(c >= 17 for c in counts.values())  # > 50/3


def test_majority_rejects_oversized_set():
    plan = plan_parameters(30, 2)
    with pytest.raises(ValueError):
        verify_k_majority(plan, [1, 2, 3])


def test_majority_random_subsets():
    rng = np.random.default_rng(5)
    for n, k in [(1000, 5), (512, 2)]:
        plan = plan_parameters(n, k)
        for _ in range(100):
            size = int(rng.integers(1, k + 1))
            xs = rng.choice(n, size=size, replace=False).tolist()
            counts = verify_k_majority(plan, xs)
            assert all(3 * c > 2 * plan.K for c in counts.values())


def test_lift_uniqueness_exhaustive_small_plan():
    plan = plan_parameters(30, 2)
    for x in range(0, 30, 7):
        for y in range(x + 1, 30, 11):
            for j in range(1, plan.K + 1):
                assert verify_lift_uniqueness(plan, [x, y], j)


def test_lift_uniqueness_sampled():
    rng = np.random.default_rng(9)
    plan = plan_parameters(1000, 5)
    for _ in range(50):
        size = int(rng.integers(1, plan.k + 1))
        xs = rng.choice(plan.n, size=size, replace=False).tolist()
        j = int(rng.integers(1, plan.K + 1))
        assert verify_lift_uniqueness(plan, xs, j)


def test_plan_json_fields():
    doc = plan_parameters(1000, 5).to_json()
    assert doc["K"] == 61
    assert doc["m"] == 4
    assert doc["p_primes"] == [2, 3, 5, 7]
    assert doc["total_measurements"] == (1 + 2 + 3 + 5 + 7) * sum(doc["q_primes"])
