import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from placer.dp_uniform import normalize_capacities, solve, solve_units
from placer.generators import random_instance
from placer.model import GuardExceeded, Instance, score_solution
from placer.oracle import oracle_dp

from brute import brute_dp


def unit_instance(capacities, N, seed=0):
    M = len(capacities)
    rng = random.Random(seed)
    demands = [[rng.randint(1, 9) for _ in range(M)] for _ in range(N)]
    installs = [[rng.randint(0, 9) for _ in range(M)] for _ in range(N)]
    dist = [[0 if i == j else rng.randint(0, 9) for j in range(M)] for i in range(M)]
    return Instance.build(capacities, [1] * N, demands, installs, dist)


def test_normalize_unit_lengths():
    inst = unit_instance([100, 3], 5)
    assert normalize_capacities(inst).capacities == (5, 3)


def test_normalize_sum_of_lengths_and_idempotent():
    inst = Instance.build([99], [2, 3], [[1], [1]], [[0], [0]], [[0]])
    once = normalize_capacities(inst)
    assert once.capacities == (5,)
    assert normalize_capacities(once) == once
    small = unit_instance([2, 3], 5)
    assert normalize_capacities(small) == small


def test_normalize_rejects_fractional_lengths():
    inst = Instance.build([3], ["1.5"], [[1]], [[0]], [[0]])
    with pytest.raises(ValueError):
        normalize_capacities(inst)


def test_single_client_stores_everything():
    inst = Instance.build([2], [1, 1], [[4], [7]], [[0], [0]], [[0]])
    sol = solve(inst)
    assert sol.assignment == (1, 1)
    assert sol.total_cost == 0


def test_pigeonhole_infeasible():
    inst = unit_instance([1, 1], 3)
    res = solve(inst)
    assert not res and not res.feasible


def test_guard():
    inst = unit_instance([1] * 4, 2)
    with pytest.raises(GuardExceeded):
        solve(inst, max_clients=3)


@pytest.mark.parametrize("seed", range(40))
def test_matches_independent_brute_force(seed):
    rng = random.Random(seed)
    M, N = rng.randint(1, 3), rng.randint(1, 5)
    inst = random_instance(M, N, seed, capacity=(0, 4))
    sol = solve(inst)
    expected = brute_dp(inst)
    if math.isinf(expected):
        assert not sol
    else:
        assert sol.total_cost == expected


@pytest.mark.parametrize("seed", range(20))
def test_singleton_caps_match_restricted_brute_force(seed):
    inst = random_instance(3, 5, 300 + seed, capacity=(1, 3))
    sol = solve(inst, replica_caps=1)
    expected = brute_dp(inst, caps=1)
    assert (sol.total_cost if sol else math.inf) == expected
    if sol:
        assert all(c.bit_count() == 1 for c in sol.assignment)


def test_integer_lengths_non_uniform():
    inst = Instance.build([3, 2], [2, 1, 1], [[1, 5], [2, 2], [9, 1]], [[1, 1]] * 3, [[0, 3], [2, 0]])
    sol = solve(inst)
    assert sol.total_cost == brute_dp(inst)
    assert all(l <= c for l, c in zip(sol.loads, inst.capacities))


def test_dense_and_sparse_engines_agree():
    for seed in range(30):
        inst = random_instance(3, 5, 700 + seed, capacity=(1, 4))
        dense = solve(inst)
        sparse = solve(inst, dense_budget=0)
        assert bool(dense) == bool(sparse)
        if dense:
            assert dense.assignment == sparse.assignment
            assert dense.total_cost == sparse.total_cost
            assert sparse.states <= dense.states


def test_zero_length_objects_take_cheapest_configuration():
    inst = Instance.build([1, 1], [1, 1], [[5, 5], [1, 9]], [[3, 0], [0, 2]], [[0, 1], [1, 0]])
    sol = solve_units(inst, [1, 0], [1, 1])
    cheapest = min(range(1, 4), key=lambda c: (score_solution(inst, [sol.assignment[0], c]).total, c))
    assert sol.assignment[1] == cheapest


def test_loads_within_capacity(dp_instances):
    for inst in dp_instances[:50]:
        sol = solve(inst)
        if sol:
            assert all(l <= c for l, c in zip(sol.loads, inst.capacities))


def test_reported_cost_rescores_bit_for_bit(dp_instances):
    for inst in dp_instances[:50]:
        sol = solve(inst)
        if sol:
            assert score_solution(inst, sol).total == sol.total_cost


@pytest.mark.parametrize("seed", range(15))
def test_more_capacity_never_costs_more(seed):
    inst = random_instance(3, 5, 900 + seed, capacity=(1, 3))
    base = solve(inst)
    for j in range(inst.M):
        caps = list(inst.capacities)
        caps[j] += 1
        bigger = solve(inst.with_capacities(caps))
        if base:
            assert bigger.total_cost <= base.total_cost


def test_caps_of_m_equal_uncapped(dp_instances):
    for inst in dp_instances[:30]:
        a, b = solve(inst), solve(inst, replica_caps=[inst.M] * inst.N)
        assert bool(a) == bool(b)
        if a:
            assert a.assignment == b.assignment


def test_per_object_caps_validated():
    inst = unit_instance([2, 2], 2)
    with pytest.raises(ValueError):
        solve(inst, replica_caps=[1])


def test_state_count_bound(dp_instances):
    for inst in dp_instances[:50]:
        res = solve(inst)
        assert res.states <= inst.N * math.prod(int(c) + 1 for c in inst.capacities)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.randoms(use_true_random=False))
def test_permutation_invariance(seed, rnd):
    inst = random_instance(3, 5, seed, capacity=(1, 3))
    order = list(range(inst.N))
    rnd.shuffle(order)
    a, b = solve(inst), solve(inst.permuted(order))
    assert bool(a) == bool(b)
    if a:
        assert a.total_cost == b.total_cost


def test_oracle_agrees_on_assignment(dp_instances):
    for inst in dp_instances[:40]:
        a, b = solve(inst), oracle_dp(inst)
        assert bool(a) == bool(b)
        if a:
            assert a.assignment == b.assignment
