import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from placer import page_placement as pp
from placer.dp_uniform import solve
from placer.generators import random_instance, tightness_instance
from placer.model import Instance
from placer.oracle import oracle_pp

from brute import brute_pp


def test_patterns_unique_server():
    assert pp.enumerate_patterns(0b001, {1, 2}) == [((1, 0), (2, 0))]


def test_patterns_two_servers():
    assert pp.enumerate_patterns(0b011, {2}) == [((2, 0),), ((2, 1),)]


def test_patterns_no_demanders():
    assert pp.enumerate_patterns(0b011, set()) == [()]


def test_pattern_count_bound():
    for c in range(1, 16):
        outside = [j for j in range(4) if not c >> j & 1]
        assert len(pp.enumerate_patterns(c, outside)) == c.bit_count() ** len(outside) <= 4**4


def test_patterns_reject_members():
    with pytest.raises(ValueError):
        pp.enumerate_patterns(0b011, {1})


def test_delta_counts_first_connections():
    rho = ((1, 0), (2, 0))
    assert pp.delta(rho, 0, 3) == (2, 0, 0)
    s = pp.merge_history(0, ((1, 0),), 3)
    assert pp.history_matrix(s, 3)[0][1] == 1
    assert pp.delta(rho, s, 3) == (1, 0, 0)
    assert pp.delta((), s, 3) == (0, 0, 0)


def test_merge_history_idempotent_and_identity():
    rho = ((1, 0), (2, 1))
    s = pp.merge_history(0, rho, 3)
    assert pp.merge_history(s, rho, 3) == s
    assert pp.merge_history(s, (), 3) == s
    assert all(pp.history_matrix(s, 3)[i][i] == 0 for i in range(3))


def test_history_is_directed():
    s = pp.merge_history(0, ((1, 0),), 2)
    assert pp.delta(((0, 1),), s, 2) == (0, 1)


def test_pp_cost_examples():
    inst = Instance.build([1, 1], [1], [[0, 5]], [[4, 0]], [[0, 2], [2, 0]])
    assert pp.pp_cost(inst, 0, 0b01, ((1, 0),)) == 14
    assert pp.pp_cost(inst, 0, 0b11, ()) == 4


def test_farther_server_costs_more():
    inst = Instance.build([1] * 3, [1], [[0, 0, 3]], [[1, 1, 1]], [[0, 0, 1], [0, 0, 4], [0, 0, 0]])
    near = pp.pp_cost(inst, 0, 0b011, ((2, 0),))
    far = pp.pp_cost(inst, 0, 0b011, ((2, 1),))
    assert far > near


def test_zero_limits_force_local_copies():
    inst = Instance.build([1, 1], [1, 1], [[1, 1], [1, 1]], [[1, 1], [1, 1]], [[0, 1], [1, 0]], [0, 0])
    assert not pp.solve_pp(inst)
    one = Instance.build([1, 1], [1], [[1, 1]], [[3, 5]], [[0, 1], [1, 0]], [0, 0])
    sol = pp.solve_pp(one)
    assert sol.assignment == (0b11,) and sol.total_cost == 8
    assert oracle_pp(one).total_cost == 8


def test_repeat_connections_are_free():
    # client 1 reads two objects from client 0 with k_0 = 1: one slot suffices
    inst = Instance.build([2, 0], [1, 1], [[0, 1], [0, 1]], [[0, 0], [0, 0]], [[0, 1], [1, 0]], [1, 0])
    sol = pp.solve_pp(inst)
    assert sol.assignment == (0b01, 0b01)
    assert sol.serve_counts == (1, 0)


@pytest.mark.parametrize("seed", range(30))
def test_matches_independent_brute_force(seed):
    rng = random.Random(seed)
    M, N = rng.randint(2, 3), rng.randint(1, 3)
    inst = random_instance(M, N, 40 + seed, capacity=(1, 2), client_limits=(0, 2))
    res = pp.solve_pp(inst)
    expected = brute_pp(inst)
    assert (res.total_cost if res else math.inf) == expected


def _looser(seed):
    return random_instance(3, 4, 2000 + seed, capacity=(2, 3), client_limits=(1, 2))


@pytest.mark.parametrize("seed", range(40))
def test_oracle_agreement_on_mostly_feasible_instances(seed):
    inst = _looser(seed)
    a, b = pp.solve_pp(inst), oracle_pp(inst)
    assert bool(a) == bool(b)
    if a:
        assert (a.assignment, a.patterns, a.total_cost) == (b.assignment, b.patterns, b.total_cost)


@pytest.mark.parametrize("seed", range(25))
def test_solution_invariants(seed):
    inst = _looser(seed)
    sol = pp.solve_pp(inst)
    if not sol:
        return
    score = pp.score_pp(inst, sol.assignment, sol.patterns)
    assert score.total == sol.total_cost
    assert not score.pattern_problems and not score.limit_problems
    assert all(l <= c for l, c in zip(sol.loads, inst.capacities))
    # replay the history along the solution in DP order (last object first)
    s, charged = 0, [0] * inst.M
    for rho in reversed(sol.patterns):
        d = pp.delta(rho, s, inst.M)
        charged = [a + b for a, b in zip(charged, d)]
        nxt = pp.merge_history(s, rho, inst.M)
        assert nxt & s == s
        s = nxt
    assert tuple(charged) == sol.serve_counts
    assert all(n <= k for n, k in zip(sol.serve_counts, pp.effective_limits(inst)))


@pytest.mark.parametrize("seed", range(25))
def test_pp_never_cheaper_than_dp(seed):
    inst = _looser(seed)
    a, b = pp.solve_pp(inst), solve(inst)
    if a:
        assert b and b.total_cost <= a.total_cost


def test_slack_limits_recover_dp(dp_instances):
    # with k_j = M-1 each demander can use its nearest replica
    for inst in dp_instances[:40]:
        limited = Instance(tuple(type(c)(c.capacity, inst.M - 1) for c in inst.clients), inst.objects,
                           inst.distances)
        a, b = pp.solve_pp(limited), solve(inst)
        assert bool(a) == bool(b)
        if a:
            assert a.total_cost == b.total_cost


def test_layer_bound(pp_instances):
    for inst in pp_instances:
        res = pp.solve_pp(inst)
        bound = pp.layer_bound(inst, [int(c) for c in inst.capacities])
        assert all(n <= bound for n in res.layer_states)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.randoms(use_true_random=False))
def test_permutation_invariance(seed, rnd):
    inst = random_instance(3, 4, seed, capacity=(1, 3), client_limits=(0, 2))
    order = list(range(inst.N))
    rnd.shuffle(order)
    a, b = pp.solve_pp(inst), pp.solve_pp(inst.permuted(order))
    assert bool(a) == bool(b)
    if a:
        assert a.total_cost == b.total_cost


def test_nu_uniform_matches_exact():
    for seed in range(20):
        inst = _looser(seed)
        a = pp.solve_pp(inst)
        for eps in ("0.2", "0.7"):
            b = pp.solve_pp_nu(inst, eps)
            assert bool(a) == bool(b)
            if a:
                assert a.total_cost == b.total_cost


def test_nu_tightness_blowup_and_exact_limits():
    inst = tightness_instance(6, "0.5")
    inst = Instance(tuple(type(c)(c.capacity, 1) for c in inst.clients), inst.objects, inst.distances)
    sol = pp.solve_pp_nu(inst, "0.5")
    slack = max(l - c for l, c in zip(sol.loads, inst.capacities))
    assert slack <= inst.l_max / 2
    assert all(n <= 1 for n in sol.serve_counts)


def test_nu_zero_limits_certified_infeasible():
    # client 0 must store its object but can hold none of it
    inst = Instance.build([0, 5], ["1.5", "2"], [[1, 0], [0, 1]], [[0, 0]] * 2, [[0, 1], [1, 0]], [0, 0])
    res = pp.solve_pp_nu(inst, "0.5")
    assert not res and res.certified
