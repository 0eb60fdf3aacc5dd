"""Exact data placement over integer length units.

``f_k(r)`` is the cheapest way to place objects ``0..k-1`` when ``r`` is the
remaining capacity vector; the object placed at step ``k`` takes
configuration ``c`` only if ``r - l_k * delta_c >= 0``. The answer is
``f_N(C)``. Configurations are tried in ascending bitmask order and only a
strict improvement wins, which fixes one canonical optimum.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _layered
from .model import (
    DEFAULT_MAX_CLIENTS,
    Infeasible,
    Instance,
    Solution,
    check,
    config_cost,
    enumerate_configs,
    members,
    score_solution,
)

DEFAULT_DENSE_BUDGET = 1 << 22


def _integral(values, what):
    out = []
    for v in values:
        if Fraction(v).denominator != 1:
            raise ValueError(f"{what} must be integers for the exact solver (got {v}); scale the instance first")
        out.append(int(v))
    return out


def normalize_capacities(instance: Instance) -> Instance:
    """Cap every capacity at the total object length.

    No client gains from storing an object twice, so capacity beyond
    ``sum(lengths)`` is never used.
    """
    lengths = _integral(instance.lengths, "lengths")
    _integral(instance.capacities, "capacities")
    bound = sum(lengths)
    return instance.with_capacities([min(c, bound) for c in instance.capacities])


def reduce_units(lengths, capacities):
    """Divide by the gcd of the positive lengths and cap capacities at the total length.

    Loads are multiples of the gcd, so flooring capacities by it loses nothing.
    """
    g = math.gcd(*lengths) or 1
    lengths = [l // g for l in lengths]
    bound = sum(lengths)
    return lengths, [min(c // g, bound) for c in capacities]


def allowed_configs(M: int, N: int, replica_caps: Sequence[int] | int | None) -> list[list[int]]:
    if replica_caps is None or isinstance(replica_caps, int):
        configs = enumerate_configs(M, replica_caps)
        return [configs] * N
    if len(replica_caps) != N:
        raise ValueError(f"expected {N} replica caps, got {len(replica_caps)}")
    cache: dict = {}
    return [cache.setdefault(k, enumerate_configs(M, k)) for k in replica_caps]


def solve(instance: Instance, replica_caps=None, *, max_clients=DEFAULT_MAX_CLIENTS,
          dense_budget=DEFAULT_DENSE_BUDGET):
    """Optimal placement of an instance whose lengths and capacities are integers.

    ``replica_caps`` is one cap for all objects or one per object.
    Returns a :class:`Solution` or :class:`Infeasible`.
    """
    check(instance, max_clients)
    lengths = _integral(instance.lengths, "lengths")
    capacities = _integral(instance.capacities, "capacities")
    return solve_units(instance, lengths, capacities, replica_caps,
                       max_clients=max_clients, dense_budget=dense_budget)


def solve_units(instance: Instance, lengths: Sequence[int], capacities: Sequence[int], replica_caps=None, *,
                max_clients=DEFAULT_MAX_CLIENTS, dense_budget=DEFAULT_DENSE_BUDGET, solver="dp"):
    """Run the DP with integer ``lengths``/``capacities`` but costs from ``instance``.

    This is the engine behind both the exact path and the scaled path; loads
    in the returned solution are measured in the instance's own lengths.
    """
    check(instance, max_clients)
    M, N = instance.M, instance.N
    if len(lengths) != N or len(capacities) != M:
        raise ValueError("unit vectors do not match the instance shape")
    if any(l < 0 for l in lengths) or any(c < 0 for c in capacities):
        raise ValueError("unit lengths and capacities must be non-negative")
    lengths, caps = reduce_units(lengths, capacities)
    allowed = allowed_configs(M, N, replica_caps)

    assignment: list[int | None] = [None] * N
    active = []
    for o in range(N):
        if lengths[o] == 0:
            # consumes no capacity: cheapest configuration independently of the rest
            best, pick = math.inf, None
            for c in allowed[o]:
                v = config_cost(instance, o, c)
                if v < best:
                    best, pick = v, c
            assignment[o] = pick
        else:
            active.append(o)

    costs = [{c: config_cost(instance, o, c) for c in allowed[o]} for o in active]
    act_len = [lengths[o] for o in active]
    act_cfg = [allowed[o] for o in active]
    size = math.prod(c + 1 for c in caps)
    if size <= dense_budget:
        value, choices, layers = _dense(caps, act_len, act_cfg, costs)
    else:
        value, choices, layers = _sparse(caps, act_len, act_cfg, costs)
    states = sum(layers)
    if choices is None:
        return Infeasible(solver=solver, states=states, layer_states=layers)
    for o, c in zip(active, choices):
        assignment[o] = c
    score = score_solution(instance, assignment)
    return Solution(
        assignment=tuple(assignment),
        total_cost=score.total,
        loads=score.loads,
        solver=solver,
        states=states,
        layer_states=layers,
    )


def _dense(caps, lengths, configs, costs):
    """Full tables over the capacity box, one numpy array per object layer."""
    shape = tuple(c + 1 for c in caps)
    M = len(caps)
    prev = np.zeros(shape)
    picks = []
    for l, cfgs, cost in zip(lengths, configs, costs):
        cur = np.full(shape, np.inf)
        arg = np.full(shape, -1, dtype=np.int32)
        for c in cfgs:
            if any(c >> j & 1 and l > caps[j] for j in range(M)):
                continue
            src = tuple(slice(0, caps[j] + 1 - l) if c >> j & 1 else slice(None) for j in range(M))
            dst = tuple(slice(l, None) if c >> j & 1 else slice(None) for j in range(M))
            cand = cost[c] + prev[src]
            view, aview = cur[dst], arg[dst]
            better = cand < view
            view[better] = cand[better]
            aview[better] = c
        picks.append(arg)
        prev = cur
    layers = tuple(prev.size for _ in lengths)
    start = tuple(caps)
    value = float(prev[start]) if lengths else 0.0
    if math.isinf(value):
        return value, None, layers
    choices = [0] * len(lengths)
    r = list(caps)
    for k in range(len(lengths) - 1, -1, -1):
        c = int(picks[k][tuple(r)])
        choices[k] = c
        for j in members(c):
            r[j] -= lengths[k]
    return value, choices, layers


def _sparse(caps, lengths, configs, costs):
    """Only capacity vectors reachable from the start; for boxes too large to tabulate."""
    M = len(caps)

    def transitions(k, r):
        l = lengths[k - 1]
        cost = costs[k - 1]
        for c in configs[k - 1]:
            if all(r[j] >= l for j in members(c)):
                yield c, cost[c], tuple(r[j] - l if c >> j & 1 else r[j] for j in range(M))

    return _layered.solve_layers(tuple(caps), len(lengths), transitions)
