"""Exhaustive reference solvers for small instances.

Every per-object choice combination is enumerated in the same order the
dynamic programs break ties: the last object varies slowest, choices within
an object in ascending order, and a later combination replaces the incumbent
only when strictly cheaper. Costs are accumulated as
``cost_{N-1} + (... + (cost_0 + 0))`` to match the DP's association, so the
winner agrees with the DP down to the assignment.

Capacity checks use exact integer arithmetic (lengths and capacities are
brought to a common denominator), so non-integer lengths are fine.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import page_placement as pp
from .dp_uniform import allowed_configs
from .model import (
    Infeasible,
    Instance,
    PlacerError,
    Solution,
    check,
    config_cost,
    config_loads,
    members,
    score_solution,
)

CHUNK = 1 << 18


class BudgetExceeded(PlacerError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_assignments: int = 10**8
    max_seconds: float = 600.0


def _common_units(instance: Instance):
    denom = math.lcm(*(x.denominator for x in instance.lengths + instance.capacities))
    lengths = [int(l * denom) for l in instance.lengths]
    caps = [int(c * denom) for c in instance.capacities]
    return lengths, caps


def _search(option_costs, option_usage, feasible_rows, budget, workers):
    """Minimum over the product of per-object options.

    ``option_costs[o]`` is a float array; ``option_usage[o]`` an int array of
    shape (n_options, K) whose sums over objects must pass ``feasible_rows``.
    Returns ``(value, choice indices)`` or ``(inf, None)``.

    The leading objects form one broadcast block of at most ``CHUNK`` rows;
    the remaining objects are looped over, last object slowest.
    """
    sizes = [len(c) for c in option_costs]
    total = math.prod(sizes)
    if total > budget.max_assignments:
        raise BudgetExceeded(f"{total} assignments exceeds the budget of {budget.max_assignments}")
    deadline = time.monotonic() + budget.max_seconds
    N = len(sizes)
    split, inner = 1, sizes[0]
    while split < N and inner * sizes[split] <= CHUNK:
        inner *= sizes[split]
        split += 1
    value = option_costs[0]
    usage = option_usage[0]
    for o in range(1, split):
        value = (option_costs[o][:, None] + value[None, :]).ravel()
        usage = (option_usage[o][:, None, :] + usage[None, :, :]).reshape(-1, usage.shape[1])

    def block(outer):
        if time.monotonic() > deadline:
            raise BudgetExceeded(f"oracle exceeded {budget.max_seconds} s")
        v, u = value, usage
        for o, d in zip(range(split, N), reversed(outer)):
            v = option_costs[o][d] + v
            u = u + option_usage[o][d]
        v = np.where(feasible_rows(u), v, np.inf)
        at = int(np.argmin(v))
        best = float(v[at])
        digits = []
        for o in range(split):
            at, d = divmod(at, sizes[o])
            digits.append(d)
        return best, digits + list(reversed(outer))

    outers = itertools.product(*(range(sizes[o]) for o in range(N - 1, split - 1, -1)))
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(block, outers))
    else:
        results = map(block, outers)
    best, pick = math.inf, None
    for v, choice in results:
        if v < best:
            best, pick = v, choice
    return best, pick


def oracle_dp(instance: Instance, replica_caps=None, budget: OracleBudget = OracleBudget(), *,
              max_clients=None, workers=None):
    """Exact optimum by enumerating every configuration choice for every object."""
    check(instance, max_clients)
    M, N = instance.M, instance.N
    lengths, caps = _common_units(instance)
    allowed = allowed_configs(M, N, replica_caps)
    option_costs, option_usage = [], []
    for o in range(N):
        cfgs = allowed[o]
        option_costs.append(np.array([config_cost(instance, o, c) for c in cfgs]))
        option_usage.append(np.array([[lengths[o] * (c >> j & 1) for j in range(M)] for c in cfgs],
                                     dtype=object if max(lengths) * N > 2**62 else np.int64))
    limit = np.array(caps, dtype=object if max(caps) > 2**62 else np.int64)

    def fits(usage):
        return np.all(usage <= limit, axis=1)

    value, pick = _search(option_costs, option_usage, fits, budget, workers)
    if pick is None:
        return Infeasible(solver="oracle_dp")
    assignment = tuple(allowed[o][pick[o]] for o in range(N))
    score = score_solution(instance, assignment)
    return Solution(assignment=assignment, total_cost=score.total, loads=score.loads, solver="oracle_dp")


def oracle_pp(instance: Instance, budget: OracleBudget = OracleBudget(), *, max_clients=None, workers=None):
    """Exact page placement optimum over all (configuration, pattern) choices per object."""
    check(instance, max_clients)
    M, N = instance.M, instance.N
    lengths, caps = _common_units(instance)
    limits = pp.effective_limits(instance)
    options = [pp.object_options(instance, o) for o in range(N)]
    size = math.prod(len(x) for x in options)
    if size > budget.max_assignments:
        raise BudgetExceeded(f"{size} assignments exceeds the budget of {budget.max_assignments}")
    # usage columns: M loads, then M*M connection bits (OR-ed via a per-bit count > 0)
    option_costs, option_usage = [], []
    for o in range(N):
        option_costs.append(np.array([cost for _, _, cost, _ in options[o]]))
        rows = []
        for c, _, _, bits in options[o]:
            rows.append([lengths[o] * (c >> j & 1) for j in range(M)] + [bits >> b & 1 for b in range(M * M)])
        option_usage.append(np.array(rows, dtype=np.int64))
    cap = np.array(caps, dtype=np.int64)
    lim = np.array(limits)

    def fits(usage):
        ok = np.all(usage[:, :M] <= cap, axis=1)
        used = usage[:, M:].reshape(-1, M, M) > 0
        return ok & np.all(used.sum(axis=2) <= lim, axis=1)

    value, pick = _search(option_costs, option_usage, fits, budget, workers)
    if pick is None:
        return Infeasible(reason="no placement satisfies capacities and client limits", solver="oracle_pp")
    chosen = [options[o][pick[o]] for o in range(N)]
    assignment = tuple(c for c, *_ in chosen)
    patterns = tuple(rho for _, rho, *_ in chosen)
    score = pp.score_pp(instance, assignment, patterns)
    return pp.PPSolution(assignment=assignment, total_cost=score.total, loads=score.loads, solver="oracle_pp",
                         patterns=patterns, serve_counts=score.serve_counts)


def fits_capacity(instance: Instance, assignment) -> bool:
    loads = config_loads(instance.lengths, assignment, instance.M)
    return all(Fraction(load) <= cap for load, cap in zip(loads, instance.capacities))


@dataclass(frozen=True)
class FeasibleSample:
    assignments: list[tuple[int, ...]]
    feasible: bool
    enumerated: bool = False


def sample_feasible_assignments(instance: Instance, count: int, seed, *, min_rate=0.01, probe=2000,
                                budget: OracleBudget = OracleBudget()) -> FeasibleSample:
    """Uniform draws (with replacement) from the capacity-feasible assignments.

    Rejection sampling first; if fewer than ``min_rate`` of the first
    ``probe`` draws fit, all feasible assignments are enumerated and sampled
    from directly.
    """
    rng = random.Random(seed)
    M, N = instance.M, instance.N
    full = (1 << M) - 1
    out: list[tuple[int, ...]] = []
    tries = 0
    while len(out) < count:
        cand = tuple(rng.randint(1, full) for _ in range(N))
        tries += 1
        if fits_capacity(instance, cand):
            out.append(cand)
        elif tries >= probe and len(out) < min_rate * tries:
            break
    if len(out) == count:
        return FeasibleSample(out, True)

    size = full ** N
    if size > budget.max_assignments:
        raise BudgetExceeded(f"{size} assignments exceeds the budget of {budget.max_assignments}")
    lengths, caps = _common_units(instance)
    feasible = []
    configs = range(1, full + 1)
    for combo in itertools.product(configs, repeat=N):
        loads = [0] * M
        for o, c in enumerate(combo):
            for j in members(c):
                loads[j] += lengths[o]
        if all(x <= y for x, y in zip(loads, caps)):
            feasible.append(combo)
    if not feasible:
        return FeasibleSample([], False, True)
    return FeasibleSample([rng.choice(feasible) for _ in range(count)], True, True)

