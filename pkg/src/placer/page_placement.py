"""Exact page placement: data placement plus a cap on distinct clients per server.

Each object picks a configuration ``c`` and a connection pattern ``rho`` that
sends every demanding non-member to one member. Client ``i`` may serve at
most ``k_i`` distinct clients over all objects; a client that already
connected to ``i`` for an earlier object is not charged again. The DP state
is (remaining capacity ``r``, remaining client slots ``t``, history ``s``).

A pattern is a tuple of ``(client, server)`` pairs sorted by client. A
history is an int bitmask whose bit ``i * M + j`` records that client ``j``
has accessed something from client ``i``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from fractions import Fraction

from . import _layered
from .dp_scaled import scale
from .dp_uniform import _integral, reduce_units
from .model import (
    DEFAULT_MAX_CLIENTS,
    AssignmentError,
    Infeasible,
    Instance,
    Solution,
    check,
    config_loads,
    enumerate_configs,
    members,
)


@dataclass(frozen=True)
class PPSolution(Solution):
    patterns: tuple[tuple[tuple[int, int], ...], ...] = ()
    serve_counts: tuple[int, ...] = ()


def enumerate_patterns(c: int, demanders) -> list[tuple[tuple[int, int], ...]]:
    """All ways to give each demanding non-member a server in ``c``, lexicographic."""
    if not c:
        raise AssignmentError("empty configuration")
    servers = members(c)
    clients = sorted(demanders)
    if any(c >> j & 1 for j in clients):
        raise ValueError("members of the configuration do not connect")
    return [tuple(zip(clients, choice)) for choice in itertools.product(servers, repeat=len(clients))]


def pattern_bits(rho, M: int) -> int:
    bits = 0
    for j, i in rho:
        bits |= 1 << (i * M + j)
    return bits


def delta(rho, s: int, M: int) -> tuple[int, ...]:
    """Per server, how many clients in ``rho`` connect to it for the first time."""
    out = [0] * M
    for j, i in rho:
        if not s >> (i * M + j) & 1:
            out[i] += 1
    return tuple(out)


def merge_history(s: int, rho, M: int) -> int:
    return s | pattern_bits(rho, M)


def history_matrix(s: int, M: int) -> list[list[int]]:
    return [[s >> (i * M + j) & 1 for j in range(M)] for i in range(M)]


def pp_cost(instance: Instance, o: int, c: int, rho) -> float:
    """Access along the chosen connections plus installation at members.

    Clients pay the distance to their assigned server, which need not be the
    nearest replica.
    """
    obj = instance.objects[o]
    length = float(obj.length)
    server = dict(rho)
    total = 0.0
    for j in range(instance.M):
        if j in server:
            total += obj.demands[j] * length * instance.distances[server[j]][j]
    for j in range(instance.M):
        if c >> j & 1:
            total += obj.install_costs[j]
    return total


def demanders(instance: Instance, o: int, c: int) -> list[int]:
    return [j for j, w in enumerate(instance.objects[o].demands) if w > 0 and not c >> j & 1]


def effective_limits(instance: Instance) -> list[int]:
    """Client limits with absent entries read as unbounded (``M - 1``)."""
    return [instance.M - 1 if k is None else k for k in instance.client_limits]


def object_options(instance: Instance, o: int, configs=None):
    """``(c, rho, cost, rho_bits)`` for object ``o`` in tie-break order."""
    M = instance.M
    out = []
    for c in enumerate_configs(M) if configs is None else configs:
        for rho in enumerate_patterns(c, demanders(instance, o, c)):
            out.append((c, rho, pp_cost(instance, o, c, rho), pattern_bits(rho, M)))
    return out


def serve_counts(patterns, M: int) -> tuple[int, ...]:
    seen = [set() for _ in range(M)]
    for rho in patterns:
        for j, i in rho:
            seen[i].add(j)
    return tuple(len(x) for x in seen)


def solve_pp(instance: Instance, *, max_clients=DEFAULT_MAX_CLIENTS):
    """Optimal page placement for integer lengths and capacities."""
    check(instance, max_clients)
    lengths = _integral(instance.lengths, "lengths")
    capacities = _integral(instance.capacities, "capacities")
    return solve_pp_units(instance, lengths, capacities, max_clients=max_clients)


def solve_pp_units(instance: Instance, lengths, capacities, *, max_clients=DEFAULT_MAX_CLIENTS, solver="pp"):
    check(instance, max_clients)
    M, N = instance.M, instance.N
    lengths, caps = reduce_units(lengths, capacities)
    caps = tuple(caps)
    limits = tuple(effective_limits(instance))
    options = [object_options(instance, o) for o in range(N)]
    row = (1 << M) - 1

    def transitions(k, state):
        r, t, s = state
        o = k - 1
        l = lengths[o]
        for c, rho, cost, bits in options[o]:
            if any(c >> j & 1 and r[j] < l for j in range(M)):
                continue
            fresh = bits & ~s
            d = [(fresh >> (i * M) & row).bit_count() for i in range(M)]
            if any(d[i] > t[i] for i in range(M)):
                continue
            nr = tuple(r[j] - l if c >> j & 1 else r[j] for j in range(M))
            nt = tuple(t[i] - d[i] for i in range(M))
            yield (c, rho), cost, (nr, nt, s | bits)

    value, choices, layers = _layered.solve_layers((caps, limits, 0), N, transitions)
    states = sum(layers)
    if choices is None:
        return Infeasible(reason="no placement satisfies capacities and client limits",
                          solver=solver, states=states, layer_states=layers)
    assignment = tuple(c for c, _ in choices)
    patterns = tuple(rho for _, rho in choices)
    total = 0.0
    for o in range(N):
        total += pp_cost(instance, o, assignment[o], patterns[o])
    loads = tuple(Fraction(x) for x in config_loads(instance.lengths, assignment, M))
    return PPSolution(
        assignment=assignment,
        total_cost=total,
        loads=loads,
        solver=solver,
        states=states,
        layer_states=layers,
        patterns=patterns,
        serve_counts=serve_counts(patterns, M),
    )


def solve_pp_nu(instance: Instance, epsilon, *, max_clients=DEFAULT_MAX_CLIENTS):
    """Page placement for non-uniform lengths with ``eps * l_max`` cache overfill.

    Client limits are never relaxed.
    """
    check(instance, max_clients)
    sc = scale(instance, epsilon)
    result = solve_pp_units(instance, sc.scaled_lengths, sc.scaled_capacities,
                            max_clients=max_clients, solver="pp_nu")
    if not result:
        return replace(result, certified=True,
                       reason="scaled program infeasible, hence the original is infeasible")
    scaled_loads = tuple(config_loads(sc.scaled_lengths, result.assignment, instance.M))
    return replace(result, epsilon=sc.epsilon, scaled_loads=scaled_loads,
                   scaled_capacities=sc.scaled_capacities)


def layer_bound(instance: Instance, capacities) -> int:
    """Upper bound on states per layer: capacity box x slot box x directed histories."""
    M = instance.M
    return (math.prod(c + 1 for c in capacities) * math.prod(k + 1 for k in effective_limits(instance))
            * 2 ** (M * (M - 1)))


@dataclass(frozen=True)
class PPScore:
    total: float
    loads: tuple[Fraction, ...]
    serve_counts: tuple[int, ...]
    pattern_problems: tuple[str, ...]
    limit_problems: tuple[str, ...]


def score_pp(instance: Instance, assignment, patterns) -> PPScore:
    """Recompute cost, loads and serve counts of a page placement from scratch."""
    M, N = instance.M, instance.N
    if len(assignment) != N or len(patterns) != N:
        raise AssignmentError("assignment and patterns must cover every object")
    bad_patterns = []
    for o, (c, rho) in enumerate(zip(assignment, patterns)):
        if not isinstance(c, int) or c <= 0 or c >> M:
            raise AssignmentError(f"object {o}: invalid configuration {c!r}")
        want = demanders(instance, o, c)
        got = [j for j, _ in rho]
        if sorted(got) != want or len(set(got)) != len(got):
            bad_patterns.append(f"object {o}: pattern must connect exactly clients {want}")
        if any(not c >> i & 1 for _, i in rho):
            bad_patterns.append(f"object {o}: server outside the configuration")
    total = 0.0
    for o in range(N):
        total += pp_cost(instance, o, assignment[o], patterns[o])
    loads = tuple(Fraction(x) for x in config_loads(instance.lengths, assignment, M))
    counts = serve_counts(patterns, M)
    over = tuple(f"client {i} serves {n} clients, limit {k}"
                 for i, (n, k) in enumerate(zip(counts, effective_limits(instance))) if n > k)
    return PPScore(total, loads, counts, tuple(bad_patterns), over)
