"""Problem data model shared by every solver.

Clients are indexed ``0..M-1`` and objects ``0..N-1``. A configuration is a
non-empty set of clients, encoded as an ``int`` bitmask (bit ``j`` set when
client ``j`` holds a replica). ``distances[i][j]`` is the distance from
client ``j`` to client ``i``, so client ``j`` served by replica holder ``i``
pays ``distances[i][j]`` per unit of demand and length.

Lengths and capacities are exact :class:`~fractions.Fraction` values; demands,
installation costs and distances are floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

DEFAULT_MAX_CLIENTS = 8


class PlacerError(Exception):
    """Base class for errors raised by this package."""


class InvalidInstance(PlacerError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid instance: " + "; ".join(map(str, self.violations)))


class GuardExceeded(PlacerError):
    """Raised when an instance has more clients than the solver guard allows."""


class AssignmentError(PlacerError):
    """Raised for structurally broken assignments (wrong length, empty configuration)."""


def to_fraction(value) -> Fraction:
    """Exact rational from an int, a decimal/ratio string, or a float.

    Floats are read through their shortest repr, so ``0.1`` means 1/10.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as an exact number")


@dataclass(frozen=True)
class Client:
    capacity: Fraction
    client_limit: int | None = None


@dataclass(frozen=True)
class ObjectSpec:
    length: Fraction
    demands: tuple[float, ...]
    install_costs: tuple[float, ...]


@dataclass(frozen=True)
class Instance:
    clients: tuple[Client, ...]
    objects: tuple[ObjectSpec, ...]
    distances: tuple[tuple[float, ...], ...]

    @classmethod
    def build(cls, capacities, lengths, demands, install_costs, distances, client_limits=None):
        """Assemble an instance from plain sequences.

        ``demands[o][j]`` and ``install_costs[o][j]`` are per object, per client.
        """
        if client_limits is None:
            client_limits = [None] * len(capacities)
        clients = tuple(
            Client(to_fraction(c), None if k is None else int(k))
            for c, k in zip(capacities, client_limits, strict=True)
        )
        objects = tuple(
            ObjectSpec(to_fraction(l), tuple(float(x) for x in w), tuple(float(x) for x in f))
            for l, w, f in zip(lengths, demands, install_costs, strict=True)
        )
        dist = tuple(tuple(float(x) for x in row) for row in distances)
        return cls(clients, objects, dist)

    @property
    def M(self) -> int:
        return len(self.clients)

    @property
    def N(self) -> int:
        return len(self.objects)

    @property
    def capacities(self) -> tuple[Fraction, ...]:
        return tuple(c.capacity for c in self.clients)

    @property
    def lengths(self) -> tuple[Fraction, ...]:
        return tuple(o.length for o in self.objects)

    @property
    def client_limits(self) -> tuple[int | None, ...]:
        return tuple(c.client_limit for c in self.clients)

    @property
    def l_max(self) -> Fraction:
        return max(self.lengths)

    def is_uniform(self) -> bool:
        return len(set(self.lengths)) == 1

    def permuted(self, order: Sequence[int]) -> "Instance":
        """Same instance with objects reordered; ``order[k]`` is the old index of new object ``k``."""
        return replace(self, objects=tuple(self.objects[o] for o in order))

    def with_capacities(self, capacities) -> "Instance":
        clients = tuple(replace(c, capacity=to_fraction(x)) for c, x in zip(self.clients, capacities, strict=True))
        return replace(self, clients=clients)


@dataclass(frozen=True)
class Violation:
    field: str
    rule: str

    def __str__(self):
        return f"{self.field}: {self.rule}"


def validate(instance: Instance) -> list[Violation]:
    """Every broken invariant of ``instance``; an empty list means valid."""
    out: list[Violation] = []
    M, N = instance.M, instance.N
    if M < 1:
        out.append(Violation("clients", "at least one client required"))
    if N < 1:
        out.append(Violation("objects", "at least one object required"))
    for j, client in enumerate(instance.clients):
        if client.capacity < 0:
            out.append(Violation(f"clients[{j}].capacity", "capacity must be non-negative"))
        k = client.client_limit
        if k is not None and not 0 <= k <= M - 1:
            out.append(Violation(f"clients[{j}].client_limit", f"client limit must lie in [0, {M - 1}]"))
    for o, obj in enumerate(instance.objects):
        if obj.length <= 0:
            out.append(Violation(f"objects[{o}].length", "length must be positive"))
        for name, vec in (("demands", obj.demands), ("install_costs", obj.install_costs)):
            if len(vec) != M:
                out.append(Violation(f"objects[{o}].{name}", f"expected {M} entries, got {len(vec)}"))
            elif any(not math.isfinite(x) or x < 0 for x in vec):
                out.append(Violation(f"objects[{o}].{name}", f"{name} must be finite and non-negative"))
        if not any(w > 0 for w in obj.demands):
            out.append(Violation(f"objects[{o}].demands", "object requested by no user"))
    if len(instance.distances) != M or any(len(row) != M for row in instance.distances):
        out.append(Violation("distances", f"distance matrix must be {M}x{M}"))
    else:
        for i, row in enumerate(instance.distances):
            for j, d in enumerate(row):
                if not math.isfinite(d) or d < 0:
                    out.append(Violation(f"distances[{i}][{j}]", "distance must be non-negative"))
    return out


def check(instance: Instance, max_clients: int | None = DEFAULT_MAX_CLIENTS) -> None:
    """Raise unless the instance is valid and within the client guard."""
    problems = validate(instance)
    if problems:
        raise InvalidInstance(problems)
    if max_clients is not None and instance.M > max_clients:
        raise GuardExceeded(
            f"{instance.M} clients exceeds the solver guard of {max_clients} (raise it with --max-clients)"
        )


def collective_capacity_feasible(instance: Instance) -> bool:
    """Whether all clients together can hold one copy of every object.

    Necessary for feasibility, not sufficient: objects cannot be split.
    """
    return sum(instance.capacities) >= sum(instance.lengths)


# -- configurations -------------------------------------------------------

def members(c: int) -> list[int]:
    out, j = [], 0
    while c >> j:
        if c >> j & 1:
            out.append(j)
        j += 1
    return out


def enumerate_configs(M: int, replica_cap: int | None = None) -> list[int]:
    """Non-empty client subsets with at most ``replica_cap`` members, ascending bitmask order."""
    if M < 1:
        raise ValueError("M must be at least 1")
    if replica_cap is not None and replica_cap < 1:
        raise ValueError("replica cap must be at least 1")
    cap = M if replica_cap is None else replica_cap
    return [c for c in range(1, 1 << M) if c.bit_count() <= cap]


def nearest_distance(instance: Instance, c: int, j: int) -> float:
    if not c:
        raise AssignmentError("empty configuration")
    return min(instance.distances[i][j] for i in members(c))


def config_cost(instance: Instance, o: int, c: int) -> float:
    """Access cost of non-members reaching their nearest replica plus installation at members."""
    if not c:
        raise AssignmentError("empty configuration")
    obj = instance.objects[o]
    length = float(obj.length)
    total = 0.0
    for j in range(instance.M):
        if not c >> j & 1:
            total += obj.demands[j] * length * nearest_distance(instance, c, j)
    for j in range(instance.M):
        if c >> j & 1:
            total += obj.install_costs[j]
    return total


def cost_table(instance: Instance, configs: Iterable[int] | None = None) -> list[dict[int, float]]:
    """``table[o][c]`` = :func:`config_cost` for every object and configuration."""
    configs = list(enumerate_configs(instance.M) if configs is None else configs)
    return [{c: config_cost(instance, o, c) for c in configs} for o in range(instance.N)]


def config_loads(lengths: Sequence, assignment: Sequence[int], M: int) -> list:
    loads = [0] * M
    for length, c in zip(lengths, assignment):
        for j in members(c):
            loads[j] += length
    return loads


# -- solutions ------------------------------------------------------------

@dataclass(frozen=True)
class Solution:
    """One configuration per object, with its cost and per-client loads.

    ``loads`` are in original length units. DP-NU solutions additionally carry
    the scaled view (``epsilon``, ``scaled_loads``, ``scaled_capacities``).
    """

    assignment: tuple[int, ...]
    total_cost: float
    loads: tuple[Fraction, ...]
    solver: str = "dp"
    states: int = 0
    layer_states: tuple[int, ...] = ()
    epsilon: Fraction | None = None
    scaled_loads: tuple[int, ...] | None = None
    scaled_capacities: tuple[int, ...] | None = None

    def __bool__(self):
        return True

    @property
    def feasible(self) -> bool:
        return True


@dataclass(frozen=True)
class Infeasible:
    """No assignment fits.

    ``certified`` marks verdicts from a scaled program, which also rule out
    the original instance.
    """

    reason: str = "no assignment satisfies the capacity constraints"
    solver: str = "dp"
    certified: bool = False
    states: int = 0
    layer_states: tuple[int, ...] = field(default=())

    def __bool__(self):
        return False

    @property
    def feasible(self) -> bool:
        return False


@dataclass(frozen=True)
class Score:
    total: float
    loads: tuple[Fraction, ...]
    slacks: tuple[Fraction, ...]
    violations: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def score_solution(instance: Instance, solution, slack=0) -> Score:
    """Re-evaluate an assignment from scratch.

    ``solution`` is a :class:`Solution` or a bare sequence of configurations.
    Clients whose load exceeds capacity by more than ``slack`` are listed in
    ``violations``.
    """
    assignment = getattr(solution, "assignment", solution)
    assignment = tuple(assignment)
    if len(assignment) != instance.N:
        raise AssignmentError(f"assignment covers {len(assignment)} objects, instance has {instance.N}")
    full = (1 << instance.M) - 1
    for o, c in enumerate(assignment):
        if not isinstance(c, int) or c <= 0 or c & ~full:
            raise AssignmentError(f"object {o}: invalid configuration {c!r}")
    total = 0.0
    for o, c in enumerate(assignment):
        total += config_cost(instance, o, c)
    loads = tuple(Fraction(x) for x in config_loads(instance.lengths, assignment, instance.M))
    slacks = tuple(load - cap for load, cap in zip(loads, instance.capacities))
    bound = to_fraction(slack)
    violations = tuple(j for j, s in enumerate(slacks) if s > bound)
    return Score(total, loads, slacks, violations)
