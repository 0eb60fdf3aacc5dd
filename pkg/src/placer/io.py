"""JSON instance files and solver reports.

Lengths and capacities are written as exact strings (``"3"``, ``"0.25"``,
``"4/45"``); demands, installation costs and distances as JSON numbers.
Client and object indices in files are 0-based.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

import jsonschema

from .model import Instance, to_fraction

FORMAT_VERSION = 1

_number = {"type": ["number", "string"]}
INSTANCE_SCHEMA = {
    "type": "object",
    "required": ["clients", "objects", "distances"],
    "properties": {
        "version": {"const": FORMAT_VERSION},
        "clients": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["capacity"],
                "properties": {
                    "capacity": _number,
                    "client_limit": {"type": ["integer", "null"]},
                },
                "additionalProperties": False,
            },
        },
        "objects": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["length", "demands", "install_costs"],
                "properties": {
                    "length": _number,
                    "demands": {"type": "array", "items": _number},
                    "install_costs": {"type": "array", "items": _number},
                },
                "additionalProperties": False,
            },
        },
        "distances": {"type": "array", "items": {"type": "array", "items": _number}},
    },
    "additionalProperties": False,
}


def exact_str(x) -> str:
    """Shortest exact text for a rational: integer, finite decimal, or ``p/q``."""
    x = to_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    d = x.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{x.numerator}/{x.denominator}"
    places = max(twos, fives)
    scaled = abs(x.numerator) * 10**places // x.denominator
    digits = str(scaled).rjust(places + 1, "0")
    sign = "-" if x < 0 else ""
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def instance_to_dict(instance: Instance) -> dict:
    clients = []
    for c in instance.clients:
        entry = {"capacity": exact_str(c.capacity)}
        if c.client_limit is not None:
            entry["client_limit"] = c.client_limit
        clients.append(entry)
    return {
        "version": FORMAT_VERSION,
        "clients": clients,
        "objects": [
            {"length": exact_str(o.length), "demands": list(o.demands), "install_costs": list(o.install_costs)}
            for o in instance.objects
        ],
        "distances": [list(row) for row in instance.distances],
    }


def instance_from_dict(data: dict) -> Instance:
    jsonschema.validate(data, INSTANCE_SCHEMA)
    return Instance.build(
        capacities=[c["capacity"] for c in data["clients"]],
        lengths=[o["length"] for o in data["objects"]],
        demands=[o["demands"] for o in data["objects"]],
        install_costs=[o["install_costs"] for o in data["objects"]],
        distances=data["distances"],
        client_limits=[c.get("client_limit") for c in data["clients"]],
    )


def dumps_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def loads_instance(text: str) -> Instance:
    return instance_from_dict(json.loads(text))


def read_instance(path) -> Instance:
    with open(path) as fh:
        return loads_instance(fh.read())


def write_instance(instance: Instance, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_instance(instance))


def instance_hash(instance: Instance) -> str:
    canon = json.dumps(instance_to_dict(instance), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def build_report(instance: Instance, result, *, mode: str, epsilon=None, replica_caps=None,
                 max_clients=None, wall_time=0.0, note=None) -> dict:
    """Machine-readable summary of a solver result (feasible or not)."""
    caps = instance.capacities
    report = {
        "solver": result.solver,
        "mode": mode,
        "status": "optimal" if result else ("certified_infeasible" if result.certified else "infeasible"),
        "instance_hash": instance_hash(instance),
        "parameters": {
            "epsilon": None if epsilon is None else exact_str(epsilon),
            "replica_caps": replica_caps,
            "max_clients": max_clients,
        },
        "capacities": [exact_str(c) for c in caps],
        "wall_time": wall_time,
        "states": result.states,
        "layer_states": list(result.layer_states),
    }
    if note:
        report["note"] = note
    if not result:
        report["reason"] = result.reason
        return report
    patterns = getattr(result, "patterns", None)
    assignment = []
    for o, c in enumerate(result.assignment):
        entry = {"object": o, "clients": [j for j in range(instance.M) if c >> j & 1]}
        if patterns is not None:
            entry["servers"] = {str(j): i for j, i in patterns[o]}
        assignment.append(entry)
    slacks = [load - cap for load, cap in zip(result.loads, caps)]
    bound = Fraction(0) if epsilon is None else to_fraction(epsilon) * instance.l_max
    report.update(
        assignment=assignment,
        total_cost=result.total_cost,
        loads=[exact_str(x) for x in result.loads],
        slacks=[exact_str(x) for x in slacks],
        max_slack=float(max(slacks)),
        blowup_bound=exact_str(bound),
    )
    if patterns is not None:
        report["serve_counts"] = list(result.serve_counts)
    if result.scaled_loads is not None:
        report["scaled_loads"] = list(result.scaled_loads)
        report["scaled_capacities"] = list(result.scaled_capacities)
    return report


def report_assignment(report: dict, M: int):
    """``(configurations, patterns or None)`` from a report's assignment block."""
    entries = sorted(report["assignment"], key=lambda e: e["object"])
    configs = tuple(sum(1 << j for j in e["clients"]) for e in entries)
    if report.get("mode") != "pp":
        return configs, None
    patterns = tuple(tuple(sorted((int(j), int(i)) for j, i in e.get("servers", {}).items())) for e in entries)
    return configs, patterns
