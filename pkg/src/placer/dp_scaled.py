"""Non-uniform lengths: scale, floor, solve exactly, report in original units.

With ``alpha = eps * l_max / N`` every length becomes ``floor(l / alpha)`` and
every capacity ``floor(C / alpha)``. Any assignment that fits the original
capacities also fits the scaled ones, so the scaled optimum costs no more
than the true optimum; in original units its loads exceed each capacity by at
most ``eps * l_max``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

from . import dp_uniform
from .model import (
    DEFAULT_MAX_CLIENTS,
    Infeasible,
    Instance,
    PlacerError,
    check,
    config_loads,
    to_fraction,
)

TOLERANCE = 1e-9


class BlowupExceeded(PlacerError):
    """A solution overfills some client by more than ``eps * l_max``."""


@dataclass(frozen=True)
class ScaledInstance:
    alpha: Fraction
    epsilon: Fraction
    scaled_lengths: tuple[int, ...]
    scaled_capacities: tuple[int, ...]
    source: Instance

    @property
    def blowup_bound(self) -> Fraction:
        return self.epsilon * self.source.l_max


def _epsilon(epsilon) -> Fraction:
    eps = to_fraction(epsilon)
    if eps <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    return eps


def scale(instance: Instance, epsilon) -> ScaledInstance:
    eps = _epsilon(epsilon)
    N, l_max = instance.N, instance.l_max
    alpha = eps * l_max / N
    cap_bound = N * l_max
    lengths = tuple(math.floor(l / alpha) for l in instance.lengths)
    capacities = tuple(math.floor(min(c, cap_bound) / alpha) for c in instance.capacities)
    assert all(c <= N * N / eps for c in capacities)
    return ScaledInstance(alpha, eps, lengths, capacities, instance)


def solve_nu(instance: Instance, epsilon, replica_caps=None, *, max_clients=DEFAULT_MAX_CLIENTS,
             dense_budget=dp_uniform.DEFAULT_DENSE_BUDGET):
    """Optimal-cost placement allowing ``eps * l_max`` overfill per client.

    An infeasible scaled program proves the original infeasible, so the
    :class:`Infeasible` returned here is always ``certified``.
    """
    check(instance, max_clients)
    sc = scale(instance, epsilon)
    result = dp_uniform.solve_units(instance, sc.scaled_lengths, sc.scaled_capacities, replica_caps,
                                    max_clients=max_clients, dense_budget=dense_budget, solver="dp_nu")
    if not result:
        return replace(result, certified=True,
                       reason="scaled program infeasible, hence the original is infeasible")
    scaled_loads = tuple(config_loads(sc.scaled_lengths, result.assignment, instance.M))
    return replace(result, epsilon=sc.epsilon, scaled_loads=scaled_loads,
                   scaled_capacities=sc.scaled_capacities)


@dataclass(frozen=True)
class BlowupReport:
    slacks: tuple[Fraction, ...]
    bound: Fraction

    @property
    def max_slack(self) -> Fraction:
        return max(self.slacks)


def verify_blowup(instance: Instance, epsilon, solution) -> BlowupReport:
    """Per-client ``load - capacity``; raises :class:`BlowupExceeded` past ``eps * l_max``."""
    bound = _epsilon(epsilon) * instance.l_max
    loads = config_loads(instance.lengths, solution.assignment, instance.M)
    slacks = tuple(Fraction(load) - cap for load, cap in zip(loads, instance.capacities))
    report = BlowupReport(slacks, bound)
    if float(report.max_slack - bound) > TOLERANCE:
        worst = max(range(instance.M), key=lambda j: slacks[j])
        raise BlowupExceeded(f"client {worst} overfilled by {float(slacks[worst])}, bound {float(bound)}")
    return report


def check_lemma1(instance: Instance, epsilon, assignment) -> bool:
    """Whether ``assignment`` fits the scaled capacities.

    Holds for every assignment that fits the original capacities; the
    converse is not claimed.
    """
    sc = scale(instance, epsilon)
    loads = config_loads(sc.scaled_lengths, getattr(assignment, "assignment", assignment), instance.M)
    return all(load <= cap for load, cap in zip(loads, sc.scaled_capacities))
