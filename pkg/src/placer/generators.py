"""Seeded instance families."""

from __future__ import annotations

import random
from fractions import Fraction

from .model import Instance, to_fraction


def random_instance(M: int, N: int, seed, *, capacity=(1, 4), max_demand=9, max_distance=9, max_install=9,
                    uniform=True, max_length=4, length_step="0.1", client_limits=None) -> Instance:
    """Integer demands, distances and installation costs drawn uniformly.

    With ``uniform`` every length is 1 and capacities are integers in
    ``capacity``. Otherwise lengths are multiples of ``length_step`` in
    ``(0, max_length]`` and capacities multiples of ``length_step`` in the
    ``capacity`` range scaled by the mean length. ``client_limits`` is an
    inclusive ``(lo, hi)`` range clipped to ``M - 1``.
    """
    rng = random.Random(seed)
    step = to_fraction(length_step)
    cap_lo, cap_hi = (to_fraction(x) for x in capacity)
    if uniform:
        lengths = [Fraction(1)] * N
        capacities = [Fraction(rng.randint(int(cap_lo), int(cap_hi))) for _ in range(M)]
    else:
        ticks = int(to_fraction(max_length) / step)
        lengths = [step * rng.randint(1, ticks) for _ in range(N)]
        mean = sum(lengths) / N
        lo, hi = (int(x * mean / step) for x in (cap_lo, cap_hi))
        capacities = [step * rng.randint(lo, max(lo, hi)) for _ in range(M)]
    demands = []
    for _ in range(N):
        w = [rng.randint(0, max_demand) for _ in range(M)]
        if not any(w):
            w[rng.randrange(M)] = rng.randint(1, max(1, max_demand))
        demands.append(w)
    installs = [[rng.randint(0, max_install) for _ in range(M)] for _ in range(N)]
    distances = [[0 if i == j else rng.randint(0, max_distance) for j in range(M)] for i in range(M)]
    limits = None
    if client_limits is not None:
        lo, hi = client_limits
        limits = [min(rng.randint(lo, hi), M - 1) for _ in range(M)]
    return Instance.build(capacities, lengths, demands, installs, distances, limits)


def tightness_instance(N: int, epsilon, delta=None, distance=1) -> Instance:
    """Two clients on which the scaled solver overfills client 1 by ``(N-1)(1-delta)/N``.

    Objects ``0..N-2`` have length ``(1-delta)/N`` and unit demand from both
    clients; object ``N-1`` has length ``1/epsilon`` and demand ``N`` from
    client 1 only. Capacities are ``(1, 1/epsilon)``; installation is free.
    ``delta`` defaults to ``1/(N-1)``, which makes the overfill ``1 - 2/N``.
    """
    eps = to_fraction(epsilon)
    delta = Fraction(1, N - 1) if delta is None else to_fraction(delta)
    if N < 3:
        raise ValueError("tightness family needs N >= 3")
    if not 0 < eps < 1 or not 0 < delta < 1:
        raise ValueError("epsilon and delta must lie strictly between 0 and 1")
    small = (1 - delta) / N
    lengths = [small] * (N - 1) + [1 / eps]
    demands = [[1, 1]] * (N - 1) + [[0, N]]
    installs = [[0, 0]] * N
    distances = [[0, distance], [distance, 0]]
    return Instance.build([Fraction(1), 1 / eps], lengths, demands, installs, distances)
