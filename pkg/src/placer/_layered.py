"""Reachable-state layered DP shared by the sparse data placement engine and page placement.

Objects are consumed last-to-first from the start state, so layer ``k`` holds
the states from which objects ``0..k-1`` remain to be placed. Values are
evaluated bottom-up with ``f_0 = 0`` and ``f_k(x) = min(cost + f_{k-1}(y))``
over the transitions of ``x`` in the order the caller yields them; only a
strict improvement replaces the incumbent.
"""

from __future__ import annotations

import math
from typing import Callable, Hashable, Iterable

Transition = tuple  # (choice, cost, next_state)


def solve_layers(start: Hashable, depth: int, transitions: Callable[[int, Hashable], Iterable[Transition]]):
    """Return ``(value, choices, layer_sizes)``.

    ``transitions(k, state)`` lists the moves for object ``k - 1`` out of
    ``state``. ``choices`` is ordered by object index and is ``None`` when
    ``value`` is infinite.
    """
    layers: list[dict] = [dict() for _ in range(depth + 1)]
    layers[depth][start] = None
    for k in range(depth, 0, -1):
        below = layers[k - 1]
        for state in layers[k]:
            moves = list(transitions(k, state))
            layers[k][state] = moves
            for _, _, nxt in moves:
                below[nxt] = None

    value = {state: 0.0 for state in layers[0]}
    best: list[dict] = [dict() for _ in range(depth + 1)]
    for k in range(1, depth + 1):
        cur = {}
        picks = best[k]
        for state, moves in layers[k].items():
            v, pick = math.inf, None
            for choice, cost, nxt in moves:
                cand = cost + value[nxt]
                if cand < v:
                    v, pick = cand, (choice, nxt)
            cur[state] = v
            picks[state] = pick
        value = cur

    sizes = tuple(len(layers[k]) for k in range(1, depth + 1))
    total = value[start] if depth else 0.0
    if math.isinf(total):
        return total, None, sizes
    choices = [None] * depth
    state = start
    for k in range(depth, 0, -1):
        choice, state = best[k][state]
        choices[k - 1] = choice
    return total, choices, sizes
