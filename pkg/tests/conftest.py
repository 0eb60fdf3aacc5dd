import functools

import pytest

from placer.generators import random_instance
from placer.model import Instance

ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def dp_suite():
    """Unit lengths, M=3, N=6, C_j in 1..4, integer data up to 9."""
    return tuple(random_instance(3, 6, seed) for seed in range(200))


@functools.lru_cache(maxsize=None)
def pp_suite():
    """Unit lengths, M=3, N=4, C_j in 1..2, k_j in 0..2."""
    return tuple(random_instance(3, 4, 1000 + seed, capacity=(1, 2), client_limits=(0, 2)) for seed in range(100))


@functools.lru_cache(maxsize=None)
def nu_suite():
    """Non-uniform lengths, M in 2..3, N in 3..5."""
    out = []
    for seed in range(50):
        M = 2 + seed % 2
        N = 3 + seed % 3
        out.append(random_instance(M, N, 5000 + seed, uniform=False, capacity=("1", "3"), max_length="3"))
    return tuple(out)


def two_clients(w=(3, 5), f=(4, 6), d12=2.0, length=1, capacities=(1, 1)) -> Instance:
    """M=2, one object; ``d12`` is the distance from client 1 to client 0."""
    return Instance.build(capacities, [length], [list(w)], [list(f)], [[0, d12], [d12, 0]])


def record_acceptance(number, name, passed, detail=""):
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {name}" +
                            (f" ({detail})" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)


@pytest.fixture
def dp_instances():
    return dp_suite()


@pytest.fixture
def pp_instances():
    return pp_suite()


@pytest.fixture
def nu_instances():
    return nu_suite()
