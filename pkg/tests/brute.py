"""Plain itertools brute force used to cross-check the library oracle on tiny inputs.

Only cost minima are compared (no tie-breaking), and cost is summed in
object order from a direct transcription of the cost formula.
"""

import itertools
import math


def dp_cost(inst, o, c):
    obj = inst.objects[o]
    M = inst.M
    access = sum(obj.demands[j] * float(obj.length) * min(inst.distances[i][j] for i in range(M) if c >> i & 1)
                 for j in range(M) if not c >> j & 1)
    return access + sum(obj.install_costs[j] for j in range(M) if c >> j & 1)


def brute_dp(inst, caps=None):
    M, N = inst.M, inst.N
    best = math.inf
    options = []
    for o in range(N):
        k = M if caps is None else (caps if isinstance(caps, int) else caps[o])
        options.append([c for c in range(1, 2**M) if bin(c).count("1") <= k])
    for combo in itertools.product(*options):
        loads = [sum(inst.objects[o].length for o, c in enumerate(combo) if c >> j & 1) for j in range(M)]
        if all(l <= cap for l, cap in zip(loads, inst.capacities)):
            best = min(best, sum(dp_cost(inst, o, c) for o, c in enumerate(combo)))
    return best


def brute_pp(inst):
    M, N = inst.M, inst.N
    limits = [M - 1 if k is None else k for k in inst.client_limits]
    per_object = []
    for o in range(N):
        w = inst.objects[o].demands
        opts = []
        for c in range(1, 2**M):
            need = [j for j in range(M) if w[j] > 0 and not c >> j & 1]
            servers = [i for i in range(M) if c >> i & 1]
            for pick in itertools.product(servers, repeat=len(need)):
                opts.append((c, dict(zip(need, pick))))
        per_object.append(opts)
    best = math.inf
    for combo in itertools.product(*per_object):
        loads = [sum(inst.objects[o].length for o, (c, _) in enumerate(combo) if c >> j & 1) for j in range(M)]
        if any(l > cap for l, cap in zip(loads, inst.capacities)):
            continue
        served = [set() for _ in range(M)]
        for _, rho in combo:
            for j, i in rho.items():
                served[i].add(j)
        if any(len(s) > k for s, k in zip(served, limits)):
            continue
        total = 0.0
        for o, (c, rho) in enumerate(combo):
            obj = inst.objects[o]
            total += sum(obj.demands[j] * float(obj.length) * inst.distances[i][j] for j, i in rho.items())
            total += sum(obj.install_costs[i] for i in range(M) if c >> i & 1)
        best = min(best, total)
    return best
