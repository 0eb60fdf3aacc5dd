"""``placer`` command line: solve, gen, verify, oracle.

Exit codes: 0 solved or verified, 2 infeasible, 3 oracle budget exhausted,
1 anything else (usage errors included).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from fractions import Fraction

import jsonschema

from . import dp_scaled, dp_uniform, generators, io, oracle
from . import page_placement as pp
from .model import DEFAULT_MAX_CLIENTS, PlacerError, check, score_solution, to_fraction

log = logging.getLogger("placer")

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE, EXIT_BUDGET = 0, 1, 2, 3
COST_RTOL = 1e-9
SLACK_TOL = 1e-9


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _caps(args, N):
    if getattr(args, "caps_file", None):
        with open(args.caps_file) as fh:
            caps = json.load(fh)
        if not isinstance(caps, list) or len(caps) != N or not all(isinstance(k, int) and k >= 1 for k in caps):
            raise UsageError(f"caps file must hold a list of {N} positive integers")
        return caps
    return args.replica_cap


def _emit(report, out):
    text = json.dumps(report, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _unit_lengths(instance):
    """Uniform lengths ``l`` become 1 and capacities ``floor(C / l)``; exact."""
    l = instance.lengths[0]
    return [1] * instance.N, [math.floor(c / l) for c in instance.capacities]


def cmd_solve(args) -> int:
    instance = io.read_instance(args.input)
    check(instance, args.max_clients)
    caps = _caps(args, instance.N)
    if args.mode == "pp":
        if all(k is None for k in instance.client_limits):
            raise UsageError("instance has no client limits; page placement needs them (use --mode dp)")
        if caps is not None:
            raise UsageError("replica caps apply to --mode dp only")
    eps = None if args.epsilon is None else to_fraction(args.epsilon)
    note = None
    start = time.perf_counter()
    if instance.is_uniform():
        if eps is not None:
            note = "uniform lengths: solved exactly, epsilon ignored"
            eps = None
        lengths, capacities = _unit_lengths(instance)
        if args.mode == "dp":
            result = dp_uniform.solve_units(instance, lengths, capacities, caps, max_clients=args.max_clients)
        else:
            result = pp.solve_pp_units(instance, lengths, capacities, max_clients=args.max_clients)
    else:
        if eps is None:
            raise UsageError("non-uniform lengths need --epsilon")
        if args.mode == "dp":
            result = dp_scaled.solve_nu(instance, eps, caps, max_clients=args.max_clients)
        else:
            result = pp.solve_pp_nu(instance, eps, max_clients=args.max_clients)
    wall = time.perf_counter() - start
    report = io.build_report(instance, result, mode=args.mode, epsilon=eps, replica_caps=caps,
                             max_clients=args.max_clients, wall_time=wall, note=note)
    _emit(report, args.out)
    log.info("%s: %s in %.3fs", result.solver, report["status"], wall)
    return EXIT_OK if result else EXIT_INFEASIBLE


def cmd_oracle(args) -> int:
    instance = io.read_instance(args.input)
    check(instance, args.max_clients)
    budget = oracle.OracleBudget(max_assignments=args.budget, max_seconds=args.time_limit)
    start = time.perf_counter()
    try:
        if args.mode == "dp":
            caps = _caps(args, instance.N)
            result = oracle.oracle_dp(instance, caps, budget, workers=args.workers)
        else:
            caps = None
            result = oracle.oracle_pp(instance, budget, workers=args.workers)
    except oracle.BudgetExceeded as exc:
        print(f"placer: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    wall = time.perf_counter() - start
    report = io.build_report(instance, result, mode=args.mode, replica_caps=caps,
                             max_clients=args.max_clients, wall_time=wall)
    _emit(report, args.out)
    return EXIT_OK if result else EXIT_INFEASIBLE


def verify_report(instance, report) -> list[tuple[str, bool, str]]:
    """``(check, passed, detail)`` rows for a report against its instance."""
    if report.get("instance_hash") != io.instance_hash(instance):
        raise PlacerError("instance hash mismatch: report was produced for a different instance")
    rows = []
    if report.get("status") != "optimal":
        rows.append(("status", True, f"{report.get('status')} verdict carries no assignment to re-check"))
        return rows
    M = instance.M
    configs, patterns = io.report_assignment(report, M)
    eps = report["parameters"].get("epsilon")
    bound = Fraction(0) if eps is None else to_fraction(eps) * instance.l_max
    if patterns is None:
        score = score_solution(instance, configs)
        total, loads = score.total, score.loads
    else:
        score = pp.score_pp(instance, configs, patterns)
        total, loads = score.total, score.loads
        rows.append(("patterns", not score.pattern_problems,
                     "; ".join(score.pattern_problems) or "every demander has a server in the configuration"))
        rows.append(("client_limits", not score.limit_problems,
                     "; ".join(score.limit_problems) or f"serve counts {list(score.serve_counts)}"))
    reported = report["total_cost"]
    ok = math.isclose(total, reported, rel_tol=COST_RTOL, abs_tol=COST_RTOL)
    rows.append(("cost", ok, f"recomputed {total!r}, reported {reported!r}" + ("" if ok else " (cost mismatch)")))
    rep_loads = [to_fraction(x) for x in report["loads"]]
    ok = rep_loads == list(loads)
    rows.append(("loads", ok, "match" if ok else f"recomputed {[io.exact_str(x) for x in loads]}"))
    slacks = [load - cap for load, cap in zip(loads, instance.capacities)]
    worst = max(slacks)
    ok = float(worst - bound) <= SLACK_TOL
    what = "capacity" if eps is None else "blow-up"
    rows.append((what, ok, f"max slack {float(worst)} vs bound {float(bound)}" + ("" if ok else f" ({what} exceeded)")))
    return rows


def cmd_verify(args) -> int:
    instance = io.read_instance(args.input)
    with open(args.report) as fh:
        report = json.load(fh)
    rows = verify_report(instance, report)
    for name, ok, detail in rows:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    passed = all(ok for _, ok, _ in rows)
    print("verify: pass" if passed else "verify: fail")
    return EXIT_OK if passed else EXIT_ERROR


def cmd_gen(args) -> int:
    seed = int(os.environ.get("PLACER_SEED", args.seed))
    if args.family == "tightness":
        instance = generators.tightness_instance(args.objects, args.epsilon, args.delta, args.distance)
    else:
        instance = generators.random_instance(
            args.clients, args.objects, seed,
            capacity=(args.min_capacity, args.max_capacity),
            max_demand=args.max_demand, max_distance=args.max_distance, max_install=args.max_install,
            uniform=not args.non_uniform, max_length=args.max_length, length_step=args.length_step,
            client_limits=None if args.limits is None else tuple(args.limits),
        )
    text = io.dumps_instance(instance)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="placer", description="Exact data and page placement for a few clients.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def caps_options(p):
        group = p.add_mutually_exclusive_group()
        group.add_argument("--replica-cap", type=int, help="at most K replicas per object")
        group.add_argument("--caps-file", help="JSON list with one replica cap per object")

    p = sub.add_parser("solve", help="solve an instance file")
    p.add_argument("--mode", choices=["dp", "pp"], default="dp")
    p.add_argument("--epsilon", help="capacity slack factor for non-uniform lengths")
    caps_options(p)
    p.add_argument("--max-clients", type=int, default=DEFAULT_MAX_CLIENTS, help="client-count guard")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", help="write a generated instance")
    p.add_argument("--family", choices=["random", "tightness"], required=True)
    p.add_argument("--clients", type=int, default=3)
    p.add_argument("--objects", type=int, default=6)
    p.add_argument("--seed", type=int, default=0, help="overridden by $PLACER_SEED")
    p.add_argument("--min-capacity", default="1")
    p.add_argument("--max-capacity", default="4")
    p.add_argument("--max-demand", type=int, default=9)
    p.add_argument("--max-distance", type=int, default=9)
    p.add_argument("--max-install", type=int, default=9)
    p.add_argument("--non-uniform", action="store_true")
    p.add_argument("--max-length", default="4")
    p.add_argument("--length-step", default="0.1")
    p.add_argument("--limits", type=int, nargs=2, metavar=("LO", "HI"), help="random client limits in [LO, HI]")
    p.add_argument("--epsilon", default="0.5", help="tightness family")
    p.add_argument("--delta", help="tightness family; default 1/(N-1)")
    p.add_argument("--distance", type=float, default=1.0, help="tightness family off-diagonal distance")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="re-check a report against its instance")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="brute-force reference solve")
    p.add_argument("--mode", choices=["dp", "pp"], default="dp")
    p.add_argument("--budget", type=int, default=oracle.OracleBudget.max_assignments)
    p.add_argument("--time-limit", type=float, default=oracle.OracleBudget.max_seconds)
    p.add_argument("--workers", type=int, default=1)
    caps_options(p)
    p.add_argument("--max-clients", type=int, default=None)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"placer: error: {exc}", file=sys.stderr)
    except (PlacerError, ValueError, OSError, json.JSONDecodeError, jsonschema.ValidationError) as exc:
        print(f"placer: {exc}", file=sys.stderr)
    return EXIT_ERROR


def run():
    sys.exit(main())
