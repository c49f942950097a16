"""Command-line entry point: ``repnet {validate,plan,simulate,bench}``.

Machine-readable payloads go to stdout, diagnostics to stderr. Exit codes:
0 success, 1 violation / disagreement / simulation fault, 2 bad input.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time

import numpy as np

from repnet.domain import load_spec, spec_from_dict, validate
from repnet.errors import ParseError, SchemaError, SimulationFault, ValidationError
from repnet.generate import random_spec
from repnet.oracle import enumerate_plan
from repnet.planner import PlanConfig, expected_node_count, oi
from repnet.simulator import Fixed, Plan, Random, Stationary, cumulative_impact, run, write_trace

DEFAULT_CAP = 10**6
BENCH_FIELDS = ["agents", "states", "actions", "observations", "k",
                "nodes_expanded", "wall_time_ns", "predicted_nodes", "nodes_by_depth"]


class UsageError(Exception):
    pass


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load(path):
    try:
        return load_spec(path)
    except (ParseError, SchemaError) as exc:
        raise UsageError(str(exc)) from None
    except ValidationError as exc:
        raise UsageError("invalid domain: " + str(exc)) from None


def cmd_validate(args) -> int:
    try:
        with open(args.spec, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(str(exc)) from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.spec}: {exc}") from None
    try:
        spec = spec_from_dict(data)
    except SchemaError as exc:
        raise UsageError(str(exc)) from None
    except ValidationError as exc:
        for v in exc.violations:
            print(v)
        return 1
    problems = validate(spec)
    for v in problems:
        print(v)
    if problems:
        return 1
    print("OK")
    return 0


def cmd_plan(args) -> int:
    spec = _load(args.spec)
    try:
        g = spec.agent_index(args.agent)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    if args.horizon < 1:
        raise UsageError("--horizon must be >= 1")
    view = spec.initial_view(g)
    expected = expected_node_count(spec.n_actions, spec.n_obs, args.horizon)
    if expected > args.cap:
        raise UsageError(f"tree of {expected} nodes exceeds --cap {args.cap}")
    result = oi(spec, view, PlanConfig(g, args.horizon, workers=args.threads))
    print(result.to_json(spec))
    if args.oracle:
        ref = enumerate_plan(spec, view, args.horizon)
        diff = abs(ref.value - result.value)
        if diff > 1e-9 or ref.best_action != result.best_action:
            _err(f"oracle disagreement: value {result.value!r} vs {ref.value!r}, "
                 f"action {spec.actions[result.best_action].name} vs {spec.actions[ref.best_action].name}")
            return 1
        _err(f"oracle agrees (|diff| = {diff:.3g})")
    return 0


def parse_policy(spec, text: str, steps: int):
    kind, _, arg = text.partition(":")
    if kind == "random":
        return Random()
    if kind == "plan":
        k = int(arg or 1)
        if k < 1:
            raise UsageError("plan horizon must be >= 1")
        return Plan(k)
    if kind == "fixed":
        try:
            script = tuple(spec.action_index(n) for n in arg.split(",") if n)
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None
        if len(script) < steps:
            raise UsageError(f"fixed script has {len(script)} actions, need {steps}")
        return Fixed(script)
    if kind == "stationary":
        with open(arg, encoding="utf-8") as fh:
            dist = np.array(json.load(fh), dtype=float)
        if dist.shape != (spec.n_states, spec.n_actions) or np.any(
                np.abs(dist.sum(axis=1) - 1) > 1e-9) or np.any(dist < 0):
            raise UsageError(f"stationary policy {arg}: need a {spec.n_states}x{spec.n_actions} row-stochastic array")
        return Stationary(dist)
    raise UsageError(f"unknown policy {text!r}")


def cmd_simulate(args) -> int:
    spec = _load(args.spec)
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    policies = [Random()] * spec.n_agents
    for item in args.policy or []:
        name, _, ptext = item.partition("=")
        try:
            g = spec.agent_index(name)
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None
        policies[g] = parse_policy(spec, ptext, args.steps)
    try:
        records = run(spec, policies, args.steps, args.seed)
    except SimulationFault as exc:
        _err(f"simulation fault at step {exc.step}, agent {spec.agents[exc.agent]}: {exc.cause}")
        return 1
    if args.out:
        write_trace(spec, records, args.out)
    else:
        for rec in records:
            print(rec.to_json(spec))
    totals = cumulative_impact(records)
    summary = {"steps": args.steps, "seed": args.seed,
               "cumulative_impact": {a: float(v) for a, v in zip(spec.agents, totals)}}
    (print if args.out else _err)(json.dumps(summary))
    return 0


def parse_grid(text: str) -> dict[str, list[int]]:
    """``"G=2 S=2 A=1,2 O=1,2,4 k=1,2,3"`` -> dict of value lists."""
    grid = {"G": [2], "S": [2], "A": [2], "O": [2], "k": [1, 2, 3]}
    for item in text.replace(";", " ").split():
        key, _, vals = item.partition("=")
        if key not in grid:
            raise UsageError(f"unknown grid key {key!r}")
        try:
            grid[key] = [int(v) for v in vals.split(",") if v]
        except ValueError:
            raise UsageError(f"bad grid values {item!r}") from None
        if not grid[key] or min(grid[key]) < 1:
            raise UsageError(f"grid values must be >= 1: {item!r}")
    return grid


def bench_rows(grid: dict[str, list[int]], seed: int = 0, cap: int = DEFAULT_CAP):
    configs = [(G, S, A, W, k) for G in grid["G"] for S in grid["S"] for A in grid["A"]
               for W in grid["O"] for k in grid["k"]]
    for G, S, A, W, k in configs:
        if expected_node_count(A, W, k) > cap:
            raise UsageError(f"configuration G={G} S={S} A={A} O={W} k={k} exceeds node cap {cap}")
    for n, (G, S, A, W, k) in enumerate(configs):
        spec = random_spec(np.random.default_rng([seed, G, S, A, W]), G, S, A, W, positive=True)
        view = spec.initial_view(0)
        t0 = time.perf_counter_ns()
        result = oi(spec, view, PlanConfig(0, k))
        elapsed = time.perf_counter_ns() - t0
        yield {
            "agents": G, "states": S, "actions": A, "observations": W, "k": k,
            "nodes_expanded": result.nodes_expanded, "wall_time_ns": elapsed,
            "predicted_nodes": expected_node_count(A, W, k),
            "nodes_by_depth": ";".join(str(c) for c in result.nodes_by_depth),
        }


def cmd_bench(args) -> int:
    grid = parse_grid(args.grid)
    rows = list(bench_rows(grid, args.seed, args.cap))
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=BENCH_FIELDS)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.out:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="repnet", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a domain file")
    v.add_argument("spec")
    v.set_defaults(func=cmd_validate)

    pl = sub.add_parser("plan", help="optimal-impact action for one agent")
    pl.add_argument("spec")
    pl.add_argument("--agent", required=True)
    pl.add_argument("--horizon", type=int, default=1)
    pl.add_argument("--oracle", action="store_true", help="cross-check against brute force")
    pl.add_argument("--cap", type=int, default=DEFAULT_CAP, help="maximum tree size")
    pl.add_argument("--threads", type=int, default=1)
    pl.set_defaults(func=cmd_plan)

    s = sub.add_parser("simulate", help="run a seeded simulation and write a trace")
    s.add_argument("spec")
    s.add_argument("--steps", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--policy", action="append", metavar="AGENT=POLICY",
                   help="random | plan:K | fixed:a1,a2,... | stationary:FILE.json")
    s.add_argument("--out", help="trace path (JSON Lines); stdout if omitted")
    s.set_defaults(func=cmd_simulate)

    b = sub.add_parser("bench", help="node counts and timings over a size grid")
    b.add_argument("--grid", default="", help='e.g. "G=2 S=2 A=1,2,3 O=1,2,4 k=1,2,3"')
    b.add_argument("--out", help="CSV path; stdout if omitted")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--cap", type=int, default=DEFAULT_CAP)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except UsageError as exc:
        _err(f"error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
