"""Command-line front end: ``run``, ``bench``, ``validate``, ``replay``, ``positions``."""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import __version__
from .bench import SCALING_ROWS, run_row
from .environment import Environment, GridSpec, InvalidEnvironment, build_grid, check_assumptions
from .safety import make_safety
from .scenario import load_scenario, read_trace, write_trace
from .simulator import ConfigError, SimConfig, gen_random_plans, run

EXIT_OK, EXIT_CONFIG, EXIT_ABORT = 0, 1, 2


def _grid(text: str) -> GridSpec:
    try:
        w, h = text.lower().split("x")
        return GridSpec(int(w), int(h))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None


def _config(args) -> SimConfig:
    if args.scenario:
        config = load_scenario(args.scenario)
    elif args.agents is not None:
        grid = args.grid or GridSpec(10, 10)
        ell = args.lookahead or 3
        env = build_grid(grid)
        plans = gen_random_plans(args.seed or 0, env, args.agents, args.plan_length or 2 * ell)
        config = SimConfig(env, plans, lookahead=ell, deviation=2, seed=args.seed or 0)
    else:
        raise ConfigError("give --scenario or --agents")
    if args.lookahead is not None:
        config.lookahead = args.lookahead
    if args.deviation is not None:
        config.deviation = args.deviation
    if args.comm_dist is not None:
        config.comm_dist = args.comm_dist
    if args.max_ticks is not None:
        config.max_ticks = args.max_ticks
    if args.seed is not None:
        config.seed = args.seed
    config.parallel_groups = args.parallel_groups
    config.random_holds = config.random_holds or args.random_holds
    return config


def cmd_run(args) -> int:
    config = _config(args)
    result = run(config)
    m = result.metrics
    if args.trace:
        write_trace(result, args.trace)
    if args.metrics:
        Path(args.metrics).write_text(json.dumps(m.to_json(), indent=2, sort_keys=True, default=str) + "\n")
    status = "ok" if result.ok else f"ABORT ({m.aborted})"
    print(f"{status}: {m.n_agents} agents, {m.ticks} ticks, {m.rounds} rounds, {m.pathfind_calls} pathfinder calls")
    for a, pa in m.per_agent.items():
        print(f"  {a}: deviation {pa['deviation']}, calls {pa['pathfinder_calls']}, escapes {pa['escapes']}, "
              f"forced {pa['forced']}, finished at {pa['finished_at']}")
    print(f"  max block ticks {m.max_block_ticks} (bound {m.bound})")
    if not result.ok:
        print(m.aborted, file=sys.stderr)
        return EXIT_ABORT
    return EXIT_OK


def cmd_bench(args) -> int:
    rows = SCALING_ROWS
    if args.max_agents is not None:
        rows = [r for r in rows if r[0] <= args.max_agents]
    print("agents  states  l   k   graph  expected  best(s)   worst(s)  rounds")
    ok = True
    for n, side, ell, k in rows:
        r = run_row(n, side, ell, k, seed=args.seed or 0, timing=not args.no_timing)
        ok &= r.match
        best = "-" if r.best is None else f"{r.best:.4f}"
        worst = "-" if r.worst is None else f"{r.worst:.4f}"
        flag = "" if r.match else "  MISMATCH"
        print(f"{n:>6}  {side:>3}^2  {ell:<3} {k:<3} {r.graph_size:>5}  {r.expected:>8}  {best:>8}  {worst:>8}  {r.rounds:>6}{flag}")
    return EXIT_OK if ok else EXIT_ABORT


def cmd_validate(args) -> int:
    config = _config(args)
    problems = check_assumptions(config.env)
    hard = []
    if problems:
        if config.env.grid is None:
            hard.extend(problems)
        else:
            for p in problems:
                print(f"warning: {p}")
    try:
        warnings = config.validate()
    except ConfigError as e:
        hard.append(str(e))
        warnings = []
    for w in warnings:
        print(f"warning: {w}")
    for h in hard:
        print(f"error: {h}", file=sys.stderr)
    if hard:
        return EXIT_CONFIG
    print(f"ok: {len(config.agents)} agents, l={config.lookahead}, k={config.deviation}, d={config.d}")
    return EXIT_OK


def _header_env(cfg: dict):
    if "grid" in cfg:
        return build_grid(GridSpec(cfg["grid"]["width"], cfg["grid"]["height"]))
    if "edges" in cfg:
        return Environment((_vtx(s), a, _vtx(d)) for s, a, d in cfg["edges"])
    return None


def _vtx(v):
    return tuple(v) if isinstance(v, list) else v


def replay_check(header, records) -> tuple[list, dict]:
    """Re-evaluate safety on every record and recompute per-agent deviation from goal events."""
    cfg = (header or {}).get("config", {})
    phi = make_safety(cfg.get("safety", "collision"), _header_env(cfg))
    bad, prev = [], None
    for rec in records:
        pairs = phi.violations(rec.positions)
        if prev is not None:
            pairs += phi.swap_violations(prev, rec.positions)
        if pairs:
            bad.append((rec.tick, pairs))
        prev = rec.positions
    deviation = {a: 0 for a in (records[0].positions if records else {})}
    for rec in records:
        for e in rec.events:
            if e.get("type") == "goal":
                deviation[e["agent"]] = deviation.get(e["agent"], 0) + e["ticks"] - e["length"]
    summary = {"ticks": records[-1].tick if records else 0, "agents": len(deviation),
               "deviation": deviation, "violations": len(bad)}
    return bad, summary


def cmd_replay(args) -> int:
    try:
        header, records = read_trace(args.trace_file)
    except (OSError, ValueError, KeyError) as e:
        print(f"error: cannot read trace: {e}", file=sys.stderr)
        return EXIT_CONFIG
    bad, summary = replay_check(header, records)
    for tick, pairs in bad:
        print(f"violation at tick {tick}: {pairs}", file=sys.stderr)
    print(json.dumps(summary, sort_keys=True))
    return EXIT_ABORT if bad else EXIT_OK


def cmd_positions(args) -> int:
    """Per-agent position CSV (``tick,agent,x,y`` or ``tick,agent,vertex``) for external plotting."""
    _, records = read_trace(args.trace_file)
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(["tick", "agent", "x", "y"])
        for rec in records:
            for a, v in sorted(rec.positions.items()):
                w.writerow([rec.tick, a, *(v if isinstance(v, tuple) else (v, ""))])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _common(p):
    p.add_argument("--scenario", help="scenario JSON path or bundled name (fig1, fig2, fig3_l2, fig4)")
    p.add_argument("--seed", type=int)
    p.add_argument("--lookahead", "-l", type=int)
    p.add_argument("--deviation", "-k", type=int)
    p.add_argument("--comm-dist", "-d", type=int)
    p.add_argument("--agents", type=int, help="random plans for this many agents (no scenario)")
    p.add_argument("--grid", type=_grid, help="grid size WxH for random plans")
    p.add_argument("--plan-length", type=int)
    p.add_argument("--max-ticks", type=int)
    p.add_argument("--parallel-groups", action="store_true")
    p.add_argument("--random-holds", action="store_true", help="seeded tie order for one-step holds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="enforcers", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="simulate a scenario")
    _common(p)
    p.add_argument("--trace", help="write the JSON-lines trace here")
    p.add_argument("--metrics", help="write the metrics JSON here")
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("validate", help="check a scenario without running it")
    _common(p)
    p.set_defaults(func=cmd_validate)
    p = sub.add_parser("bench", help="saturation graph sizes and synthesis times for the scaling grid of agent counts, grid sizes, l and k")
    p.add_argument("--seed", type=int)
    p.add_argument("--max-agents", type=int)
    p.add_argument("--no-timing", action="store_true", help="skip the random-plan timing runs")
    p.set_defaults(func=cmd_bench)
    p = sub.add_parser("replay", help="re-check safety on a trace file")
    p.add_argument("trace_file")
    p.set_defaults(func=cmd_replay)
    p = sub.add_parser("positions", help="per-agent positions as CSV")
    p.add_argument("trace_file")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_positions)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InvalidEnvironment, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
