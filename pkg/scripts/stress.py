#!/usr/bin/env python3
"""Randomized safety and progress sweep on small dense grids.

Every run is re-checked from its trace (safety, swaps) and against the
per-block bound |U|^2 * l. Failing seeds are printed so they can be replayed
with ``enforcers run``.
"""
import argparse
import collections
import random
import sys
import time

from enforcers.cli import replay_check
from enforcers.environment import GridSpec, build_grid
from enforcers.simulator import SimConfig, gen_random_plans, run


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--runs", type=int, default=300)
    p.add_argument("--safety", default="collision")
    p.add_argument("--fill", type=float, default=0.5, help="fraction of cells occupied")
    p.add_argument("--random-holds", action="store_true")
    p.add_argument("--max-ticks", type=int, default=3000)
    args = p.parse_args(argv)
    stats = collections.Counter()
    t0 = time.perf_counter()
    for seed in range(args.runs):
        rng = random.Random(seed)
        side = rng.randint(3, 7)
        n = max(2, int(side * side * args.fill))
        ell, k = rng.choice([1, 2, 3, 5]), rng.choice([0, 1, 3, 5])
        env = build_grid(GridSpec(side, side))
        plans = gen_random_plans(seed, env, n, rng.randint(0, 3 * ell))
        cfg = SimConfig(env, plans, lookahead=ell, deviation=k, comm_dist=max(ell, 2), safety=args.safety,
                        seed=seed, max_ticks=args.max_ticks, random_holds=args.random_holds)
        r = run(cfg)
        m = r.metrics
        bad, _ = replay_check({"config": {"safety": args.safety, "grid": {"width": side, "height": side}}}, r.trace)
        stats["runs"] += 1
        if bad:
            stats["unsafe"] += 1
            print("unsafe", seed, bad[:2])
        if m.aborted:
            stats["aborted"] += 1
            print("abort", seed, f"{side}x{side}", n, ell, k, m.aborted[:100])
        if m.max_block_ticks > m.bound:
            stats["over bound"] += 1
            print("over bound", seed, m.max_block_ticks, m.bound)
    print(dict(stats), f"{time.perf_counter() - t0:.1f}s")
    return int(stats["unsafe"] > 0)


if __name__ == "__main__":
    sys.exit(main())
