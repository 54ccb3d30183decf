#!/usr/bin/env python3
"""Round time per agent as the number of agents grows on a 50x50 grid (l=10, k=5)."""
import argparse
import statistics
import sys
import time

from enforcers.bench import random_config
from enforcers.simulator import run


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--agents", type=int, nargs="+", default=[10, 20, 30, 40, 50, 60])
    p.add_argument("--side", type=int, default=50)
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--plan-length", type=int, default=None, help="default is two blocks")
    args = p.parse_args(argv)
    status = 0
    print("agents  runs  aborts  rounds  per-agent median(ms)  per-agent max(ms)  wall(s)")
    for n in args.agents:
        per_agent, rounds, aborts = [], 0, 0
        t0 = time.perf_counter()
        for seed in range(args.seeds):
            r = run(random_config(n, args.side, 10, 5, seed, args.plan_length))
            aborts += not r.ok
            rounds += r.metrics.rounds
            per_agent += [s / z for s, z in zip(r.metrics.round_times, r.metrics.round_sizes)]
        med = statistics.median(per_agent) * 1e3 if per_agent else 0.0
        mx = max(per_agent, default=0.0) * 1e3
        print(f"{n:>6}  {args.seeds:>4}  {aborts:>6}  {rounds:>6}  {med:>20.3f}  {mx:>17.3f}  {time.perf_counter() - t0:>7.2f}")
        status |= aborts > 0
    return int(status)


if __name__ == "__main__":
    sys.exit(main())
