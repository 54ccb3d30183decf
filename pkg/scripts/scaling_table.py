#!/usr/bin/env python3
"""Reproduce the pathfinder-graph column of the scaling table and time random-plan rounds.

Graph sizes come from a single-group saturation run and are exact. Timings come
from random plans over several seeds and depend on the machine.
"""
import argparse
import csv
import sys

from enforcers.bench import SCALING_ROWS, random_config, saturation_config
from enforcers.simulator import run


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seeds", type=int, default=5, help="random-plan runs per row for timing")
    p.add_argument("--max-agents", type=int, default=None)
    p.add_argument("--csv", help="also write the rows to this file")
    args = p.parse_args(argv)

    rows = []
    print(f"{'agents':>6} {'grid':>6} {'l':>3} {'k':>3} {'graph':>6} {'expected':>8} {'rounds':>7} "
          f"{'best(s)':>9} {'worst(s)':>9}")
    for n, side, ell, k in SCALING_ROWS:
        if args.max_agents is not None and n > args.max_agents:
            continue
        graph = run(saturation_config(n, side, side, ell, k)).metrics.max_graph_size
        best, worst, rounds = None, None, 0
        for seed in range(args.seeds):
            m = run(random_config(n, side, ell, k, seed)).metrics
            rounds += m.rounds
            if m.synthesis_best is not None:
                best = m.synthesis_best if best is None else min(best, m.synthesis_best)
                worst = m.synthesis_worst if worst is None else max(worst, m.synthesis_worst)
        fmt = lambda x: "-" if x is None else f"{x:.5f}"
        print(f"{n:>6} {side:>4}^2 {ell:>3} {k:>3} {graph:>6} {n * (ell + k):>8} {rounds:>7} {fmt(best):>9} {fmt(worst):>9}")
        rows.append({"agents": n, "side": side, "lookahead": ell, "deviation": k, "graph_size": graph,
                     "expected": n * (ell + k), "rounds": rounds, "best_s": best, "worst_s": worst})
    if args.csv:
        with open(args.csv, "w", newline="") as f:
            w = csv.DictWriter(f, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    return 0 if all(r["graph_size"] == r["expected"] for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
