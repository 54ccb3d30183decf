#!/usr/bin/env python3
"""Enumerate every flag state the ordering mechanism can reach and look for precedence cycles.

With --clear-on-replan, contact sets are also emptied when an agent replans,
and the shortest event sequence leading to a cycle is printed.
"""
import argparse
import sys
import time

from enforcers.flagspace import explore, flags_of


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("agents", type=int, nargs="*", default=[2, 3, 4])
    p.add_argument("--clear-on-replan", action="store_true")
    args = p.parse_args(argv)
    found = False
    for n in args.agents:
        t0 = time.perf_counter()
        ex = explore(n, args.clear_on_replan)
        print(f"{n} agents: {ex.states} states explored in {time.perf_counter() - t0:.2f}s, "
              f"{'cycle ' + str(ex.cycle) if ex.cycle else 'acyclic'}")
        if ex.cycle:
            found = True
            print("  events:", ", ".join(f"{e[0]}({','.join(map(str, e[1:]))})" for e in ex.path))
            print("  flags set:", sorted(flags_of(n, ex.witness[0])))
    return int(found and not args.clear_on_replan)


if __name__ == "__main__":
    sys.exit(main())
