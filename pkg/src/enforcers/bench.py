"""Benchmark scenarios: single-group saturation, crossings, and random plans."""
from __future__ import annotations

import statistics
from dataclasses import dataclass

from .environment import GridSpec, build_grid
from .simulator import AgentSpec, SimConfig, gen_random_plans, run

# (agents, grid side, lookahead, deviation)
SCALING_ROWS = [
    (3, 3, 3, 3), (3, 3, 5, 5), (3, 3, 10, 5), (3, 5, 5, 5), (3, 10, 5, 5), (3, 50, 5, 5),
    (5, 3, 5, 5), (5, 5, 5, 5), (5, 10, 5, 5),
    (20, 50, 3, 3), (20, 50, 5, 5), (20, 50, 10, 5), (30, 50, 10, 5), (40, 50, 10, 5), (50, 50, 10, 5),
    (60, 50, 10, 5),
]


def saturation_config(n: int, width: int, height: int, ell: int, k: int) -> SimConfig:
    """Agents packed row-major from the bottom-left corner, all in one group.

    Every agent stays put except the first (lowest initial rank), which steps
    into its neighbor and back. Its replanning call must respect every other
    member, so its search graph spans all ``n`` agents over ``ell + k`` offsets.
    """
    if n > width * height:
        raise ValueError(f"{n} agents do not fit in a {width}x{height} grid")
    if width < 2:
        raise ValueError("saturation needs at least two columns")
    env = build_grid(GridSpec(width, height))
    cells = [(i % width, i // width) for i in range(n)]
    first = ("rl" + "s" * ell)[:ell]
    agents = [AgentSpec(f"a{i:02d}", c, first if i == 0 else "s" * ell) for i, c in enumerate(cells)]
    return SimConfig(env, agents, lookahead=ell, deviation=k, comm_dist=max(ell, 2), max_ticks=50 * ell)


def crossing_config(side: int, ell: int, k: int, n: int = 3) -> SimConfig:
    """Up to four agents crossing the grid center at the same instant."""
    env = build_grid(GridSpec(side, side))
    cx = cy = side // 2
    h = ell // 2
    arms = [((cx + h, cy), "l"), ((cx - h, cy), "r"), ((cx, cy + h), "d"), ((cx, cy - h), "t")]
    agents = [AgentSpec(f"a{i}", s, a * ell) for i, (s, a) in enumerate(arms[:n])]
    return SimConfig(env, agents, lookahead=ell, deviation=k, comm_dist=max(ell, 2), max_ticks=50 * ell)


def random_config(n: int, side: int, ell: int, k: int, seed: int, length: int | None = None) -> SimConfig:
    env = build_grid(GridSpec(side, side))
    plans = gen_random_plans(seed, env, n, 2 * ell if length is None else length)
    return SimConfig(env, plans, lookahead=ell, deviation=k, comm_dist=max(ell, 2), seed=seed,
                     max_ticks=max(200, 40 * ell))


@dataclass
class BenchRow:
    agents: int
    side: int
    lookahead: int
    deviation: int
    graph_size: int
    expected: int
    best: float | None
    worst: float | None
    rounds: int

    @property
    def match(self) -> bool:
        return self.graph_size == self.expected


def run_row(n: int, side: int, ell: int, k: int, seed: int = 0, timing: bool = True) -> BenchRow:
    sat = run(saturation_config(n, side, side, ell, k))
    best = worst = None
    rounds = 0
    if timing:
        rnd = run(random_config(n, side, ell, k, seed))
        best, worst, rounds = rnd.metrics.synthesis_best, rnd.metrics.synthesis_worst, rnd.metrics.rounds
    return BenchRow(n, side, ell, k, sat.metrics.max_graph_size, (ell + k) * n, best, worst, rounds)


def median_pathfind_time(config: SimConfig, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        times.extend(run(config).metrics.pathfind_times)
    return statistics.median(times)
