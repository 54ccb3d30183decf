"""Safety functions over instantaneous occupancy.

Every safety function here is pairwise: an occupancy is safe iff every pair of
agents is allowed to stand where they stand. Collision avoidance is the
``radius=1`` case (distinct vertices); ``min-distance:r`` requires graph
distance at least ``r``. ``collision+swap`` also rejects two agents exchanging
cells in one step, which needs two consecutive instants and is therefore checked
separately from the occupancy predicate.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Hashable, Mapping

from .environment import Environment, Vertex, graph_distance
from .trajectories import Trajectory, positions

Agent = Hashable
Occupancy = Mapping[Vertex, "set[Agent]"]


class InconsistentOccupancy(ValueError):
    pass


def occupancy(pos: Mapping[Agent, Vertex]) -> dict[Vertex, set]:
    occ: dict[Vertex, set] = defaultdict(set)
    for agent, v in pos.items():
        occ[v].add(agent)
    return dict(occ)


def agent_positions(occ: Occupancy) -> dict[Agent, Vertex]:
    """Invert an occupancy, checking that no agent stands in two places."""
    pos = {}
    for v, agents in occ.items():
        for a in agents:
            if a in pos and pos[a] != v:
                raise InconsistentOccupancy(f"agent {a!r} at both {pos[a]!r} and {v!r}")
            pos[a] = v
    return pos


@dataclass(frozen=True)
class SafetyFn:
    name: str
    radius: int = 1
    swaps: bool = False
    distance: Callable[[Vertex, Vertex], int] | None = field(default=None, compare=False, repr=False)

    def pair_ok(self, a: Vertex, b: Vertex) -> bool:
        if self.radius <= 1:
            return a != b
        return self.distance(a, b) >= self.radius

    def __call__(self, occ: Occupancy) -> bool:
        return not self.violations(agent_positions(occ))

    @property
    def min_comm_dist(self) -> int:
        """Smallest communication constant under which ungrouped agents cannot violate in one step."""
        return self.radius + 1

    def violations(self, pos: Mapping[Agent, Vertex]) -> list[tuple[Agent, Agent]]:
        """Violating agent pairs at one instant."""
        if self.radius <= 1:
            out = []
            by_vertex: dict[Vertex, list] = defaultdict(list)
            for a, v in pos.items():
                by_vertex[v].append(a)
            for agents in by_vertex.values():
                if len(agents) > 1:
                    out.extend(combinations(agents, 2))
            return out
        return [(a, b) for (a, va), (b, vb) in combinations(pos.items(), 2) if not self.pair_ok(va, vb)]

    def swap_violations(self, before: Mapping[Agent, Vertex], after: Mapping[Agent, Vertex]) -> list[tuple[Agent, Agent]]:
        if not self.swaps:
            return []
        moved = {(before[a], after[a]): a for a in before if a in after and before[a] != after[a]}
        out = []
        for (src, dst), a in moved.items():
            b = moved.get((dst, src))
            if b is not None and repr(a) < repr(b):
                out.append((a, b))
        return out


def phi_collision(occ: Occupancy) -> bool:
    """True iff every vertex holds at most one agent."""
    agent_positions(occ)
    return all(len(agents) <= 1 for agents in occ.values())


COLLISION = SafetyFn("collision")


def make_safety(name: str, env: Environment | None = None) -> SafetyFn:
    """Safety function by scenario-file name: ``collision``, ``collision+swap``, ``min-distance:<r>``."""
    if name == "collision":
        return COLLISION
    if name == "collision+swap":
        return SafetyFn(name, swaps=True)
    if name.startswith("min-distance:"):
        try:
            r = int(name.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad min-distance radius in {name!r}") from None
        if r < 1:
            raise ValueError("min-distance radius must be at least 1")
        if r == 1:
            return SafetyFn(name)
        if env is None:
            raise ValueError("min-distance safety needs an environment")
        return SafetyFn(name, radius=r, distance=lambda a, b: graph_distance(env, a, b))
    raise ValueError(f"unknown safety function {name!r}")


def phi_local(groups, occ: Occupancy, phi: SafetyFn) -> bool:
    """Conjunction of ``phi`` evaluated inside each group separately."""
    pos = agent_positions(occ)
    for g in groups:
        members = getattr(g, "members", g)
        if phi.violations({a: pos[a] for a in members if a in pos}):
            return False
    return True


def phi_bar(u: Agent, order, occ: Occupancy, phi: SafetyFn) -> bool:
    """``phi`` restricted to ``u`` and the agents ranked above it in ``order``."""
    pos = agent_positions(occ)
    keep = {u, *order.above(u)}
    return not phi.violations({a: v for a, v in pos.items() if a in keep})


@dataclass(frozen=True)
class Violation:
    time: int
    agents: tuple
    vertex: Vertex | None = None


def _pinned(track: list, t: int):
    return track[t] if t < len(track) else track[-1]


def earliest_violation(tracks: Mapping[Agent, list], phi: SafetyFn, start: int = 0) -> Violation | None:
    """First instant at which the position sequences violate ``phi``.

    Sequences shorter than the longest are held at their last vertex.
    """
    if not tracks:
        return None
    horizon = max(len(tr) for tr in tracks.values())
    prev = None
    for t in range(start, horizon):
        now = {a: _pinned(tr, t) for a, tr in tracks.items()}
        pairs = phi.violations(now)
        if prev is not None:
            pairs = pairs + phi.swap_violations(prev, now)
        if pairs:
            involved = sorted({a for p in pairs for a in p}, key=repr)
            first = pairs[0]
            vertex = now[first[0]] if now[first[0]] == now[first[1]] else None
            return Violation(t, tuple(involved), vertex)
        prev = now
    return None


def first_violation(env: Environment, trajs: Mapping[Agent, Trajectory], phi: SafetyFn) -> Violation | None:
    return earliest_violation({a: positions(env, tr) for a, tr in trajs.items()}, phi)


def joint_safe(env: Environment, trajs: Mapping[Agent, Trajectory], phi: SafetyFn) -> bool:
    return first_violation(env, trajs, phi) is None
