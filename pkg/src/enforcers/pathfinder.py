"""Safe-path search in the time-expanded graph, with hold and forced-move fallbacks.

The time-expanded graph is never materialized: nodes ``(vertex, offset)`` are
generated on demand and rejected when they are unsafe against the reserved
tracks of the agents the searcher has to respect.
"""
from __future__ import annotations

import enum
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

import networkx as nx

from .environment import ACTION_ORDER, STAY, Environment, Vertex, _vertex_key, graph_distance
from .safety import SafetyFn
from .trajectories import Trajectory, positions

Agent = Hashable

HOLD_ORDER = STAY + ACTION_ORDER.replace(STAY, "")
# matchings tried by repair_step before giving up
REPAIR_BRANCHES = 64


class NoEscape(RuntimeError):
    pass


@dataclass
class ReservationTable:
    """Space-time cells claimed by the agents a searcher must respect.

    ``tracks[a][o]`` is agent ``a``'s vertex at offset ``o`` for ``o`` in
    ``0..horizon``; beyond the horizon every agent is pinned at its last vertex.
    ``size`` counts the constraining slots, i.e. offsets ``1..horizon``.
    """

    horizon: int
    tracks: dict = field(default_factory=dict)
    cells: dict = field(default_factory=dict)

    @classmethod
    def from_tracks(cls, tracks: Mapping[Agent, Sequence[Vertex]], horizon: int) -> "ReservationTable":
        table = cls(horizon)
        for a in sorted(tracks, key=repr):
            tr = list(tracks[a][:horizon + 1])
            tr += [tr[-1]] * (horizon + 1 - len(tr))
            table.tracks[a] = tuple(tr)
            for o, v in enumerate(tr):
                table.cells.setdefault((v, o), a)
        return table

    @property
    def size(self) -> int:
        return len(self.tracks) * self.horizon

    def at(self, offset: int) -> dict:
        o = min(offset, self.horizon)
        return {a: tr[o] for a, tr in self.tracks.items()}

    def is_reserved(self, v: Vertex, offset: int) -> bool:
        return (v, min(offset, self.horizon)) in self.cells

    def safe(self, phi: SafetyFn, src: Vertex, dst: Vertex, offset: int) -> bool:
        """Can the searcher move ``src -> dst`` arriving at ``offset`` without breaking ``phi``?"""
        if phi.radius <= 1:
            if self.is_reserved(dst, offset):
                return False
        else:
            o = min(offset, self.horizon)
            if any(not phi.pair_ok(dst, tr[o]) for tr in self.tracks.values()):
                return False
        if phi.swaps and src != dst and offset <= self.horizon:
            for tr in self.tracks.values():
                if tr[offset - 1] == dst and tr[offset] == src:
                    return False
        return True

    def parkable(self, phi: SafetyFn, v: Vertex, offset: int) -> bool:
        return all(self.safe(phi, v, v, o) for o in range(offset, max(offset, self.horizon) + 1))


def build_reservations(env: Environment, u: Agent, entries: Mapping[Agent, Trajectory], order, ell: int, k: int,
                       respect=None) -> ReservationTable:
    """Reserve the tracks of every member ranked above ``u`` (plus ``respect``) over offsets ``0..ell+k``."""
    keep = set(order.above(u)) | set(respect or ())
    keep.discard(u)
    tracks = {a: positions(env, entries[a]) for a in keep if a in entries}
    return ReservationTable.from_tracks(tracks, ell + k)


def find_safe_path(env: Environment, start: Vertex, goal: Vertex, res: ReservationTable, phi: SafetyFn, k: int,
                   allow_wait: bool | None = None, stats: dict | None = None) -> str | None:
    """Breadth-first search from ``(start, 0)`` to ``(goal, tau)`` with ``dist <= tau <= dist + k``.

    Every visited node must be safe against the reserved tracks and the goal
    must stay safe from ``tau`` to the end of the reservation horizon. With
    ``allow_wait=None`` the search first tries paths without ``stay`` actions
    and only then allows waiting.
    """
    if allow_wait is None:
        word = find_safe_path(env, start, goal, res, phi, k, False, stats)
        if word is None:
            word = find_safe_path(env, start, goal, res, phi, k, True, stats)
        return word
    dist = graph_distance(env, start, goal)
    limit = dist + k
    parent: dict = {(start, 0): None}
    frontier = deque([(start, 0)])
    expanded = 0
    found = None
    while frontier:
        node = frontier.popleft()
        v, o = node
        if v == goal and res.parkable(phi, v, o):
            found = node
            break
        if o >= limit:
            continue
        expanded += 1
        # a node that cannot reach the goal in time is a dead end
        for a, w in env.successors(v):
            if a == STAY and not allow_wait:
                continue
            nxt = (w, o + 1)
            if nxt in parent:
                continue
            if graph_distance(env, w, goal) > limit - o - 1:
                continue
            if not res.safe(phi, v, w, o + 1):
                continue
            parent[nxt] = (node, a)
            frontier.append(nxt)
    if stats is not None:
        stats["expanded"] = stats.get("expanded", 0) + expanded
    if found is None:
        return None
    word = []
    node = found
    while parent[node] is not None:
        node, a = parent[node]
        word.append(a)
    return "".join(reversed(word))


def safe_hold(env: Environment, pos: Vertex, res: ReservationTable, phi: SafetyFn, rng: random.Random | None = None) -> str | None:
    """One safe action for the next instant, ``stay`` preferred.

    Among moves, the target claimed by the fewest later reservations wins, so a
    yielding agent steps off the respected agents' paths instead of onto them.
    Remaining ties follow ``HOLD_ORDER`` (or a seeded shuffle of it).
    """
    if res.safe(phi, pos, pos, 1):
        return STAY
    order = HOLD_ORDER[1:]
    if rng is not None:
        order = "".join(rng.sample(order, len(order)))
    best = None
    for i, a in enumerate(order):
        w = env.delta(pos, a)
        if w is None or not res.safe(phi, pos, w, 1):
            continue
        later = sum(not res.safe(phi, w, w, o) for o in range(2, res.horizon + 1))
        if best is None or (later, i) < best[0]:
            best = ((later, i), a)
    return None if best is None else best[1]


class PathKind(enum.Enum):
    FULL = "full"
    HOLD = "hold"
    ESCAPE = "escape"


@dataclass
class PathResult:
    kind: PathKind
    word: str
    forced: dict = field(default_factory=dict)
    expanded: int = 0
    reservations: int = 0
    graph_size: int = 0


def _settle(phi: SafetyFn, moves: dict, now: Mapping, nxt: Mapping, top, respected) -> dict | None:
    """Offset-1 positions for the push chain ``moves``, forcing respected agents to stay where needed.

    A respected agent whose next move clashes with the chain (or with an agent
    already forced to stay) is itself forced to stay; the top agent never is.
    Returns ``{agent: offset-1 vertex}`` for the chain and every respected
    agent, or None when the clash involves the top agent.
    """
    stay: set = set()
    while True:
        p1 = {}
        for a in respected:
            p1[a] = now[a] if a in stay else nxt[a]
        for a, (_, dst, _) in moves.items():
            p1[a] = dst
        pairs = phi.violations(p1)
        if phi.swaps:
            pairs += phi.swap_violations({a: now[a] for a in p1}, p1)
        # clashes among untouched agents are left for their own replanning turn
        pairs = [p for p in pairs if any(a in moves or a in stay for a in p)]
        if not pairs:
            return p1
        grew = False
        for pair in pairs:
            for a in pair:
                if a not in moves and a not in stay and a != top and p1[a] != now[a]:
                    stay.add(a)
                    grew = True
        if not grew:
            return None


def escape(env: Environment, u: Agent, now: Mapping[Agent, Vertex], nxt: Mapping[Agent, Vertex], top: Agent,
           respected, phi: SafetyFn) -> PathResult:
    """Push agents along a shortest occupancy-graph path to the nearest free vertex.

    ``now`` and ``nxt`` are the group's positions at offsets 0 and 1. Vertices
    held by ``top`` (now or next) are deleted from the graph. Candidate targets
    are tried nearest first, smallest vertex id first within a distance; a
    candidate is accepted when the pushed agents and ``u`` can land safely, after
    forcing respected agents whose next move clashes with them to stay put.
    """
    start = now[u]
    occupant = {v: a for a, v in now.items()}
    blocked = {now[top], nxt[top]} if top != u else set()
    parent = {start: None}
    layer = [start]
    while layer:
        candidates, next_layer = [], []
        for x in layer:
            for a, w in env.successors(x):
                if a == STAY or w in parent or w in blocked:
                    continue
                parent[w] = (x, a)
                m = occupant.get(w)
                if m is None:
                    candidates.append(w)
                elif m != u:
                    next_layer.append(w)
        for target in sorted(candidates, key=_vertex_key):
            path, word = [target], []
            while parent[path[-1]] is not None:
                prev, a = parent[path[-1]]
                path.append(prev)
                word.append(a)
            path.reverse()
            word.reverse()
            moves = {u: (path[0], path[1], word[0])}
            for i in range(1, len(path) - 1):
                moves[occupant[path[i]]] = (path[i], path[i + 1], word[i])
            p1 = _settle(phi, moves, now, nxt, top, set(respected) - set(moves))
            if p1 is not None:
                forced = {m: a for m, (_, _, a) in moves.items() if m != u}
                for m in sorted(p1, key=repr):
                    if m not in moves and p1[m] == now[m] and nxt[m] != now[m]:
                        forced[m] = STAY
                return PathResult(PathKind.ESCAPE, word[0], forced)
        layer = sorted(next_layer, key=_vertex_key)
    repaired = repair_step(env, u, now, nxt, top, respected, phi)
    if repaired is not None:
        return repaired
    raise NoEscape(f"agent {u!r} at {start!r} has no reachable free vertex")


def repair_step(env: Environment, u: Agent, now: Mapping[Agent, Vertex], nxt: Mapping[Agent, Vertex], top: Agent,
                respected, phi: SafetyFn) -> PathResult | None:
    """One-step joint repair used when no push chain works.

    Assigns every respected agent and ``u`` a distinct next vertex among its
    one-step options, keeping planned moves where possible (maximum-weight
    matching) and the top agent's move fixed. Only the first instant is
    repaired; the moved agents replan on later ticks.
    """
    movers = sorted(set(respected) | {u}, key=repr)
    base = nx.Graph()
    for a in movers:
        if a == top:
            base.add_edge(("a", a), ("v", nxt[a]), weight=3)
            continue
        for act, w in env.successors(now[a]):
            if a == u and w == now[u]:
                continue
            base.add_edge(("a", a), ("v", w), weight=2 if w == nxt[a] and a != u else 1)
    # a matching can still swap two agents or break phi; ban one participant's
    # edge and re-solve, branching over which one (bounded)
    queue, seen = deque([frozenset()]), {frozenset()}
    while queue and len(seen) <= REPAIR_BRANCHES:
        banned = queue.popleft()
        g = base.copy()
        g.remove_edges_from((("a", a), ("v", w)) for a, w in banned)
        p1 = {}
        for x, y in nx.max_weight_matching(g, maxcardinality=True):
            if x[0] == "v":
                x, y = y, x
            p1[x[1]] = y[1]
        if len(p1) != len(movers) or p1[top] != nxt[top]:
            continue
        bad = phi.violations(p1) + phi.swap_violations({a: now[a] for a in p1}, p1)
        if not bad:
            action = {a: _action_to(env, now[a], p1[a]) for a in movers}
            forced = {a: action[a] for a in movers if a not in (u, top) and p1[a] != nxt[a]}
            return PathResult(PathKind.ESCAPE, action[u], forced)
        for a in sorted({a for pair in bad for a in pair} - {top}, key=repr):
            nb = banned | {(a, p1[a])}
            if nb not in seen:
                seen.add(nb)
                queue.append(nb)
    return None


def _action_to(env: Environment, v: Vertex, w: Vertex) -> str:
    for a, x in env.successors(v):
        if x == w:
            return a
    raise ValueError(f"{w!r} is not a successor of {v!r}")


def pathfind(env: Environment, u: Agent, start: Vertex, goal: Vertex, res: ReservationTable, phi: SafetyFn, k: int, *,
             now: Mapping[Agent, Vertex], nxt: Mapping[Agent, Vertex], top: Agent, respected,
             rng: random.Random | None = None) -> PathResult:
    """Full path if one exists, else a one-step hold, else an escape with forced moves."""
    stats: dict = {}
    word = find_safe_path(env, start, goal, res, phi, k, stats=stats)
    if word is not None:
        result = PathResult(PathKind.FULL, word)
    else:
        hold = safe_hold(env, start, res, phi, rng)
        if hold is not None:
            result = PathResult(PathKind.HOLD, hold)
        else:
            result = escape(env, u, now, nxt, top, respected, phi)
    result.expanded = stats.get("expanded", 0)
    result.reservations = res.size
    result.graph_size = res.size + res.horizon
    return result
