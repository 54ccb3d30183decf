"""Static deterministic labeled-graph environments.

Vertices are opaque hashables; on grids they are ``(column, row)`` tuples with
``(0, 0)`` at the bottom-left, ``t`` increasing the row and ``d`` decreasing it.
Action words are plain strings, one character per action.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Hashable, Iterable, Iterator

import networkx as nx

Vertex = Hashable

STAY = "s"
MOVES = {"l": (-1, 0), "r": (1, 0), "t": (0, 1), "d": (0, -1)}
# deterministic tie-break used by every search in the package
ACTION_ORDER = "lrtds"


class NoSuchEdge(KeyError):
    """Raised when a (vertex, action) pair has no target."""

    def __init__(self, vertex, action, offset=None):
        self.vertex = vertex
        self.action = action
        self.offset = offset
        where = "" if offset is None else f" at offset {offset}"
        super().__init__(f"no edge {action!r} from {vertex!r}{where}")

    def __str__(self):
        return self.args[0]


class Unreachable(ValueError):
    pass


class InvalidEnvironment(ValueError):
    """The graph breaks determinism or the self-loop / 2-edge-connectivity assumption."""


@dataclass(frozen=True)
class GridSpec:
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"grid must be at least 1x1, got {self.width}x{self.height}")


def _action_key(a: str):
    i = ACTION_ORDER.find(a)
    return (i if i >= 0 else len(ACTION_ORDER), a)


class Environment:
    """A deterministic labeled graph with transition function ``delta``."""

    def __init__(self, edges: Iterable[tuple[Vertex, str, Vertex]], vertices=None, grid: GridSpec | None = None):
        delta: dict[tuple[Vertex, str], Vertex] = {}
        verts = set(vertices or ())
        for src, a, dst in edges:
            if len(a) != 1:
                raise InvalidEnvironment(f"action labels must be single characters, got {a!r}")
            prev = delta.get((src, a))
            if prev is not None and prev != dst:
                raise InvalidEnvironment(f"nondeterministic: {src!r} -{a}-> {prev!r} and {dst!r}")
            delta[(src, a)] = dst
            verts.add(src)
            verts.add(dst)
        self._delta = delta
        self.vertices = tuple(sorted(verts, key=_vertex_key))
        self.actions = frozenset(a for _, a in delta)
        self.grid = grid
        self.deterministic = True
        succ: dict[Vertex, list[tuple[str, Vertex]]] = {v: [] for v in self.vertices}
        for (src, a), dst in delta.items():
            succ[src].append((a, dst))
        for v in succ:
            succ[v].sort(key=lambda e: _action_key(e[0]))
        self._succ = {v: tuple(s) for v, s in succ.items()}

    def __repr__(self):
        if self.grid is not None:
            return f"Environment(grid={self.grid.width}x{self.grid.height})"
        return f"Environment({len(self.vertices)} vertices, {len(self._delta)} edges)"

    def __contains__(self, v) -> bool:
        return v in self._succ

    @property
    def edges(self) -> Iterator[tuple[Vertex, str, Vertex]]:
        for (src, a), dst in self._delta.items():
            yield src, a, dst

    def successors(self, v: Vertex) -> tuple[tuple[str, Vertex], ...]:
        """Outgoing ``(action, target)`` pairs in tie-break order."""
        return self._succ.get(v, ())

    def delta(self, v: Vertex, a: str) -> Vertex | None:
        return self._delta.get((v, a))

    def out_degree(self, v: Vertex) -> int:
        return len(self._succ[v])


def _vertex_key(v):
    # mixed vertex types never occur in one graph, but keep sorting total anyway
    return (type(v).__name__, v)


def build_grid(spec: GridSpec) -> Environment:
    edges = []
    for x in range(spec.width):
        for y in range(spec.height):
            edges.append(((x, y), STAY, (x, y)))
            for a, (dx, dy) in MOVES.items():
                nx_, ny = x + dx, y + dy
                if 0 <= nx_ < spec.width and 0 <= ny < spec.height:
                    edges.append(((x, y), a, (nx_, ny)))
    return Environment(edges, grid=spec)


def step(env: Environment, v: Vertex, a: str) -> Vertex:
    w = env.delta(v, a)
    if w is None:
        raise NoSuchEdge(v, a)
    return w


def run_word(env: Environment, v: Vertex, word: str) -> Vertex:
    """Extended transition function: the vertex reached from ``v`` after ``word``."""
    for i, a in enumerate(word):
        w = env.delta(v, a)
        if w is None:
            raise NoSuchEdge(v, a, offset=i)
        v = w
    return v


@lru_cache(maxsize=4096)
def _bfs_from(env: Environment, source: Vertex) -> dict:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for _, w in env.successors(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def graph_distance(env: Environment, u: Vertex, v: Vertex) -> int:
    """Length of a shortest directed path from ``u`` to ``v``."""
    if env.grid is not None:
        if u not in env or v not in env:
            raise Unreachable(f"{u!r} or {v!r} is not a grid cell")
        return abs(u[0] - v[0]) + abs(u[1] - v[1])
    d = _bfs_from(env, u).get(v)
    if d is None:
        raise Unreachable(f"no path from {u!r} to {v!r}")
    return d


def shortest_word(env: Environment, u: Vertex, v: Vertex, avoid=frozenset()) -> str:
    """A shortest action word from ``u`` to ``v`` (tie-break order, no waiting).

    Vertices in ``avoid`` are not entered unless that makes ``v`` unreachable.
    """
    if u == v:
        return ""
    word = _bfs_word(env, u, v, set(avoid) - {v}) if avoid else None
    if word is None:
        word = _bfs_word(env, u, v, ())
    if word is None:
        raise Unreachable(f"no path from {u!r} to {v!r}")
    return word


def _bfs_word(env: Environment, u: Vertex, v: Vertex, blocked) -> str | None:
    parent: dict[Vertex, tuple[Vertex, str]] = {u: (u, "")}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for a, w in env.successors(x):
            if a == STAY or w in parent or w in blocked:
                continue
            parent[w] = (x, a)
            if w == v:
                word = []
                while w != u:
                    w, a = parent[w]
                    word.append(a)
                return "".join(reversed(word))
            queue.append(w)
    return None


def check_assumptions(env: Environment) -> list[str]:
    """Problems with determinism, idle self-loops and 2-edge connectivity (empty if none)."""
    problems = []
    missing = [v for v in env.vertices if env.delta(v, STAY) != v]
    if missing:
        problems.append(f"{len(missing)} vertices lack a '{STAY}' self-loop, e.g. {missing[0]!r}")
    g = nx.Graph()
    g.add_nodes_from(env.vertices)
    g.add_edges_from((s, d) for s, _, d in env.edges if s != d)
    if len(env.vertices) > 1:
        if not nx.is_connected(g):
            problems.append("graph is not connected")
        elif nx.has_bridges(g):
            bridge = next(nx.bridges(g))
            problems.append(f"graph is not 2-edge connected, bridge {bridge[0]!r} - {bridge[1]!r}")
    return problems


def parse_edge_list(text: str) -> Environment:
    edges = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise InvalidEnvironment(f"line {lineno}: expected 'src action dst', got {line!r}")
        edges.append(tuple(parts))
    return Environment(edges)


def load_edge_list(path: str | Path, validate: bool = True) -> Environment:
    """Load a custom graph, one ``src action dst`` edge per line.

    With ``validate`` the graph must also satisfy the self-loop and
    2-edge-connectivity assumption, otherwise ``InvalidEnvironment`` is raised.
    """
    env = parse_edge_list(Path(path).read_text())
    if validate:
        problems = check_assumptions(env)
        if problems:
            raise InvalidEnvironment("; ".join(problems))
    return env
