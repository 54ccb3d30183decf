"""Deterministic lockstep simulation of agents running their enforcers."""
from __future__ import annotations

import random
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Hashable

from .communication import comm_groups
from .enforcer import (AgentState, JointWindow, Unresolved, next_action, replanning_round, reset_group,
                       s2_apply)
from .environment import Environment, NoSuchEdge, Vertex, run_word, shortest_word, step
from .ordering import total_order
from .pathfinder import NoEscape, PathKind
from .safety import SafetyFn, make_safety

Agent = Hashable


class ConfigError(ValueError):
    pass


class TooManyAgents(ConfigError):
    pass


@dataclass
class AgentSpec:
    id: str
    start: Vertex
    plan: str | None = None
    random_length: int | None = None


@dataclass
class SimConfig:
    env: Environment
    agents: list
    lookahead: int = 3
    deviation: int = 2
    comm_dist: int | None = None  # None means "same as the look-ahead"
    safety: str = "collision"
    max_ticks: int = 1000
    seed: int = 0
    parallel_groups: bool = False
    # seeded random order for one-step holds instead of the fixed stay-l-r-t-d order
    random_holds: bool = False

    @property
    def d(self) -> int:
        return self.lookahead if self.comm_dist is None else self.comm_dist

    @property
    def horizon(self) -> int:
        return self.lookahead + self.deviation

    def phi(self) -> SafetyFn:
        return make_safety(self.safety, self.env)

    def validate(self) -> list[str]:
        """Raise ``ConfigError`` on hard problems; return soft warnings."""
        if self.lookahead < 1:
            raise ConfigError("look-ahead must be at least 1")
        if self.deviation < 0:
            raise ConfigError("deviation bound must be non-negative")
        if self.d < 1:
            raise ConfigError("communication constant must be at least 1")
        try:
            phi = self.phi()
        except ValueError as e:
            raise ConfigError(str(e)) from None
        if self.d < phi.min_comm_dist:
            raise ConfigError(f"communication constant {self.d} is below {phi.min_comm_dist}, "
                              f"agents outside each other's group could break {phi.name!r} in one step")
        if self.max_ticks < 0:
            raise ConfigError("max_ticks must be non-negative")
        ids = [a.id for a in self.agents]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate agent ids")
        starts = {}
        for a in self.agents:
            if a.start not in self.env:
                raise ConfigError(f"agent {a.id!r} starts outside the environment at {a.start!r}")
            if a.plan is not None:
                try:
                    run_word(self.env, a.start, a.plan)
                except NoSuchEdge as e:
                    raise ConfigError(f"agent {a.id!r}: plan leaves the graph ({e})") from None
            elif a.random_length is None or a.random_length < 0:
                raise ConfigError(f"agent {a.id!r} needs a plan or a non-negative random_length")
            starts[a.id] = a.start
        bad = phi.violations(starts)
        if bad:
            raise ConfigError(f"start positions violate {phi.name!r}: {bad}")
        warnings = []
        if not self.lookahead <= self.deviation < self.d:
            warnings.append(f"parameters do not satisfy l <= k < d (l={self.lookahead}, k={self.deviation}, d={self.d})")
        return warnings


def _random_walk(env: Environment, rng: random.Random, start, length: int) -> str:
    word, v = [], start
    for _ in range(length):
        a, v = rng.choice(env.successors(v))
        word.append(a)
    return "".join(word)


def gen_random_plans(seed: int, env: Environment, n_agents: int, length: int, tries: int = 50) -> list[AgentSpec]:
    """Distinct random starts with random walks of ``length`` steps.

    Walks are resampled (up to ``tries`` times each) so that final vertices are
    distinct too; two agents sharing a final vertex can never both finish.
    """
    verts = list(env.vertices)
    if n_agents > len(verts):
        raise TooManyAgents(f"{n_agents} agents do not fit on {len(verts)} vertices")
    rng = random.Random(seed)
    starts = rng.sample(verts, n_agents)
    finals: set = set(starts)
    specs = []
    for i, s in enumerate(starts):
        finals.discard(s)
        for _ in range(tries):
            word = _random_walk(env, rng, s, length)
            if run_word(env, s, word) not in finals:
                break
        else:
            word = ""
        finals.add(run_word(env, s, word))
        specs.append(AgentSpec(f"a{i:02d}", s, word))
    return specs


def resolve_plans(config: SimConfig) -> list[AgentSpec]:
    """Turn ``random_length`` agents into concrete plans, reproducibly from the master seed."""
    rng = random.Random(config.seed)
    out = []
    for a in config.agents:
        if a.plan is None:
            a = AgentSpec(a.id, a.start, _random_walk(config.env, rng, a.start, a.random_length))
        out.append(a)
    return out


@dataclass
class StepRecord:
    tick: int
    positions: dict
    groups: list
    events: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"tick": self.tick, "positions": {str(a): _jv(v) for a, v in self.positions.items()},
                "groups": [[str(a) for a in g] for g in self.groups], "events": self.events}


def _jv(v):
    return list(v) if isinstance(v, tuple) else v


@dataclass
class Metrics:
    ticks: int = 0
    completed: bool = False
    aborted: str | None = None
    n_agents: int = 0
    bound: int = 0
    per_agent: dict = field(default_factory=dict)
    max_deviation: int = 0
    max_block_deviation: int = 0
    max_block_ticks: int = 0
    rounds: int = 0
    pathfind_calls: int = 0
    max_reservation: int = 0
    max_graph_size: int = 0
    synthesis_best: float | None = None
    synthesis_worst: float | None = None
    pathfind_times: list = field(default_factory=list)
    round_times: list = field(default_factory=list)
    round_sizes: list = field(default_factory=list)

    def to_json(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k not in ("pathfind_times", "round_times")}
        out["pathfind_median"] = statistics.median(self.pathfind_times) if self.pathfind_times else None
        return out


@dataclass
class RunResult:
    config: SimConfig
    plans: list
    trace: list
    metrics: Metrics
    states: dict

    @property
    def ok(self) -> bool:
        return self.metrics.aborted is None


class World:
    """Mutable simulation state; ``tick`` advances it by one instant."""

    def __init__(self, config: SimConfig, plans: list[AgentSpec] | None = None):
        self.config = config
        self.env = config.env
        self.phi = config.phi()
        self.plans = plans if plans is not None else resolve_plans(config)
        self.states = {
            a.id: AgentState.create(self.env, a.id, a.start, a.plan, config.lookahead, i)
            for i, a in enumerate(self.plans)
        }
        self.rank0 = {a: st.initial_rank for a, st in self.states.items()}
        self.t = 0
        self.trace: list[StepRecord] = []
        self.metrics = Metrics(n_agents=len(self.states), bound=len(self.states) ** 2 * config.lookahead)
        for a in self.states:
            self.metrics.per_agent[a] = {"deviation": 0, "blocks": [], "pathfinder_calls": 0, "holds": 0,
                                         "escapes": 0, "forced": 0, "finished_at": None}
        self._pool = ThreadPoolExecutor() if config.parallel_groups else None
        self._hold_seed = config.seed if config.random_holds else None

    def positions(self) -> dict:
        return {a: st.pos for a, st in self.states.items()}

    def done(self) -> bool:
        return all(st.finished for st in self.states.values())

    def _group_round(self, group):
        order = total_order(group, {a: self.states[a].flags for a in group}, self.rank0)
        window = JointWindow.build(self.states, order, self.config.horizon)
        rng = None
        if self._hold_seed is not None:
            # one stream per (tick, group) keeps parallel and serial runs identical
            rng = random.Random(f"{self._hold_seed}:{self.t}:{group.gid}")
        return replanning_round(self.env, window, self.phi, self.config.deviation, self.t, rng)

    def tick(self) -> bool:
        """One lockstep instant. Returns False once every agent is done."""
        st_all = self.states
        pos = self.positions()
        groups = comm_groups(pos, self.env, self.config.d)
        rec = StepRecord(self.t, pos, [list(g) for g in groups])
        self.trace.append(rec)
        events = rec.events
        group_of = {a: g for g in groups for a in g}
        for a, st in st_all.items():
            evs = s2_apply(st, self.env, group_of[a], self.t)
            for e in evs:
                if e["type"] == "goal":
                    self._record_block(e)
            events.extend(evs)
        for g in groups:
            events.extend(reset_group(st_all, g))
        parked = frozenset(st.pos for st in st_all.values() if st.finished)
        for a, st in st_all.items():
            if not st.word and st.pos != st.cursor.block_goal:
                st.word = shortest_word(self.env, st.pos, st.cursor.block_goal, parked)
                events.append({"type": "reroute", "agent": a, "word": st.word})
        if self.done():
            return False
        multi = [g for g in groups if len(g) > 1]
        if self._pool is not None and len(multi) > 1:
            results = list(self._pool.map(self._group_round, multi))
        else:
            results = [self._group_round(g) for g in multi]
        for r in results:
            self._merge_round(r, events)
        moves = {a: next_action(st) for a, st in st_all.items()}
        for a, st in st_all.items():
            st.pos = step(self.env, st.pos, moves[a])
            st.word = st.word[1:]
        self.t += 1
        return True

    def _merge_round(self, r, events):
        if not r.events:
            return
        m = self.metrics
        m.rounds += 1
        events.extend(r.events)
        for u, res, secs in r.calls:
            pa = m.per_agent[u]
            pa["pathfinder_calls"] += 1
            pa["holds"] += res.kind is PathKind.HOLD
            pa["escapes"] += res.kind is PathKind.ESCAPE
            for f in res.forced:
                m.per_agent[f]["forced"] += 1
            m.pathfind_calls += 1
            m.pathfind_times.append(secs)
            m.max_reservation = max(m.max_reservation, res.reservations)
            m.max_graph_size = max(m.max_graph_size, res.graph_size)
        total = sum(secs for _, _, secs in r.calls)
        m.round_times.append(total)
        m.round_sizes.append(len(r.window.entries))
        m.synthesis_best = total if m.synthesis_best is None else min(m.synthesis_best, total)
        m.synthesis_worst = total if m.synthesis_worst is None else max(m.synthesis_worst, total)
        for a in r.modified:
            self.states[a].word = r.window.entries[a].word

    def _record_block(self, e):
        m = self.metrics
        pa = m.per_agent[e["agent"]]
        dev = e["ticks"] - e["length"]
        pa["blocks"].append(e["ticks"])
        pa["deviation"] += dev
        pa["finished_at"] = self.t
        m.max_block_deviation = max(m.max_block_deviation, dev)
        m.max_block_ticks = max(m.max_block_ticks, e["ticks"])
        m.max_deviation = max(m.max_deviation, pa["deviation"])

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()


def run(config: SimConfig, plans: list[AgentSpec] | None = None) -> RunResult:
    """Simulate until every agent finishes its plan, ``max_ticks`` pass, or the enforcers abort."""
    config.validate()
    world = World(config, plans)
    try:
        while world.t <= config.max_ticks:
            if not world.tick():
                world.metrics.completed = True
                break
        else:
            world.metrics.aborted = f"max_ticks {config.max_ticks} reached"
            world.trace[-1].events.append({"type": "abort", "reason": "max_ticks"})
    except (NoEscape, Unresolved) as e:
        world.metrics.aborted = f"{type(e).__name__}: {e}"
        world.trace[-1].events.append({"type": "abort", "reason": type(e).__name__, "detail": str(e)})
    finally:
        world.close()
    world.metrics.ticks = world.trace[-1].tick if world.trace else 0
    return RunResult(config, world.plans, world.trace, world.metrics, world.states)


def playback(env: Environment, plans: list[AgentSpec]) -> list[dict]:
    """Positions per instant when every agent follows its plan verbatim, pinned at the end."""
    pos = {a.id: a.start for a in plans}
    horizon = max((len(a.plan) for a in plans), default=0)
    out = [dict(pos)]
    for t in range(horizon):
        for a in plans:
            if t < len(a.plan):
                pos[a.id] = step(env, pos[a.id], a.plan[t])
        out.append(dict(pos))
    return out
