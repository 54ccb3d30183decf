"""Per-agent enforcer: violation detection, the rank-ordered replanning round, flag updates.

Agents in one communication group share a joint window (their trajectories
truncated to the window horizon). When the window violates safety, agents
replan in ascending priority: each one searches against the already-updated
trajectories of every agent ranked above it and of every agent that has
replanned earlier in the round. The highest-ranked agent is never modified.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field, replace
from typing import Hashable, Mapping

from .environment import STAY, Environment, Vertex
from .ordering import FlagTable, PriorityOrder, on_contact, on_goal, reset_pair
from .pathfinder import PathKind, PathResult, ReservationTable, pathfind
from .safety import SafetyFn, Violation
from .trajectories import PlanCursor, Trajectory, advance_block, positions

Agent = Hashable


class Unresolved(RuntimeError):
    """A violation at the next instant survived a full replanning round."""


@dataclass
class AgentState:
    id: Agent
    pos: Vertex
    cursor: PlanCursor
    word: str
    flags: FlagTable
    contacts: set = field(default_factory=set)
    initial_rank: int = 0
    block_started: int = 0

    @classmethod
    def create(cls, env: Environment, agent, start, plan: str, lookahead: int, rank: int) -> "AgentState":
        cur = PlanCursor.start(env, start, plan, lookahead)
        return cls(agent, start, cur, cur.current_block.word, FlagTable(agent), set(), rank)

    @property
    def goal(self) -> bool:
        return self.pos == self.cursor.block_goal and not self.word

    @property
    def finished(self) -> bool:
        return self.cursor.exhausted and self.goal


@dataclass
class JointWindow:
    """The group's shared trajectories, their block goals, and the current priority order."""

    order: PriorityOrder
    entries: dict
    goals: dict
    horizon: int

    @classmethod
    def build(cls, states: Mapping[Agent, AgentState], order: PriorityOrder, horizon: int) -> "JointWindow":
        entries = {a: Trajectory(states[a].pos, states[a].word[:horizon]) for a in order}
        goals = {a: states[a].cursor.block_goal for a in order}
        return cls(order, entries, goals, horizon)

    def tracks(self, env: Environment) -> dict:
        return {a: positions(env, tr) for a, tr in self.entries.items()}


def _pin(track, t):
    return track[t] if t < len(track) else track[-1]


def conflicts(tracks: Mapping[Agent, list], phi: SafetyFn, horizon: int):
    """Yield ``(offset, violating pairs)`` for every offset ``1..horizon`` with a violation."""
    prev = {a: tr[0] for a, tr in tracks.items()}
    for t in range(1, horizon + 1):
        now = {a: _pin(tr, t) for a, tr in tracks.items()}
        pairs = phi.violations(now) + phi.swap_violations(prev, now)
        if pairs:
            yield t, pairs
        prev = now


def detect_violation(env: Environment, window: JointWindow, phi: SafetyFn) -> Violation | None:
    tracks = window.tracks(env)
    for t, pairs in conflicts(tracks, phi, window.horizon):
        involved = sorted({a for p in pairs for a in p}, key=repr)
        a, b = pairs[0]
        va, vb = _pin(tracks[a], t), _pin(tracks[b], t)
        return Violation(t, tuple(involved), va if va == vb else None)
    return None


def s1_apply(u: Agent, window: JointWindow, result: PathResult | None) -> JointWindow:
    """Replace ``u``'s entry (and forced agents' entries) with the pathfinder's words."""
    if result is None:
        return window
    entries = dict(window.entries)
    entries[u] = Trajectory(entries[u].start, result.word)
    for m, a in result.forced.items():
        entries[m] = Trajectory(entries[m].start, a)
    return replace(window, entries=entries)


def s2_apply(st: AgentState, env: Environment, group, tick: int) -> list[dict]:
    """Goal handling and contact bookkeeping for one agent. Only ``st``'s own flags change."""
    events = []
    if st.goal:
        if not st.cursor.exhausted:
            events.append({"type": "goal", "agent": st.id, "block": st.cursor.block_index,
                           "ticks": tick - st.block_started, "length": len(st.cursor.current_block.word)})
            st.cursor = advance_block(env, st.cursor)
            st.word = st.cursor.current_block.word
            st.block_started = tick
            changed = on_goal(st.flags, st.contacts)
        else:
            changed = on_goal(st.flags, st.contacts)
        events.extend({"type": "flag_set", "owner": st.id, "other": v} for v in changed)
    on_contact(st.id, group, st.contacts)
    return events


def reset_group(states: Mapping[Agent, AgentState], group) -> list[dict]:
    events = []
    members = list(group)
    for i, a in enumerate(members):
        for b in members[i + 1:]:
            if reset_pair(states[a].flags, states[b].flags, same_group=True):
                events.append({"type": "flag_reset", "agents": [a, b]})
    return events


@dataclass
class RoundResult:
    window: JointWindow
    events: list = field(default_factory=list)
    calls: list = field(default_factory=list)  # (agent, PathResult, seconds)
    modified: set = field(default_factory=set)


def replanning_round(env: Environment, window: JointWindow, phi: SafetyFn, k: int, tick: int = 0,
                     rng: random.Random | None = None) -> RoundResult:
    """Resolve the window's violations in ascending rank; the top agent is never touched.

    An agent is picked when it is the lowest-ranked unprocessed agent involved in
    the earliest offset that still has such an agent. Violations left only among
    processed agents are tolerated unless they happen at offset 1, which raises
    ``Unresolved``.
    """
    order = window.order
    top = order.highest
    out = RoundResult(window)
    tracks = window.tracks(env)
    first = next(conflicts(tracks, phi, window.horizon), None)
    if first is None:
        return out
    out.events.append({"type": "round", "group": list(order), "top": top, "offset": first[0]})
    top_entry = window.entries[top]
    processed: set = set()
    while True:
        u = None
        for t, pairs in conflicts(tracks, phi, window.horizon):
            cand = {a for p in pairs for a in p if a != top and a not in processed}
            if cand:
                u = min(cand, key=order.rank)
                break
        if u is None:
            break
        respected = (set(order.above(u)) | processed) - {u}
        res = ReservationTable.from_tracks({a: tracks[a] for a in respected}, window.horizon)
        now = {a: tr[0] for a, tr in tracks.items()}
        nxt = {a: _pin(tr, 1) for a, tr in tracks.items()}
        t0 = time.perf_counter()
        result = pathfind(env, u, now[u], window.goals[u], res, phi, k,
                          now=now, nxt=nxt, top=top, respected=respected, rng=rng)
        out.calls.append((u, result, time.perf_counter() - t0))
        old = out.window.entries[u].word
        out.window = s1_apply(u, out.window, result)
        out.events.append({"type": "replan", "agent": u, "kind": result.kind.value, "old": old, "new": result.word})
        for m, a in sorted(result.forced.items(), key=lambda kv: order.rank(kv[0])):
            out.events.append({"type": "forced", "agent": m, "action": a, "by": u})
        changed = {u, *result.forced}
        out.modified |= changed
        processed |= changed
        for a in changed:
            tracks[a] = positions(env, out.window.entries[a])
    assert out.window.entries[top] == top_entry, "top-ranked agent was modified"
    for t, pairs in conflicts(tracks, phi, 1):
        raise Unresolved(f"tick {tick}: violation between {pairs} at the next instant after replanning")
    return out


def next_action(st: AgentState) -> str:
    return st.word[0] if st.word else STAY
