"""Decentralized priority ordering from pairwise Boolean progress flags.

``c_u^v`` (stored in u's ``FlagTable``) is set when u completes a goal after
having been in contact with v, and both flags of a pair are cleared once they
are both set and the two agents are in the same group. ``a`` precedes ``b``
(a yields to b) when ``c_a^b = 1`` and ``c_b^a = 0``.
"""
from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

Agent = Hashable


class CyclicFlags(RuntimeError):
    pass


@dataclass
class FlagTable:
    owner: Agent
    flags: dict = field(default_factory=dict)
    # (writer, other, value) for every write, used to audit flag locality
    log: list = field(default_factory=list)

    def get(self, other) -> bool:
        return self.flags.get(other, False)

    def set(self, other, value: bool, writer=None):
        self.log.append((self.owner if writer is None else writer, other, value))
        if value:
            self.flags[other] = True
        else:
            self.flags.pop(other, None)

    def raised(self) -> set:
        return {v for v, f in self.flags.items() if f}


def on_goal(flags: FlagTable, contacts: set) -> list:
    """Set ``c_u^v`` for every contact; clear the contact set. Returns the flags that changed."""
    changed = []
    for v in sorted(contacts, key=repr):
        if not flags.get(v):
            flags.set(v, True)
            changed.append(v)
    contacts.clear()
    return changed


def on_contact(u: Agent, group: Iterable, contacts: set) -> set:
    contacts.update(v for v in group if v != u)
    return contacts


def should_reset(c_uv: bool, c_vu: bool, same_group: bool) -> bool:
    return c_uv and c_vu and same_group


def reset_pair(flags_u: FlagTable, flags_v: FlagTable, same_group: bool = True) -> bool:
    u, v = flags_u.owner, flags_v.owner
    if not should_reset(flags_u.get(v), flags_v.get(u), same_group):
        return False
    flags_u.set(v, False)
    flags_v.set(u, False)
    return True


class Precedence(enum.Enum):
    BEFORE = "u_before_v"
    AFTER = "v_before_u"
    EQUAL = "equal"


def precedes(u: Agent, v: Agent, flags: Mapping[Agent, FlagTable]) -> Precedence:
    c_uv, c_vu = flags[u].get(v), flags[v].get(u)
    if c_uv == c_vu:
        return Precedence.EQUAL
    return Precedence.BEFORE if c_uv else Precedence.AFTER


@dataclass(frozen=True)
class PriorityOrder:
    """Agents from lowest to highest priority."""

    agents: tuple

    def rank(self, u) -> int:
        return self.agents.index(u)

    @property
    def lowest(self):
        return self.agents[0]

    @property
    def highest(self):
        return self.agents[-1]

    def above(self, u) -> tuple:
        return self.agents[self.rank(u) + 1:]

    def below(self, u) -> tuple:
        return self.agents[:self.rank(u)]

    def __iter__(self):
        return iter(self.agents)

    def __len__(self):
        return len(self.agents)


def total_order(members: Iterable, flags: Mapping[Agent, FlagTable], initial_rank: Mapping[Agent, int]) -> PriorityOrder:
    """Linear extension of the flag order; ties broken by the initial order (lowest first).

    Kahn's algorithm always releasing the available agent with the smallest
    initial rank, so agents with equal flags keep their initial relative order
    whenever the flag order allows it.
    """
    members = list(members)
    below_count = {a: 0 for a in members}
    succ: dict = {a: [] for a in members}
    for i, a in enumerate(members):
        for b in members[i + 1:]:
            p = precedes(a, b, flags)
            if p is Precedence.BEFORE:
                succ[a].append(b)
                below_count[b] += 1
            elif p is Precedence.AFTER:
                succ[b].append(a)
                below_count[a] += 1
    heap = [(initial_rank[a], repr(a), a) for a in members if below_count[a] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        _, _, a = heapq.heappop(heap)
        out.append(a)
        for b in succ[a]:
            below_count[b] -= 1
            if below_count[b] == 0:
                heapq.heappush(heap, (initial_rank[b], repr(b), b))
    if len(out) != len(members):
        stuck = sorted((a for a in members if a not in out), key=repr)
        raise CyclicFlags(f"precedence cycle among {stuck}")
    return PriorityOrder(tuple(out))
