"""Communication groups and group-local plan sharing."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Mapping

from .environment import Environment, Vertex, graph_distance
from .trajectories import Trajectory

Agent = Hashable


@dataclass(frozen=True)
class CommGroup:
    members: frozenset

    @property
    def gid(self):
        return min(self.members, key=repr)

    def __contains__(self, agent) -> bool:
        return agent in self.members

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members, key=repr))


def comm_groups(pos: Mapping[Agent, Vertex], env: Environment, d: int) -> list[CommGroup]:
    """Connected components of the "within graph distance ``d``" relation, sorted by group id."""
    agents = list(pos)
    parent = {a: a for a in agents}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, a in enumerate(agents):
        for b in agents[i + 1:]:
            if find(a) == find(b):
                continue
            # directed distance either way counts as a hop
            if graph_distance(env, pos[a], pos[b]) <= d or graph_distance(env, pos[b], pos[a]) <= d:
                parent[find(a)] = find(b)
    comps: dict = {}
    for a in agents:
        comps.setdefault(find(a), set()).add(a)
    groups = [CommGroup(frozenset(m)) for m in comps.values()]
    return sorted(groups, key=lambda g: repr(g.gid))


@dataclass(frozen=True)
class MemberInfo:
    trajectory: Trajectory
    goal: bool
    # the member's own flag toward the viewer (c_member^viewer)
    flag_toward_viewer: bool


@dataclass
class SharedView:
    viewer: Agent
    entries: dict = field(default_factory=dict)

    def __contains__(self, agent):
        return agent in self.entries

    def __getitem__(self, agent) -> MemberInfo:
        return self.entries[agent]


def share_plans(group: CommGroup, agents: Mapping, horizon: int) -> dict[Agent, SharedView]:
    """Each member's view of every other member: word prefix ``[0:horizon)``, goal flag, and flag toward the viewer.

    ``agents`` maps ids to objects exposing ``pos``, ``word``, ``goal`` and ``flags``.
    """
    views = {}
    for viewer in group:
        view = SharedView(viewer)
        for other in group:
            if other == viewer:
                continue
            st = agents[other]
            view.entries[other] = MemberInfo(
                Trajectory(st.pos, st.word[:horizon]), st.goal, st.flags.get(viewer)
            )
        views[viewer] = view
    return views
