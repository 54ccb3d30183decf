"""Centralized brute-force joint planner, used as a test oracle on tiny instances."""
from __future__ import annotations

from collections import deque

from .environment import Environment, graph_distance, run_word
from .safety import SafetyFn

MAX_AGENTS = 3
MAX_CELLS = 16
MAX_LOOKAHEAD = 4


class InstanceTooLarge(ValueError):
    pass


def joint_search(env: Environment, starts: dict, goals: dict, horizon: int, phi: SafetyFn) -> dict | None:
    """Breadth-first search over joint positions for a safe plan putting every agent on its goal.

    Agents move simultaneously (waiting allowed); every intermediate joint
    position must satisfy ``phi`` (and the swap rule if ``phi`` has it). The
    goal configuration must be reached within ``horizon`` steps. Returns one
    word per agent, or None.
    """
    agents = sorted(starts, key=repr)
    start = tuple(starts[a] for a in agents)
    goal = tuple(goals[a] for a in agents)
    if phi.violations(dict(zip(agents, start))) or phi.violations(dict(zip(agents, goal))):
        return None
    parent = {start: None}
    frontier = deque([(start, 0)])
    while frontier:
        state, t = frontier.popleft()
        if state == goal:
            words = [""] * len(agents)
            while parent[state] is not None:
                state, acts = parent[state]
                words = [a + w for a, w in zip(acts, words)]
            return dict(zip(agents, words))
        if t == horizon:
            continue
        for nxt, acts in _joint_moves(env, state, 0, (), ()):
            if nxt in parent:
                continue
            if any(graph_distance(env, v, g) > horizon - t - 1 for v, g in zip(nxt, goal)):
                continue
            now = dict(zip(agents, nxt))
            if phi.violations(now) or phi.swap_violations(dict(zip(agents, state)), now):
                continue
            parent[nxt] = (state, acts)
            frontier.append((nxt, t + 1))
    return None


def _joint_moves(env, state, i, acc, acts):
    if i == len(state):
        yield acc, acts
        return
    for a, w in env.successors(state[i]):
        yield from _joint_moves(env, state, i + 1, acc + (w,), acts + (a,))


def centralized_oracle(config) -> dict | None:
    """Safe joint plan reaching every agent's first block goal within ``lookahead + deviation`` steps."""
    env = config.env
    if len(config.agents) > MAX_AGENTS or len(env.vertices) > MAX_CELLS or config.lookahead > MAX_LOOKAHEAD:
        raise InstanceTooLarge(
            f"oracle is capped at {MAX_AGENTS} agents, {MAX_CELLS} cells and look-ahead {MAX_LOOKAHEAD}")
    if env.grid is not None and (env.grid.width > 4 or env.grid.height > 4):
        raise InstanceTooLarge("oracle is capped at 4x4 grids")
    starts = {a.id: a.start for a in config.agents}
    goals = {a.id: run_word(env, a.start, a.plan[:config.lookahead]) for a in config.agents}
    return joint_search(env, starts, goals, config.horizon, config.phi())
