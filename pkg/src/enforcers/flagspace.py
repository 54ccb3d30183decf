"""Exhaustive exploration of the flag states the ordering mechanism can reach.

A state is ``(flags, contacts)`` packed into integers: bit ``u*n+v`` of
``flags`` is ``c_u^v`` and ``contacts[u]`` is the bitmask ``B_u``. Transitions
are atomic events, since every tick is a composition of them:

* ``goal(u)``: set ``c_u^v`` for every ``v`` in ``B_u``, then clear ``B_u``;
* ``meet(u, v)``: add each to the other's contact set and, if both flags of
  the pair are set, reset them;
* ``replan(u)`` (only with ``clear_on_replan``): clear ``B_u``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations


def _bit(n, u, v):
    return 1 << (u * n + v)


def precedence_cycle(n: int, flags: int) -> list[int] | None:
    """Agents left on a cycle of the strict order (a below b iff c_a^b and not c_b^a), or None."""
    below = [0] * n
    for a in range(n):
        for b in range(n):
            if a != b and flags & _bit(n, a, b) and not flags & _bit(n, b, a):
                below[a] |= 1 << b
    alive = (1 << n) - 1
    changed = True
    while changed:
        changed = False
        for a in range(n):
            if alive >> a & 1 and not below[a] & alive:
                alive &= ~(1 << a)
                changed = True
    return [a for a in range(n) if alive >> a & 1] or None


def successors(n: int, state, clear_on_replan: bool = False):
    flags, contacts = state
    for u in range(n):
        f = flags
        for v in range(n):
            if contacts[u] >> v & 1:
                f |= _bit(n, u, v)
        b = list(contacts)
        b[u] = 0
        yield ("goal", u), (f, tuple(b))
    for u, v in combinations(range(n), 2):
        b = list(contacts)
        b[u] |= 1 << v
        b[v] |= 1 << u
        f = flags
        if f & _bit(n, u, v) and f & _bit(n, v, u):
            f &= ~(_bit(n, u, v) | _bit(n, v, u))
        yield ("meet", u, v), (f, tuple(b))
    if clear_on_replan:
        for u in range(n):
            if contacts[u]:
                b = list(contacts)
                b[u] = 0
                yield ("replan", u), (flags, tuple(b))


@dataclass
class Exploration:
    agents: int
    states: int
    cycle: list | None = None
    witness: tuple | None = None  # a reachable state containing the cycle
    path: list | None = None  # events leading to the witness


def explore(n: int, clear_on_replan: bool = False) -> Exploration:
    """Breadth-first, so a reported witness comes with a shortest event sequence."""
    init = (0, (0,) * n)
    parent = {init: None}
    queue = deque([init])
    while queue:
        state = queue.popleft()
        cyc = precedence_cycle(n, state[0])
        if cyc:
            path = []
            s = state
            while parent[s] is not None:
                s, ev = parent[s]
                path.append(ev)
            return Exploration(n, len(parent), cyc, state, path[::-1])
        for ev, nxt in successors(n, state, clear_on_replan):
            if nxt not in parent:
                parent[nxt] = (state, ev)
                queue.append(nxt)
    return Exploration(n, len(parent))


def flags_of(n: int, flags: int) -> set:
    return {(u, v) for u in range(n) for v in range(n) if u != v and flags & _bit(n, u, v)}
