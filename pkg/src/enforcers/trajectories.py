"""Trajectories as (start vertex, action word) and block-wise plan cursors."""
from __future__ import annotations

from dataclasses import dataclass, replace

from .environment import Environment, NoSuchEdge, Vertex, run_word


@dataclass(frozen=True)
class Trajectory:
    start: Vertex
    word: str = ""

    def __len__(self):
        return len(self.word)


def final_state(env: Environment, traj: Trajectory) -> Vertex:
    return run_word(env, traj.start, traj.word)


def sub_trajectory(env: Environment, traj: Trajectory, i: int, j: int) -> Trajectory:
    """Half-open slice ``[i:j)`` of the word, starting where the prefix ``[0:i)`` ends."""
    if not 0 <= i <= j <= len(traj.word):
        raise IndexError(f"sub-trajectory [{i}:{j}) out of range for word of length {len(traj.word)}")
    return Trajectory(run_word(env, traj.start, traj.word[:i]), traj.word[i:j])


def positions(env: Environment, traj: Trajectory) -> list[Vertex]:
    """Vertices visited at offsets ``0..len(word)``."""
    out = [traj.start]
    v = traj.start
    for i, a in enumerate(traj.word):
        w = env.delta(v, a)
        if w is None:
            raise NoSuchEdge(v, a, offset=i)
        out.append(w)
        v = w
    return out


def split_blocks(word: str, lookahead: int) -> list[str]:
    if lookahead < 1:
        raise ValueError("look-ahead must be positive")
    return [word[i:i + lookahead] for i in range(0, len(word), lookahead)]


@dataclass(frozen=True)
class PlanCursor:
    """Position of an agent inside its full plan, one look-ahead block at a time.

    Once the plan is exhausted the current block is the zero-length trajectory
    at the final vertex and stays that way.
    """

    full_word: str
    lookahead: int
    block_index: int
    current_block: Trajectory
    block_goal: Vertex

    @classmethod
    def start(cls, env: Environment, start: Vertex, word: str, lookahead: int) -> "PlanCursor":
        if lookahead < 1:
            raise ValueError("look-ahead must be positive")
        block = Trajectory(start, word[:lookahead])
        return cls(word, lookahead, 0, block, final_state(env, block))

    @property
    def exhausted(self) -> bool:
        return self.block_index * self.lookahead >= len(self.full_word)

    @property
    def block_start_offset(self) -> int:
        return min(self.block_index * self.lookahead, len(self.full_word))


def advance_block(env: Environment, cursor: PlanCursor) -> PlanCursor:
    i = cursor.block_index + 1
    ell = cursor.lookahead
    block = Trajectory(cursor.block_goal, cursor.full_word[i * ell:(i + 1) * ell])
    return replace(cursor, block_index=i, current_block=block, block_goal=final_state(env, block))
