import pytest
from hypothesis import given, strategies as st

from enforcers.environment import GridSpec, build_grid
from enforcers.ordering import PriorityOrder
from enforcers.safety import (COLLISION, InconsistentOccupancy, agent_positions, earliest_violation, first_violation,
                              joint_safe, make_safety, occupancy, phi_bar, phi_collision, phi_local)
from enforcers.trajectories import Trajectory


def test_phi_collision():
    assert phi_collision({(0, 0): {"a"}, (1, 0): {"b"}})
    assert not phi_collision({(0, 0): {"a", "b"}})
    assert phi_collision({})


def test_inconsistent_occupancy():
    with pytest.raises(InconsistentOccupancy):
        agent_positions({(0, 0): {"a"}, (1, 0): {"a"}})


def test_fig1_unsafe_at_2(grid5):
    trajs = {"blue": Trajectory((4, 2), "lll"), "green": Trajectory((2, 4), "ddd")}
    v = first_violation(grid5, trajs, COLLISION)
    assert (v.time, set(v.agents), v.vertex) == (2, {"blue", "green"}, (2, 2))


def test_fig1_modified_is_safe(grid5):
    trajs = {"blue": Trajectory((4, 2), "ltlld"), "green": Trajectory((2, 4), "ddd")}
    assert joint_safe(grid5, trajs, COLLISION)


def test_fig2_triple_violation(grid6):
    trajs = {"blue": Trajectory((5, 2), "llll"), "green": Trajectory((1, 2), "rrrr"),
             "red": Trajectory((3, 4), "ddd")}
    v = first_violation(grid6, trajs, COLLISION)
    assert (v.time, set(v.agents), v.vertex) == (2, {"blue", "green", "red"}, (3, 2))


def test_pinned_agent_collides_after_word(grid5):
    # b stops at (1,0); a walks into it afterwards
    trajs = {"a": Trajectory((3, 0), "lll"), "b": Trajectory((0, 0), "r")}
    v = first_violation(grid5, trajs, COLLISION)
    assert v.time == 2


def test_swap_only_with_swap_safety(grid5):
    trajs = {"a": Trajectory((0, 0), "r"), "b": Trajectory((1, 0), "l")}
    assert joint_safe(grid5, trajs, COLLISION)
    assert not joint_safe(grid5, trajs, make_safety("collision+swap"))


def test_min_distance(grid5):
    phi = make_safety("min-distance:2", grid5)
    assert phi.min_comm_dist == 3
    assert phi.violations({"a": (0, 0), "b": (1, 0)}) == [("a", "b")]
    assert phi.violations({"a": (0, 0), "b": (1, 1)}) == []


def test_make_safety_errors():
    with pytest.raises(ValueError):
        make_safety("teleport")
    with pytest.raises(ValueError):
        make_safety("min-distance:x")
    with pytest.raises(ValueError):
        make_safety("min-distance:3")


def test_phi_local_and_bar():
    occ = occupancy({"a": (0, 0), "b": (0, 0), "c": (1, 1)})
    assert not phi_local([{"a", "b"}, {"c"}], occ, COLLISION)
    assert phi_local([{"a"}, {"b", "c"}], occ, COLLISION)
    order = PriorityOrder(("a", "c", "b"))
    # restricted to a and everything above it: b collides with a
    assert not phi_bar("a", order, occ, COLLISION)
    # c and above (b) do not collide
    assert phi_bar("c", order, occ, COLLISION)


positions_st = st.dictionaries(st.sampled_from("abcdef"), st.tuples(st.integers(0, 3), st.integers(0, 3)))


@given(positions_st)
def test_collision_matches_occupancy_count(pos):
    occ = occupancy(pos)
    assert phi_collision(occ) == (len(set(pos.values())) == len(pos))
    assert COLLISION(occ) == phi_collision(occ)


@given(positions_st)
def test_local_safety_is_conjunction(pos):
    # for a pairwise predicate, safety in the union of groups implies safety in each
    occ = occupancy(pos)
    agents = sorted(pos)
    groups = [set(agents[::2]), set(agents[1::2])]
    if phi_collision(occ):
        assert phi_local(groups, occ, COLLISION)


def test_earliest_violation_none_for_empty():
    assert earliest_violation({}, COLLISION) is None
