from collections import deque
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from enforcers.flagspace import explore, flags_of, precedence_cycle
from enforcers.ordering import (CyclicFlags, FlagTable, Precedence, PriorityOrder, on_contact, on_goal, precedes,
                                reset_pair, should_reset, total_order)


def test_on_goal_sets_flags_for_contacts():
    f = FlagTable("u")
    contacts = {"v", "w"}
    assert on_goal(f, contacts) == ["v", "w"]
    assert f.raised() == {"v", "w"} and contacts == set()
    # already-set flags are not reported again
    assert on_goal(f, {"v"}) == []


def test_on_contact_excludes_self():
    assert on_contact("u", ["u", "v", "w"], set()) == {"v", "w"}


@pytest.mark.parametrize("c_uv,c_vu,same,expected", [
    (True, True, True, True), (True, True, False, False), (True, False, True, False), (False, False, True, False)])
def test_should_reset(c_uv, c_vu, same, expected):
    assert should_reset(c_uv, c_vu, same) is expected


def test_reset_pair_clears_both():
    fu, fv = FlagTable("u"), FlagTable("v")
    fu.set("v", True)
    assert not reset_pair(fu, fv)
    fv.set("u", True)
    assert reset_pair(fu, fv)
    assert not fu.get("v") and not fv.get("u")


def test_precedes():
    flags = {"u": FlagTable("u"), "v": FlagTable("v")}
    assert precedes("u", "v", flags) is Precedence.EQUAL
    flags["u"].set("v", True)
    assert precedes("u", "v", flags) is Precedence.BEFORE
    assert precedes("v", "u", flags) is Precedence.AFTER


def test_fig4_order_follows_flags():
    # green finished a goal after meeting blue, so green now yields to blue
    flags = {"blue": FlagTable("blue"), "green": FlagTable("green")}
    rank = {"blue": 0, "green": 1}
    assert total_order(["blue", "green"], flags, rank).highest == "green"
    flags["green"].set("blue", True)
    assert total_order(["blue", "green"], flags, rank).agents == ("green", "blue")


def test_equal_flags_fall_back_to_initial_rank():
    flags = {a: FlagTable(a) for a in "abc"}
    assert total_order("cab", flags, {"a": 2, "b": 0, "c": 1}).agents == ("b", "c", "a")


def test_priority_order_views():
    o = PriorityOrder(("a", "b", "c"))
    assert o.lowest == "a" and o.highest == "c"
    assert o.above("a") == ("b", "c") and o.below("c") == ("a", "b") and o.rank("b") == 1


def test_cyclic_flags_raise():
    flags = {a: FlagTable(a) for a in "abc"}
    flags["a"].set("b", True)
    flags["b"].set("c", True)
    flags["c"].set("a", True)
    with pytest.raises(CyclicFlags):
        total_order("abc", flags, {"a": 0, "b": 1, "c": 2})


def test_pairwise_comparator_alone_is_not_transitive():
    # a before b before c, but a and c are equal and c has the smaller initial
    # rank, so "flags, then initial rank" as a comparator would put c before a
    flags = {a: FlagTable(a) for a in "abc"}
    flags["a"].set("b", True)
    flags["b"].set("c", True)
    rank = {"a": 1, "b": 2, "c": 0}
    assert precedes("a", "c", flags) is Precedence.EQUAL
    order = total_order("abc", flags, rank).agents
    assert order.index("a") < order.index("b") < order.index("c")


flag_sets = st.sets(st.tuples(st.sampled_from("abcde"), st.sampled_from("abcde")).filter(lambda p: p[0] != p[1]))


@given(flag_sets, st.permutations("abcde"))
def test_total_order_is_linear_extension(pairs, perm):
    flags = {a: FlagTable(a) for a in "abcde"}
    for a, b in pairs:
        flags[a].set(b, True)
    rank = {a: i for i, a in enumerate(perm)}
    strict = {(a, b) for a, b in pairs if (b, a) not in pairs}
    try:
        order = total_order("abcde", flags, rank)
    except CyclicFlags:
        # an independent cycle check over the strict relation
        idx = {a: i for i, a in enumerate("abcde")}
        bits = sum(1 << (idx[a] * 5 + idx[b]) for a, b in pairs)
        assert precedence_cycle(5, bits)
        return
    for a, b in strict:
        assert order.rank(a) < order.rank(b)


def test_flag_space_two_agents():
    ex = explore(2)
    assert ex.states == 9 and ex.cycle is None


def test_flag_space_three_agents_acyclic():
    ex = explore(3)
    assert ex.states == 675 and ex.cycle is None


@pytest.mark.slow
def test_flag_space_four_agents_acyclic():
    ex = explore(4)
    assert ex.cycle is None and ex.states == 395847


def test_clearing_contacts_on_replan_admits_a_cycle():
    ex = explore(3, clear_on_replan=True)
    assert ex.cycle == [0, 1, 2]
    assert any(ev[0] == "replan" for ev in ex.path)
    assert {(0, 2), (2, 1), (1, 0)} <= flags_of(3, ex.witness[0]) or \
        {(0, 1), (1, 2), (2, 0)} <= flags_of(3, ex.witness[0])


def _table_successors(state, agents):
    """The same atomic events, executed with the real FlagTable functions."""
    flags, contacts = state
    for u in agents:
        tables = {a: FlagTable(a, {b: True for (x, b) in flags if x == a}) for a in agents}
        cs = {a: set(c) for a, c in zip(agents, contacts)}
        on_goal(tables[u], cs[u])
        yield _pack(tables, cs, agents)
    for u, v in combinations(agents, 2):
        tables = {a: FlagTable(a, {b: True for (x, b) in flags if x == a}) for a in agents}
        cs = {a: set(c) for a, c in zip(agents, contacts)}
        on_contact(u, [u, v], cs[u])
        on_contact(v, [u, v], cs[v])
        reset_pair(tables[u], tables[v])
        yield _pack(tables, cs, agents)


def _pack(tables, cs, agents):
    flags = frozenset((a, b) for a in agents for b in tables[a].raised())
    return flags, tuple(frozenset(cs[a]) for a in agents)


def test_real_flag_functions_reach_same_state_space():
    agents = (0, 1, 2)
    init = (frozenset(), (frozenset(),) * 3)
    seen, queue = {init}, deque([init])
    while queue:
        s = queue.popleft()
        bits = sum(1 << (a * 3 + b) for a, b in s[0])
        assert precedence_cycle(3, bits) is None
        for t in _table_successors(s, agents):
            if t not in seen:
                seen.add(t)
                queue.append(t)
    assert len(seen) == explore(3).states
