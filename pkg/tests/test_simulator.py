import pytest
from hypothesis import given, strategies as st

from enforcers import AgentSpec, SimConfig, run
from enforcers.bench import random_config
from enforcers.environment import GridSpec, build_grid, graph_distance, run_word
from enforcers.safety import COLLISION
from enforcers.scenario import load_scenario, trace_lines
from enforcers.simulator import ConfigError, TooManyAgents, gen_random_plans, playback, resolve_plans


def test_single_agent_follows_plan_exactly():
    env = build_grid(GridSpec(4, 4))
    r = run(SimConfig(env, [AgentSpec("a", (0, 0), "rrttlds")], lookahead=3, deviation=1))
    assert r.ok and r.metrics.completed
    assert r.metrics.ticks == 7
    assert [rec.positions["a"] for rec in r.trace] == [p["a"] for p in playback(env, r.plans)]
    assert r.metrics.rounds == 0 and r.metrics.max_deviation == 0


def test_empty_plan_finishes_at_once():
    env = build_grid(GridSpec(3, 3))
    r = run(SimConfig(env, [AgentSpec("a", (1, 1), "")]))
    assert r.ok and r.metrics.ticks == 0 and len(r.trace) == 1


def test_far_apart_agents_match_playback():
    env = build_grid(GridSpec(12, 12))
    plans = [AgentSpec("a", (0, 0), "rrrttt"), AgentSpec("b", (11, 11), "lllddd")]
    r = run(SimConfig(env, plans, lookahead=3, deviation=2, comm_dist=3))
    assert [rec.positions for rec in r.trace] == playback(env, plans)
    assert all(len(g) == 1 for rec in r.trace for g in rec.groups)


def test_fig1_run():
    r = run(load_scenario("fig1"))
    assert r.ok
    green = [rec.positions["green"] for rec in r.trace]
    blue = [rec.positions["blue"] for rec in r.trace]
    assert green[3] == (2, 1) and blue[5] == (1, 2) and blue[4] != (1, 2)
    assert r.metrics.per_agent["blue"]["deviation"] == 2
    assert r.metrics.per_agent["green"]["deviation"] == 0


def test_determinism_and_parallel_groups():
    cfg = random_config(12, 10, 3, 3, seed=5)
    a = trace_lines(run(cfg))
    b = trace_lines(run(random_config(12, 10, 3, 3, seed=5)))
    cfg_p = random_config(12, 10, 3, 3, seed=5)
    cfg_p.parallel_groups = True
    c = trace_lines(run(cfg_p))
    assert a == b == c


def test_random_holds_are_reproducible():
    def go():
        cfg = random_config(15, 6, 3, 3, seed=11)
        cfg.random_holds = True
        return trace_lines(run(cfg))
    assert go() == go()


def test_gen_random_plans():
    env = build_grid(GridSpec(3, 3))
    plans = gen_random_plans(1, env, 9, 4)
    assert len({p.start for p in plans}) == 9
    assert len({run_word(env, p.start, p.plan) for p in plans}) == 9
    assert [p.id for p in plans][:3] == ["a00", "a01", "a02"]
    assert all(p.plan == "" for p in gen_random_plans(1, env, 4, 0))
    with pytest.raises(TooManyAgents):
        gen_random_plans(1, env, 10, 4)


def test_resolve_plans_uses_seed():
    env = build_grid(GridSpec(5, 5))
    cfg = SimConfig(env, [AgentSpec("a", (0, 0), None, 6)], seed=3)
    p1, p2 = resolve_plans(cfg), resolve_plans(cfg)
    assert p1 == p2 and len(p1[0].plan) == 6


@pytest.mark.parametrize("kwargs,msg", [
    (dict(lookahead=0), "look-ahead"),
    (dict(deviation=-1), "deviation"),
    (dict(comm_dist=1), "below"),
    (dict(safety="teleport"), "unknown"),
])
def test_config_errors(kwargs, msg):
    env = build_grid(GridSpec(3, 3))
    cfg = SimConfig(env, [AgentSpec("a", (0, 0), "r")], **kwargs)
    with pytest.raises(ConfigError, match=msg):
        cfg.validate()


def test_config_rejects_bad_agents():
    env = build_grid(GridSpec(3, 3))
    with pytest.raises(ConfigError, match="duplicate"):
        SimConfig(env, [AgentSpec("a", (0, 0), ""), AgentSpec("a", (1, 1), "")]).validate()
    with pytest.raises(ConfigError, match="outside"):
        SimConfig(env, [AgentSpec("a", (5, 5), "")]).validate()
    with pytest.raises(ConfigError, match="leaves"):
        SimConfig(env, [AgentSpec("a", (0, 0), "l")]).validate()
    with pytest.raises(ConfigError, match="start positions"):
        SimConfig(env, [AgentSpec("a", (0, 0), ""), AgentSpec("b", (0, 0), "")]).validate()


def test_parameter_warning():
    env = build_grid(GridSpec(3, 3))
    assert SimConfig(env, [], lookahead=3, deviation=2).validate()
    assert SimConfig(env, [], lookahead=2, deviation=3, comm_dist=4).validate() == []


def test_max_ticks_abort():
    env = build_grid(GridSpec(5, 1))
    cfg = SimConfig(env, [AgentSpec("a", (0, 0), "rrrr")], lookahead=2, deviation=0, max_ticks=2)
    r = run(cfg)
    assert not r.ok and "max_ticks" in r.metrics.aborted
    assert r.trace[-1].events[-1]["type"] == "abort"


@given(st.integers(0, 10_000), st.integers(2, 8))
def test_random_runs_are_safe(seed, n):
    cfg = random_config(n, 5, 3, 2, seed)
    r = run(cfg)
    assert r.ok
    prev = None
    for rec in r.trace:
        assert not COLLISION.violations(rec.positions)
        prev = rec.positions
    # every agent ends on its plan's final vertex
    assert prev == {p.id: run_word(cfg.env, p.start, p.plan) for p in r.plans}
