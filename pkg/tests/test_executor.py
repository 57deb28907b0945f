import pytest

from senseplan.arena import ENV, SYS, parse_arena
from senseplan.automata import compile_pattern, parse_spec
from senseplan.executor import (
    DeadEndError, NotWinningError, RunConfig, belief_series_text, env_policy_step, run, trace_lines,
)
from senseplan.game import build_product, solve_buchi
from senseplan.observation import observation_model
from senseplan.pipeline import load_problem
from senseplan.sensing import sensors_from_arena
from senseplan.wumpus import WumpusConfig, build_wumpus

RING = """
ap goal
pred pos
state a sys {} pos=0
state b env {} pos=1
state c sys {goal} pos=2
state d env {} pos=3
init a
trans a go@sys b
trans b left@env c
trans b right@env c
trans c go@sys d
trans d left@env a
trans d right@env a
"""


def _problem(text, spec="GF goal"):
    return load_problem(text, spec)


def test_fully_observable_run():
    p = _problem(RING)
    res = run(p.game, p.solution, p.om, p.sensors, RunConfig(seed=1, max_steps=40))
    assert res.stats.steps == 40
    assert res.stats.max_belief == 1
    assert res.stats.sensing_actions == 0
    assert res.stats.f_visits == 10
    assert res.stats.f_visit_steps[:2] == [2, 6]
    assert [e["phase"] for e in res.trace[:2]] == ["Progress", "Env"]


def test_determinism():
    inst = build_wumpus()
    cfg = RunConfig(seed=9, max_steps=300, belief_full=True)
    a = run(inst.game, inst.solution, inst.om, inst.sensors, cfg)
    b = run(inst.game, inst.solution, inst.om, inst.sensors, cfg)
    assert trace_lines(a.trace) == trace_lines(b.trace)
    assert belief_series_text(a.belief_sizes) == belief_series_text(b.belief_sizes)
    c = run(inst.game, inst.solution, inst.om, inst.sensors, RunConfig(seed=10, max_steps=300))
    assert trace_lines(c.trace) != trace_lines(a.trace)


def test_latency_only_when_requested():
    p = _problem(RING)
    plain = run(p.game, p.solution, p.om, p.sensors, RunConfig(max_steps=5))
    timed = run(p.game, p.solution, p.om, p.sensors, RunConfig(max_steps=5, record_latency=True))
    assert all("latency_us" not in e for e in plain.trace)
    assert any("latency_us" in e for e in timed.trace)


def test_scripted_environment_wraps():
    p = _problem(RING)
    res = run(p.game, p.solution, p.om, p.sensors, RunConfig(max_steps=12, env_policy=["left", "right"]))
    env = [e["action"] for e in res.trace if e["actor"] == "env"]
    assert env == ["left", "right"] * 3


def test_scripted_action_must_be_enabled():
    p = _problem(RING)
    with pytest.raises(ValueError):
        run(p.game, p.solution, p.om, p.sensors, RunConfig(max_steps=4, env_policy=["up"]))


def test_stationary_policy():
    p = _problem(RING)
    q = p.game.succ[p.game.q0][0]
    assert env_policy_step("stationary", p.game, q, None) == min(p.game.succ[q])


def test_not_winning():
    p = _problem(RING.replace("{goal}", "{}"))
    with pytest.raises(NotWinningError):
        run(p.game, p.solution, p.om, p.sensors, RunConfig(max_steps=5))


def test_sensor_free_wumpus_dead_ends():
    inst = build_wumpus(WumpusConfig(sensors=False))
    with pytest.raises(DeadEndError) as info:
        run(inst.game, inst.solution, inst.om, inst.sensors, RunConfig(max_steps=1000))
    res = info.value.result
    assert res.stats.dead_end
    assert len(info.value.belief) > 1
    assert res.stats.steps == len(res.trace)


def test_sensing_budget():
    inst = build_wumpus()
    with pytest.raises(DeadEndError, match="budget"):
        run(inst.game, inst.solution, inst.om, inst.sensors,
            RunConfig(max_steps=1000, sensing_budget_per_turn=0))
