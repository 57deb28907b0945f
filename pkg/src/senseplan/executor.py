"""Online planning loop alternating progress and sensing phases.

Ground truth lives only inside :func:`run`; the planner sees beliefs,
its own actions, observation classes and sensor answers.
"""
from __future__ import annotations

import json
import random
import time
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence, Union

from .arena import SYS
from .game import ProductGame, SolveResult
from .observation import ObservationModel, initial_belief, update_env, update_system
from .sensing import StrategyCache
from .strategy import DEAD_END, PHYSICAL, Planner

__all__ = [
    "RunConfig",
    "RunStats",
    "RunResult",
    "DeadEndError",
    "NotWinningError",
    "env_policy_step",
    "run",
    "trace_lines",
    "belief_series_text",
]

UNIFORM = "random"
STATIONARY = "stationary"


class DeadEndError(RuntimeError):
    """No progress action and no sensing strategy for the current belief."""

    def __init__(self, message, belief=None, result=None):
        super().__init__(message)
        self.belief = belief
        self.result = result


class NotWinningError(ValueError):
    pass


@dataclass
class RunConfig:
    seed: int = 0
    max_steps: int = 1000
    env_policy: Union[str, Sequence[str]] = UNIFORM  # "random", "stationary" or a scripted action list
    sensing_budget_per_turn: Optional[int] = None
    belief_full: bool = False
    record_latency: bool = False

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass
class RunStats:
    steps: int = 0
    f_visits: int = 0
    f_visit_steps: list = field(default_factory=list)
    max_belief: int = 0
    sensing_actions: int = 0
    physical_actions: int = 0
    env_moves: int = 0
    sensing_phases: int = 0
    max_phase_queries: int = 0
    phase_overruns: int = 0  # phases needing more queries than their root rank
    cache_hits: int = 0
    decisions: int = 0
    mean_latency_s: float = 0.0
    left_win1: int = 0  # events whose ground truth left the winning region
    dead_end: bool = False

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


@dataclass
class RunResult:
    trace: list
    stats: RunStats
    belief_sizes: list  # (step, |belief|), step 0 is the initial belief


def env_policy_step(policy, g: ProductGame, q: int, rng: random.Random, counter: Optional[list] = None) -> int:
    acts = sorted(g.succ[q])
    if policy == UNIFORM:
        return acts[rng.randrange(len(acts))]
    if policy == STATIONARY:
        return acts[0]
    # scripted: wraps around at the end of the list
    script = list(policy)
    if counter is None:
        counter = [0]
    name = script[counter[0] % len(script)]
    counter[0] += 1
    for a in acts:
        if g.action_names[a] == name:
            return a
    raise ValueError(f"scripted action {name!r} is not enabled at {g.state_name(q)}")


def run(g: ProductGame, sr: SolveResult, om: ObservationModel, sensors: Sequence, cfg: RunConfig,
        cache: Optional[StrategyCache] = None, planner: Optional[Planner] = None) -> RunResult:
    q = g.q0
    if q not in sr.win1:
        raise NotWinningError(f"initial state {g.state_name(q)} is not in the winning region")
    rng = random.Random(cfg.seed)
    planner = planner or Planner(g, sr, sensors, cache)
    hits0 = planner.cache.hits
    belief = initial_belief(g, om)
    stats = RunStats(max_belief=len(belief))
    trace: list = []
    sizes = [(0, len(belief))]
    script_pos = [0]
    latency_total = 0.0
    phase_rank = None
    phase_queries = 0

    def emit(step, phase, actor, **extra):
        ev = {"step": step, "phase": phase, "actor": actor}
        ev.update(extra)
        ev["belief_size"] = len(belief)
        if cfg.belief_full:
            ev["belief"] = sorted(g.state_name(b) for b in belief)
        ev["truth"] = g.state_name(q)
        trace.append(ev)
        sizes.append((step, len(belief)))
        stats.max_belief = max(stats.max_belief, len(belief))
        if q in g.accepting:
            stats.f_visits += 1
            stats.f_visit_steps.append(step)
        if q not in sr.win1:
            stats.left_win1 += 1
        if q not in belief:
            raise RuntimeError(f"ground truth {g.state_name(q)} dropped out of the belief at step {step}")

    step = 0
    try:
        while step < cfg.max_steps:
            step += 1
            if g.owner[q] == SYS:
                t0 = time.perf_counter()
                dec = planner.decide(belief)
                dt = time.perf_counter() - t0
                latency_total += dt
                stats.decisions += 1
                lat = {"latency_us": round(dt * 1e6)} if cfg.record_latency else {}
                if dec.kind == PHYSICAL:
                    if phase_rank is not None:
                        stats.max_phase_queries = max(stats.max_phase_queries, phase_queries)
                        phase_rank = None
                    a = dec.distribution.sample(rng)
                    q = g.succ[q][a]
                    belief = update_system(g, om, belief, a, om.class_of[q])
                    stats.physical_actions += 1
                    emit(step, "Progress", "sys", action=g.action_names[a], **lat)
                elif dec.kind == DEAD_END:
                    stats.dead_end = True
                    step -= 1
                    raise DeadEndError(
                        "no progress action and no sensing strategy for belief "
                        + str(sorted(g.state_name(b) for b in belief)),
                        belief,
                    )
                else:
                    if phase_rank is None:
                        phase_rank = dec.rank
                        phase_queries = 0
                        stats.sensing_phases += 1
                    phase_queries += 1
                    if phase_queries > phase_rank:
                        stats.phase_overruns += 1
                    if cfg.sensing_budget_per_turn is not None and phase_queries > cfg.sensing_budget_per_turn:
                        stats.dead_end = True
                        step -= 1
                        raise DeadEndError("sensing budget exhausted", belief)
                    sensor = planner.sensors[dec.sensor]
                    holds = sensor.truth[dec.formula]
                    outcome = q in holds
                    belief = frozenset(b for b in belief if (b in holds) == outcome)
                    stats.sensing_actions += 1
                    emit(step, "Sensing", "sys", sensor=sensor.name,
                         formula=sensor.formula_text(dec.formula), outcome=outcome, **lat)
            else:
                a = env_policy_step(cfg.env_policy, g, q, rng, script_pos)
                q = g.succ[q][a]
                belief = update_env(g, om, belief, om.class_of[q])
                stats.env_moves += 1
                emit(step, "Env", "env", action=g.action_names[a])
    except DeadEndError as exc:
        stats.steps = step
        _finish(stats, planner, hits0, latency_total)
        exc.result = RunResult(trace, stats, sizes)
        raise
    stats.steps = step
    if phase_rank is not None:
        stats.max_phase_queries = max(stats.max_phase_queries, phase_queries)
    _finish(stats, planner, hits0, latency_total)
    return RunResult(trace, stats, sizes)


def _finish(stats, planner, hits0, latency_total):
    stats.cache_hits = planner.cache.hits - hits0
    stats.mean_latency_s = latency_total / stats.decisions if stats.decisions else 0.0


def trace_lines(trace: list) -> str:
    return "".join(json.dumps(ev, sort_keys=True) + "\n" for ev in trace)


def belief_series_text(sizes: list) -> str:
    return "".join(f"{s}\t{n}\n" for s, n in sizes)
