"""Belief-based randomized progress strategy and the composite decision rule."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .game import ProductGame, SolveResult
from .sensing import SensingStrategy, StrategyCache, plan_sensing

__all__ = [
    "ActionDistribution",
    "Decision",
    "PHYSICAL",
    "SENSE",
    "DEAD_END",
    "progress_set",
    "allow_set",
    "f_p",
    "composite",
    "Planner",
]

PHYSICAL = "Physical"
SENSE = "Sense"
DEAD_END = "DeadEnd"


@dataclass(frozen=True)
class ActionDistribution:
    support: tuple  # sorted action ids, uniform weights

    def probability(self, a: int) -> float:
        return 1.0 / len(self.support) if a in self.support else 0.0

    def sample(self, rng) -> int:
        return self.support[rng.randrange(len(self.support))]


@dataclass(frozen=True)
class Decision:
    kind: str
    distribution: Optional[ActionDistribution] = None
    sensor: Optional[int] = None
    formula: Optional[int] = None
    rank: Optional[int] = None  # queries still needed, for Sense decisions


def progress_set(sr: SolveResult, belief) -> Optional[set]:
    """Union of the winning strategy over the belief; None if any state is losing."""
    out = set()
    ws = sr.ws
    for q in belief:
        a = ws.get(q)
        if a is None:
            return None
        out.add(a)
    return out


def allow_set(sr: SolveResult, g: ProductGame, belief) -> set:
    result = None
    win = sr.win1
    for q in belief:
        if q not in win:
            return set()
        ok = {a for a, t in g.succ[q].items() if t in win}
        result = ok if result is None else result & ok
        if not result:
            return set()
    return result if result is not None else set()


def f_p(sr: SolveResult, g: ProductGame, belief) -> Optional[ActionDistribution]:
    prog = progress_set(sr, belief)
    if prog is None or not prog:
        return None
    if not prog <= allow_set(sr, g, belief):
        return None
    return ActionDistribution(tuple(sorted(prog)))


class Planner:
    """Composite strategy with memoized progress checks and a sensing cache."""

    def __init__(self, g: ProductGame, sr: SolveResult, sensors: Sequence, cache: Optional[StrategyCache] = None):
        self.g = g
        self.sr = sr
        self.sensors = list(sensors)
        self.cache = cache if cache is not None else StrategyCache()
        self._fp: dict = {}

    def progress(self, belief) -> Optional[ActionDistribution]:
        belief = frozenset(belief)
        if belief not in self._fp:
            self._fp[belief] = f_p(self.sr, self.g, belief)
        return self._fp[belief]

    def fp_defined(self, belief) -> bool:
        return self.progress(belief) is not None

    def sensing_strategy(self, belief) -> SensingStrategy:
        belief = frozenset(belief)
        strat = self.cache.lookup(belief)
        if strat is None:
            strat = plan_sensing(belief, self.sensors, self.fp_defined)
            self.cache.insert(belief, strat)
        return strat

    def decide(self, belief) -> Decision:
        belief = frozenset(belief)
        dist = self.progress(belief)
        if dist is not None:
            return Decision(PHYSICAL, distribution=dist)
        strat = self.sensing_strategy(belief)
        if strat.solvable and belief in strat.choice:
            sid, fi = strat.choice[belief]
            return Decision(SENSE, sensor=sid, formula=fi, rank=strat.rank[belief])
        return Decision(DEAD_END)


def composite(sr: SolveResult, g: ProductGame, sensors: Sequence, cache: StrategyCache, belief) -> Decision:
    return Planner(g, sr, sensors, cache).decide(belief)
