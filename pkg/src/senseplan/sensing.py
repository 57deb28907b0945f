"""Sensing actions, belief-revision trees and the active sensing strategy.

A sensing query never changes the game state; it only reports whether one
of its formulas holds, splitting the belief in two. The sensing strategy is
the attractor of the beliefs where the progress strategy is defined, taken
inside the tree of all such splits: a belief enters layer i+1 once some
query sends every outcome into layers <= i.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .game import ProductGame
from .logic import evaluate, to_text, variables

__all__ = [
    "SensorNotEnabled",
    "SensingAction",
    "sensors_from_arena",
    "knows",
    "enabled_at",
    "splits",
    "Split",
    "BRTree",
    "build_brtree",
    "SensingStrategy",
    "solve_sensing",
    "plan_sensing",
    "StrategyCache",
    "PROGRESS_DEFINED",
    "UNREFINABLE",
]

PROGRESS_DEFINED = "ProgressDefined"
UNREFINABLE = "Unrefinable"


class SensorNotEnabled(ValueError):
    pass


@dataclass(frozen=True)
class SensingAction:
    id: int
    name: str
    formulas: tuple  # Formula objects, or plain labels for synthetic sensors
    truth: tuple  # per formula: frozenset of states where it holds
    enabled: Optional[frozenset] = None  # states where usable; None = everywhere

    def is_enabled(self, q: int) -> bool:
        return self.enabled is None or q in self.enabled

    def formula_text(self, i: int) -> str:
        f = self.formulas[i]
        return to_text(f) if not isinstance(f, str) else f


def sensors_from_arena(g: ProductGame) -> list:
    """Instantiate the arena's sensor declarations over product states."""
    a = g.arena
    by_arena_state: dict = {}
    for q, (s, _) in enumerate(g.pairs):
        by_arena_state.setdefault(s, []).append(q)
    out = []
    for sid, decl in enumerate(a.sensors):
        truth = []
        for f in decl.formulas:
            names = sorted(variables(f))
            pids = [a.pred_id(n) for n in names]
            seen: dict = {}
            holds = set()
            for s, qs in by_arena_state.items():
                val = a.states[s].valuation
                key = tuple(val[i] for i in pids)
                hit = seen.get(key)
                if hit is None:
                    env = dict(zip(names, key))
                    hit = seen[key] = evaluate(f, env)
                if hit:
                    holds.update(qs)
            truth.append(frozenset(holds))
        enabled = None
        if decl.enabled_at is not None:
            enabled = frozenset(q for s in decl.enabled_at for q in by_arena_state.get(s, ()))
        out.append(SensingAction(sid, decl.name, tuple(decl.formulas), tuple(truth), enabled))
    return out


def knows(g: ProductGame, formula: int, a: SensingAction, belief) -> tuple:
    """Split ``belief`` into (states where formula holds, the rest)."""
    for q in belief:
        if not a.is_enabled(q):
            raise SensorNotEnabled(f"sensor {a.name} is not enabled at state {g.state_name(q)}")
    holds = a.truth[formula]
    b1 = frozenset(q for q in belief if q in holds)
    return b1, frozenset(belief) - b1


def enabled_at(belief, sensors: Sequence[SensingAction]) -> set:
    return {a.id for a in sensors if a.enabled is None or all(q in a.enabled for q in belief)}


@dataclass(frozen=True)
class Split:
    sensor: int
    formula: int
    true_part: frozenset
    false_part: frozenset

    @property
    def key(self):
        return (self.sensor, self.formula)


def splits(belief: frozenset, sensors: Sequence[SensingAction]) -> list:
    """Every nontrivial split available at ``belief``, ordered by (sensor, formula)."""
    out = []
    n = len(belief)
    for a in sensors:
        if a.enabled is not None and not belief <= a.enabled:
            continue
        for i, holds in enumerate(a.truth):
            b1 = belief & holds
            if 0 < len(b1) < n:
                out.append(Split(a.id, i, b1, belief - b1))
    return out


@dataclass
class BRTree:
    """Belief-revision tree; repeated beliefs share one node record."""

    root: frozenset
    children: dict  # belief -> list of Split (empty at leaves)
    leaf: dict  # belief -> leaf reason, only for leaves

    @property
    def nodes(self):
        return self.children.keys()

    def edges(self):
        for b, ss in self.children.items():
            for sp in ss:
                yield b, sp.key, True, sp.true_part
                yield b, sp.key, False, sp.false_part

    def depth(self) -> int:
        memo: dict = {}

        def d(b):
            if b not in memo:
                memo[b] = 0 if not self.children[b] else 1 + max(
                    max(d(sp.true_part), d(sp.false_part)) for sp in self.children[b])
            return memo[b]

        return d(self.root)


def build_brtree(root, sensors: Sequence[SensingAction], fp_defined: Callable) -> BRTree:
    root = frozenset(root)
    children: dict = {}
    leaf: dict = {}
    todo = [root]
    while todo:
        b = todo.pop()
        if b in children:
            continue
        if fp_defined(b):
            children[b] = []
            leaf[b] = PROGRESS_DEFINED
            continue
        ss = splits(b, sensors)
        children[b] = ss
        if not ss:
            leaf[b] = UNREFINABLE
        for sp in ss:
            todo.append(sp.true_part)
            todo.append(sp.false_part)
    return BRTree(root, children, leaf)


@dataclass
class SensingStrategy:
    root: frozenset
    choice: dict = field(default_factory=dict)  # belief -> (sensor id, formula index)
    rank: dict = field(default_factory=dict)  # belief -> max queries needed
    solvable: bool = False

    def split_for(self, belief, sensors) -> tuple:
        sid, fi = self.choice[belief]
        return _split(belief, sensors[sid], fi)


def _split(belief, a: SensingAction, fi: int) -> tuple:
    b1 = belief & a.truth[fi]
    return b1, belief - b1


def solve_sensing(tree: BRTree) -> SensingStrategy:
    """Layered attractor of the progress-defined nodes inside ``tree``."""
    rank = {b: 0 for b, why in tree.leaf.items() if why == PROGRESS_DEFINED}
    parents: dict = {}
    for b, ss in tree.children.items():
        for idx, sp in enumerate(ss):
            for child in (sp.true_part, sp.false_part):
                parents.setdefault(child, []).append((b, idx))
    done_children: dict = {}
    choice: dict = {}
    frontier = list(rank)
    layer = 0
    while frontier:
        candidates: dict = {}
        for child in frontier:
            for b, idx in parents.get(child, ()):
                if b in rank:
                    continue
                key = (b, idx)
                done_children[key] = done_children.get(key, 0) + 1
                sp = tree.children[b][idx]
                # both outcomes ranked (the two parts are always distinct)
                if done_children[key] == 2:
                    candidates.setdefault(b, []).append(sp.key)
        frontier = []
        for b, keys in candidates.items():
            rank[b] = layer + 1
            choice[b] = min(keys)
            frontier.append(b)
        layer += 1
    return SensingStrategy(tree.root, choice, rank, tree.root in rank)


def plan_sensing(root, sensors: Sequence[SensingAction], fp_defined: Callable) -> SensingStrategy:
    """Same strategy as ``solve_sensing(build_brtree(...))``, found by iterative deepening.

    Only the part of the tree needed to certify the optimal rank is
    explored, which matters for wide sensor sets over large beliefs.
    """
    root = frozenset(root)
    exact: dict = {}
    lower: dict = {}  # belief -> smallest depth not yet refuted
    fp_memo: dict = {}
    split_memo: dict = {}

    def fp(b):
        r = fp_memo.get(b)
        if r is None:
            r = fp_memo[b] = bool(fp_defined(b))
        return r

    def get_splits(b):
        r = split_memo.get(b)
        if r is None:
            r = split_memo[b] = splits(b, sensors)
        return r

    def within(b, d) -> bool:
        if fp(b):
            exact[b] = 0
            return True
        e = exact.get(b)
        if e is not None:
            return e <= d
        if d < lower.get(b, 1):
            return False
        for sp in get_splits(b):
            small, big = sorted((sp.true_part, sp.false_part), key=len)
            if within(small, d - 1) and within(big, d - 1):
                return True
        lower[b] = d + 1
        return False

    def rank_of(b):
        if fp(b):
            return 0
        e = exact.get(b)
        if e is not None:
            return e
        d = lower.get(b, 1)
        limit = len(b) - 1  # every split strictly shrinks the belief
        while d <= limit:
            if within(b, d):
                exact[b] = d
                return d
            d = lower.get(b, d + 1)
        exact[b] = None
        return None

    strat = SensingStrategy(root)
    r = rank_of(root)
    if r is None:
        return strat
    strat.solvable = True
    todo = [root]
    while todo:
        b = todo.pop()
        if b in strat.rank:
            continue
        rb = rank_of(b)
        strat.rank[b] = rb
        if rb == 0:
            continue
        for sp in get_splits(b):
            if within(sp.true_part, rb - 1) and within(sp.false_part, rb - 1):
                strat.choice[b] = sp.key
                todo.append(sp.true_part)
                todo.append(sp.false_part)
                break
    return strat


class StrategyCache:
    """Sensing strategies keyed by belief; reads are lock-free, inserts exclusive."""

    def __init__(self):
        self._store: dict = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def __len__(self):
        return len(self._store)

    def __contains__(self, belief):
        return frozenset(belief) in self._store

    def lookup(self, belief) -> Optional[SensingStrategy]:
        s = self._store.get(frozenset(belief))
        if s is None:
            self.misses += 1
        else:
            self.hits += 1
        return s

    def insert(self, belief, strategy: SensingStrategy) -> None:
        with self._lock:
            self._store.setdefault(frozenset(belief), strategy)
            # every belief the strategy covers shares the same answer
            for b in strategy.rank:
                self._store.setdefault(b, strategy)
