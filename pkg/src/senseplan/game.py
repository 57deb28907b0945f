"""Product game construction and the complete-information Büchi solver."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .arena import ENV, SYS, Arena
from .automata import DBA

__all__ = [
    "ProductGame",
    "SolveResult",
    "build_product",
    "attractor_layers",
    "solve_buchi",
    "allow",
    "solve_result_records",
]


@dataclass
class ProductGame:
    """Explicit turn-based game graph.

    States are dense ints. ``succ[q]`` maps action id -> successor. When the
    game comes from :func:`build_product`, ``pairs[q]`` is the underlying
    (arena state, automaton state) and valuations/observability are read
    from the arena; games built with :meth:`from_graph` carry their own.
    """

    owner: list
    succ: list
    q0: int
    accepting: frozenset
    action_owner: list
    action_names: Optional[list] = None
    initial: list = field(default_factory=list)
    pairs: Optional[list] = None
    arena: Optional[Arena] = None
    dba: Optional[DBA] = None
    valuations: Optional[list] = None  # per-state tuples, only for from_graph games
    observable: Optional[list] = None
    pred_names: Optional[list] = None

    def __post_init__(self):
        if not self.initial:
            self.initial = [self.q0]
        if self.action_names is None:
            self.action_names = [f"a{i}" for i in range(len(self.action_owner))]
        self._pred = None
        self._index = None

    def __len__(self):
        return len(self.owner)

    @classmethod
    def from_graph(cls, owner, edges, accepting, q0=0, action_owner=None, initial=None,
                   valuations=None, observable=None, pred_names=None):
        """Build from ``edges = [(src, action, dst), ...]``."""
        succ = [dict() for _ in owner]
        for s, a, d in edges:
            if a in succ[s] and succ[s][a] != d:
                raise ValueError(f"nondeterministic edge at {s} under {a}")
            succ[s][a] = d
        if action_owner is None:
            nact = 1 + max((a for _, a, _ in edges), default=-1)
            action_owner = [None] * nact
            for s, a, _ in edges:
                action_owner[a] = owner[s]
        return cls(list(owner), succ, q0, frozenset(accepting), list(action_owner),
                   initial=list(initial or [q0]), valuations=valuations,
                   observable=observable, pred_names=pred_names)

    @property
    def pred(self) -> list:
        """Predecessor lists: ``pred[q]`` = [(p, action), ...]."""
        if self._pred is None:
            pred = [[] for _ in self.owner]
            for p, succ in enumerate(self.succ):
                for a, q in succ.items():
                    pred[q].append((p, a))
            self._pred = pred
        return self._pred

    def valuation(self, q: int) -> tuple:
        if self.valuations is not None:
            return self.valuations[q]
        return self.arena.states[self.pairs[q][0]].valuation

    def observable_preds(self, q: int) -> frozenset:
        if self.observable is not None:
            return self.observable[q]
        return self.arena.states[self.pairs[q][0]].observable

    def predicate_names(self) -> list:
        if self.pred_names is not None:
            return self.pred_names
        return self.arena.pred_names if self.arena is not None else []

    def state_name(self, q: int) -> str:
        if self.pairs is None:
            return f"q{q}"
        s, h = self.pairs[q]
        return f"{self.arena.states[s].name}|{self.dba.names[h]}"

    def find(self, s: int, h: int) -> Optional[int]:
        if self._index is None:
            self._index = {p: i for i, p in enumerate(self.pairs)}
        return self._index.get((s, h))


def build_product(a: Arena, d: DBA) -> ProductGame:
    """Materialize the product reachable from the lifted initial candidates."""
    missing = set(d.ap_names) - set(a.ap_names)
    if missing:
        raise ValueError("automaton uses propositions unknown to the arena: " + ", ".join(sorted(missing)))
    letters = [a.label_names(s) for s in range(len(a.states))]
    step = d.step
    index: dict = {}
    pairs: list = []
    succ: list = []

    def intern(pair):
        q = index.get(pair)
        if q is None:
            q = index[pair] = len(pairs)
            pairs.append(pair)
            succ.append(None)
            todo.append(q)
        return q

    todo: deque = deque()
    initial = [intern((s, step(d.h0, letters[s]))) for s in a.initial]
    trans = a.transitions
    while todo:
        q = todo.popleft()
        s, h = pairs[q]
        out = {}
        for act, s2 in trans[s].items():
            out[act] = intern((s2, step(h, letters[s2])))
        succ[q] = out
    owner = [a.states[s].owner for s, _ in pairs]
    accepting = frozenset(q for q, (_, h) in enumerate(pairs) if h in d.accepting)
    g = ProductGame(
        owner=owner,
        succ=succ,
        q0=initial[0],
        accepting=accepting,
        action_owner=[ar.owner for ar in a.actions],
        action_names=[ar.name for ar in a.actions],
        initial=list(dict.fromkeys(initial)),
        pairs=pairs,
        arena=a,
        dba=d,
    )
    g._index = index
    return g


def attractor_layers(g: ProductGame, target, player: int, within=None) -> dict:
    """Layered attractor of ``target`` for ``player`` inside the subgame ``within``.

    Returns ``{state: layer}``; layer 0 is ``target`` itself and a state in
    layer i+1 can be forced into layers <= i in one move. Only edges that
    stay inside ``within`` are considered.
    """
    if within is None:
        within = range(len(g.owner))
    within = within if isinstance(within, (set, frozenset)) else set(within)
    rank = {q: 0 for q in target if q in within}
    remaining: dict = {}
    frontier = sorted(rank)
    layer = 0
    pred = g.pred
    owner = g.owner
    while frontier:
        nxt = []
        for v in frontier:
            for u, _ in pred[v]:
                if u in rank or u not in within:
                    continue
                if owner[u] == player:
                    rank[u] = layer + 1
                    nxt.append(u)
                else:
                    c = remaining.get(u)
                    if c is None:
                        c = sum(1 for t in g.succ[u].values() if t in within)
                    c -= 1
                    remaining[u] = c
                    if c == 0:
                        rank[u] = layer + 1
                        nxt.append(u)
        frontier = nxt
        layer += 1
    return rank


@dataclass
class SolveResult:
    win1: frozenset
    rank: dict
    ws: dict
    m: int

    def layers(self) -> list:
        out = [set() for _ in range(self.m + 1)] if self.win1 else []
        for q, r in self.rank.items():
            out[r].add(q)
        return out


def solve_buchi(g: ProductGame) -> SolveResult:
    """Player-1 winning region, rank partition and memoryless strategy."""
    z = set(range(len(g.owner)))
    while True:
        rank = attractor_layers(g, g.accepting & z, SYS, z)
        if len(rank) == len(z):
            break
        losing = z - rank.keys()
        z -= attractor_layers(g, losing, ENV, z).keys()
    ws = {}
    for q in z:
        if g.owner[q] != SYS:
            continue
        best = min((rank[t], a) for a, t in g.succ[q].items() if t in z)
        ws[q] = best[1]
    m = max(rank.values(), default=0)
    return SolveResult(frozenset(z), rank, ws, m)


def allow(sr: SolveResult, g: ProductGame, q: int) -> set:
    """Enabled system actions at ``q`` whose successor stays winning."""
    return {a for a, t in g.succ[q].items() if t in sr.win1}


def solve_result_records(g: ProductGame, sr: SolveResult) -> list:
    """One record per product state, for export."""
    recs = []
    for q in range(len(g.owner)):
        ws = sr.ws.get(q)
        recs.append({
            "state": g.state_name(q),
            "owner": "sys" if g.owner[q] == SYS else "env",
            "winning": q in sr.win1,
            "accepting": q in g.accepting,
            "rank": sr.rank.get(q),
            "ws": None if ws is None else g.action_names[ws],
        })
    return recs
