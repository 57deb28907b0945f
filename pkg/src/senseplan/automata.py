"""Deterministic Büchi automata for safety / ordered-recurrence specifications.

Supported specification text::

    spec     := conjunct ('&' conjunct)*
    conjunct := 'G' '!' prop | 'GF' prop | 'GF' 'seq(' prop (',' prop)* ')'

Conjoined recurrences are merged into one ordered recurrence
(``GF seq(A) & GF seq(B)`` holds exactly when ``GF seq(A + B)`` does), so the
compiled automaton always has the shape::

    p0 -> p1 -> ... -> p{k-1} -> acc     (acc then behaves like p0)
    any state --bad--> sink

``acc`` is the only accepting state and is visited exactly once per
completed round.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .logic import And, Const, Formula, FormulaError, Not, Or, Var, evaluate, parse_formula, to_text, variables

__all__ = [
    "SpecError",
    "SpecPattern",
    "DBA",
    "parse_spec",
    "compile_pattern",
    "dba_step",
    "accepts_lasso",
    "parse_dba",
    "load_spec",
    "serialize_dba",
]


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class SpecPattern:
    safety: tuple = ()  # propositions that must never hold
    recurrences: tuple = ()  # tuple of tuples, each an ordered milestone list

    @property
    def sequence(self) -> tuple:
        return tuple(p for seq in self.recurrences for p in seq)

    def propositions(self) -> set:
        return set(self.safety) | set(self.sequence)

    def __str__(self):
        parts = [f"G !{p}" for p in self.safety]
        for seq in self.recurrences:
            parts.append(f"GF {seq[0]}" if len(seq) == 1 else "GF seq(" + ",".join(seq) + ")")
        return " & ".join(parts)


_CONJ = re.compile(
    r"\s*(?:G\s*!\s*(?P<bad>[A-Za-z_][\w.]*)"
    r"|GF\s*seq\s*\(\s*(?P<seq>[^)]*)\)"
    r"|GF\s+(?P<rec>[A-Za-z_][\w.]*))\s*"
)
_PROP = re.compile(r"^[A-Za-z_][\w.]*$")


def parse_spec(text: str) -> SpecPattern:
    text = text.strip()
    if not text:
        raise SpecError("empty specification")
    safety, recs = [], []
    pos = 0
    while True:
        m = _CONJ.match(text, pos)
        if m is None:
            raise SpecError(f"cannot parse specification at offset {pos}: {text[pos:pos + 20]!r}")
        if m.group("bad"):
            safety.append(m.group("bad"))
        elif m.group("rec"):
            recs.append((m.group("rec"),))
        else:
            props = [p.strip() for p in m.group("seq").split(",")]
            if not props or not all(_PROP.match(p) for p in props):
                raise SpecError(f"bad seq(...) argument list {m.group('seq')!r}")
            recs.append(tuple(props))
        pos = m.end()
        if pos == len(text):
            break
        if text[pos] != "&":
            raise SpecError(f"expected '&' at offset {pos}")
        pos += 1
    return SpecPattern(tuple(safety), tuple(recs))


@dataclass
class DBA:
    """Deterministic, complete Büchi automaton over letters = sets of AP names.

    ``edges[h]`` is an ordered list of ``(guard, target)``; a guard of
    ``None`` is an ``else`` edge matching whatever no earlier guard matched.
    """

    names: list
    h0: int
    edges: list
    accepting: frozenset
    ap_names: list = field(default_factory=list)

    def __post_init__(self):
        self._cache = {}
        self._index = {n: i for i, n in enumerate(self.names)}

    def __len__(self):
        return len(self.names)

    def state_id(self, name: str) -> int:
        return self._index[name]

    def step(self, h: int, letter: frozenset) -> int:
        key = (h, letter)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        found = None
        for guard, target in self.edges[h]:
            if guard is None or evaluate(guard, lambda n: n in letter):
                found = target
                break
        if found is None:
            raise RuntimeError(f"automaton incomplete: no edge from {self.names[h]} on {sorted(letter)}")
        self._cache[key] = found
        return found

    def check_complete(self, max_aps: int = 12) -> None:
        """Exhaustively confirm exactly one explicit guard (or else) matches."""
        aps = list(self.ap_names)
        if len(aps) > max_aps:
            return
        for h, edges in enumerate(self.edges):
            for bits in itertools.product((False, True), repeat=len(aps)):
                letter = frozenset(p for p, b in zip(aps, bits) if b)
                hits = [g for g, _ in edges if g is not None and evaluate(g, lambda n: n in letter)]
                has_else = any(g is None for g, _ in edges)
                if len(hits) > 1:
                    raise SpecError(f"automaton state {self.names[h]}: overlapping guards on {sorted(letter)}")
                if not hits and not has_else:
                    raise SpecError(f"automaton state {self.names[h]}: no guard matches {sorted(letter)}")


def dba_step(d: DBA, h: int, letter: Iterable[str]) -> int:
    return d.step(h, frozenset(letter))


def _conj(parts: Sequence[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return Const(True)
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def compile_pattern(p: SpecPattern, ap_names: Optional[Sequence[str]] = None) -> DBA:
    if ap_names is not None:
        missing = sorted(p.propositions() - set(ap_names))
        if missing:
            raise SpecError("unresolved proposition(s): " + ", ".join(missing))
        aps = list(ap_names)
    else:
        aps = sorted(p.propositions())
    bad = list(dict.fromkeys(p.safety))
    seq = list(p.sequence)
    k = len(seq)

    ok = [Not(Var(b)) for b in bad]
    bad_guard = Var(bad[0]) if len(bad) == 1 else Or(tuple(Var(b) for b in bad)) if bad else None

    if k == 0:
        names = ["live", "sink"]
        live_edges = [(bad_guard, 1)] if bad_guard is not None else []
        live_edges.append((None, 0))
        return DBA(names, 0, [live_edges, [(None, 1)]], frozenset({0}), aps)

    names = [f"p{j}" for j in range(k)] + ["acc"]
    acc = k
    sink = None
    if bad:
        sink = len(names)
        names.append("sink")

    def phase_edges(j: int) -> list:
        edges = []
        if bad_guard is not None:
            edges.append((bad_guard, sink))
        # advance greedily through milestones satisfied by the same letter
        for r in range(j, k):
            guard = ok + [Var(seq[i]) for i in range(j, r)] + [Not(Var(seq[r]))]
            edges.append((_conj(guard), r))
        edges.append((_conj(ok + [Var(seq[i]) for i in range(j, k)]), acc))
        return edges

    edges = [phase_edges(j) for j in range(k)]
    edges.append(phase_edges(0))  # acc restarts the round
    if sink is not None:
        edges.append([(None, sink)])
    return DBA(names, 0, edges, frozenset({acc}), aps)


def accepts_lasso(d: DBA, prefix: Sequence[Iterable[str]], cycle: Sequence[Iterable[str]]) -> bool:
    """Whether the run on ``prefix . cycle^omega`` visits accepting states infinitely often."""
    if not cycle:
        raise ValueError("cycle must be nonempty")
    h = d.h0
    for letter in prefix:
        h = d.step(h, frozenset(letter))
    cyc = [frozenset(a) for a in cycle]
    seen = {}
    visited = []
    pos = 0
    while (h, pos) not in seen:
        seen[(h, pos)] = len(visited)
        visited.append(h)
        h = d.step(h, cyc[pos])
        pos = (pos + 1) % len(cyc)
    loop = visited[seen[(h, pos)]:]
    return any(x in d.accepting for x in loop)


def parse_dba(lines: Sequence, ap_names: Optional[Sequence[str]] = None) -> DBA:
    """Build a DBA from ``dba`` declarations (text after the keyword).

    ``lines`` holds strings or ``(lineno, text)`` pairs::

        states h0 h1 ...              # optional, fixes the id order
        init h0
        accept h1 [h2 ...]
        edge h0 h1 : p & !q
        edge h0 h0 : else
    """
    names: list[str] = []
    index: dict[str, int] = {}

    def sid(n):
        if n not in index:
            index[n] = len(names)
            names.append(n)
        return index[n]

    h0 = None
    accepting = set()
    edges: dict[int, list] = {}
    props: set[str] = set()
    for item in lines:
        lineno, text = item if isinstance(item, tuple) else (None, item)
        where = f"line {lineno}: " if lineno is not None else ""
        toks = text.split()
        if not toks:
            continue
        if toks[0] == "states" and len(toks) >= 2:
            for t in toks[1:]:
                sid(t)
        elif toks[0] == "init" and len(toks) == 2:
            h0 = sid(toks[1])
        elif toks[0] == "accept" and len(toks) >= 2:
            accepting.update(sid(t) for t in toks[1:])
        elif toks[0] == "edge":
            m = re.match(r"^\s*edge\s+(\S+)\s+(\S+)\s*:(.*)$", text)
            if m is None:
                raise SpecError(where + "expected 'edge <src> <dst> : <guard>|else'")
            src, dst = sid(m.group(1)), sid(m.group(2))
            body = m.group(3).strip()
            if body == "else":
                guard = None
            else:
                try:
                    guard = parse_formula(body)
                except FormulaError as exc:
                    raise SpecError(where + str(exc)) from None
                props |= variables(guard)
            edges.setdefault(src, []).append((guard, dst))
        else:
            raise SpecError(where + f"unknown dba declaration {text.strip()!r}")
    if h0 is None:
        raise SpecError("automaton lacks an init state")
    if ap_names is not None:
        missing = sorted(props - set(ap_names))
        if missing:
            raise SpecError("unresolved proposition(s): " + ", ".join(missing))
        aps = list(ap_names)
    else:
        aps = sorted(props)
    ordered = []
    for h in range(len(names)):
        es = edges.get(h, [])
        # else edges always apply last
        ordered.append([e for e in es if e[0] is not None] + [e for e in es if e[0] is None])
    d = DBA(names, h0, ordered, frozenset(accepting), aps)
    d.check_complete()
    return d


def serialize_dba(d: DBA) -> str:
    out = ["dba states " + " ".join(d.names), f"dba init {d.names[d.h0]}"]
    if d.accepting:
        out.append("dba accept " + " ".join(d.names[h] for h in sorted(d.accepting)))
    for h, es in enumerate(d.edges):
        for g, t in es:
            out.append(f"dba edge {d.names[h]} {d.names[t]} : {'else' if g is None else to_text(g)}")
    return "\n".join(out) + "\n"


def load_spec(text: str, ap_names: Optional[Sequence[str]] = None) -> DBA:
    """Accept either specification-pattern text or ``dba`` declarations."""
    stripped = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    stripped = [ln for ln in stripped if ln]
    if stripped and stripped[0].startswith("dba"):
        body = []
        for ln in stripped:
            if not ln.startswith("dba"):
                raise SpecError(f"mixed automaton and formula text: {ln!r}")
            body.append(ln[3:].strip())
        return parse_dba(body, ap_names)
    return compile_pattern(parse_spec(" ".join(stripped)), ap_names)
