"""Labeled turn-based transition systems and the line-oriented model format.

A model document looks like::

    # comments start with '#'
    ap R1 col
    pred x
    pred w hidden
    state s0 sys {R1} x=0 w=1
    state s1 env {} x=1 w=1
    mask s1 x w                   # per-state observable predicates
    init s0
    trans s0 go@sys s1
    trans s1 stay@env s0
    sensor probe : w=1            # optional: 'sensor NAME [at S1,S2] : F1 ; F2'
    dba init h0                   # optional explicit automaton

The turn predicate ``t`` is implicit: it is always predicate 0, always
observable, and equals 1 exactly at system-owned states.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .logic import FormulaError, parse_formula, to_text, variables

__all__ = [
    "SYS",
    "ENV",
    "TURN",
    "ModelError",
    "ModelSyntaxError",
    "ModelSemanticError",
    "StateRecord",
    "ActionRecord",
    "SensorDecl",
    "Arena",
    "ModelDocument",
    "parse_model",
    "parse_arena",
    "serialize_arena",
    "enabled",
    "reachable_states",
    "canonical_form",
]

SYS = 1
ENV = 2
TURN = "t"
_OWNER_NAMES = {"sys": SYS, "env": ENV}
_OWNER_TEXT = {SYS: "sys", ENV: "env"}


class ModelError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, col: Optional[int] = None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {col}" if col is not None else "") + ": "
        super().__init__(where + message)


class ModelSyntaxError(ModelError):
    pass


class ModelSemanticError(ModelError):
    pass


@dataclass(frozen=True)
class StateRecord:
    name: str
    owner: int
    label: frozenset  # of ap ids
    valuation: tuple  # one int per predicate, index 0 is the turn predicate
    observable: frozenset  # of pred ids observable at this state


@dataclass(frozen=True)
class ActionRecord:
    name: str
    owner: int


@dataclass(frozen=True)
class SensorDecl:
    name: str
    formulas: tuple  # of Formula
    enabled_at: Optional[frozenset] = None  # arena state ids; None = everywhere


@dataclass
class Arena:
    states: list
    actions: list
    s0: int
    transitions: list  # per state: dict action id -> successor state id
    ap_names: list
    pred_names: list
    initial: list = field(default_factory=list)  # candidate initial states, s0 first
    sensors: list = field(default_factory=list)
    hidden: frozenset = frozenset()  # globally hidden pred ids

    def __post_init__(self):
        if not self.initial:
            self.initial = [self.s0]
        self._state_index = {st.name: i for i, st in enumerate(self.states)}
        self._action_index = {a.name: i for i, a in enumerate(self.actions)}
        self._pred_index = {p: i for i, p in enumerate(self.pred_names)}
        self._ap_index = {p: i for i, p in enumerate(self.ap_names)}

    def __len__(self):
        return len(self.states)

    def state_id(self, name: str) -> int:
        return self._state_index[name]

    def action_id(self, name: str) -> int:
        return self._action_index[name]

    def pred_id(self, name: str) -> int:
        return self._pred_index[name]

    def ap_id(self, name: str) -> int:
        return self._ap_index[name]

    def owner(self, s: int) -> int:
        return self.states[s].owner

    def label_names(self, s: int) -> frozenset:
        return frozenset(self.ap_names[p] for p in self.states[s].label)

    def value(self, s: int, pred: str) -> int:
        return self.states[s].valuation[self._pred_index[pred]]

    def validate(self) -> None:
        """Check the structural invariants; raises ModelSemanticError."""
        npred = len(self.pred_names)
        if not self.pred_names or self.pred_names[0] != TURN:
            raise ModelSemanticError("predicate 0 must be the turn predicate 't'")
        for i, st in enumerate(self.states):
            if len(st.valuation) != npred:
                raise ModelSemanticError(f"state {st.name}: valuation has wrong length")
            if st.valuation[0] != (1 if st.owner == SYS else 0):
                raise ModelSemanticError(f"state {st.name}: turn predicate disagrees with owner")
            if 0 not in st.observable:
                raise ModelSemanticError(f"state {st.name}: turn predicate must be observable")
            if not self.transitions[i]:
                raise ModelSemanticError(f"state {st.name} has no enabled action")
            for a, dst in self.transitions[i].items():
                if self.actions[a].owner != st.owner:
                    raise ModelSemanticError(
                        f"state {st.name} ({_OWNER_TEXT[st.owner]}) uses action "
                        f"{self.actions[a].name} owned by {_OWNER_TEXT[self.actions[a].owner]}"
                    )
                if not 0 <= dst < len(self.states):
                    raise ModelSemanticError(f"state {st.name}: successor id {dst} out of range")
        for s in self.initial:
            if not 0 <= s < len(self.states):
                raise ModelSemanticError(f"initial state id {s} out of range")


@dataclass
class ModelDocument:
    arena: Arena
    dba_lines: list  # (lineno, tokens-after-'dba') kept for the automaton parser


def enabled(a: Arena, s: int) -> set:
    """Action ids with a defined successor at ``s``."""
    return set(a.transitions[s])


def reachable_states(a: Arena, sources=None) -> set:
    seen = set(a.initial if sources is None else sources)
    todo = deque(seen)
    while todo:
        s = todo.popleft()
        for dst in a.transitions[s].values():
            if dst not in seen:
                seen.add(dst)
                todo.append(dst)
    return seen


_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\-]*$")


def _check_name(tok: str, lineno: int, line: str, what: str) -> str:
    if not _NAME.match(tok):
        raise ModelSyntaxError(f"invalid {what} name {tok!r}", lineno, line.find(tok) + 1)
    return tok


def parse_model(text: str) -> ModelDocument:
    """Parse a model document into an Arena plus any raw ``dba`` lines."""
    aps: list[str] = []
    preds: list[str] = [TURN]
    hidden: set[str] = set()
    state_lines = []  # (lineno, line, name, owner, props, assigns)
    masks = {}
    init_names: list[str] = []
    init_line = None
    trans_lines = []
    sensor_lines = []
    dba_lines = []
    action_decls = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        tokens = line.split()
        kw = tokens[0]
        if kw == "ap":
            for tok in tokens[1:]:
                aps.append(_check_name(tok, lineno, line, "proposition"))
        elif kw == "pred":
            if len(tokens) not in (2, 3) or (len(tokens) == 3 and tokens[2] != "hidden"):
                raise ModelSyntaxError("expected 'pred <name> [hidden]'", lineno, 1)
            name = _check_name(tokens[1], lineno, line, "predicate")
            if name == TURN:
                raise ModelSemanticError("'t' is the implicit turn predicate", lineno)
            preds.append(name)
            if len(tokens) == 3:
                hidden.add(name)
        elif kw == "state":
            m = re.match(r"^\s*state\s+(\S+)\s+(\S+)\s*\{([^}]*)\}(.*)$", line)
            if m is None:
                raise ModelSyntaxError("expected 'state <id> sys|env { props } [pred=val ...]'", lineno, 1)
            name = _check_name(m.group(1), lineno, line, "state")
            if m.group(2) not in _OWNER_NAMES:
                raise ModelSyntaxError(f"owner must be sys or env, got {m.group(2)!r}", lineno, line.find(m.group(2)) + 1)
            props = m.group(3).replace(",", " ").split()
            assigns = []
            for tok in m.group(4).split():
                am = re.match(r"^([A-Za-z_][A-Za-z0-9_.\-]*)=(-?\d+)$", tok)
                if am is None:
                    raise ModelSyntaxError(f"expected pred=int, got {tok!r}", lineno, line.find(tok) + 1)
                assigns.append((am.group(1), int(am.group(2))))
            state_lines.append((lineno, line, name, _OWNER_NAMES[m.group(2)], props, assigns))
        elif kw == "mask":
            if len(tokens) < 2:
                raise ModelSyntaxError("expected 'mask <state> <pred>...'", lineno, 1)
            masks[tokens[1]] = (lineno, tokens[2:])
        elif kw == "init":
            if len(tokens) < 2:
                raise ModelSyntaxError("expected 'init <state> [<state>...]'", lineno, 1)
            if init_line is not None:
                raise ModelSemanticError("duplicate init declaration", lineno)
            init_names = tokens[1:]
            init_line = lineno
        elif kw == "action":
            for tok in tokens[1:]:
                if "@" not in tok or tok.rsplit("@", 1)[1] not in _OWNER_NAMES:
                    raise ModelSyntaxError(f"expected name@sys|env, got {tok!r}", lineno, line.find(tok) + 1)
                aname, aown = tok.rsplit("@", 1)
                action_decls.append((lineno, _check_name(aname, lineno, line, "action"), _OWNER_NAMES[aown]))
        elif kw == "trans":
            if len(tokens) != 4:
                raise ModelSyntaxError("expected 'trans <src> <action@sys|env> <dst>'", lineno, 1)
            act = tokens[2]
            if "@" not in act:
                raise ModelSyntaxError(f"action {act!r} lacks an @sys/@env owner", lineno, line.find(act) + 1)
            aname, aown = act.rsplit("@", 1)
            if aown not in _OWNER_NAMES:
                raise ModelSyntaxError(f"action owner must be sys or env, got {aown!r}", lineno, line.find(act) + 1)
            _check_name(aname, lineno, line, "action")
            trans_lines.append((lineno, tokens[1], aname, _OWNER_NAMES[aown], tokens[3]))
        elif kw == "sensor":
            m = re.match(r"^\s*sensor\s+(\S+)(?:\s+at\s+([^:]+))?\s*:(.*)$", line)
            if m is None:
                raise ModelSyntaxError("expected 'sensor <name> [at s1,s2,...] : formula [; formula]'", lineno, 1)
            sensor_lines.append((lineno, m.group(1), m.group(2), m.group(3)))
        elif kw == "dba":
            dba_lines.append((lineno, line.split(None, 1)[1] if len(tokens) > 1 else ""))
        else:
            raise ModelSyntaxError(f"unknown declaration {kw!r}", lineno, line.find(kw) + 1)

    if len(set(aps)) != len(aps):
        raise ModelSemanticError("duplicate atomic proposition")
    if len(set(preds)) != len(preds):
        raise ModelSemanticError("duplicate predicate")
    ap_index = {p: i for i, p in enumerate(aps)}
    pred_index = {p: i for i, p in enumerate(preds)}
    hidden_ids = frozenset(pred_index[p] for p in hidden)
    default_obs = frozenset(i for i in range(len(preds)) if i not in hidden_ids)

    states = []
    state_index = {}
    for lineno, line, name, owner, props, assigns in state_lines:
        if name in state_index:
            raise ModelSemanticError(f"duplicate state {name}", lineno)
        label = set()
        for p in props:
            if p not in ap_index:
                raise ModelSemanticError(f"state {name}: undeclared proposition {p}", lineno, line.find(p) + 1)
            label.add(ap_index[p])
        val = [0] * len(preds)
        val[0] = 1 if owner == SYS else 0
        for pname, v in assigns:
            if pname not in pred_index:
                raise ModelSemanticError(f"state {name}: undeclared predicate {pname}", lineno, line.find(pname) + 1)
            if pname == TURN:
                raise ModelSemanticError(f"state {name}: the turn predicate is implied by the owner", lineno)
            val[pred_index[pname]] = v
        state_index[name] = len(states)
        states.append(StateRecord(name, owner, frozenset(label), tuple(val), default_obs))
    if not states:
        raise ModelSemanticError("model declares no states")

    for sname, (lineno, pnames) in masks.items():
        if sname not in state_index:
            raise ModelSemanticError(f"mask for undeclared state {sname}", lineno)
        obs = {0}
        for p in pnames:
            if p not in pred_index:
                raise ModelSemanticError(f"mask for {sname}: undeclared predicate {p}", lineno)
            obs.add(pred_index[p])
        i = state_index[sname]
        st = states[i]
        states[i] = StateRecord(st.name, st.owner, st.label, st.valuation, frozenset(obs))

    if init_line is None:
        raise ModelSemanticError("missing init declaration")
    initial = []
    for n in init_names:
        if n not in state_index:
            raise ModelSemanticError(f"init names undeclared state {n}", init_line)
        initial.append(state_index[n])

    actions: list[ActionRecord] = []
    action_index: dict[str, int] = {}
    for lineno, aname, aown in action_decls:
        if aname in action_index:
            raise ModelSemanticError(f"duplicate action {aname}", lineno)
        action_index[aname] = len(actions)
        actions.append(ActionRecord(aname, aown))
    transitions: list[dict] = [dict() for _ in states]
    for lineno, src, aname, aown, dst in trans_lines:
        for n in (src, dst):
            if n not in state_index:
                raise ModelSemanticError(f"transition uses undeclared state {n}", lineno)
        if aname in action_index:
            a = action_index[aname]
            if actions[a].owner != aown:
                raise ModelSemanticError(f"action {aname} declared with two owners", lineno)
        else:
            a = action_index[aname] = len(actions)
            actions.append(ActionRecord(aname, aown))
        s, d = state_index[src], state_index[dst]
        if states[s].owner != aown:
            raise ModelSemanticError(
                f"state {src} is owned by {_OWNER_TEXT[states[s].owner]} but action {aname} by {_OWNER_TEXT[aown]}",
                lineno,
            )
        if a in transitions[s] and transitions[s][a] != d:
            raise ModelSemanticError(f"nondeterministic transition: state {src} has two successors under {aname}", lineno)
        transitions[s][a] = d
    for i, st in enumerate(states):
        if not transitions[i]:
            raise ModelSemanticError(f"state {st.name} has no enabled action")

    sensors = []
    for lineno, name, at, body in sensor_lines:
        try:
            formulas = tuple(parse_formula(part) for part in body.split(";"))
        except FormulaError as exc:
            raise ModelSyntaxError(f"sensor {name}: {exc}", lineno) from None
        for f in formulas:
            for v in variables(f):
                if v not in pred_index:
                    raise ModelSemanticError(f"sensor {name}: undeclared predicate {v}", lineno)
        where = None
        if at is not None:
            ids = set()
            for n in at.replace(",", " ").split():
                if n not in state_index:
                    raise ModelSemanticError(f"sensor {name}: undeclared state {n}", lineno)
                ids.add(state_index[n])
            where = frozenset(ids)
        sensors.append(SensorDecl(name, formulas, where))

    arena = Arena(
        states=states,
        actions=actions,
        s0=initial[0],
        transitions=transitions,
        ap_names=aps,
        pred_names=preds,
        initial=initial,
        sensors=sensors,
        hidden=hidden_ids,
    )
    arena.validate()
    return ModelDocument(arena, dba_lines)


def parse_arena(text: str) -> Arena:
    return parse_model(text).arena


def serialize_arena(a: Arena) -> str:
    """Canonical text: declarations grouped by kind, each group in id order."""
    out = []
    if a.ap_names:
        out.append("ap " + " ".join(a.ap_names))
    for i, p in enumerate(a.pred_names[1:], start=1):
        out.append(f"pred {p}" + (" hidden" if i in a.hidden else ""))
    default_obs = frozenset(i for i in range(len(a.pred_names)) if i not in a.hidden)
    masks = []
    for st in a.states:
        props = " ".join(a.ap_names[p] for p in sorted(st.label))
        vals = " ".join(f"{a.pred_names[i]}={v}" for i, v in enumerate(st.valuation) if i > 0 and v != 0)
        out.append(f"state {st.name} {_OWNER_TEXT[st.owner]} {{{props}}}" + (f" {vals}" if vals else ""))
        if st.observable != default_obs:
            masks.append(f"mask {st.name} " + " ".join(a.pred_names[i] for i in sorted(st.observable) if i > 0))
    out.extend(masks)
    if a.actions:
        out.append("action " + " ".join(f"{ar.name}@{_OWNER_TEXT[ar.owner]}" for ar in a.actions))
    out.append("init " + " ".join(a.states[s].name for s in a.initial))
    for s, succ in enumerate(a.transitions):
        for act in sorted(succ):
            ar = a.actions[act]
            out.append(f"trans {a.states[s].name} {ar.name}@{_OWNER_TEXT[ar.owner]} {a.states[succ[act]].name}")
    for sd in a.sensors:
        at = ""
        if sd.enabled_at is not None:
            at = " at " + ",".join(a.states[s].name for s in sorted(sd.enabled_at))
        out.append(f"sensor {sd.name}{at} : " + " ; ".join(to_text(f) for f in sd.formulas))
    return "\n".join(out) + "\n"


def canonical_form(a: Arena) -> tuple:
    """A hashable structural summary, independent of object identity."""
    return (
        tuple(a.ap_names),
        tuple(a.pred_names),
        a.hidden,
        tuple(a.states),
        tuple(a.actions),
        tuple(a.initial),
        tuple(tuple(sorted(t.items())) for t in a.transitions),
        tuple(a.sensors),
    )
