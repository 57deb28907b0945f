"""Propositional formulas used for automaton guards and sensor queries.

Grammar::

    expr  := disj
    disj  := conj ('|' conj)*
    conj  := unary ('&' unary)*
    unary := '!' unary | '(' expr ')' | atom
    atom  := 'true' | 'false' | NAME | NAME '=' INT | NAME '!=' INT

A bare ``NAME`` holds when the variable is nonzero (for automaton guards the
"variables" are atomic propositions, true iff present in the letter).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Mapping, Union

__all__ = [
    "FormulaError",
    "Const",
    "Var",
    "Cmp",
    "Not",
    "And",
    "Or",
    "Formula",
    "parse_formula",
    "evaluate",
    "variables",
    "to_text",
]


class FormulaError(ValueError):
    """Raised on malformed formula text."""


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Cmp:
    name: str
    value: int
    negated: bool = False


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


Formula = Union[Const, Var, Cmp, Not, And, Or]

_TOKEN = re.compile(r"\s*(?:(!=)|([!&|()=])|(-?\d+)|([A-Za-z_][A-Za-z0-9_.]*))")


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise FormulaError(f"unexpected character {text[pos:].strip()[:1]!r} at offset {pos}")
        tokens.append(next(g for g in m.groups() if g is not None))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None:
            raise FormulaError("unexpected end of formula")
        if expected is not None and tok != expected:
            raise FormulaError(f"expected {expected!r}, got {tok!r}")
        self.i += 1
        return tok

    def disj(self):
        args = [self.conj()]
        while self.peek() == "|":
            self.take()
            args.append(self.conj())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conj(self):
        args = [self.unary()]
        while self.peek() == "&":
            self.take()
            args.append(self.unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def unary(self):
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok == "(":
            self.take()
            node = self.disj()
            self.take(")")
            return node
        return self.atom()

    def atom(self):
        tok = self.take()
        if not re.match(r"[A-Za-z_]", tok):
            raise FormulaError(f"expected a name, got {tok!r}")
        if tok == "true":
            return Const(True)
        if tok == "false":
            return Const(False)
        if self.peek() in ("=", "!="):
            op = self.take()
            num = self.take()
            try:
                value = int(num)
            except ValueError:
                raise FormulaError(f"expected an integer after {op!r}, got {num!r}") from None
            return Cmp(tok, value, negated=(op == "!="))
        return Var(tok)


def parse_formula(text: str) -> Formula:
    tokens = _tokenize(text)
    if not tokens:
        raise FormulaError("empty formula")
    p = _Parser(tokens)
    node = p.disj()
    if p.peek() is not None:
        raise FormulaError(f"trailing input at {p.peek()!r}")
    return node


def evaluate(f: Formula, lookup: Union[Mapping[str, int], Callable[[str], int]]) -> bool:
    """Evaluate ``f`` where ``lookup`` maps a variable name to its value."""
    get = lookup if callable(lookup) else lookup.__getitem__
    if isinstance(f, Var):
        return bool(get(f.name))
    if isinstance(f, Cmp):
        return (get(f.name) == f.value) != f.negated
    if isinstance(f, Not):
        return not evaluate(f.arg, get)
    if isinstance(f, And):
        return all(evaluate(a, get) for a in f.args)
    if isinstance(f, Or):
        return any(evaluate(a, get) for a in f.args)
    if isinstance(f, Const):
        return f.value
    raise TypeError(f"not a formula: {f!r}")


def variables(f: Formula) -> set[str]:
    if isinstance(f, (Var, Cmp)):
        return {f.name}
    if isinstance(f, Not):
        return variables(f.arg)
    if isinstance(f, (And, Or)):
        out: set[str] = set()
        for a in f.args:
            out |= variables(a)
        return out
    return set()


def to_text(f: Formula) -> str:
    """Render ``f`` back to parseable text (fully parenthesized compounds)."""
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Cmp):
        return f"{f.name}{'!=' if f.negated else '='}{f.value}"
    if isinstance(f, Not):
        return "!" + to_text(f.arg)
    if isinstance(f, And):
        return "(" + " & ".join(to_text(a) for a in f.args) + ")"
    if isinstance(f, Or):
        return "(" + " | ".join(to_text(a) for a in f.args) + ")"
    raise TypeError(f"not a formula: {f!r}")
