import itertools

import pytest

from senseplan.logic import FormulaError, evaluate, parse_formula, to_text, variables


@pytest.mark.parametrize("text,env,expected", [
    ("true", {}, True),
    ("false", {}, False),
    ("p", {"p": 1}, True),
    ("p", {"p": 0}, False),
    ("!p & q", {"p": 0, "q": 1}, True),
    ("p | q & r", {"p": 0, "q": 1, "r": 0}, False),
    ("(p | q) & r", {"p": 1, "q": 0, "r": 1}, True),
    ("x=3", {"x": 3}, True),
    ("x!=3", {"x": 3}, False),
    ("xw=-1 | yw=2", {"xw": 0, "yw": 2}, True),
])
def test_evaluate(text, env, expected):
    assert evaluate(parse_formula(text), env) is expected


def test_callable_lookup():
    f = parse_formula("a & !b")
    assert evaluate(f, lambda n: {"a": 1, "b": 0}[n])


def test_variables():
    assert variables(parse_formula("(x=1 & !p) | q")) == {"x", "p", "q"}


def test_to_text_round_trip():
    texts = ["p", "!p", "x=2 & y!=3", "a | b & c", "!(a | b)", "true", "((a))"]
    for t in texts:
        f = parse_formula(t)
        g = parse_formula(to_text(f))
        for vals in itertools.product((0, 1, 2, 3), repeat=5):
            env = dict(zip(["p", "x", "y", "a", "b"], vals), c=vals[0])
            assert evaluate(f, env) == evaluate(g, env)


@pytest.mark.parametrize("bad", ["", "p &", "(p", "p q", "x=", "&p", "p)"])
def test_syntax_errors(bad):
    with pytest.raises(FormulaError):
        parse_formula(bad)
