import random

import pytest

from oracles import random_po_game
from senseplan.arena import ENV, SYS
from senseplan.game import ProductGame
from senseplan.observation import (
    ContradictionError, alpha_oracle, initial_belief, observation_model, update_env, update_system,
)


def _prefixes(g, start, depth):
    stack = [[start]]
    while stack:
        p = stack.pop()
        yield p
        if len(p) // 2 < depth:
            for a, t in sorted(g.succ[p[-1]].items()):
                stack.append(p + [a, t])


def _iterate(g, om, prefix):
    b = initial_belief(g, om)
    for i in range(1, len(prefix), 2):
        a, q = prefix[i], prefix[i + 1]
        if g.action_owner[a] == SYS:
            b = update_system(g, om, b, a, om.class_of[q])
        else:
            b = update_env(g, om, b, om.class_of[q])
    return b


def test_update_matches_alpha():
    rng = random.Random(5)
    compared = 0
    for _ in range(40):
        g = random_po_game(rng)
        om = observation_model(g)
        for start in initial_belief(g, om):
            for p in _prefixes(g, start, 4):
                assert _iterate(g, om, p) == alpha_oracle(g, om, p)
                compared += 1
    assert compared > 500


def test_truth_stays_in_belief():
    rng = random.Random(6)
    for _ in range(30):
        g = random_po_game(rng)
        om = observation_model(g)
        for p in _prefixes(g, g.q0, 5):
            assert p[-1] in _iterate(g, om, p)


def _two_branch_game():
    # sys 0 --a--> env 1; env 1 --e/f--> sys 2 | sys 3 (same observation), 3 --a--> 4 (distinct obs)
    owner = [SYS, ENV, SYS, SYS, ENV]
    vals = [(1, 0), (0, 0), (1, 1), (1, 1), (0, 2)]
    obs = [frozenset({0, 1})] * 5
    edges = [(0, 0, 1), (1, 1, 2), (1, 2, 3), (2, 0, 1), (3, 0, 4), (4, 1, 0)]
    return ProductGame.from_graph(owner, edges, {0}, action_owner=[SYS, ENV, ENV],
                                  valuations=vals, observable=obs, pred_names=["t", "o"])


def test_env_update_is_blind_to_the_action():
    g = _two_branch_game()
    om = observation_model(g)
    b = update_env(g, om, frozenset({1}), om.class_of[2])
    assert b == {2, 3}
    assert update_system(g, om, b, 0, om.class_of[4]) == {4}


def test_contradiction():
    g = _two_branch_game()
    om = observation_model(g)
    with pytest.raises(ContradictionError):
        update_system(g, om, frozenset({0}), 0, om.class_of[2])
    with pytest.raises(ContradictionError):
        update_env(g, om, frozenset({1}), om.class_of[0])


def test_observation_classes_use_masks():
    owner = [SYS, SYS]
    vals = [(1, 5), (1, 6)]
    g = ProductGame.from_graph(owner, [(0, 0, 1), (1, 0, 0)], {0}, action_owner=[SYS], valuations=vals,
                               observable=[frozenset({0}), frozenset({0})], pred_names=["t", "h"])
    om = observation_model(g)
    assert om.class_of[0] == om.class_of[1]
    g.observable = [frozenset({0, 1})] * 2
    om = observation_model(g)
    assert om.class_of[0] != om.class_of[1]
