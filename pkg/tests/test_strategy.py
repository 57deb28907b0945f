import random

from senseplan.arena import ENV, SYS
from senseplan.game import ProductGame, solve_buchi
from senseplan.sensing import SensingAction
from senseplan.strategy import DEAD_END, PHYSICAL, SENSE, ActionDistribution, Planner, allow_set, f_p, progress_set

# chi-square critical values at alpha = 0.01
CHI2_CRIT = {1: 6.635, 2: 9.210, 3: 11.345, 4: 13.277}


def _fork_game():
    """Two system states that look alike but need different actions.

    q0 --a--> 2 (F, loops back to q0)   q0 --b--> 3 (losing sink)
    q1 --b--> 2                          q1 --a--> 3
    """
    owner = [SYS, SYS, SYS, SYS]
    edges = [(0, 0, 2), (0, 1, 3), (1, 1, 2), (1, 0, 3), (2, 0, 0), (2, 1, 1), (3, 0, 3)]
    return ProductGame.from_graph(owner, edges, {2}, action_owner=[SYS, SYS])


def test_progress_outside_allow_is_undefined():
    g = _fork_game()
    sr = solve_buchi(g)
    assert sr.win1 == {0, 1, 2}
    b = frozenset({0, 1})
    assert progress_set(sr, b) == {0, 1}
    assert allow_set(sr, g, b) == set()
    assert f_p(sr, g, b) is None
    assert f_p(sr, g, {0}).support == (0,)
    assert f_p(sr, g, {1}).support == (1,)


def test_losing_state_makes_progress_undefined():
    g = _fork_game()
    sr = solve_buchi(g)
    assert progress_set(sr, {0, 3}) is None
    assert allow_set(sr, g, {0, 3}) == set()
    assert f_p(sr, g, {0, 3}) is None


def test_progress_union_inside_allow():
    # both states win with either action; strategies differ
    owner = [SYS, SYS, SYS]
    edges = [(0, 0, 2), (0, 1, 1), (1, 1, 2), (1, 0, 0), (2, 0, 0), (2, 1, 1)]
    g = ProductGame.from_graph(owner, edges, {2}, action_owner=[SYS, SYS])
    sr = solve_buchi(g)
    d = f_p(sr, g, {0, 1})
    assert d.support == (0, 1)
    assert d.probability(0) == d.probability(1) == 0.5


def test_planner_decisions():
    g = _fork_game()
    sr = solve_buchi(g)
    blind = Planner(g, sr, [])
    assert blind.decide({0}).kind == PHYSICAL
    assert blind.decide({0, 1}).kind == DEAD_END
    sensor = SensingAction(0, "which", ("is_q0",), (frozenset({0}),))
    p = Planner(g, sr, [sensor])
    d = p.decide({0, 1})
    assert d.kind == SENSE and (d.sensor, d.formula) == (0, 0) and d.rank == 1
    p.decide({0, 1})
    assert p.cache.hits == 1


def test_sampling_is_uniform():
    for k in (2, 3, 4, 5):
        dist = ActionDistribution(tuple(range(10, 10 + k)))
        rng = random.Random(2024 + k)
        n = 100_000
        counts = {a: 0 for a in dist.support}
        for _ in range(n):
            counts[dist.sample(rng)] += 1
        expected = n / k
        chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
        assert chi2 < CHI2_CRIT[k - 1], (k, counts)
