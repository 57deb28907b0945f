import random

from oracles import brute_force_win1, random_game, solve_invariant_violations
from senseplan.arena import ENV, SYS, parse_arena
from senseplan.automata import compile_pattern, parse_spec
from senseplan.game import ProductGame, allow, attractor_layers, build_product, solve_buchi, solve_result_records


def test_solver_matches_brute_force():
    rng = random.Random(11)
    for _ in range(150):
        g = random_game(rng)
        sr = solve_buchi(g)
        assert sr.win1 == brute_force_win1(g)
        assert solve_invariant_violations(g, sr) == []


def test_attractor_layers_chain():
    # 0 -> 1 -> 2 (target); env 3 may go to 2 or 4; 4 loops
    g = ProductGame.from_graph(
        [SYS, SYS, SYS, ENV, SYS],
        [(0, 0, 1), (1, 0, 2), (2, 0, 2), (3, 1, 2), (3, 2, 4), (4, 0, 4)],
        accepting={2},
    )
    assert attractor_layers(g, {2}, SYS) == {2: 0, 1: 1, 0: 2}
    assert 3 not in attractor_layers(g, {2}, SYS)
    assert attractor_layers(g, {4}, ENV) == {4: 0, 3: 1}


def test_environment_rank_descent_can_skip():
    # env e -> {a, b}; a in F, sys a -> e; sys b -> a. e has rank 2 but a successor of rank 0
    g = ProductGame.from_graph([ENV, SYS, SYS], [(0, 1, 1), (0, 2, 2), (1, 0, 0), (2, 0, 1)], {1})
    sr = solve_buchi(g)
    assert sr.win1 == {0, 1, 2}
    assert sr.rank == {1: 0, 2: 1, 0: 2}
    assert solve_invariant_violations(g, sr) == []


def test_losing_game():
    # env can stay away from F forever
    g = ProductGame.from_graph([SYS, ENV], [(0, 0, 1), (1, 1, 0), (1, 2, 1)], {0})
    sr = solve_buchi(g)
    assert sr.win1 == frozenset()
    assert sr.ws == {}


def test_allow():
    g = ProductGame.from_graph([SYS, SYS, SYS], [(0, 0, 1), (0, 1, 2), (1, 0, 1), (2, 0, 2)], {1})
    sr = solve_buchi(g)
    assert allow(sr, g, 0) == {0}
    assert sr.ws[0] == 0


MODEL = """
ap goal bad
state a sys {}
init a
state b env {goal}
state c env {bad}
trans a go@sys b
trans a oops@sys c
trans b back@env a
trans c back@env a
"""


def test_product_and_records():
    arena = parse_arena(MODEL)
    d = compile_pattern(parse_spec("GF goal & G !bad"), arena.ap_names)
    g = build_product(arena, d)
    sr = solve_buchi(g)
    assert g.q0 in sr.win1
    assert g.action_names[sr.ws[g.q0]] == "go"
    recs = {r["state"]: r for r in solve_result_records(g, sr)}
    assert recs["a|p0"]["ws"] == "go"
    assert any(name.endswith("|sink") and not r["winning"] for name, r in recs.items())
