import math
import random
import threading

import pytest

from oracles import binary_sensors, brute_minmax
from senseplan.arena import SYS
from senseplan.game import ProductGame
from senseplan.sensing import (
    PROGRESS_DEFINED, UNREFINABLE, SensingAction, SensorNotEnabled, StrategyCache, build_brtree, knows,
    plan_sensing, solve_sensing, splits,
)


def singleton(b):
    return len(b) == 1


def _run_phase(strat, sensors, truth, fp_defined):
    b = strat.root
    queries = 0
    while not fp_defined(b):
        sid, fi = strat.choice[b]
        holds = sensors[sid].truth[fi]
        b = frozenset(q for q in b if (q in holds) == (truth in holds))
        queries += 1
    return queries


def test_knows_partitions():
    g = ProductGame.from_graph([SYS] * 4, [(q, 0, q) for q in range(4)], {0})
    a = SensingAction(0, "s", ("f",), (frozenset({1, 3}),), enabled=frozenset({0, 1, 3}))
    b1, b2 = knows(g, 0, a, {1, 3, 0})
    assert b1 == {1, 3} and b2 == {0}
    with pytest.raises(SensorNotEnabled):
        knows(g, 0, a, {2})


@pytest.mark.parametrize("n", range(2, 33))
def test_binary_search_rank(n):
    sensors = binary_sensors(n)
    root = frozenset(range(n))
    tree = build_brtree(root, sensors, singleton)
    strat = solve_sensing(tree)
    want = math.ceil(math.log2(n))
    assert strat.solvable and strat.rank[root] == want
    assert brute_minmax(root, sensors, singleton) == want
    assert plan_sensing(root, sensors, singleton).rank[root] == want
    for truth in root:
        assert _run_phase(strat, sensors, truth, singleton) <= want


def _random_instance(rng):
    n = rng.randint(2, 9)
    sensors = []
    for i in range(rng.randint(1, 5)):
        forms = tuple(frozenset(q for q in range(n) if rng.random() < 0.5) for _ in range(rng.randint(1, 2)))
        en = None if rng.random() < 0.7 else frozenset(q for q in range(n) if rng.random() < 0.8)
        sensors.append(SensingAction(i, f"s{i}", tuple(f"f{j}" for j in range(len(forms))), forms, en))
    good = [frozenset(q for q in range(n) if rng.random() < 0.5) for _ in range(3)]

    def fp(b):
        return len(b) == 1 or any(b <= x for x in good)

    root = frozenset(q for q in range(n) if rng.random() < 0.8) or frozenset({0, 1})
    return root, sensors, fp


def test_plan_sensing_equals_tree_attractor():
    rng = random.Random(3)
    solvable = 0
    for _ in range(400):
        root, sensors, fp = _random_instance(rng)
        full = solve_sensing(build_brtree(root, sensors, fp))
        fast = plan_sensing(root, sensors, fp)
        assert full.solvable == fast.solvable
        assert full.solvable == (brute_minmax(root, sensors, fp) != float("inf"))
        if not full.solvable:
            continue
        solvable += 1
        assert fast.rank[root] == full.rank[root] == brute_minmax(root, sensors, fp)
        for b, r in fast.rank.items():
            assert full.rank[b] == r
            if r:
                assert fast.choice[b] == full.choice[b]
        for truth in root:
            assert _run_phase(fast, sensors, truth, fp) <= fast.rank[root]
    assert solvable > 50


def test_tree_leaves():
    sensors = [SensingAction(0, "s", ("f",), (frozenset({0}),))]
    tree = build_brtree(frozenset({0, 1, 2}), sensors, singleton)
    assert tree.leaf[frozenset({0})] == PROGRESS_DEFINED
    assert tree.leaf[frozenset({1, 2})] == UNREFINABLE
    assert tree.depth() == 1
    assert not solve_sensing(tree).solvable
    assert not plan_sensing(frozenset({0, 1, 2}), sensors, singleton).solvable


def test_disabled_sensor_is_not_offered():
    sensors = [SensingAction(0, "s", ("f",), (frozenset({0}),), enabled=frozenset({0, 1}))]
    assert splits(frozenset({0, 1}), sensors)
    assert splits(frozenset({0, 1, 2}), sensors) == []


def test_cache():
    sensors = binary_sensors(8, thresholds=False)
    root = frozenset(range(8))
    cache = StrategyCache()
    assert cache.lookup(root) is None
    strat = plan_sensing(root, sensors, singleton)
    cache.insert(root, strat)
    assert cache.lookup(root) is strat
    # sub-beliefs of the strategy are served too
    sub = next(b for b in strat.rank if 1 < len(b) < 8)
    assert cache.lookup(sub) is strat
    assert cache.hits == 2 and cache.misses == 1


def test_cache_concurrent_inserts():
    cache = StrategyCache()
    sensors = binary_sensors(8, thresholds=False)
    roots = [frozenset(range(k)) for k in range(2, 9)]

    def work():
        for r in roots:
            if cache.lookup(r) is None:
                cache.insert(r, plan_sensing(r, sensors, singleton))

    threads = [threading.Thread(target=work) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for r in roots:
        assert cache.lookup(r).rank[r] == math.ceil(math.log2(len(r)))
