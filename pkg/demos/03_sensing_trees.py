"""
Belief-revision trees
=====================

When the belief is too coarse for a safe move, the planner picks sensing
queries from a tree of belief splits. The best strategy is the attractor of
the beliefs where a move is safe; its rank is the worst-case number of
queries. With sensors that test one bit of a state index the answer is a
binary search, so n candidates need ceil(log2 n) queries.
"""

import math

from senseplan.sensing import SensingAction, build_brtree, plan_sensing, solve_sensing


def bit_sensors(n):
    bits = max(1, (n - 1).bit_length())
    return [SensingAction(k, f"bit{k}", (f"bit{k}",), (frozenset(q for q in range(n) if q >> k & 1),))
            for k in range(bits)]


def known(b):
    return len(b) == 1


print(" n  nodes  rank  ceil(log2 n)")
for n in (2, 3, 5, 8, 13, 21, 32):
    root = frozenset(range(n))
    tree = build_brtree(root, bit_sensors(n), known)
    strat = solve_sensing(tree)
    print(f"{n:2d} {len(tree.nodes):6d} {strat.rank[root]:5d} {math.ceil(math.log2(n)):13d}")

# Sensors that test one candidate at a time force a linear search; a single
# extra halving sensor already cuts the worst case.
n = 8
root = frozenset(range(n))
one_each = [SensingAction(q, f"is{q}", (f"is{q}",), (frozenset({q}),)) for q in range(n)]
print("\nsingleton tests only:", plan_sensing(root, one_each, known).rank[root])
halves = one_each + [SensingAction(n, "low", ("low",), (frozenset(range(n // 2)),))]
strat = plan_sensing(root, halves, known)
print("with a halving test: ", strat.rank[root], "first query:", halves[strat.choice[root][0]].name)
