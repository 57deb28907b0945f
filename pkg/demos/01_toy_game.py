"""
A two-door toy problem
======================

The robot stands in front of two doors. Behind one is the goal, behind the
other a trap, and the robot cannot see which is which. A sensor ``look``
tells it which side the goal is on. The planner solves the game as if it
could see everything, then senses only when its belief is too coarse for
a safe move.
"""

from senseplan import load_problem, RunConfig, run
from senseplan.observation import initial_belief

MODEL = """
ap goal bad
pred side hidden
state a sys {} side=0
state a2 sys {} side=1
state l env {goal} side=0
state r env {bad} side=1
state l2 env {bad} side=0
state r2 env {goal} side=1
init a a2
trans a left@sys l
trans a right@sys l2
trans a2 left@sys r
trans a2 right@sys r2
trans l back@env a
trans r back@env a2
trans l2 back@env a
trans r2 back@env a2
sensor look : side=1
"""

p = load_problem(MODEL, "GF goal & G !bad")
g, sr = p.game, p.solution

# The product pairs each arena state with an automaton state.
print("product states:", len(g), " winning:", len(sr.win1), " m =", sr.m)
for q in sorted(sr.win1, key=lambda q: (sr.rank[q], q)):
    move = g.action_names[sr.ws[q]] if q in sr.ws else "-"
    print(f"  rank {sr.rank[q]}  {g.state_name(q):10s}  strategy: {move}")

# Both starting positions look the same to the robot.
b0 = initial_belief(g, p.om)
print("initial belief:", sorted(g.state_name(q) for q in b0))

# One sensing query per round resolves the doubt.
res = run(g, sr, p.om, p.sensors, RunConfig(seed=0, max_steps=12))
for e in res.trace:
    what = e.get("action") or f'{e["sensor"]}? {e["outcome"]}'
    print(f'{e["step"]:3d} {e["phase"]:9s} {what:12s} |B|={e["belief_size"]} truth={e["truth"]}')
print(res.stats.to_json())
