"""
Hunting the goals with a hidden Wumpus
======================================

A 7x7 grid. The robot must visit R1, R2, R3 in order forever and never
share a cell with the Wumpus, which wanders unseen through 43 cells. Six
cells in the south-west corner are Wumpus-free and hold the goals; cutting
across the region is quicker but needs a sniff first.
"""

import sys

from senseplan import RunConfig, build_wumpus, run

steps = int(sys.argv[1]) if len(sys.argv) > 1 else 1000

inst = build_wumpus()
sol = inst.solution
print(f"product: {len(inst.game)} states, built in {inst.build_seconds:.2f} s")
print(f"winning: {len(sol.win1)} states, m = {sol.m}, solved in {inst.solve_seconds:.2f} s")


# Draw the grid: goals, region cells (.) and safe cells (_).
def draw(robot=None, wumpus_cells=()):
    goals = {c: f"R{i + 1}" for i, c in enumerate(inst.config.goals)}
    for y in reversed(range(inst.config.height)):
        row = []
        for x in range(inst.config.width):
            c = (x, y)
            if c == robot:
                row.append(" @")
            elif c in goals:
                row.append(goals[c])
            elif c in wumpus_cells:
                row.append(" w")
            else:
                row.append(" ." if c in inst.config.region else " _")
        print(" ".join(row))


draw(inst.config.robot_start)

# One run under a uniformly random Wumpus.
res = run(inst.game, sol, inst.om, inst.sensors, RunConfig(seed=0, max_steps=steps, belief_full=True))
st = res.stats
print(f"\n{steps} steps: F visited {st.f_visits} times, {st.sensing_actions} sensing queries,"
      f" max belief {st.max_belief}, mean decision {st.mean_latency_s * 1e3:.3f} ms")

# Where does the robot think the Wumpus might be right after its first sniff?
first = next(e for e in res.trace if e["phase"] == "Sensing")
print(f"\nafter {first['sensor']} -> {first['outcome']} (step {first['step']}):")
name = first["truth"].split("|")[0]
robot = (int(name[1]), int(name[2]))
cells = {(int(b.split("_")[1][0]), int(b.split("_")[1][1])) for b in first["belief"]}
draw(robot, cells)
