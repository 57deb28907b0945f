"""Wumpus gridworld: a robot visits three goal cells in order while a hidden,
randomly moving Wumpus roams a restricted region.

Coordinates are 0-based ``(x, y)`` with ``y`` growing northwards. In the
default layout six cells in the south-west corner lie outside the Wumpus
region (which is the other 43 cells)::

    (0,2)
    (0,1)
    (0,0) (1,0) (2,0) (3,0)

The goals R1=(3,0), R2=(0,2), R3=(0,0) sit on this safe L. The robot can
always follow the L, but cutting the corner through region cells is faster
and only safe when the Wumpus is known to be far away; that is when the
robot has to smell. A region spanning the whole grid with goals on
opposite sides would be lost outright: a Wumpus that shadows the robot's
row blocks every column crossing.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional, Union

from .arena import ENV, SYS, ActionRecord, Arena, SensorDecl, StateRecord, serialize_arena
from .automata import DBA, compile_pattern, parse_spec
from .game import ProductGame, SolveResult, build_product, solve_buchi
from .logic import And, Cmp, Const, Or
from .observation import ObservationModel, observation_model
from .sensing import sensors_from_arena

__all__ = [
    "ROBOT_MOVES",
    "WUMPUS_MOVES",
    "WUMPUS_STAY",
    "SPEC",
    "WumpusConfig",
    "WumpusInstance",
    "default_region",
    "SAFE_CELLS",
    "stench",
    "build_wumpus_arena",
    "build_wumpus",
    "wumpus_documents",
]

ROBOT_MOVES = {
    "N": (0, 1), "S": (0, -1), "E": (1, 0), "W": (-1, 0),
    "NE": (1, 1), "NW": (-1, 1), "SE": (1, -1), "SW": (-1, -1),
}
WUMPUS_MOVES = {"wN": (0, 1), "wS": (0, -1), "wE": (1, 0), "wW": (-1, 0)}
WUMPUS_STAY = "wStay"  # only offered where no move stays in the region, or for a static wumpus
SPEC = "GF seq(R1,R2,R3) & G !col"

Cell = tuple


SAFE_CELLS = ((0, 0), (1, 0), (2, 0), (3, 0), (0, 1), (0, 2))


def default_region(width=7, height=7, outside=SAFE_CELLS) -> frozenset:
    out = set(outside)
    return frozenset((x, y) for x in range(width) for y in range(height) if (x, y) not in out)


@dataclass
class WumpusConfig:
    width: int = 7
    height: int = 7
    goals: tuple = ((3, 0), (0, 2), (0, 0))  # R1, R2, R3
    region: frozenset = field(default_factory=default_region)
    robot_start: Cell = (1, 0)
    wumpus_start: Cell = (4, 4)
    wumpus_known: bool = False  # False: initially anywhere in the region
    wumpus_static: bool = False
    smell_radius: Optional[int] = None  # None: smell any cell; r: only within r of the robot
    sensors: bool = True

    def validate(self) -> None:
        def inb(c):
            return 0 <= c[0] < self.width and 0 <= c[1] < self.height

        if len(self.goals) != 3 or len(set(self.goals)) != 3:
            raise ValueError("need three distinct goal cells")
        if not all(inb(c) for c in self.goals):
            raise ValueError("goal cell out of bounds")
        if not self.region or not all(inb(c) for c in self.region):
            raise ValueError("region must be a nonempty set of in-bounds cells")
        if not inb(self.robot_start):
            raise ValueError("robot start out of bounds")
        if self.wumpus_start not in self.region:
            raise ValueError("wumpus must start inside the region")
        if self.robot_start == self.wumpus_start:
            raise ValueError("robot and wumpus cannot start on the same cell")


def stench(wumpus: Cell, probe: Cell, region=None) -> bool:
    """Stench at ``probe``: the wumpus is on it or on one of the 8 surrounding cells."""
    if region is not None and wumpus not in region:
        return False
    return max(abs(wumpus[0] - probe[0]), abs(wumpus[1] - probe[1])) <= 1


def _stench_formula(probe: Cell, region) -> object:
    cells = sorted(c for c in region if stench(c, probe))
    if not cells:
        return Const(False)
    terms = tuple(And((Cmp("xw", x), Cmp("yw", y))) for x, y in cells)
    return terms[0] if len(terms) == 1 else Or(terms)


def build_wumpus_arena(cfg: WumpusConfig) -> Arena:
    cfg.validate()
    cells = [(x, y) for y in range(cfg.height) for x in range(cfg.width)]
    region = sorted(cfg.region, key=lambda c: (c[1], c[0]))
    ap_names = ["R1", "R2", "R3", "col"]
    pred_names = ["t", "xr", "yr", "xw", "yw"]
    hidden = frozenset({3, 4})
    observable = frozenset({0, 1, 2})
    goal_ap = {c: i for i, c in enumerate(cfg.goals)}

    states = []
    index = {}
    for turn in (SYS, ENV):
        for r in cells:
            for w in region:
                label = set()
                if r in goal_ap:
                    label.add(goal_ap[r])
                if r == w:
                    label.add(3)
                tag = "r" if turn == SYS else "w"
                name = f"{tag}{r[0]}{r[1]}_{w[0]}{w[1]}"
                index[(r, w, turn)] = len(states)
                states.append(StateRecord(name, turn, frozenset(label),
                                          (1 if turn == SYS else 0, r[0], r[1], w[0], w[1]), observable))

    region_set = set(region)
    moves = {} if cfg.wumpus_static else WUMPUS_MOVES
    stuck = {c for c in region if not any((c[0] + dx, c[1] + dy) in region_set for dx, dy in moves.values())}
    wnames = list(moves) + ([WUMPUS_STAY] if stuck else [])
    actions = [ActionRecord(n, SYS) for n in ROBOT_MOVES] + [ActionRecord(n, ENV) for n in wnames]
    robot_ids = {n: i for i, n in enumerate(ROBOT_MOVES)}
    wumpus_ids = {n: len(ROBOT_MOVES) + i for i, n in enumerate(wnames)}
    transitions = []
    for st in states:
        _, rx, ry, wx, wy = st.valuation
        succ = {}
        if st.owner == SYS:
            for n, (dx, dy) in ROBOT_MOVES.items():
                nr = (rx + dx, ry + dy)
                if 0 <= nr[0] < cfg.width and 0 <= nr[1] < cfg.height:
                    succ[robot_ids[n]] = index[(nr, (wx, wy), ENV)]
        elif (wx, wy) in stuck:
            succ[wumpus_ids[WUMPUS_STAY]] = index[((rx, ry), (wx, wy), SYS)]
        else:
            for n, (dx, dy) in moves.items():
                nw = (wx + dx, wy + dy)
                if nw in region_set:
                    succ[wumpus_ids[n]] = index[((rx, ry), nw, SYS)]
        transitions.append(succ)

    s0 = index[(cfg.robot_start, cfg.wumpus_start, SYS)]
    initial = [s0]
    if not cfg.wumpus_known:
        initial += [index[(cfg.robot_start, w, SYS)] for w in region
                    if w != cfg.wumpus_start and w != cfg.robot_start]

    sensors = []
    if cfg.sensors:
        for c in cells:
            where = None
            if cfg.smell_radius is not None:
                where = frozenset(
                    i for i, st in enumerate(states)
                    if max(abs(st.valuation[1] - c[0]), abs(st.valuation[2] - c[1])) <= cfg.smell_radius
                )
            sensors.append(SensorDecl(f"smell_{c[0]}_{c[1]}", (_stench_formula(c, cfg.region),), where))

    arena = Arena(states, actions, s0, transitions, ap_names, pred_names,
                  initial=initial, sensors=sensors, hidden=hidden)
    arena.validate()
    return arena


@dataclass
class WumpusInstance:
    config: WumpusConfig
    arena: Arena
    dba: DBA
    game: ProductGame
    om: ObservationModel
    sensors: list
    solution: Optional[SolveResult] = None
    build_seconds: float = 0.0
    solve_seconds: float = 0.0

    def cell_of(self, q: int) -> tuple:
        """(robot cell, wumpus cell) of a product state."""
        v = self.game.valuation(q)
        return (v[1], v[2]), (v[3], v[4])


def build_wumpus(cfg: Union[WumpusConfig, None] = None, solve: bool = True) -> WumpusInstance:
    cfg = cfg or WumpusConfig()
    t0 = time.perf_counter()
    arena = build_wumpus_arena(cfg)
    dba = compile_pattern(parse_spec(SPEC), arena.ap_names)
    game = build_product(arena, dba)
    om = observation_model(game)
    sensors = sensors_from_arena(game)
    t1 = time.perf_counter()
    inst = WumpusInstance(cfg, arena, dba, game, om, sensors, build_seconds=t1 - t0)
    if solve:
        inst.solution = solve_buchi(game)
        inst.solve_seconds = time.perf_counter() - t1
    return inst


def wumpus_documents(cfg: Union[WumpusConfig, None] = None) -> tuple:
    """(model document, specification text) for the generic pipeline."""
    arena = build_wumpus_arena(cfg or WumpusConfig())
    return serialize_arena(arena), SPEC + "\n"
