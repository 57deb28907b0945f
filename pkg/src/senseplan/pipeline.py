"""Glue: model text + specification text -> solved game ready to execute."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

from .arena import Arena, parse_model
from .automata import DBA, SpecError, load_spec, parse_dba
from .game import ProductGame, SolveResult, build_product, solve_buchi
from .observation import ObservationModel, observation_model
from .sensing import sensors_from_arena

__all__ = ["Problem", "load_problem"]


@dataclass
class Problem:
    arena: Arena
    dba: DBA
    game: ProductGame
    om: ObservationModel
    sensors: list
    solution: SolveResult
    build_seconds: float
    solve_seconds: float


def load_problem(model_text: str, spec_text: Optional[str] = None) -> Problem:
    """Parse, build the product, and solve.

    Without ``spec_text`` the model document must carry ``dba`` lines.
    """
    t0 = time.perf_counter()
    doc = parse_model(model_text)
    arena = doc.arena
    if spec_text is not None and spec_text.strip():
        dba = load_spec(spec_text, arena.ap_names)
    elif doc.dba_lines:
        dba = parse_dba(doc.dba_lines, arena.ap_names)
    else:
        raise SpecError("no specification given and the model has no dba declarations")
    game = build_product(arena, dba)
    om = observation_model(game)
    sensors = sensors_from_arena(game)
    t1 = time.perf_counter()
    sr = solve_buchi(game)
    t2 = time.perf_counter()
    return Problem(arena, dba, game, om, sensors, sr, t1 - t0, t2 - t1)
