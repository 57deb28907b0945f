"""Online reactive planning with sensing actions under partial observability."""
from .arena import Arena, ModelError, ModelSemanticError, ModelSyntaxError, parse_arena, parse_model, serialize_arena
from .automata import DBA, SpecError, compile_pattern, load_spec, parse_spec
from .executor import DeadEndError, NotWinningError, RunConfig, RunResult, RunStats, run
from .game import ProductGame, SolveResult, build_product, solve_buchi
from .observation import ContradictionError, ObservationModel, initial_belief, observation_model
from .pipeline import Problem, load_problem
from .sensing import StrategyCache, build_brtree, plan_sensing, sensors_from_arena, solve_sensing
from .strategy import Decision, Planner, f_p
from .wumpus import WumpusConfig, build_wumpus

__version__ = "0.1.0"
