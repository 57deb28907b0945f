"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 model/specification error,
3 run-time dead end or belief contradiction.
"""
from __future__ import annotations

import argparse
import json
import os
import statistics
import sys
from typing import Optional

from .arena import ModelError
from .automata import SpecError
from .executor import DeadEndError, NotWinningError, RunConfig, belief_series_text, run, trace_lines
from .game import solve_result_records
from .logic import FormulaError
from .observation import ContradictionError
from .pipeline import load_problem
from .sensing import PROGRESS_DEFINED, build_brtree, solve_sensing
from .strategy import Planner
from .wumpus import WumpusConfig, build_wumpus, wumpus_documents

EXIT_OK, EXIT_USAGE, EXIT_MODEL, EXIT_RUNTIME = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _spec_text(arg: Optional[str]) -> Optional[str]:
    if arg is None or arg == "-":
        return None
    return _read(arg) if os.path.exists(arg) else arg


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _env_policy(arg: str):
    if arg in ("random", "stationary"):
        return arg
    if arg.startswith("scripted:"):
        return _read(arg.split(":", 1)[1]).split()
    raise UsageError(f"--env must be random, stationary or scripted:<file>, got {arg!r}")


def _run_config(args, seed) -> RunConfig:
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    return RunConfig(seed=seed, max_steps=args.steps, env_policy=_env_policy(args.env),
                     sensing_budget_per_turn=args.budget, belief_full=args.belief_full,
                     record_latency=args.latency)


def cmd_solve(args) -> int:
    p = load_problem(_read(args.model), _spec_text(args.spec))
    out = {
        "arena_states": len(p.arena.states),
        "product_states": len(p.game),
        "win1": len(p.solution.win1),
        "m": p.solution.m,
        "q0_winning": p.game.q0 in p.solution.win1,
        "build_seconds": round(p.build_seconds, 6),
        "solve_seconds": round(p.solve_seconds, 6),
    }
    if args.export:
        _write(args.export, json.dumps(solve_result_records(p.game, p.solution), indent=1) + "\n")
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK


def _simulate_one(p, cfg, planner=None):
    return run(p.game, p.solution, p.om, p.sensors, cfg, planner=planner)


def cmd_simulate(args) -> int:
    p = load_problem(_read(args.model), _spec_text(args.spec))
    cfg = _run_config(args, args.seed)
    try:
        res = _simulate_one(p, cfg)
    except DeadEndError as exc:
        if exc.result is not None:
            _dump_run(args, exc.result)
        print(f"dead end: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    _dump_run(args, res)
    print(res.stats.to_json())
    return EXIT_OK


def _dump_run(args, res) -> None:
    if args.trace:
        _write(args.trace, trace_lines(res.trace))
    if args.stats:
        _write(args.stats, res.stats.to_json() + "\n")
    if args.series:
        _write(args.series, belief_series_text(res.belief_sizes))


def _summary_rows(rows):
    def col(k):
        return [r[k] for r in rows]

    return {
        "runs": len(rows),
        "f_visits_mean": statistics.fmean(col("f_visits")),
        "f_visits_min": min(col("f_visits")),
        "max_belief": max(col("max_belief")),
        "sensing_mean": statistics.fmean(col("sensing_actions")),
        "mean_latency_s": statistics.fmean(col("mean_latency_s")),
        "dead_ends": sum(col("dead_end")),
    }


def _sweep(p, args, seeds):
    rows = []
    planner = Planner(p.game, p.solution, p.sensors)
    for seed in seeds:
        cfg = _run_config(args, seed)
        try:
            stats = _simulate_one(p, cfg, planner).stats
        except DeadEndError as exc:
            stats = exc.result.stats
        row = {"seed": seed, "f_visits": stats.f_visits, "max_belief": stats.max_belief,
               "sensing_actions": stats.sensing_actions, "cache_hits": stats.cache_hits,
               "mean_latency_s": stats.mean_latency_s, "dead_end": stats.dead_end}
        rows.append(row)
        print("\t".join(str(row[k]) for k in row))
    return rows


def cmd_sweep(args) -> int:
    p = load_problem(_read(args.model), _spec_text(args.spec))
    print("seed\tf_visits\tmax_belief\tsensing_actions\tcache_hits\tmean_latency_s\tdead_end")
    rows = _sweep(p, args, range(args.seed, args.seed + args.seeds))
    print(json.dumps(_summary_rows(rows), sort_keys=True))
    return EXIT_RUNTIME if any(r["dead_end"] for r in rows) else EXIT_OK


def cmd_bench(args) -> int:
    cfg = WumpusConfig(wumpus_known=args.known, wumpus_static=args.static, smell_radius=args.smell_radius,
                       sensors=not args.no_sensors)
    if args.export_model:
        model, spec = wumpus_documents(cfg)
        _write(args.export_model, model)
        _write(args.export_model + ".spec", spec)
    inst = build_wumpus(cfg)
    note = " (assumed: wumpus picks uniformly among its enabled moves)" if args.env == "random" else ""
    print(f"# env policy: {args.env}{note}")
    print(f"# layout (assumed default, configurable): goals={list(cfg.goals)} robot_start={cfg.robot_start} "
          f"region={len(cfg.region)} cells")
    print(f"# product states={len(inst.game)} win1={len(inst.solution.win1)} m={inst.solution.m} "
          f"build_s={inst.build_seconds:.3f} solve_s={inst.solve_seconds:.3f}")
    print("seed\tf_visits\tmax_belief\tsensing_actions\tcache_hits\tmean_latency_s\tdead_end")
    rows = _sweep(inst_as_problem(inst), args, range(args.seed, args.seed + args.seeds))
    summary = _summary_rows(rows)
    summary.update(build_seconds=inst.build_seconds, solve_seconds=inst.solve_seconds)
    print(json.dumps(summary, sort_keys=True))
    return EXIT_RUNTIME if summary["dead_ends"] else EXIT_OK


def inst_as_problem(inst):
    from .pipeline import Problem

    return Problem(inst.arena, inst.dba, inst.game, inst.om, inst.sensors, inst.solution,
                   inst.build_seconds, inst.solve_seconds)


def _resolve_belief(p, text: str) -> frozenset:
    """Product names ``s|h`` are taken as is; a bare arena name ``s`` means
    the product state it starts in, ``(s, step(h0, L(s)))``."""
    g = p.game
    names = {g.state_name(q): q for q in range(len(g))}
    out = set()
    for tok in text.split():
        if "|" in tok:
            if tok not in names:
                raise ModelError(f"unknown product state {tok}")
            out.add(names[tok])
            continue
        try:
            s = p.arena.state_id(tok)
        except KeyError:
            raise ModelError(f"unknown state {tok}") from None
        q = g.find(s, p.dba.step(p.dba.h0, p.arena.label_names(s)))
        if q is None:
            raise ModelError(f"state {tok} is not reachable in the product")
        out.add(q)
    if not out:
        raise ModelError("empty belief")
    return frozenset(out)


def cmd_export_brt(args) -> int:
    p = load_problem(_read(args.model), _spec_text(args.spec))
    belief = _resolve_belief(p, _read(args.belief))
    planner = Planner(p.game, p.solution, p.sensors)
    tree = build_brtree(belief, p.sensors, planner.fp_defined)
    strat = solve_sensing(tree)
    g = p.game

    def names(b):
        return sorted(g.state_name(q) for q in b)

    nodes = []
    order = {b: i for i, b in enumerate(sorted(tree.nodes, key=lambda b: (-len(b), sorted(b))))}
    for b, i in sorted(order.items(), key=lambda kv: kv[1]):
        nodes.append({
            "id": i,
            "belief": names(b),
            "leaf": tree.leaf.get(b),
            "rank": strat.rank.get(b),
            "choice": None if b not in strat.choice else {
                "sensor": p.sensors[strat.choice[b][0]].name,
                "formula": p.sensors[strat.choice[b][0]].formula_text(strat.choice[b][1]),
            },
            "splits": [
                {"sensor": p.sensors[sp.sensor].name, "formula": p.sensors[sp.sensor].formula_text(sp.formula),
                 "true": order[sp.true_part], "false": order[sp.false_part]}
                for sp in tree.children[b]
            ],
        })
    doc = {"root": order[tree.root], "solvable": strat.solvable, "root_rank": strat.rank.get(tree.root),
           "progress_defined_leaves": sum(1 for v in tree.leaf.values() if v == PROGRESS_DEFINED),
           "nodes": nodes}
    text = json.dumps(doc, indent=1) + "\n"
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _add_run_flags(sp, seeds=False):
    sp.add_argument("--steps", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    if seeds:
        sp.add_argument("--seeds", type=int, default=20)
    sp.add_argument("--env", default="random", help="random | stationary | scripted:<file>")
    sp.add_argument("--budget", type=int, default=None, help="max sensing queries per system turn")
    sp.add_argument("--belief-full", action="store_true", help="include full beliefs in traces")
    sp.add_argument("--latency", action="store_true", help="record decision latency in traces")


def make_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="senseplan", description="Online reactive planning with sensing actions.")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    sp = sub.add_parser("solve", help="build and solve the product game")
    sp.add_argument("model")
    sp.add_argument("spec", nargs="?")
    sp.add_argument("--export", help="write the per-state solution as JSON")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("simulate", help="run the online planner once")
    sp.add_argument("model")
    sp.add_argument("spec", nargs="?")
    _add_run_flags(sp)
    sp.add_argument("--trace", help="write JSON-lines trace")
    sp.add_argument("--stats", help="write run statistics JSON")
    sp.add_argument("--series", help="write (step, belief size) series")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sweep", help="simulate over consecutive seeds")
    sp.add_argument("model")
    sp.add_argument("spec", nargs="?")
    _add_run_flags(sp, seeds=True)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("bench-wumpus", help="generate and run the Wumpus gridworld")
    _add_run_flags(sp, seeds=True)
    sp.add_argument("--known", action="store_true", help="wumpus start is known")
    sp.add_argument("--static", action="store_true", help="the wumpus never moves")
    sp.add_argument("--smell-radius", type=int, default=None, help="smell only cells within r of the robot")
    sp.add_argument("--no-sensors", action="store_true")
    sp.add_argument("--export-model", help="also write the generated model (and <path>.spec)")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("export-brt", help="dump a belief-revision tree as JSON")
    sp.add_argument("model")
    sp.add_argument("spec", nargs="?")
    sp.add_argument("--belief", required=True, help="file listing state names (arena or product)")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_export_brt)
    return ap


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("a command is required")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ModelError, SpecError, FormulaError, OSError) as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except (DeadEndError, ContradictionError, NotWinningError) as exc:
        print(f"run-time error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
