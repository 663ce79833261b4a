"""Command line entry point: ``udua {gen,oracle,solve,build-kb,bench}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import yaml

from .association import build_rate_matrix, solve_km
from .channel import ChannelParams, build_gain_table, params_from_mapping
from .deployment import Deployment, SAConfig, exhaustive_search, random_solution, simulated_annealing
from .harness import build_experiment_database, emit_results, load_experiment_config, run_experiment
from .knowledge import build_database, load_database, save_database, solve_online
from .scenario import GridRegion, ScenarioGenConfig, load_user_sets, sample_user_set, save_user_sets

log = logging.getLogger("udua")


def _load_env(config):
    """(region, params) from an optional YAML config with region/channel blocks."""
    if not config:
        return GridRegion(), ChannelParams()
    doc = yaml.safe_load(Path(config).read_text()) or {}
    return GridRegion(**doc.get("region", {})), params_from_mapping(doc.get("channel", {}))


def _one_scenario(path):
    sets = load_user_sets(path)
    if len(sets) != 1:
        raise SystemExit(f"{path} holds {len(sets)} scenarios; expected one")
    return sets[0]


def cmd_gen(args):
    region, params = _load_env(args.config)
    sets = [
        sample_user_set(region, ScenarioGenConfig(args.mu, args.sigma, args.seed + i, args.max_resamples), params)
        for i in range(args.count)
    ]
    save_user_sets(sets, args.out)


def cmd_oracle(args):
    _, params = _load_env(args.config)
    users = _one_scenario(args.scenario)
    dep = json.loads(Path(args.deployment).read_text()) if Path(args.deployment).exists() else json.loads(args.deployment)
    d = Deployment(dep).check(users.region)
    table = build_gain_table(params, users.region)
    assoc = solve_km(build_rate_matrix(users, d, table, params), params.phi)
    out = {"f": assoc.f, "feasible": assoc.feasible, "deployment": d.tolist()}
    if assoc.feasible:
        out["association"] = assoc.assign.tolist()
    print(json.dumps(out))


def cmd_solve(args):
    _, params = _load_env(args.config)
    users = _one_scenario(args.scenario)
    table = build_gain_table(params, users.region)
    start = time.perf_counter()
    if args.method == "to":
        sol = exhaustive_search(users, table, params)
    elif args.method == "sa":
        sol = simulated_annealing(users, table, params, SAConfig(seed=args.seed, inner_solver=args.assoc or "km"))
    elif args.method == "rand":
        sol = random_solution(users, table, params, args.seed, args.assoc or "greedy")
    else:
        if not args.kb:
            raise SystemExit("--method knn needs --kb")
        sol = solve_online(load_database(args.kb), users, args.k, table, params)
    wall = (time.perf_counter() - start) * 1e3
    doc = {"deployment": sol.deployment.tolist(), "f": sol.f, "feasible": sol.feasible, "wall_time_ms": wall}
    text = json.dumps(doc)
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text)


def cmd_build_kb(args):
    _, params = _load_env(args.config)
    paths = sorted(Path(args.scenarios).glob("*.json"))
    scenarios = [s for p in paths for s in load_user_sets(p)]
    if not scenarios:
        raise SystemExit(f"no scenarios under {args.scenarios}")
    table = build_gain_table(params, scenarios[0].region)
    save_database(build_database(scenarios, table, params, n_jobs=args.jobs), args.out)


def cmd_bench(args):
    cfg = load_experiment_config(args.config)
    needed = cfg.exhaustive_evaluations()
    if needed > 1e6 and not args.allow_large:
        raise SystemExit(f"sweep needs ~{needed:.3g} exhaustive evaluations; pass --allow-large to run it")
    if needed > 1e6:
        log.warning("large sweep: ~%.3g exhaustive evaluations", needed)
    db = None
    if cfg.db_size:
        db = load_database(args.kb) if args.kb else build_experiment_database(cfg, n_jobs=args.jobs)
    metrics = run_experiment(cfg, db)
    emit_results(metrics, args.out, "csv")
    emit_results(metrics, args.out, "json")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="udua", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="sample log-normal user sets")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-resamples", type=int, default=1000)
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("oracle", help="optimal association for a fixed deployment")
    p.add_argument("--scenario", required=True)
    p.add_argument("--deployment", required=True, help="JSON [[x,y],...] or a file holding it")
    p.add_argument("--config")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("solve", help="solve one scenario")
    p.add_argument("--method", choices=["to", "sa", "rand", "knn"], required=True)
    p.add_argument("--scenario", required=True)
    p.add_argument("--out")
    p.add_argument("--kb")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--assoc", choices=["km", "greedy"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("build-kb", help="build a knowledge database from scenario files")
    p.add_argument("--scenarios", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--config")
    p.set_defaults(func=cmd_build_kb)

    p = sub.add_parser("bench", help="run a benchmark sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--kb", help="reuse a prebuilt database")
    p.add_argument("--jobs", type=int, default=1, help="workers for the database build")
    p.add_argument("--timing", action="store_true", help="serial online solves (the only mode; kept for scripts)")
    p.add_argument("--allow-large", action="store_true")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        args.func(args)
    except SystemExit:
        raise
    except Exception as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
