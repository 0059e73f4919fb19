"""Command line front end.

Subcommands
    eval      evaluate one task at explicit control settings, JSON out
    allocate  solve one scene at one budget, CSV + JSON summary out
    sweep     Monte Carlo budget sweep, aggregate and per-run CSV out

Exit codes: 0 success, 1 runtime or I/O failure, 2 usage or validation
failure.  The environment variable SAPA_RRM_THREADS caps sweep
parallelism (unset or 0 picks one worker per CPU).

Output schemas (all files start with the version line "# sapa-rrm v1",
UTF-8, LF line endings):

    allocation.csv
        task,weight,range_km,bearing_deg,rcs_dbsm,maneuver_std,
        corr_time,target_type,t_d_ms,f_t_hz,n_h,q_mrad,g,
        weighted_utility
        one row per task; control and quality fields are empty when the
        task received no resource

    active_tracks.csv / total_utility.csv / mean_angular_error_mrad.csv
        budget,grid,mean,std,lo2sigma,hi2sigma
        rows sorted by (grid, budget) ascending

    element_histogram.csv
        budget,n_h,mean_count
        mean allocated-task count per element bin at selected budgets

    runs/run_<r>.csv
        budget,grid,active_tracks,total_utility,
        mean_angular_error_mrad,histogram
        histogram cells are semicolon-joined "n_h:count" pairs
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, RunConfig, load_config, parse_config
from .experiment import (
    SCHEMA_HEADER,
    _atomic_write,
    fmt_budget,
    fmt_error_mrad,
    fmt_utility,
    sweep,
    write_sweep_outputs,
)
from .qram import allocate, build_majorant, enumerate_setpoints
from .radar_model import ControlPoint, Environment, evaluate, linear_to_db
from .scenario import generate_scene


def _load(parser: argparse.ArgumentParser, path: str | None) -> RunConfig:
    try:
        if path is None:
            return parse_config({})
        return load_config(path)
    except FileNotFoundError:
        parser.error(f"--config: no such file: {path}")
    except ConfigError as exc:
        parser.error(f"--config: {exc}")


def _threads_from_env(parser: argparse.ArgumentParser) -> int | None:
    raw = os.environ.get("SAPA_RRM_THREADS", "").strip()
    if not raw:
        return None
    try:
        value = int(raw)
    except ValueError:
        parser.error(f"SAPA_RRM_THREADS: not an integer: {raw!r}")
    if value < 0:
        parser.error("SAPA_RRM_THREADS: must be >= 0")
    return value


def _evaluation_json(ev) -> dict:
    if not ev.feasible:
        return {"feasible": False, "quality_mrad": None, "resource": None,
                "utility": None, "snr_db": None, "v0": None, "p_d": None,
                "n_looks": None}
    return {
        "feasible": True,
        "quality_mrad": round(ev.quality * 1e3, 4),
        "resource": round(ev.resource, 8),
        "utility": round(ev.utility, 6),
        "snr_db": round(linear_to_db(ev.snr_linear), 4),
        "v0": round(ev.track_sharpness, 6),
        "p_d": round(ev.p_d, 6),
        "n_looks": round(ev.n_looks, 4),
    }


def _parse_range_sweep(parser: argparse.ArgumentParser,
                       text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        parser.error("--range-sweep must be START_KM:STOP_KM:COUNT")
    try:
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError:
        parser.error("--range-sweep must be START_KM:STOP_KM:COUNT "
                     "with numeric fields")
    if start <= 0 or stop <= start or count < 2:
        parser.error("--range-sweep needs 0 < START < STOP and COUNT >= 2")
    step = (stop - start) / (count - 1)
    return [start + k * step for k in range(count)]


def cmd_eval(parser: argparse.ArgumentParser,
             args: argparse.Namespace) -> int:
    cfg = _load(parser, args.config)
    consts = cfg.radar
    if not -90.0 < args.bearing < 90.0:
        parser.error("--bearing must lie strictly inside (-90, 90) degrees")
    if args.maneuver_std <= 0:
        parser.error("--maneuver-std must be positive")
    if args.corr_time <= 0:
        parser.error("--corr-time must be positive")
    if args.td <= 0:
        parser.error("--td must be positive")
    if args.ft <= 0:
        parser.error("--ft must be positive")
    if not 1 <= args.nh <= consts.n_h_total:
        parser.error(f"--nh must lie in [1, {consts.n_h_total}]")
    if args.range is not None and args.range <= 0:
        parser.error("--range must be positive")
    if args.range is None and args.range_sweep is None:
        parser.error("one of --range or --range-sweep is required")

    cp = ControlPoint(t_d=args.td * 1e-3, f_t=args.ft, n_h=args.nh)

    def env_at(range_km: float) -> Environment:
        return Environment(range=range_km * 1e3,
                           bearing=math.radians(args.bearing),
                           rcs=10.0 ** (args.rcs / 10.0),
                           maneuver_std=args.maneuver_std,
                           corr_time=args.corr_time)

    if args.range_sweep is not None:
        for km in _parse_range_sweep(parser, args.range_sweep):
            ev = evaluate(cp, env_at(km), consts, cfg.utility)
            row = {"range_km": round(km, 6), **_evaluation_json(ev)}
            print(json.dumps(row))
        return 0
    ev = evaluate(cp, env_at(args.range), consts, cfg.utility)
    print(json.dumps(_evaluation_json(ev), indent=2))
    return 0


def cmd_allocate(parser: argparse.ArgumentParser,
                 args: argparse.Namespace) -> int:
    cfg = _load(parser, args.config)
    if not 0.0 < args.budget <= 1.0:
        parser.error("--budget must lie in (0, 1]")
    grid_name = args.grid if args.grid is not None else cfg.grid_names[0]
    if grid_name not in cfg.grid_names:
        parser.error(f"--grid: unknown grid {grid_name!r} "
                     f"(defined grids: {list(cfg.grid_names)})")
    grid = cfg.grid(grid_name)
    scene_cfg = cfg.scene
    if args.scene_seed is not None:
        scene_cfg = replace(scene_cfg, seed=args.scene_seed)
    scene = generate_scene(scene_cfg)

    majorants = [build_majorant(enumerate_setpoints(
        task.environment, task.weight, grid, cfg.radar, cfg.utility))
        for task in scene.tasks]
    result = allocate(majorants, args.budget)

    lines = [SCHEMA_HEADER,
             "task,weight,range_km,bearing_deg,rcs_dbsm,maneuver_std,"
             "corr_time,target_type,t_d_ms,f_t_hz,n_h,q_mrad,g,"
             "weighted_utility"]
    for i, (task, asg) in enumerate(zip(scene.tasks, result.assignments)):
        env = task.environment
        row = [str(i), fmt_utility(task.weight),
               f"{env.range / 1e3:.3f}",
               f"{math.degrees(env.bearing):.4f}",
               f"{linear_to_db(env.rcs):.4f}",
               f"{env.maneuver_std:.4f}",
               f"{env.corr_time:.4f}",
               task.target_type.value]
        if asg is None:
            row += ["", "", "", "", "", fmt_utility(0.0)]
        else:
            sp = asg.set_point
            row += [f"{sp.control.t_d * 1e3:.4f}",
                    f"{sp.control.f_t:.4f}",
                    str(sp.control.n_h),
                    fmt_error_mrad(sp.quality * 1e3),
                    f"{sp.resource:.8f}",
                    fmt_utility(sp.weighted_utility)]
        lines.append(",".join(row))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _atomic_write(out / "allocation.csv", "\n".join(lines) + "\n")
    summary = {
        "budget": args.budget,
        "grid": grid_name,
        "n_targets": len(scene.tasks),
        "scene_seed": scene_cfg.seed,
        "total_resource": round(result.total_resource, 8),
        "total_utility": round(result.total_utility, 6),
        "active_tracks": result.active_track_count,
    }
    _atomic_write(out / "summary.json",
                  json.dumps(summary, indent=2) + "\n")
    print(f"wrote {out / 'allocation.csv'} and {out / 'summary.json'}")
    return 0


def cmd_sweep(parser: argparse.ArgumentParser,
              args: argparse.Namespace) -> int:
    cfg = _load(parser, args.config)
    threads = (args.threads if args.threads is not None
               else _threads_from_env(parser))
    if threads is not None and threads < 0:
        parser.error("--threads must be >= 0")
    result = sweep(cfg.sweep, cfg.radar, cfg.utility, threads=threads)
    written = write_sweep_outputs(result, args.out,
                                  histogram_budgets=cfg.histogram_budgets,
                                  histogram_grid="split")
    print(f"wrote {len(written)} files to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sapa-rrm",
        description="Split-aperture radar resource management: task "
                    "evaluation, greedy allocation and Monte Carlo "
                    "budget sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser(
        "eval", help="evaluate one task at explicit control settings")
    p_eval.add_argument("--config", help="configuration file (JSON)")
    p_eval.add_argument("--range", type=float,
                        help="target range [km]")
    p_eval.add_argument("--range-sweep", metavar="START:STOP:COUNT",
                        help="evaluate over evenly spaced ranges [km], "
                             "one JSON object per line")
    p_eval.add_argument("--bearing", type=float, default=0.0,
                        help="bearing off boresight [deg], default 0")
    p_eval.add_argument("--rcs", type=float, default=0.0,
                        help="radar cross section [dBsm], default 0")
    p_eval.add_argument("--maneuver-std", type=float, required=True,
                        help="acceleration standard deviation [m/s^2]")
    p_eval.add_argument("--corr-time", type=float, required=True,
                        help="maneuver correlation time [s]")
    p_eval.add_argument("--td", type=float, required=True,
                        help="coherent integration time [ms]")
    p_eval.add_argument("--ft", type=float, required=True,
                        help="track update frequency [Hz]")
    p_eval.add_argument("--nh", type=int, required=True,
                        help="horizontal element count")

    p_alloc = sub.add_parser(
        "allocate", help="solve one scene at one budget")
    p_alloc.add_argument("--config", help="configuration file (JSON)")
    p_alloc.add_argument("--budget", type=float, required=True,
                         help="radar time budget, fraction in (0, 1]")
    p_alloc.add_argument("--grid",
                         help="control grid name (default: first in "
                              "config)")
    p_alloc.add_argument("--scene-seed", type=int,
                         help="override the scene seed")
    p_alloc.add_argument("--out", default=".",
                         help="output directory (default: current)")

    p_sweep = sub.add_parser(
        "sweep", help="Monte Carlo budget sweep over all grids")
    p_sweep.add_argument("--config", help="configuration file (JSON)")
    p_sweep.add_argument("--out", required=True,
                         help="output directory")
    p_sweep.add_argument("--threads", type=int,
                         help="worker threads (0 = auto; overrides "
                              "SAPA_RRM_THREADS)")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"eval": cmd_eval, "allocate": cmd_allocate,
                "sweep": cmd_sweep}
    try:
        return handlers[args.command](parser, args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
