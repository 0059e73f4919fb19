"""Monte Carlo budget sweeps comparing aperture allocation strategies.

A sweep regenerates a random scene for every run, solves the allocation
problem over each named control grid for every budget in the sweep, and
aggregates the per-run metrics (active tracks, total utility, mean
angular error, element-count histogram) into means, standard deviations
and +-2 sigma bands.

Aggregation is defined over the per-run values rounded to the CSV
output precision, so re-reading the persisted per-run files and
re-aggregating reproduces the in-memory aggregate bit for bit.
"""

from __future__ import annotations

import hashlib
import math
import os
from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .qram import (
    AllocationResult,
    ControlGrid,
    allocate_many,
    build_majorant,
    enumerate_setpoints,
)
from .radar_model import RadarConstants, UtilityShape
from .scenario import Scene, SceneConfig, generate_scene

SCHEMA_HEADER = "# sapa-rrm v1"

# fixed output precisions; aggregation uses the same rounding so that
# CSV round-trips are exact
def fmt_utility(u: float) -> str:
    return f"{u:.6f}"


def fmt_error_mrad(e: float) -> str:
    return f"{e:.4f}"


def fmt_budget(b: float) -> str:
    return f"{b:.4f}"


def round_utility(u: float) -> float:
    """Utility value as it survives a CSV round-trip."""
    return float(fmt_utility(u))


def round_error_mrad(e: float) -> float:
    """Angular error in mrad as it survives a CSV round-trip."""
    return float(fmt_error_mrad(e))


def derive_run_seed(base_seed: int, run_index: int) -> int:
    """Stable per-run seed, independent of run execution order.

    The first eight bytes (big endian) of sha256("<base>:<run>") keep
    runs statistically independent while staying reproducible across
    platforms and processes.
    """
    digest = hashlib.sha256(f"{base_seed}:{run_index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class SweepConfig:
    """One Monte Carlo comparison campaign."""

    budgets: tuple[float, ...]                     # r_tot values in (0, 1]
    grids: tuple[tuple[str, ControlGrid], ...]     # named control grids
    n_mc: int                                      # Monte Carlo run count
    scene: SceneConfig

    def __post_init__(self) -> None:
        budgets = tuple(float(b) for b in self.budgets)
        object.__setattr__(self, "budgets", budgets)
        if not budgets:
            raise ValueError("budgets must be non-empty")
        if any(not 0.0 < b <= 1.0 for b in budgets):
            raise ValueError("budgets must lie in (0, 1]")
        if any(b >= c for b, c in zip(budgets, budgets[1:])):
            raise ValueError("budgets must be strictly increasing")
        grids = tuple((str(n), g) for n, g in dict(self.grids).items())
        object.__setattr__(self, "grids", grids)
        if not grids:
            raise ValueError("grids must be non-empty")
        names = [n for n, _ in grids]
        if len(set(names)) != len(names) or any(not n for n in names):
            raise ValueError("grid names must be unique and non-empty")
        if self.n_mc < 1:
            raise ValueError("n_mc must be at least 1")

    @property
    def grid_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.grids)

    def grid(self, name: str) -> ControlGrid:
        for n, g in self.grids:
            if n == name:
                return g
        raise KeyError(f"unknown grid {name!r}")


@dataclass(frozen=True)
class RunMetrics:
    """Solver outcome of a single (scene, grid, budget) cell."""

    active_tracks: int
    total_utility: float
    mean_angular_error: float  # [rad] over allocated tasks; nan when none
    element_histogram: tuple[tuple[int, int], ...]  # (n_h, count) per bin

    def histogram_dict(self) -> dict[int, int]:
        return dict(self.element_histogram)


@dataclass(frozen=True)
class CellStats:
    """Across-run statistics of one scalar metric."""

    mean: float
    std: float       # population standard deviation (ddof = 0)
    lo2sigma: float  # mean - 2 std
    hi2sigma: float  # mean + 2 std


@dataclass(frozen=True)
class AggregateMetrics:
    """Across-run statistics for every (grid, budget) cell.

    Scalar metrics map (grid name, budget) to CellStats; the element
    histogram maps the same key to mean allocated-task counts per n_h
    bin.  Angular error statistics are in mrad, matching the CSV files;
    runs with no allocated task are excluded from the error statistics.
    """

    budgets: tuple[float, ...]
    grid_names: tuple[str, ...]
    n_mc: int
    active_tracks: dict[tuple[str, float], CellStats]
    total_utility: dict[tuple[str, float], CellStats]
    mean_angular_error_mrad: dict[tuple[str, float], CellStats]
    element_histogram: dict[tuple[str, float], tuple[tuple[int, float], ...]]


@dataclass(frozen=True)
class RunRecord:
    """All cells of one Monte Carlo run."""

    run_index: int
    seed: int
    cells: dict[tuple[str, float], RunMetrics]  # (grid name, budget)


@dataclass(frozen=True)
class SweepResult:
    """Everything a sweep produced: raw runs plus their aggregate."""

    config: SweepConfig
    run_seeds: tuple[int, ...]
    runs: tuple[RunRecord, ...]
    aggregate: AggregateMetrics


def _metrics_from_allocation(result: AllocationResult,
                             grid: ControlGrid) -> RunMetrics:
    counts = {n: 0 for n in grid.n_h_values}
    errors = []
    for a in result.assignments:
        if a is None:
            continue
        counts[a.set_point.control.n_h] += 1
        errors.append(a.set_point.quality)
    mean_err = float(np.mean(errors)) if errors else math.nan
    return RunMetrics(active_tracks=result.active_track_count,
                      total_utility=result.total_utility,
                      mean_angular_error=mean_err,
                      element_histogram=tuple(sorted(counts.items())))


def evaluate_scene(scene: Scene, grid: ControlGrid,
                   budgets: Sequence[float], consts: RadarConstants,
                   shape: UtilityShape) -> list[RunMetrics]:
    """Solve one scene over one grid for several budgets.

    Set-points are enumerated and hulls built once; only the cheap
    greedy scan repeats per budget.
    """
    majorants = [build_majorant(enumerate_setpoints(task.environment,
                                                    task.weight, grid,
                                                    consts, shape))
                 for task in scene.tasks]
    results = allocate_many(majorants, budgets)
    return [_metrics_from_allocation(res, grid) for res in results]


def run_once(scene: Scene, grid: ControlGrid, r_tot: float,
             consts: RadarConstants,
             shape: UtilityShape) -> RunMetrics:
    """Single (scene, grid, budget) evaluation."""
    return evaluate_scene(scene, grid, [r_tot], consts, shape)[0]


def _cell_stats(values: np.ndarray) -> CellStats:
    valid = values[~np.isnan(values)]
    if valid.size == 0:
        nan = math.nan
        return CellStats(nan, nan, nan, nan)
    mean = float(np.mean(valid))
    std = float(np.std(valid))
    return CellStats(mean=mean, std=std,
                     lo2sigma=mean - 2.0 * std,
                     hi2sigma=mean + 2.0 * std)


def aggregate_runs(runs: Sequence[Mapping[tuple[str, float], RunMetrics]],
                   budgets: Sequence[float],
                   grid_names: Sequence[str]) -> AggregateMetrics:
    """Across-run statistics from per-run metric tables.

    Scalars are rounded to the CSV precision before aggregation and the
    runs are consumed in the given order, so the result is identical
    whether it is computed from in-memory metrics or re-read files.
    """
    active: dict[tuple[str, float], CellStats] = {}
    utility: dict[tuple[str, float], CellStats] = {}
    error: dict[tuple[str, float], CellStats] = {}
    hist: dict[tuple[str, float], tuple[tuple[int, float], ...]] = {}
    for name in grid_names:
        for b in budgets:
            cells = [run[(name, b)] for run in runs]
            active[(name, b)] = _cell_stats(
                np.array([float(m.active_tracks) for m in cells]))
            utility[(name, b)] = _cell_stats(
                np.array([round_utility(m.total_utility) for m in cells]))
            error[(name, b)] = _cell_stats(
                np.array([round_error_mrad(m.mean_angular_error * 1e3)
                          for m in cells]))
            bins = [n for n, _ in cells[0].element_histogram]
            counts = np.array([[m.histogram_dict()[n] for n in bins]
                               for m in cells], dtype=np.float64)
            means = counts.mean(axis=0)
            hist[(name, b)] = tuple(zip(bins, (float(c) for c in means)))
    return AggregateMetrics(budgets=tuple(budgets),
                            grid_names=tuple(grid_names),
                            n_mc=len(runs),
                            active_tracks=active,
                            total_utility=utility,
                            mean_angular_error_mrad=error,
                            element_histogram=hist)


def _auto_threads() -> int:
    return min(32, os.cpu_count() or 1)


def sweep(cfg: SweepConfig, consts: RadarConstants = RadarConstants(),
          shape: UtilityShape = UtilityShape(),
          threads: int | None = None) -> SweepResult:
    """Full Monte Carlo campaign: all runs, grids and budgets.

    Each run regenerates the scene from a seed derived from
    (cfg.scene.seed, run index); the same scene is solved over every
    grid.  (run, grid) cells execute in parallel when threads allows;
    the reduction iterates runs and grids in fixed order, so the result
    does not depend on scheduling.

    Args:
        cfg: campaign description.
        consts, shape: model parameters, published defaults.
        threads: worker count; None or 0 picks one per CPU (capped).

    Returns:
        SweepResult with per-run records and their aggregate.
    """
    if threads is not None and threads < 0:
        raise ValueError("threads must be >= 0")
    n_workers = _auto_threads() if not threads else threads
    seeds = tuple(derive_run_seed(cfg.scene.seed, r)
                  for r in range(cfg.n_mc))
    jobs = [(r, name, grid) for r in range(cfg.n_mc)
            for name, grid in cfg.grids]

    def work(job: tuple[int, str, ControlGrid]):
        r, name, grid = job
        scene = generate_scene(replace(cfg.scene, seed=seeds[r]))
        return evaluate_scene(scene, grid, cfg.budgets, consts, shape)

    if n_workers == 1:
        outputs = [work(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            outputs = list(pool.map(work, jobs))

    table: dict[tuple[int, str], list[RunMetrics]] = {
        (r, name): out for (r, name, _), out in zip(jobs, outputs)}
    runs = []
    for r in range(cfg.n_mc):
        cells: dict[tuple[str, float], RunMetrics] = {}
        for name, _ in cfg.grids:
            for b, metrics in zip(cfg.budgets, table[(r, name)]):
                cells[(name, b)] = metrics
        runs.append(RunRecord(run_index=r, seed=seeds[r], cells=cells))
    aggregate = aggregate_runs([rec.cells for rec in runs],
                               cfg.budgets, cfg.grid_names)
    return SweepResult(config=cfg, run_seeds=seeds, runs=tuple(runs),
                       aggregate=aggregate)


def budget_sweep(cfg: SweepConfig,
                 consts: RadarConstants = RadarConstants(),
                 shape: UtilityShape = UtilityShape(),
                 threads: int | None = None) -> AggregateMetrics:
    """Aggregate statistics of a Monte Carlo campaign."""
    return sweep(cfg, consts, shape, threads).aggregate


def element_histogram_report(
        cfg: SweepConfig, budgets: Sequence[float],
        consts: RadarConstants = RadarConstants(),
        shape: UtilityShape = UtilityShape(),
        threads: int | None = None, grid_name: str = "split",
) -> tuple[tuple[float, tuple[tuple[int, float], ...]], ...]:
    """Mean allocated-task counts per n_h bin at selected budgets.

    Args:
        cfg: campaign description; must contain grid_name.
        budgets: subset of cfg.budgets to report.
        grid_name: which grid's histogram to report.

    Returns:
        Tuple of (budget, ((n_h, mean count), ...)) in budget order.
    """
    requested = tuple(sorted(float(b) for b in budgets))
    missing = [b for b in requested if b not in cfg.budgets]
    if missing:
        raise ValueError(f"budgets not part of the sweep: {missing}")
    sub = replace(cfg, budgets=requested,
                  grids=((grid_name, cfg.grid(grid_name)),))
    agg = budget_sweep(sub, consts, shape, threads)
    return tuple((b, agg.element_histogram[(grid_name, b)])
                 for b in requested)


# ---------------------------------------------------------------------------
# CSV persistence (schema documented in the cli module)

def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _metric_csv(stats: Mapping[tuple[str, float], CellStats],
                budgets: Sequence[float], grid_names: Sequence[str],
                value_fmt) -> str:
    lines = [SCHEMA_HEADER, "budget,grid,mean,std,lo2sigma,hi2sigma"]
    for name in sorted(grid_names):
        for b in budgets:
            s = stats[(name, b)]
            lines.append(",".join(
                [fmt_budget(b), name] +
                [value_fmt(v) for v in (s.mean, s.std,
                                        s.lo2sigma, s.hi2sigma)]))
    return "\n".join(lines) + "\n"


def _histogram_csv(agg: AggregateMetrics, budgets: Sequence[float],
                   grid_name: str) -> str:
    lines = [SCHEMA_HEADER, "budget,n_h,mean_count"]
    for b in budgets:
        for n_h, count in agg.element_histogram[(grid_name, b)]:
            lines.append(f"{fmt_budget(b)},{n_h},{fmt_utility(count)}")
    return "\n".join(lines) + "\n"


def _run_csv(record: RunRecord, budgets: Sequence[float],
             grid_names: Sequence[str]) -> str:
    lines = [SCHEMA_HEADER,
             "budget,grid,active_tracks,total_utility,"
             "mean_angular_error_mrad,histogram"]
    for name in sorted(grid_names):
        for b in budgets:
            m = record.cells[(name, b)]
            hist = ";".join(f"{n}:{c}" for n, c in m.element_histogram)
            lines.append(",".join([
                fmt_budget(b), name, str(m.active_tracks),
                fmt_utility(m.total_utility),
                fmt_error_mrad(m.mean_angular_error * 1e3), hist]))
    return "\n".join(lines) + "\n"


def write_sweep_outputs(result: SweepResult, out_dir: str | Path,
                        histogram_budgets: Sequence[float] = (),
                        histogram_grid: str = "split") -> list[Path]:
    """Persist a sweep: aggregate CSV per metric plus per-run files.

    All writes go through a temp-file rename from this single caller,
    so readers never observe partial files.  The element histogram is
    emitted for the requested budgets of one grid; budgets outside the
    sweep or a missing grid produce a header-only file.

    Returns:
        The written paths.
    """
    out = Path(out_dir)
    runs_dir = out / "runs"
    runs_dir.mkdir(parents=True, exist_ok=True)
    agg = result.aggregate
    budgets = agg.budgets
    names = agg.grid_names
    written = []

    def emit(path: Path, text: str) -> None:
        _atomic_write(path, text)
        written.append(path)

    emit(out / "active_tracks.csv",
         _metric_csv(agg.active_tracks, budgets, names, fmt_utility))
    emit(out / "total_utility.csv",
         _metric_csv(agg.total_utility, budgets, names, fmt_utility))
    emit(out / "mean_angular_error_mrad.csv",
         _metric_csv(agg.mean_angular_error_mrad, budgets, names,
                     fmt_error_mrad))
    hist_budgets = tuple(b for b in budgets
                         if any(math.isclose(b, h) for h in histogram_budgets)
                         and histogram_grid in names)
    emit(out / "element_histogram.csv",
         _histogram_csv(agg, hist_budgets, histogram_grid))
    for record in result.runs:
        emit(runs_dir / f"run_{record.run_index}.csv",
             _run_csv(record, budgets, names))
    return written


def _parse_histogram(text: str) -> tuple[tuple[int, int], ...]:
    if not text:
        return ()
    pairs = []
    for chunk in text.split(";"):
        n_h, count = chunk.split(":")
        pairs.append((int(n_h), int(count)))
    return tuple(pairs)


def read_run_csv(path: str | Path) -> dict[tuple[str, float], RunMetrics]:
    """Parse one per-run CSV back into a metrics table.

    Angular errors come back in radians; values carry the file's
    precision, which is exactly what aggregation consumes.
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != SCHEMA_HEADER:
        raise ValueError(f"{path}: missing schema header {SCHEMA_HEADER!r}")
    cells: dict[tuple[str, float], RunMetrics] = {}
    for line in lines[2:]:
        if not line:
            continue
        budget, grid, active, util, err_mrad, hist = line.split(",")
        cells[(grid, float(budget))] = RunMetrics(
            active_tracks=int(active),
            total_utility=float(util),
            mean_angular_error=float(err_mrad) / 1e3,
            element_histogram=_parse_histogram(hist))
    return cells


def read_runs(out_dir: str | Path) -> list[dict[tuple[str, float],
                                                RunMetrics]]:
    """All per-run tables under out_dir/runs, ordered by run index."""
    runs_dir = Path(out_dir) / "runs"
    paths = sorted(runs_dir.glob("run_*.csv"),
                   key=lambda p: int(p.stem.split("_")[1]))
    return [read_run_csv(p) for p in paths]
