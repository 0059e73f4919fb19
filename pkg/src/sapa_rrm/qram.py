"""Greedy quality-of-service allocation over discrete control grids.

The solver follows the classic Q-RAM recipe: enumerate the feasible
(resource, weighted utility) set-points of every task, compress each
task to its concave majorant, then walk all hull segments in order of
decreasing marginal utility until the radar time budget runs out.  A
brute-force multiple-choice-knapsack oracle is included for validating
the greedy result on small instances.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .radar_model import (
    ControlPoint,
    Environment,
    RadarConstants,
    UtilityShape,
    evaluate_grid,
)


def _strictly_increasing(values: Sequence[float]) -> bool:
    return all(b > a for a, b in zip(values, values[1:]))


@dataclass(frozen=True)
class ControlGrid:
    """Discrete control space; the cartesian product defines the candidates.

    Element counts are validated against RadarConstants at enumeration
    time.  A full-aperture baseline is simply a grid whose n_h_values
    collapse to the single total element count.
    """

    t_d_values: tuple[float, ...]  # integration times [s]
    f_t_values: tuple[float, ...]  # update frequencies [Hz]
    n_h_values: tuple[int, ...]    # horizontal element counts

    def __post_init__(self) -> None:
        for name in ("t_d_values", "f_t_values", "n_h_values"):
            values = getattr(self, name)
            object.__setattr__(self, name, tuple(values))
            values = getattr(self, name)
            if not values:
                raise ValueError(f"{name} must be non-empty")
            if not _strictly_increasing(values):
                raise ValueError(f"{name} must be strictly increasing")
        if self.t_d_values[0] <= 0.0 or self.f_t_values[0] <= 0.0:
            raise ValueError("control values must be positive")
        if self.n_h_values[0] < 1:
            raise ValueError("n_h values must be at least 1")

    @property
    def size(self) -> int:
        return (len(self.t_d_values) * len(self.f_t_values)
                * len(self.n_h_values))

    def is_full_aperture(self, consts: RadarConstants) -> bool:
        return self.n_h_values == (consts.n_h_total,)


@dataclass(frozen=True)
class SetPoint:
    """One feasible candidate: a control point and what it buys."""

    control: ControlPoint
    resource: float          # g, fraction of the radar timeline
    weighted_utility: float  # task weight times utility
    quality: float           # achieved angular error [rad]
    utility: float           # unweighted u in [0, 1]


class TaskSetPoints(Sequence):
    """Feasible set-points of one task, stored as arrays.

    Behaves as a read-only sequence of SetPoint while keeping the bulk
    data in numpy arrays; a 200-task scene over the default split grid
    holds ~10 million candidates, far too many for per-point objects.
    Order is deterministic: t_d-major, then f_t, then n_h.
    """

    def __init__(self, grid: ControlGrid, weight: float,
                 flat_index: np.ndarray, resource: np.ndarray,
                 weighted_utility: np.ndarray, quality: np.ndarray,
                 utility: np.ndarray) -> None:
        self.grid = grid
        self.weight = weight
        self.flat_index = flat_index
        self.resource = resource
        self.weighted_utility = weighted_utility
        self.quality = quality
        self.utility = utility

    def __len__(self) -> int:
        return int(self.flat_index.shape[0])

    def __getitem__(self, i: int) -> SetPoint:
        if not isinstance(i, (int, np.integer)):
            raise TypeError("TaskSetPoints supports integer indexing only")
        if i < 0:
            i += len(self)
        if not 0 <= i < len(self):
            raise IndexError("set-point index out of range")
        nf = len(self.grid.f_t_values)
        nn = len(self.grid.n_h_values)
        flat = int(self.flat_index[i])
        it, rem = divmod(flat, nf * nn)
        jf, kn = divmod(rem, nn)
        control = ControlPoint(t_d=self.grid.t_d_values[it],
                               f_t=self.grid.f_t_values[jf],
                               n_h=self.grid.n_h_values[kn])
        return SetPoint(control=control,
                        resource=float(self.resource[i]),
                        weighted_utility=float(self.weighted_utility[i]),
                        quality=float(self.quality[i]),
                        utility=float(self.utility[i]))


def enumerate_setpoints(env: Environment, weight: float, grid: ControlGrid,
                        consts: RadarConstants,
                        shape: UtilityShape) -> TaskSetPoints:
    """Evaluate one task over a control grid and keep the feasible points.

    Args:
        env: target environment.
        weight: task weight applied to the utility.
        grid: discrete control space.
        consts, shape: model parameters.

    Returns:
        The feasible candidates in t_d-major order; empty when the
        target is undetectable at every grid point.
    """
    if weight <= 0.0:
        raise ValueError("weight must be positive")
    ge = evaluate_grid(np.asarray(grid.t_d_values),
                       np.asarray(grid.f_t_values),
                       np.asarray(grid.n_h_values, dtype=np.float64),
                       env, consts, shape)
    flat = np.nonzero(ge.feasible.ravel())[0]
    return TaskSetPoints(
        grid=grid,
        weight=weight,
        flat_index=flat,
        resource=ge.resource.ravel()[flat],
        weighted_utility=weight * ge.utility.ravel()[flat],
        quality=ge.quality.ravel()[flat],
        utility=ge.utility.ravel()[flat],
    )


@dataclass(frozen=True)
class ConcaveMajorant:
    """Upper-left hull of a task's set-points in the (g, wu) plane.

    The origin (no resource, no utility) is an implicit first vertex and
    is not stored.  Stored vertices are strictly increasing in both
    resource and weighted utility, with strictly decreasing marginal
    utility between consecutive vertices.
    """

    points: tuple[SetPoint, ...] = field(default_factory=tuple)

    def segments(self) -> list[tuple[float, float, float]]:
        """Per-segment (d_resource, d_weighted_utility, marginal utility)."""
        out = []
        prev_g, prev_wu = 0.0, 0.0
        for p in self.points:
            dg = p.resource - prev_g
            dwu = p.weighted_utility - prev_wu
            out.append((dg, dwu, dwu / dg))
            prev_g, prev_wu = p.resource, p.weighted_utility
        return out


def _point_arrays(points) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(points, TaskSetPoints):
        return points.resource, points.weighted_utility
    pts = list(points)
    g = np.array([p.resource for p in pts], dtype=np.float64)
    wu = np.array([p.weighted_utility for p in pts], dtype=np.float64)
    return g, wu


def _hull_indices(g: np.ndarray, wu: np.ndarray) -> list[int]:
    """Indices of the upper-left hull vertices, ascending in resource.

    The implicit origin anchors the chain; points that do not improve on
    the running best utility can never be vertices, so they are pruned
    with one vectorized pass before the (short) scan.
    """
    if g.size == 0:
        return []
    order = np.lexsort((-wu, g))  # resource asc, utility desc within ties
    wu_sorted = wu[order]
    best_before = np.empty_like(wu_sorted)
    best_before[0] = 0.0
    np.maximum.accumulate(wu_sorted[:-1], out=best_before[1:])
    np.maximum(best_before, 0.0, out=best_before)
    frontier = order[wu_sorted > best_before]

    hull: list[int] = []
    xs = [0.0]  # chain coordinates, origin included
    ys = [0.0]
    g_list = g[frontier].tolist()
    wu_list = wu[frontier].tolist()
    for idx, x, y in zip(frontier.tolist(), g_list, wu_list):
        # pop the last vertex while it does not stay strictly above the
        # chord to the new point (this also drops collinear vertices)
        while hull:
            x1, y1 = xs[-2], ys[-2]
            x2, y2 = xs[-1], ys[-1]
            if (y - y1) * (x2 - x1) >= (y2 - y1) * (x - x1):
                hull.pop()
                xs.pop()
                ys.pop()
            else:
                break
        hull.append(idx)
        xs.append(x)
        ys.append(y)
    return hull


def build_majorant(points) -> ConcaveMajorant:
    """Concave majorant of a task's set-points.

    Args:
        points: sequence of SetPoint (a TaskSetPoints works and is fast).

    Returns:
        The hull; only the implicit origin when points is empty or no
        point has positive weighted utility.
    """
    g, wu = _point_arrays(points)
    return ConcaveMajorant(points=tuple(points[i]
                                        for i in _hull_indices(g, wu)))


def fast_traversal_majorant(points) -> ConcaveMajorant:
    """Incremental frontier construction by repeated best-marginal steps.

    From the current vertex (starting at the origin) pick the candidate
    with the highest marginal utility among points with strictly larger
    resource and utility; repeat until nothing improves, then enforce
    concavity with a final hull pass.  Ties prefer the smaller resource,
    then the earlier enumeration index.
    """
    g, wu = _point_arrays(points)
    if g.size == 0:
        return ConcaveMajorant()
    chosen: list[int] = []
    cur_g, cur_wu = 0.0, 0.0
    alive = np.ones(g.size, dtype=bool)
    while True:
        cand = alive & (g > cur_g) & (wu > cur_wu)
        if not cand.any():
            break
        # the masked lanes may divide by zero; they are discarded anyway
        with np.errstate(divide="ignore", invalid="ignore"):
            marginal = np.where(cand, (wu - cur_wu) / (g - cur_g), -np.inf)
        best = marginal.max()
        ties = np.nonzero(marginal == best)[0]
        pick = int(ties[np.argmin(g[ties])])
        chosen.append(pick)
        cur_g, cur_wu = float(g[pick]), float(wu[pick])
        alive[pick] = False

    sub_g = g[chosen]
    sub_wu = wu[chosen]
    keep = _hull_indices(sub_g, sub_wu)
    return ConcaveMajorant(points=tuple(points[chosen[i]] for i in keep))


@dataclass(frozen=True)
class Assignment:
    """Chosen set-point for one task; index is the vertex position."""

    set_point: SetPoint
    vertex_index: int


@dataclass(frozen=True)
class AllocationResult:
    """Solver output: one assignment (or None) per task, plus totals."""

    assignments: tuple[Assignment | None, ...]
    total_resource: float
    total_utility: float
    active_track_count: int


def _sorted_segments(majorants: Sequence[ConcaveMajorant]):
    """All hull segments sorted by (marginal desc, task asc, segment asc)."""
    segments = []
    for ti, mj in enumerate(majorants):
        prev_g, prev_wu = 0.0, 0.0
        for si, p in enumerate(mj.points):
            dg = p.resource - prev_g
            dwu = p.weighted_utility - prev_wu
            assert dg > 0.0, "feasible set-points always cost resource"
            segments.append((dwu / dg, ti, si, dg, dwu))
            prev_g, prev_wu = p.resource, p.weighted_utility
    segments.sort(key=lambda s: (-s[0], s[1], s[2]))
    return segments


def _greedy_scan(majorants: Sequence[ConcaveMajorant], segments,
                 r_tot: float) -> AllocationResult:
    used = 0.0
    total_wu = 0.0
    next_seg = [0] * len(majorants)
    last_vertex = [-1] * len(majorants)
    for _marginal, ti, si, dg, dwu in segments:
        if si != next_seg[ti]:
            continue  # an earlier segment of this task was skipped
        if used + dg <= r_tot:
            used += dg
            total_wu += dwu
            next_seg[ti] = si + 1
            last_vertex[ti] = si
    assignments: list[Assignment | None] = []
    active = 0
    for ti, mj in enumerate(majorants):
        vi = last_vertex[ti]
        if vi < 0:
            assignments.append(None)
        else:
            assignments.append(Assignment(set_point=mj.points[vi],
                                          vertex_index=vi))
            active += 1
    return AllocationResult(assignments=tuple(assignments),
                            total_resource=used,
                            total_utility=total_wu,
                            active_track_count=active)


def allocate(majorants: Sequence[ConcaveMajorant],
             r_tot: float) -> AllocationResult:
    """Greedy budgeted allocation over per-task concave majorants.

    Every task starts at the implicit origin.  Hull segments from all
    tasks are traversed in order of decreasing marginal utility; a
    segment is accepted when it fits in the remaining budget and its
    predecessor on the same hull was accepted, otherwise it is skipped
    and the traversal continues (segments are atomic, no partial fits).

    Args:
        majorants: one ConcaveMajorant per task.
        r_tot: radar time budget, > 0.

    Returns:
        AllocationResult with total_resource <= r_tot exactly.
    """
    if r_tot <= 0.0:
        raise ValueError("r_tot must be positive")
    return _greedy_scan(majorants, _sorted_segments(majorants), r_tot)


def allocate_many(majorants: Sequence[ConcaveMajorant],
                  budgets: Sequence[float]) -> list[AllocationResult]:
    """allocate() for several budgets, sorting the segment list once."""
    if any(b <= 0.0 for b in budgets):
        raise ValueError("budgets must be positive")
    segments = _sorted_segments(majorants)
    return [_greedy_scan(majorants, segments, b) for b in budgets]


def brute_force_allocate(setpoint_lists, r_tot: float) -> AllocationResult:
    """Exhaustive multiple-choice knapsack over raw set-points.

    Every task independently picks one of its set-points or nothing;
    the exact maximizer of total weighted utility under the budget is
    returned.  Intended as an optimality oracle for small instances.

    Args:
        setpoint_lists: per-task sequences of SetPoint.
        r_tot: radar time budget, > 0.

    Raises:
        ValueError: when the product of (list sizes + 1) exceeds 1e7.
    """
    if r_tot <= 0.0:
        raise ValueError("r_tot must be positive")
    sizes = [len(pts) + 1 for pts in setpoint_lists]
    combos = 1
    for s in sizes:
        combos *= s
    if combos > 10**7:
        raise ValueError(f"instance too large for brute force: "
                         f"{combos} > 1e7 combinations")

    total_g = np.zeros(1, dtype=np.float64)
    total_wu = np.zeros(1, dtype=np.float64)
    for pts in setpoint_lists:
        g_opts = np.concatenate(([0.0], [p.resource for p in pts]))
        wu_opts = np.concatenate(([0.0], [p.weighted_utility for p in pts]))
        total_g = (total_g[:, None] + g_opts[None, :]).ravel()
        total_wu = (total_wu[:, None] + wu_opts[None, :]).ravel()

    feasible_wu = np.where(total_g <= r_tot, total_wu, -1.0)
    best = int(np.argmax(feasible_wu))
    choice = np.unravel_index(best, sizes)

    assignments: list[Assignment | None] = []
    active = 0
    for pts, opt in zip(setpoint_lists, choice):
        if opt == 0:
            assignments.append(None)
        else:
            assignments.append(Assignment(set_point=pts[opt - 1],
                                          vertex_index=int(opt - 1)))
            active += 1
    return AllocationResult(assignments=tuple(assignments),
                            total_resource=float(total_g[best]),
                            total_utility=float(total_wu[best]),
                            active_track_count=active)
