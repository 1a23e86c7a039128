"""Repetitivity: how far must one travel to find every visible patch again.

M(T) is the largest covering radius over the center sets of the T-patch
classes. On a finite window it is reported as a bracket: exact in dimension
one, a grid bracket otherwise, and always limited to an evaluation region
eroded far enough that unseen centers outside the window cannot hide closer
recurrences than the patch radius itself.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .atlas import AtlasResult, compute_atlas
from .core import ExactPointSet, Region
from .errors import InsufficientData, InvalidArgument, WindowTooSmall
from .generators import PointSetSource

GRID_SAMPLE_BUDGET = 4_000_000  # hard cap on covering-radius grid points


def covering_radius(
    centers: np.ndarray, region: Region, resolution: Optional[float] = None
) -> tuple:
    """Bracket (lower, upper) for sup over the region of dist(t, centers).

    Dimension one is exact (midpoints and endpoints decide the sup). Higher
    dimensions sample a grid: lower = max sampled distance over in-region
    grid points, upper adds half the grid cell diagonal. If the requested
    resolution would exceed the global sample budget it is coarsened, which
    only widens the bracket.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    if centers.shape[0] == 0:
        return math.inf, math.inf
    n = region.dimension
    if centers.shape[1] != n:
        raise InvalidArgument("center dimension does not match region")

    if n == 1:
        lo, hi = (
            region.intervals[0]
            if region.kind == "box"
            else (region.center[0] - region.radius, region.center[0] + region.radius)
        )
        xs = np.sort(centers[:, 0])
        cand = []
        for t in (lo, hi):
            j = np.searchsorted(xs, t)
            best = math.inf
            if j < xs.size:
                best = min(best, xs[j] - t)
            if j > 0:
                best = min(best, t - xs[j - 1])
            cand.append(abs(best))
        mids = (xs[:-1] + xs[1:]) / 2.0
        keep = (mids >= lo) & (mids <= hi)
        if np.any(keep):
            cand.append(float(np.max((xs[1:] - xs[:-1])[keep] / 2.0)))
        val = float(max(cand))
        return val, val

    box = region.bounding_box()
    lens = [b - a for a, b in box.intervals]
    if resolution is None:
        resolution = max(max(lens) / 100.0, 1e-9)
    counts = [max(1, math.ceil(L / resolution)) for L in lens]
    total = float(np.prod([float(c) for c in counts]))
    if total > GRID_SAMPLE_BUDGET:
        scale = (total / GRID_SAMPLE_BUDGET) ** (1.0 / n)
        counts = [max(1, math.ceil(c / scale)) for c in counts]
    axes = []
    eff = []
    for (a, b), c in zip(box.intervals, counts):
        step = (b - a) / c
        eff.append(step)
        axes.append(a + step * (np.arange(c) + 0.5))
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    half_diag = 0.5 * math.sqrt(sum(s * s for s in eff))

    if region.kind == "ball":
        c = np.asarray(region.center)
        d_center = np.linalg.norm(pts - c, axis=1)
        cell_touches = d_center <= region.radius + half_diag
        pts = pts[cell_touches]
        in_region = np.linalg.norm(pts - c, axis=1) <= region.radius
    else:
        in_region = np.ones(pts.shape[0], dtype=bool)

    from scipy.spatial import cKDTree

    workers = int(os.environ.get("DELONE_LAB_THREADS", "-1") or "-1")
    dists, _ = cKDTree(centers).query(pts, workers=workers)
    upper = float(np.max(dists)) + half_diag
    lower = float(np.max(dists[in_region])) if np.any(in_region) else 0.0
    return lower, upper


@dataclass
class ClassCovering:
    key: tuple
    lower: float
    upper: float
    n_centers: int


@dataclass
class RepetitivityResult:
    T: float
    M_lower: float
    M_upper: float
    certified_floor: float  # min(lower, T) per class, immune to unseen centers
    n_lower: int
    per_class: List[ClassCovering]
    evaluation_region: Region
    notes: list

    def prime(self) -> tuple:
        """The shifted variant: add T to both bracket ends, exactly."""
        return self.M_lower + self.T, self.M_upper + self.T


def repetitivity_function(
    ps: ExactPointSet,
    T: float,
    resolution: Optional[float] = None,
    atlas: Optional[AtlasResult] = None,
) -> RepetitivityResult:
    """Bracket M(T) on the window.

    Patch centers are certified on region minus T; distances are evaluated on
    region minus 2T, so any center whose patch we could not classify is at
    least T away from every evaluation point. The reported M_lower follows
    the interior covering radius and can over-report the infinite-set value
    when a class only recurs beyond the window; certified_floor clamps each
    class at T and is a true lower bound regardless.
    """
    if atlas is None:
        atlas = compute_atlas(ps, T)
    elif atlas.T != T:
        raise InvalidArgument("atlas was computed for a different T")
    eval_region = ps.region.erode(2.0 * T)
    if resolution is None and ps.dimension > 1:
        from scipy.spatial import cKDTree

        d, _ = cKDTree(ps.points).query(ps.points, k=2)
        r = float(d[:, 1].min()) / 2.0
        resolution = min(r / 4.0, T / 100.0)
    per = []
    notes = []
    for cls in atlas.classes:
        pos = cls.centers.astype(float) @ ps.projection
        lo, hi = covering_radius(pos, eval_region, resolution=resolution)
        per.append(
            ClassCovering(key=cls.key, lower=lo, upper=hi, n_centers=cls.centers.shape[0])
        )
    if not per:
        raise WindowTooSmall("no certified patch centers in the window")
    M_lower = max(c.lower for c in per)
    M_upper = max(c.upper for c in per)
    floor_val = max(min(c.lower, T) for c in per)
    if M_lower > T:
        notes.append(
            "some class covers the evaluation region only beyond distance T; "
            "window effects may over-report M_lower"
        )
    return RepetitivityResult(
        T=T,
        M_lower=M_lower,
        M_upper=M_upper,
        certified_floor=floor_val,
        n_lower=atlas.n_lower,
        per_class=per,
        evaluation_region=eval_region,
        notes=notes,
    )


def repetitivity_prime(result: RepetitivityResult) -> tuple:
    return result.prime()


# ---------------------------------------------------------------------------
# Growth classification across a sweep of T values


@dataclass
class GrowthReport:
    rows: list  # (T, n_lower, M_lower, M_upper)
    slope_vs_T: float
    slope_vs_N: float
    ratio_T_bound: float  # max/min of M_upper / T across the sweep
    ratio_N_bound: float
    classification: str
    caveat: str


def growth_classification(
    source: PointSetSource,
    T_values: Sequence[float],
    window_radius: Optional[float] = None,
    resolution: Optional[float] = None,
) -> GrowthReport:
    """Classify M(T) growth over a sweep, from finite windows only.

    Needs at least 4 certified T values spanning a factor of 8. Slopes are
    log-log least squares on M_upper; ratio bounds catch drifts a slope can
    hide. The verdict is empirical, windows cannot prove asymptotics.
    """
    Ts = sorted(float(t) for t in T_values)
    if len(Ts) < 4 or Ts[0] <= 0 or Ts[-1] / Ts[0] < 8.0 - 1e-9:
        raise InsufficientData(
            "need >= 4 positive T values spanning at least a factor of 8"
        )
    from .atlas import estimate_R

    R = estimate_R(source)
    results = []
    cache: Dict[float, ExactPointSet] = {}
    for T in Ts:
        radius = window_radius if window_radius is not None else max(50.0 * R, 6.0 * T)
        key = round(radius, 9)
        if key not in cache:
            cache[key] = source.materialize(
                Region.centered_box(source.dimension, radius)
            )
        results.append(repetitivity_function(cache[key], T, resolution=resolution))

    rows = [(r.T, r.n_lower, r.M_lower, r.M_upper) for r in results]
    logT = np.log([r.T for r in results])
    logM = np.log([max(r.M_upper, 1e-12) for r in results])
    n = source.dimension
    logN = np.log([max(r.n_lower, 1) for r in results]) / n
    slope_T = float(np.polyfit(logT, logM, 1)[0])
    if np.ptp(logN) < 1e-12:
        slope_N = 0.0
    else:
        slope_N = float(np.polyfit(logN, logM, 1)[0])
    ratios_T = [r.M_upper / r.T for r in results]
    ratios_N = [r.M_upper / max(r.n_lower, 1) ** (1.0 / n) for r in results]
    ratio_T_bound = max(ratios_T) / min(ratios_T)
    ratio_N_bound = max(ratios_N) / min(ratios_N)

    Ms = [r.M_upper for r in results]
    if max(Ms) <= min(Ms) * 1.05 + 1e-12:
        verdict = "ideal-crystal-like"
    elif slope_T <= 1.15 and ratio_T_bound <= 4.0:
        verdict = "empirically-linear"
    elif slope_N <= 1.15 and ratio_N_bound <= 4.0:
        verdict = "empirically-dense"
    else:
        verdict = "unclassified-growth"
    return GrowthReport(
        rows=rows,
        slope_vs_T=slope_T,
        slope_vs_N=slope_N,
        ratio_T_bound=ratio_T_bound,
        ratio_N_bound=ratio_N_bound,
        classification=verdict,
        caveat="finite-window sweep; asymptotic growth is not certified",
    )


# ---------------------------------------------------------------------------
# Ideal-crystal probes


@dataclass
class GapProbeRow:
    T: float
    n_lower: int
    M_upper: float
    crystal_by_small_M: bool  # M_upper < T/3
    crystal_by_small_N: bool  # n_lower < floor(T / R)
    lower_bound_ok: Optional[bool]  # M_upper >= r (N^(1/n) - 1), if r given


@dataclass
class GapProbeReport:
    rows: List[GapProbeRow]
    verdict: str


def crystal_gap_probe(
    results: Sequence[RepetitivityResult],
    R: float,
    r: Optional[float] = None,
    dimension: int = 1,
) -> GapProbeReport:
    """Check the two ideal-crystal triggers on each certified T.

    Either a repetitivity bracket entirely below T/3 or a patch count below
    floor(T/R) forces periodicity in every direction; aperiodic constructions
    must never trip them on certified windows.
    """
    rows = []
    for res in results:
        by_M = res.M_upper < res.T / 3.0
        by_N = res.n_lower < math.floor(res.T / R)
        lb = None
        if r is not None:
            lb = res.M_upper >= r * (res.n_lower ** (1.0 / dimension) - 1.0) - 1e-9
        rows.append(
            GapProbeRow(
                T=res.T,
                n_lower=res.n_lower,
                M_upper=res.M_upper,
                crystal_by_small_M=by_M,
                crystal_by_small_N=by_N,
                lower_bound_ok=lb,
            )
        )
    fired = any(r.crystal_by_small_M or r.crystal_by_small_N for r in rows)
    return GapProbeReport(
        rows=rows, verdict="ideal-crystal signature" if fired else "no crystal signature"
    )


# ---------------------------------------------------------------------------
# Symbolic recurrence on explicit words


def symbolic_recurrence_oracle(word: Sequence, length: int):
    """Largest gap between consecutive starts of any length-l factor.

    Scans the finite word directly, no structure theory involved. A factor
    seen only once gives no gap to measure, so the result is math.inf as an
    honest unbounded-within-window sentinel.
    """
    if length < 1:
        raise InvalidArgument("factor length must be >= 1")
    w = list(word)
    if len(w) < length:
        raise InvalidArgument("word shorter than the factor length")
    try:
        data = bytes(int(c) for c in w)
    except (ValueError, TypeError):
        data = None
    last: dict = {}
    best: dict = {}
    if data is not None:
        for i in range(len(data) - length + 1):
            f = data[i : i + length]
            if f in last:
                g = i - last[f]
                if g > best.get(f, 0):
                    best[f] = g
            last[f] = i
    else:
        for i in range(len(w) - length + 1):
            f = tuple(w[i : i + length])
            if f in last:
                g = i - last[f]
                if g > best.get(f, 0):
                    best[f] = g
            last[f] = i
    if len(best) < len(last):
        return math.inf
    return max(best.values())
