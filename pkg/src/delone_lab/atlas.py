"""Patch classification over finite windows.

A T-patch at a center x is the set of points inside the closed ball (or cube)
of size T around x, recorded as integer address differences. Centers are
restricted to the window eroded by the patch size, so every patch is complete
and the class count is a certified lower bound for the infinite set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .core import BALL_TOL, ExactPointSet, Region, make_patch_key
from .errors import InvalidArgument, WindowTooSmall
from .generators import PointSetSource

_PACK_BOUND = 1 << 20  # scalar row packing is valid below this magnitude


@dataclass
class PatchClass:
    key: tuple
    centers: np.ndarray  # (m, rank) integer addresses, lex sorted


@dataclass
class AtlasResult:
    T: float
    shape: str
    certified_region: Region
    classes: List[PatchClass]
    boundary_flag_count: int
    boundary_flags: list  # up to flag_cap entries of (center_address, distance)
    engine: str

    @property
    def n_lower(self) -> int:
        return len(self.classes)

    @property
    def total_centers(self) -> int:
        return sum(c.centers.shape[0] for c in self.classes)

    def keys(self) -> list:
        return [c.key for c in self.classes]

    def class_for(self, key: tuple) -> Optional[PatchClass]:
        key = make_patch_key(key)
        for c in self.classes:
            if c.key == key:
                return c
        return None


def _pack_scalar(arr: np.ndarray) -> Optional[np.ndarray]:
    """Rows of small ints to order-preserving int64 scalars, or None."""
    if arr.size == 0:
        return np.zeros(arr.shape[0], dtype=np.int64)
    if arr.shape[1] > 3:
        return None
    if int(arr.max()) >= _PACK_BOUND or int(arr.min()) <= -_PACK_BOUND:
        return None
    out = arr[:, 0].astype(np.int64) + _PACK_BOUND
    for i in range(1, arr.shape[1]):
        out = (out << 21) | (arr[:, i].astype(np.int64) + _PACK_BOUND)
    return out


def _sort_addresses(addr: np.ndarray) -> np.ndarray:
    if addr.shape[0] == 0:
        return addr
    order = np.lexsort(addr.T[::-1])
    return addr[order]


def _erosion_margin(T: float, shape: str, region_kind: str, n: int) -> float:
    if shape == "ball":
        return T
    # cube of side T: half-width per axis, half-diagonal inside a ball window
    return T / 2.0 if region_kind == "box" else (T / 2.0) * math.sqrt(n)


def compute_atlas(
    ps: ExactPointSet, T: float, shape: str = "ball", flag_cap: int = 1000
) -> AtlasResult:
    """Classify all fully visible T-patches in the window.

    shape "ball" uses the closed euclidean ball of radius T; shape "cube"
    uses the axis-aligned closed cube of side T. Membership is decided on
    squared distances with a 1e-9 slack, and near-threshold points are
    flagged (they stay included).
    """
    if shape not in ("ball", "cube"):
        raise InvalidArgument(f"unknown patch shape {shape!r}")
    if not (T > 0):
        raise InvalidArgument("patch size T must be positive")
    n = ps.dimension
    margin = _erosion_margin(T, shape, ps.region.kind, n)
    certified = ps.region.erode(margin)

    pts = ps.points
    if len(ps) == 0:
        raise WindowTooSmall("cannot build an atlas from an empty window")
    center_mask = certified.contains(pts)
    center_idx = np.nonzero(center_mask)[0]
    if center_idx.size == 0:
        return AtlasResult(T, shape, certified, [], 0, [], "empty")

    thresh2 = T * T if shape == "ball" else (T / 2.0) ** 2

    if n == 1 and _pack_scalar(ps.addresses) is not None:
        groups, flags, flag_count, engine = _engine_sorted_line(
            ps, center_idx, thresh2, flag_cap
        )
    elif (
        ps.rank == n
        and n <= 3
        and np.array_equal(ps.projection, np.eye(n))
        and _pack_scalar(ps.addresses) is not None
    ):
        groups, flags, flag_count, engine = _engine_lattice(
            ps, center_idx, T, shape, thresh2, flag_cap
        )
    else:
        groups, flags, flag_count, engine = _engine_kdtree(
            ps, center_idx, shape, thresh2, flag_cap
        )

    classes = [
        PatchClass(key=k, centers=_sort_addresses(np.asarray(v, dtype=np.int64)))
        for k, v in groups.items()
    ]
    classes.sort(key=lambda c: c.key)
    flags.sort()
    return AtlasResult(
        T=T,
        shape=shape,
        certified_region=certified,
        classes=classes,
        boundary_flag_count=int(flag_count),
        boundary_flags=flags[:flag_cap],
        engine=engine,
    )


def _engine_sorted_line(ps, center_idx, thresh2, flag_cap):
    """1D engine: sort by position, classify contiguous slices in bulk."""
    pts = ps.points[:, 0]
    order = np.argsort(pts, kind="stable")
    xs = pts[order]
    addr_sorted = ps.addresses[order]
    pos_of_center = pts[center_idx]
    caddr = ps.addresses[center_idx]

    rad = math.sqrt(thresh2 + BALL_TOL)
    los = np.searchsorted(xs, pos_of_center - rad - 1e-12, side="left")
    his = np.searchsorted(xs, pos_of_center + rad + 1e-12, side="right")
    w = int((his - los).max())
    idx = los[:, None] + np.arange(w)[None, :]
    valid = idx < his[:, None]
    idx_c = np.minimum(idx, xs.size - 1)
    d2 = (xs[idx_c] - pos_of_center[:, None]) ** 2
    inc = valid & (d2 <= thresh2 + BALL_TOL)
    near = inc & (np.abs(d2 - thresh2) < BALL_TOL)

    diffs = addr_sorted[idx_c] - caddr[:, None, :]  # (m, w, rank)
    packed = _pack_scalar(diffs.reshape(-1, ps.rank))
    if packed is None:
        return _python_classify(ps, center_idx, idx_c, inc, near, flag_cap) + ("sorted-line",)
    packed = packed.reshape(diffs.shape[0], w)
    sentinel = np.int64(2**62)
    canon = np.where(inc, packed, sentinel)
    canon.sort(axis=1)
    _, first_pos, inverse = np.unique(
        canon, axis=0, return_index=True, return_inverse=True
    )

    groups = {}
    for cls_id, rep in enumerate(first_pos):
        cols = np.nonzero(inc[rep])[0]
        dvecs = addr_sorted[idx_c[rep, cols]] - caddr[rep]
        key = make_patch_key(map(tuple, dvecs.tolist()))
        groups[key] = caddr[inverse == cls_id]

    flags = []
    flag_count = int(near.sum())
    if flag_count:
        rows, cols = np.nonzero(near)
        for r, c in zip(rows[: flag_cap * 2], cols[: flag_cap * 2]):
            flags.append((tuple(caddr[r].tolist()), float(math.sqrt(d2[r, c]))))
    return groups, flags, flag_count, "sorted-line"


def _engine_lattice(ps, center_idx, T, shape, thresh2, flag_cap):
    """Identity-projection engine: offset table plus packed membership."""
    n = ps.dimension
    if shape == "ball":
        reach = math.floor(math.sqrt(T * T + BALL_TOL))
        rng = np.arange(-reach, reach + 1, dtype=np.int64)
        grids = np.meshgrid(*([rng] * n), indexing="ij")
        offs = np.stack([g.ravel() for g in grids], axis=1)
        d2 = np.sum(offs.astype(float) ** 2, axis=1)
        offs = offs[d2 <= thresh2 + BALL_TOL]
    else:
        reach = math.floor(math.sqrt(thresh2 + BALL_TOL))
        rng = np.arange(-reach, reach + 1, dtype=np.int64)
        grids = np.meshgrid(*([rng] * n), indexing="ij")
        offs = np.stack([g.ravel() for g in grids], axis=1)
    offs = np.asarray(sorted(map(tuple, offs.tolist())), dtype=np.int64)
    K = offs.shape[0]
    off_d2 = np.sum(offs.astype(float) ** 2, axis=1)
    if shape == "ball":
        off_near = np.abs(off_d2 - thresh2) < BALL_TOL
    else:
        per_axis = offs.astype(float) ** 2
        off_near = np.any(np.abs(per_axis - thresh2) < BALL_TOL, axis=1)
    off_dist = np.sqrt(off_d2)

    table = np.sort(_pack_scalar(ps.addresses))
    caddr = ps.addresses[center_idx]
    m = caddr.shape[0]

    rows_acc = []
    near_total = 0
    flags = []
    chunk = max(1, (1 << 20) // max(K, 1))
    for s in range(0, m, chunk):
        cs = caddr[s : s + chunk]
        queries = cs[:, None, :] + offs[None, :, :]
        packed = _pack_scalar(queries.reshape(-1, n)).reshape(cs.shape[0], K)
        pos = np.searchsorted(table, packed)
        pos_c = np.minimum(pos, table.size - 1)
        found = table[pos_c] == packed
        rows_acc.append(np.packbits(found, axis=1))
        near_hits = found & off_near[None, :]
        near_total += int(near_hits.sum())
        if len(flags) < flag_cap * 2 and near_hits.any():
            rr, cc = np.nonzero(near_hits)
            for r, c in zip(rr[: flag_cap * 2], cc[: flag_cap * 2]):
                flags.append((tuple(cs[r].tolist()), float(off_dist[c])))

    rows = np.concatenate(rows_acc, axis=0)
    uniq, first_pos, inverse = np.unique(
        rows, axis=0, return_index=True, return_inverse=True
    )
    groups = {}
    for cls_id, rep in enumerate(first_pos):
        bits = np.unpackbits(rows[rep])[:K].astype(bool)
        key = make_patch_key(map(tuple, offs[bits].tolist()))
        groups[key] = caddr[inverse == cls_id]
    return groups, flags, near_total, "lattice"


def _engine_kdtree(ps, center_idx, shape, thresh2, flag_cap):
    """Generic engine for any projection; python loop over centers."""
    from scipy.spatial import cKDTree

    pts = ps.points
    tree = cKDTree(pts)
    rad = math.sqrt(thresh2 + BALL_TOL)
    p = np.inf if shape == "cube" else 2.0
    neigh = tree.query_ball_point(pts[center_idx], r=rad * (1 + 1e-12), p=p)

    groups = {}
    flags = []
    flag_count = 0
    for row, i in enumerate(center_idx):
        cand = np.asarray(neigh[row], dtype=np.int64)
        delta = pts[cand] - pts[i]
        if shape == "ball":
            d2 = np.sum(delta * delta, axis=1)
            inc = d2 <= thresh2 + BALL_TOL
            near = inc & (np.abs(d2 - thresh2) < BALL_TOL)
            dist = np.sqrt(d2)
        else:
            per = delta * delta
            inc = np.all(per <= thresh2 + BALL_TOL, axis=1)
            near = inc & np.any(np.abs(per - thresh2) < BALL_TOL, axis=1)
            dist = np.sqrt(np.sum(per, axis=1))
        dvecs = ps.addresses[cand[inc]] - ps.addresses[i]
        key = make_patch_key(map(tuple, dvecs.tolist()))
        groups.setdefault(key, []).append(ps.addresses[i])
        nn = int(near.sum())
        flag_count += nn
        if nn and len(flags) < flag_cap * 2:
            for d in dist[near]:
                flags.append((tuple(ps.addresses[i].tolist()), float(d)))
    groups = {k: np.asarray(v, dtype=np.int64) for k, v in groups.items()}
    return groups, flags, flag_count, "kdtree"


def _python_classify(ps, center_idx, idx_c, inc, near, flag_cap):
    """Slow fallback for exotic ranks in the 1D engine."""
    caddr = ps.addresses[center_idx]
    order = np.argsort(ps.points[:, 0], kind="stable")
    addr_sorted = ps.addresses[order]
    groups = {}
    flags = []
    flag_count = int(near.sum())
    for row in range(caddr.shape[0]):
        cols = np.nonzero(inc[row])[0]
        dvecs = addr_sorted[idx_c[row, cols]] - caddr[row]
        key = make_patch_key(map(tuple, dvecs.tolist()))
        groups.setdefault(key, []).append(caddr[row])
    groups = {k: np.asarray(v, dtype=np.int64) for k, v in groups.items()}
    return groups, flags, flag_count


def cubical_atlas(ps: ExactPointSet, T: float, flag_cap: int = 1000) -> AtlasResult:
    """Atlas over cubes of side T. In 1D this must match balls of radius T/2."""
    return compute_atlas(ps, T, shape="cube", flag_cap=flag_cap)


# ---------------------------------------------------------------------------
# Window growth until the class count stabilizes


@dataclass
class WindowPolicy:
    initial_radius: Optional[float] = None  # default 50 * R of the source
    growth: float = 2.0
    max_doublings: int = 4


@dataclass
class ProfileEntry:
    T: float
    n_lower: int
    stabilized: bool
    window_radius: float
    total_centers: int


def estimate_R(source: PointSetSource) -> float:
    if source.declared_R is not None:
        return source.declared_R
    from .core import delone_constants

    probe = source.materialize(Region.centered_box(source.dimension, 25.0))
    return delone_constants(probe)[1]


def patch_count_profile(
    source: PointSetSource,
    T_values: Sequence[float],
    policy: Optional[WindowPolicy] = None,
    shape: str = "ball",
) -> List[ProfileEntry]:
    """Patch counts per T, growing the window until the count stops moving.

    Budget exhaustion is not an error; the entry just reports
    stabilized=False at the largest window tried.
    """
    policy = policy or WindowPolicy()
    base = policy.initial_radius
    if base is None:
        base = 50.0 * estimate_R(source)
    cache = {}
    out = []
    for T in T_values:
        if T <= 0:
            raise InvalidArgument("T values must be positive")
        radius = max(base, 2.5 * T)
        prev = None
        entry = None
        for _ in range(policy.max_doublings + 1):
            key = round(radius, 9)
            if key not in cache:
                cache[key] = source.materialize(
                    Region.centered_box(source.dimension, radius)
                )
            atlas = compute_atlas(cache[key], T, shape=shape)
            entry = ProfileEntry(
                T=T,
                n_lower=atlas.n_lower,
                stabilized=(prev == atlas.n_lower),
                window_radius=radius,
                total_centers=atlas.total_centers,
            )
            if entry.stabilized:
                break
            prev = atlas.n_lower
            radius *= policy.growth
        out.append(entry)
    return out


@dataclass
class EntropyReport:
    rows: list  # (T, log N / T^n) for stabilized entries only
    c0_empirical: Optional[float]


def entropy_probe(entries: Sequence[ProfileEntry], dimension: int) -> EntropyReport:
    rows = [
        (e.T, math.log(e.n_lower) / e.T**dimension)
        for e in entries
        if e.stabilized and e.n_lower > 0
    ]
    c0 = max((v for _, v in rows), default=None)
    return EntropyReport(rows=rows, c0_empirical=c0)
