"""Core geometry types: regions, point sets with exact addresses, patch keys.

Positions are split into an exact integer part (addresses) and a float
projection matrix, so set membership and translation tests can be done on
integers while distances use ordinary float geometry.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InsufficientData, InvalidArgument, WindowTooSmall

# Squared-distance slack for closed-ball membership. Kept on the squared
# quantity so integer geometries stay exact.
BALL_TOL = 1e-9


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n.

    The two-step recurrence keeps low dimensions exact (2, pi, 4pi/3, ...),
    which the gamma-function form does not.
    """
    if n < 0:
        raise InvalidArgument("dimension must be >= 0")
    vol = 1.0 if n % 2 == 0 else 2.0
    for m in range(n % 2 + 2, n + 1, 2):
        vol *= 2.0 * math.pi / m
    return vol


# ---------------------------------------------------------------------------
# Regions


@dataclass(frozen=True)
class Region:
    """A box (product of closed intervals) or a closed ball.

    Boxes store per-axis intervals [a_i, b_i] with a_i < b_i. Balls store a
    center and a nonnegative radius. Use Region.box / Region.ball.
    """

    kind: str
    intervals: Optional[tuple] = None  # box: ((a_1,b_1),...,(a_n,b_n))
    center: Optional[tuple] = None
    radius: Optional[float] = None

    @staticmethod
    def box(intervals: Iterable[Sequence[float]]) -> "Region":
        ivs = tuple((float(a), float(b)) for a, b in intervals)
        if not ivs:
            raise InvalidArgument("box needs at least one interval")
        for a, b in ivs:
            if not (a < b):
                raise InvalidArgument(f"degenerate interval [{a}, {b}]")
        return Region(kind="box", intervals=ivs)

    @staticmethod
    def ball(center: Sequence[float], radius: float) -> "Region":
        c = tuple(float(x) for x in center)
        if not c:
            raise InvalidArgument("ball needs a center of dimension >= 1")
        if radius < 0:
            raise InvalidArgument("ball radius must be >= 0")
        return Region(kind="ball", center=c, radius=float(radius))

    @staticmethod
    def centered_box(n: int, halfwidth: float) -> "Region":
        return Region.box([(-halfwidth, halfwidth)] * int(n))

    @property
    def dimension(self) -> int:
        if self.kind == "box":
            return len(self.intervals)
        return len(self.center)

    def contains(self, points: np.ndarray, slack: float = 1e-9) -> np.ndarray:
        """Boolean mask of points inside the closed region.

        A small slack absorbs float roundoff in generated positions.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.dimension:
            raise InvalidArgument("dimension mismatch in Region.contains")
        if self.kind == "box":
            lo = np.array([a for a, _ in self.intervals])
            hi = np.array([b for _, b in self.intervals])
            return np.all((pts >= lo - slack) & (pts <= hi + slack), axis=1)
        d2 = np.sum((pts - np.asarray(self.center)) ** 2, axis=1)
        return d2 <= self.radius**2 + BALL_TOL

    def erode(self, margin: float) -> "Region":
        """Shrink the region by margin on every side. Errors if it empties."""
        if margin < 0:
            raise InvalidArgument("erosion margin must be >= 0")
        if self.kind == "box":
            ivs = [(a + margin, b - margin) for a, b in self.intervals]
            if any(a >= b for a, b in ivs):
                raise WindowTooSmall(
                    f"box cannot be eroded by {margin}: an interval empties"
                )
            return Region.box(ivs)
        rad = self.radius - margin
        if rad <= 0:
            raise WindowTooSmall(f"ball of radius {self.radius} cannot be eroded by {margin}")
        return Region.ball(self.center, rad)

    def bounding_box(self) -> "Region":
        if self.kind == "box":
            return self
        return Region.box(
            [(c - self.radius, c + self.radius) for c in self.center]
        )

    def volume(self) -> float:
        if self.kind == "box":
            return float(np.prod([b - a for a, b in self.intervals]))
        return unit_ball_volume(self.dimension) * self.radius ** self.dimension

    def surface_sum(self) -> float:
        """For boxes: 2 * vol * sum(1/edge), the total facet area."""
        if self.kind != "box":
            raise InvalidArgument("surface_sum is defined for boxes")
        vol = self.volume()
        return 2.0 * vol * sum(1.0 / (b - a) for a, b in self.intervals)

    def width(self) -> float:
        """For boxes: the shortest edge length."""
        if self.kind != "box":
            raise InvalidArgument("width is defined for boxes")
        return min(b - a for a, b in self.intervals)

    def contains_region(self, other: "Region", slack: float = 1e-9) -> bool:
        """True if the other region sits inside this one (closed containment)."""
        if other.kind == "box":
            corners = np.array(np.meshgrid(*[iv for iv in other.intervals])).T.reshape(
                -1, other.dimension
            )
            return bool(np.all(self.contains(corners, slack=slack)))
        # ball inside box: check center +- radius per axis; ball in ball: radii
        c = np.asarray(other.center)
        if self.kind == "box":
            lo = np.array([a for a, _ in self.intervals])
            hi = np.array([b for _, b in self.intervals])
            return bool(
                np.all(c - other.radius >= lo - slack)
                and np.all(c + other.radius <= hi + slack)
            )
        dist = float(np.linalg.norm(c - np.asarray(self.center)))
        return dist + other.radius <= self.radius + slack

    def to_json(self) -> dict:
        if self.kind == "box":
            return {"kind": "box", "intervals": [list(iv) for iv in self.intervals]}
        return {"kind": "ball", "center": list(self.center), "radius": self.radius}

    @staticmethod
    def from_json(obj: dict) -> "Region":
        if obj.get("kind") == "box":
            return Region.box(obj["intervals"])
        if obj.get("kind") == "ball":
            return Region.ball(obj["center"], obj["radius"])
        raise InvalidArgument(f"unknown region kind {obj.get('kind')!r}")


# ---------------------------------------------------------------------------
# Patch keys

# A patch key is the sorted tuple of integer address differences seen inside
# a patch, always including the zero vector for the center itself.


def make_patch_key(diffs: Iterable[Sequence[int]]) -> tuple:
    key = tuple(sorted(tuple(int(c) for c in d) for d in diffs))
    validate_patch_key(key)
    return key


def validate_patch_key(key: tuple) -> None:
    if len(key) == 0:
        raise InvalidArgument("patch key must not be empty")
    widths = {len(d) for d in key}
    if len(widths) != 1:
        raise InvalidArgument("patch key entries must share one length")
    zero = (0,) * len(key[0])
    if zero not in key:
        raise InvalidArgument("patch key must contain the zero vector")
    if len(set(key)) != len(key):
        raise InvalidArgument("patch key must not contain duplicates")
    if tuple(sorted(key)) != key:
        raise InvalidArgument("patch key must be sorted lexicographically")


# ---------------------------------------------------------------------------
# Point sets


class ExactPointSet:
    """Finite point set with integer addresses and a float projection.

    Point i sits at addresses[i] @ projection, a row vector in R^n. The
    projection has shape (rank, dimension); row j is the image in R^n of the
    j-th address basis vector. The set is complete for its region: it holds
    every point of the underlying construction inside the region and nothing
    else. Treat instances as immutable.
    """

    def __init__(
        self,
        dimension: int,
        rank: int,
        projection: np.ndarray,
        addresses: np.ndarray,
        region: Region,
    ):
        projection = np.asarray(projection, dtype=float)
        addresses = np.asarray(addresses, dtype=np.int64)
        if addresses.ndim != 2:
            addresses = addresses.reshape(-1, rank)
        if rank < dimension:
            raise InvalidArgument("rank must be >= dimension")
        if projection.shape != (rank, dimension):
            raise InvalidArgument(
                f"projection must have shape ({rank}, {dimension}), got {projection.shape}"
            )
        if addresses.shape[1] != rank and addresses.shape[0] > 0:
            raise InvalidArgument("address width must equal rank")
        if region.dimension != dimension:
            raise InvalidArgument("region dimension mismatch")
        if addresses.shape[0] > 0:
            uniq = np.unique(addresses, axis=0)
            if uniq.shape[0] != addresses.shape[0]:
                raise InvalidArgument("addresses must be distinct")
        self.dimension = int(dimension)
        self.rank = int(rank)
        self.projection = projection
        self.addresses = addresses
        self.region = region
        self._points: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return self.addresses.shape[0]

    @property
    def points(self) -> np.ndarray:
        if self._points is None:
            if len(self) == 0:
                self._points = np.zeros((0, self.dimension))
            else:
                self._points = self.addresses.astype(float) @ self.projection
        return self._points

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "rank": self.rank,
            "projection": [list(map(float, row)) for row in self.projection],
            "addresses": [list(map(int, row)) for row in self.addresses],
            "region": self.region.to_json(),
        }

    @staticmethod
    def from_json(obj: dict) -> "ExactPointSet":
        return ExactPointSet(
            dimension=int(obj["dimension"]),
            rank=int(obj["rank"]),
            projection=np.asarray(obj["projection"], dtype=float),
            addresses=np.asarray(obj["addresses"], dtype=np.int64).reshape(
                -1, int(obj["rank"])
            ),
            region=Region.from_json(obj["region"]),
        )


class FloatPointSet:
    """Imported float positions with a separation tolerance.

    Pairwise distances must exceed the tolerance; importers reject offending
    pairs. No exact addresses, so only approximate analyses apply.
    """

    def __init__(self, points: np.ndarray, tolerance: float, region: Region):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if tolerance <= 0:
            raise InvalidArgument("tolerance must be positive")
        bad = close_pairs(points, tolerance)
        if bad:
            raise InvalidArgument(
                "points closer than tolerance at index pairs " + repr(bad[:20])
            )
        if region.dimension != points.shape[1] and points.shape[0] > 0:
            raise InvalidArgument("region dimension mismatch")
        self.points = points
        self.tolerance = float(tolerance)
        self.region = region
        self.dimension = int(points.shape[1]) if points.shape[0] else region.dimension

    def __len__(self) -> int:
        return self.points.shape[0]

    def to_json(self) -> dict:
        return {
            "points": [list(map(float, row)) for row in self.points],
            "tolerance": self.tolerance,
            "region": self.region.to_json(),
        }

    @staticmethod
    def from_json(obj: dict) -> "FloatPointSet":
        pts = np.asarray(obj["points"], dtype=float)
        if pts.size == 0:
            pts = pts.reshape(0, Region.from_json(obj["region"]).dimension)
        if "dimension" in obj and pts.shape[0] and int(obj["dimension"]) != pts.shape[1]:
            raise InvalidArgument(
                "declared dimension %d but rows have %d coordinates"
                % (int(obj["dimension"]), pts.shape[1])
            )
        return FloatPointSet(
            points=pts,
            tolerance=float(obj["tolerance"]),
            region=Region.from_json(obj["region"]),
        )


def close_pairs(points: np.ndarray, tolerance: float) -> list:
    """Index pairs at distance <= tolerance (used by the float importer)."""
    if points.shape[0] < 2:
        return []
    from scipy.spatial import cKDTree

    tree = cKDTree(points)
    return sorted(tuple(p) for p in tree.query_pairs(tolerance * (1 + 1e-12)))


def save_point_set(ps, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(ps.to_json(), fh, sort_keys=True)
        fh.write("\n")


def load_point_set(path: str):
    with open(path) as fh:
        obj = json.load(fh)
    if "addresses" in obj:
        return ExactPointSet.from_json(obj)
    if "points" in obj:
        return FloatPointSet.from_json(obj)
    raise InvalidArgument("file holds neither an exact nor a float point set")


# ---------------------------------------------------------------------------
# Operations


def project(ps: ExactPointSet, address: Sequence[int]) -> np.ndarray:
    """Map an integer address to its position in R^n."""
    a = np.asarray(address, dtype=np.int64)
    if a.shape != (ps.rank,):
        raise InvalidArgument(f"address must have length {ps.rank}")
    return a.astype(float) @ ps.projection


def delone_constants(ps, resolution: Optional[float] = None) -> tuple:
    """Estimate (r, R): packing radius and covering radius over the window.

    r is half the minimum pairwise distance, exact. R is the covering radius
    of the points over the region eroded by a first-pass estimate, so points
    missing beyond the window cannot deflate it; in dimension one it is exact,
    otherwise it is the upper end of a grid bracket.
    """
    from .repetitivity import covering_radius

    pts = ps.points if isinstance(ps, ExactPointSet) else ps.points
    if pts.shape[0] < 2:
        raise InsufficientData("need at least 2 points for Delone constants")
    from scipy.spatial import cKDTree

    tree = cKDTree(pts)
    dists, _ = tree.query(pts, k=2)
    r = float(dists[:, 1].min()) / 2.0

    region = ps.region
    if resolution is None:
        resolution = max(r / 4.0, 1e-6)
    _, rough = covering_radius(pts, region, resolution=resolution)
    try:
        eroded = region.erode(rough)
    except WindowTooSmall:
        raise InsufficientData(
            "window too small to certify a covering radius"
        ) from None
    _, upper = covering_radius(pts, eroded, resolution=resolution)
    return r, float(upper)


def natural_distance(f1, f2, k: float) -> float:
    """Window-k mismatch functional between two point sets.

    Smallest delta such that each set's points inside the closed ball of
    radius k around the origin are within delta of a point of the other set,
    capped at 1. Not a metric: the triangle inequality can fail, so treat
    values as raw mismatch scores.
    """
    if k < 0:
        raise InvalidArgument("k must be >= 0")
    p1 = f1.points if hasattr(f1, "points") else np.atleast_2d(np.asarray(f1, float))
    p2 = f2.points if hasattr(f2, "points") else np.atleast_2d(np.asarray(f2, float))
    if p1.shape[0] and p2.shape[0] and p1.shape[1] != p2.shape[1]:
        raise InvalidArgument("dimension mismatch")

    def one_sided(a: np.ndarray, b: np.ndarray) -> float:
        if a.shape[0] == 0:
            return 0.0  # nothing in the window, the inclusion is vacuous
        inside = a[np.sum(a * a, axis=1) <= k * k + BALL_TOL]
        if inside.shape[0] == 0:
            return 0.0
        if b.shape[0] == 0:
            return math.inf
        from scipy.spatial import cKDTree

        d, _ = cKDTree(b).query(inside)
        return float(np.max(d))

    delta = max(one_sided(p1, p2), one_sided(p2, p1))
    return min(delta, 1.0)
