"""Point-set constructions with exact integer addresses.

Each generator returns a PointSetSource: a recipe that can materialize the
construction inside any region, with the guarantee that materializing a
subregion of a larger window yields exactly the points of the larger window
that fall in the subregion.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .contfrac import ContinuedFraction
from .core import ExactPointSet, Region
from .errors import InvalidArgument, WindowTooSmall

GOLDEN_TAU = (1.0 + math.sqrt(5.0)) / 2.0


class PointSetSource:
    """A named construction that can be materialized on demand."""

    def __init__(
        self,
        name: str,
        params: dict,
        dimension: int,
        rank: int,
        materialize_fn: Callable[[Region], ExactPointSet],
        declared_r: Optional[float] = None,
        declared_R: Optional[float] = None,
        extras: Optional[dict] = None,
    ):
        self.name = name
        self.params = params
        self.dimension = dimension
        self.rank = rank
        self._materialize = materialize_fn
        self.declared_r = declared_r
        self.declared_R = declared_R
        self.extras = extras or {}

    def materialize(self, region: Region) -> ExactPointSet:
        if region.dimension != self.dimension:
            raise InvalidArgument(
                f"{self.name} lives in dimension {self.dimension}, "
                f"got a region of dimension {region.dimension}"
            )
        return self._materialize(region)

    def descriptor(self) -> dict:
        return {"set": self.name, "params": self.params}


def _int_grid(region: Region) -> np.ndarray:
    """All integer vectors in the region's bounding box, lex order."""
    box = region.bounding_box()
    axes = []
    for a, b in box.intervals:
        lo = math.ceil(a - 1e-9)
        hi = math.floor(b + 1e-9)
        if lo > hi:
            return np.zeros((0, region.dimension), dtype=np.int64)
        axes.append(np.arange(lo, hi + 1, dtype=np.int64))
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _interval_of(region: Region) -> tuple:
    if region.dimension != 1:
        raise InvalidArgument("expected a one-dimensional region")
    if region.kind == "box":
        return region.intervals[0]
    return region.center[0] - region.radius, region.center[0] + region.radius


# ---------------------------------------------------------------------------
# Z^n, optionally with deleted sites


def gen_integer_lattice(n: int, deletions: Iterable[Sequence[int]] = ()) -> PointSetSource:
    if n < 1:
        raise InvalidArgument("dimension must be >= 1")
    dels = {tuple(int(c) for c in d) for d in deletions}
    for d in dels:
        if len(d) != n:
            raise InvalidArgument(f"deletion {d} has wrong dimension")

    def mat(region: Region) -> ExactPointSet:
        pts = _int_grid(region)
        if pts.shape[0]:
            pts = pts[region.contains(pts.astype(float))]
        if dels and pts.shape[0]:
            keep = np.fromiter(
                (tuple(row) not in dels for row in pts), dtype=bool, count=pts.shape[0]
            )
            pts = pts[keep]
        return ExactPointSet(n, n, np.eye(n), pts, region)

    return PointSetSource(
        name="zn",
        params={"n": n, "deletions": sorted(map(list, dels))},
        dimension=n,
        rank=n,
        materialize_fn=mat,
        declared_r=0.5,
        declared_R=math.sqrt(n) / 2.0 if not dels else None,
    )


# ---------------------------------------------------------------------------
# Beatty sequences: gaps 1 and tau driven by b_k = floor((k+1)a) - floor(ka)


def gen_beatty(alpha, tau: float) -> PointSetSource:
    cf = ContinuedFraction.parse(alpha)
    tau = float(tau)
    if not (tau > 1.0) or not math.isfinite(tau):
        raise InvalidArgument("tau must be a finite number > 1")

    def mat(region: Region) -> ExactPointSet:
        a, b = _interval_of(region)
        addrs = []  # (unit_gaps, tau_gaps) walked from the origin point x_0 = 0

        def pos(u: int, v: int) -> float:
            return u + tau * v

        # forward: x_0, x_1, ...; gap between x_i and x_{i+1} is b_i
        u = v = 0
        prev_floor = 0
        i = 0
        while True:
            p = pos(u, v)
            if p > b + tau + 1.0:
                break
            if a - 1e-9 <= p <= b + 1e-9:
                addrs.append((u, v))
            cur = cf.floor_multiple(i + 1)
            if cur - prev_floor:
                v += 1
            else:
                u += 1
            prev_floor = cur
            i += 1
        # backward: gap between x_{i-1} and x_i is b_{i-1}
        u = v = 0
        prev_floor = 0
        i = 0
        back = []
        while True:
            cur = cf.floor_multiple(i - 1)
            if prev_floor - cur:
                v -= 1
            else:
                u -= 1
            prev_floor = cur
            i -= 1
            p = pos(u, v)
            if p < a - tau - 1.0:
                break
            if a - 1e-9 <= p <= b + 1e-9:
                back.append((u, v))
        addrs = back[::-1] + addrs
        arr = np.array(addrs, dtype=np.int64).reshape(-1, 2)
        proj = np.array([[1.0], [tau]])
        return ExactPointSet(1, 2, proj, arr, region)

    return PointSetSource(
        name="beatty",
        params={"alpha": _alpha_param(alpha), "tau": tau},
        dimension=1,
        rank=2,
        materialize_fn=mat,
        declared_r=0.5,
        declared_R=tau / 2.0,
        extras={"cf": cf, "tau": tau},
    )


def gen_fibonacci() -> PointSetSource:
    """Golden-alpha Beatty chain with the golden long gap."""
    return gen_beatty("golden", GOLDEN_TAU)


def _alpha_param(alpha) -> str:
    if isinstance(alpha, ContinuedFraction):
        return "cf:" + ",".join(str(alpha.quotient(k)) for k in range(1, alpha.known_terms() + 1))
    return str(alpha)


# ---------------------------------------------------------------------------
# Cut-and-project from Z^2: select (m, p) with p - alpha m in [0, 1)


def gen_cut_project_1d(alpha) -> PointSetSource:
    cf = ContinuedFraction.parse(alpha)
    if cf.is_rational:
        raise InvalidArgument(
            "cut-and-project needs an irrational alpha; rational slopes put "
            "lattice points on the window boundary"
        )
    af = cf.value_float()
    norm = math.sqrt(1.0 + af * af)

    def p_of(m: int) -> int:
        if m == 0:
            return 0
        return cf.floor_multiple(m) + 1

    def mat(region: Region) -> ExactPointSet:
        a, b = _interval_of(region)
        m_lo = math.floor(a / norm) - 2
        m_hi = math.ceil(b / norm) + 2
        addrs = []
        for m in range(m_lo, m_hi + 1):
            p = p_of(m)
            t = (m + p * af) / norm
            if a - 1e-9 <= t <= b + 1e-9:
                addrs.append((m, p))
        arr = np.array(addrs, dtype=np.int64).reshape(-1, 2)
        proj = np.array([[1.0 / norm], [af / norm]])
        return ExactPointSet(1, 2, proj, arr, region)

    return PointSetSource(
        name="cut_project",
        params={"alpha": _alpha_param(alpha)},
        dimension=1,
        rank=2,
        materialize_fn=mat,
        declared_r=0.5 / norm,
        declared_R=(1.0 + af) / (2.0 * norm),
        extras={"cf": cf, "alpha_float": af, "p_of": p_of, "norm": norm},
    )


# ---------------------------------------------------------------------------
# Products


def gen_product(factors: Sequence[PointSetSource]) -> PointSetSource:
    factors = list(factors)
    if len(factors) < 2:
        raise InvalidArgument("product needs at least 2 factors")
    dim = sum(f.dimension for f in factors)
    rank = sum(f.rank for f in factors)

    def mat(region: Region) -> ExactPointSet:
        box = region.bounding_box()
        # split the bounding box among the factors
        parts = []
        off = 0
        for f in factors:
            ivs = box.intervals[off : off + f.dimension]
            parts.append(f.materialize(Region.box(ivs)))
            off += f.dimension
        # cartesian product of addresses
        addr = parts[0].addresses
        for sub in parts[1:]:
            if addr.shape[0] == 0 or sub.addresses.shape[0] == 0:
                addr = np.zeros((0, addr.shape[1] + sub.addresses.shape[1]), np.int64)
                continue
            left = np.repeat(addr, sub.addresses.shape[0], axis=0)
            right = np.tile(sub.addresses, (addr.shape[0], 1))
            addr = np.concatenate([left, right], axis=1)
        proj = np.zeros((rank, dim))
        ro = co = 0
        for f, sub in zip(factors, parts):
            proj[ro : ro + f.rank, co : co + f.dimension] = sub.projection
            ro += f.rank
            co += f.dimension
        ps = ExactPointSet(dim, rank, proj, addr, region)
        if region.kind == "ball" and len(ps):
            keep = region.contains(ps.points)
            ps = ExactPointSet(dim, rank, proj, addr[keep], region)
        return ps

    rs = [f.declared_r for f in factors]
    Rs = [f.declared_R for f in factors]
    return PointSetSource(
        name="product",
        params={"factors": [f.descriptor() for f in factors]},
        dimension=dim,
        rank=rank,
        materialize_fn=mat,
        declared_r=min(rs) if all(r is not None for r in rs) else None,
        declared_R=math.sqrt(sum(R * R for R in Rs)) if all(R is not None for R in Rs) else None,
        extras={"factors": factors},
    )


# ---------------------------------------------------------------------------
# Z^3 with nested families of deleted and restored lines


def _deleted_lines_levels(coords: np.ndarray, a: Sequence[int]) -> np.ndarray:
    """Deepest level j whose line family contains each point (0 if none).

    Level j removes (j odd) or restores (j even) three line families, one per
    axis, with transverse residues +-a_j mod 4 a_j arranged cyclically.
    """
    x, y, z = coords[:, 0], coords[:, 1], coords[:, 2]
    lvl = np.zeros(coords.shape[0], dtype=np.int64)
    for j, aj in enumerate(a, start=1):
        m = 4 * aj
        on_x = ((y - aj) % m == 0) & ((z + aj) % m == 0)
        on_y = ((z - aj) % m == 0) & ((x + aj) % m == 0)
        on_z = ((x - aj) % m == 0) & ((y + aj) % m == 0)
        lvl[on_x | on_y | on_z] = j
    return lvl


def gen_deleted_lines(a: Sequence[int]) -> PointSetSource:
    a = [int(v) for v in a]
    if not a or a[0] < 1:
        raise InvalidArgument("need a_1 >= 1")
    for prev, cur in zip(a, a[1:]):
        q, rem = divmod(cur, prev)
        if rem != 0 or q < 5 or (q - 1) % 4 != 0:
            raise InvalidArgument(
                f"a must grow by factors of the form 4b+1 with b >= 1, got {cur}/{prev}"
            )

    def present_mask(coords: np.ndarray) -> np.ndarray:
        lvl = _deleted_lines_levels(coords, a)
        return lvl % 2 == 0

    def mat(region: Region) -> ExactPointSet:
        if region.dimension != 3:
            raise InvalidArgument("deleted-lines sets live in dimension 3")
        pts = _int_grid(region)
        if pts.shape[0]:
            pts = pts[region.contains(pts.astype(float))]
        if pts.shape[0]:
            pts = pts[present_mask(pts)]
        return ExactPointSet(3, 3, np.eye(3), pts, region)

    return PointSetSource(
        name="deleted_lines",
        params={"a": list(a)},
        dimension=3,
        rank=3,
        materialize_fn=mat,
        declared_r=0.5,
        declared_R=math.sqrt(5.0) / 2.0,
        extras={
            "a": list(a),
            "levels": lambda pts: _deleted_lines_levels(np.asarray(pts, np.int64), a),
            "present": lambda pts: present_mask(np.asarray(pts, np.int64)),
        },
    )


# ---------------------------------------------------------------------------
# Hierarchical two-colorings of Z^n and their coded point sets


def _exact_even_root(a: int, n: int) -> int:
    m = round(a ** (1.0 / n))
    for cand in range(max(2, m - 2), m + 3):
        if cand**n == a:
            if cand % 2:
                raise InvalidArgument(f"a_k = {a} must be an even n-th power")
            return cand
    raise InvalidArgument(f"a_k = {a} is not an exact n-th power")


class TwoColorStructure:
    """Level-K hierarchical coloring of Z^n cells.

    Cells in [0, side_K)^n follow the nested block construction; negative
    coordinates mirror via c -> -1 - c. Each level packs 2^(2^n) vertex-type
    blocks into the lowest slots (lex order) and fills the rest with the
    inverted tile, so exactly N/2 slots per level carry the upright tile.
    """

    def __init__(self, n: int, a: Sequence[int]):
        if n < 1:
            raise InvalidArgument("dimension must be >= 1")
        self.n = n
        self.N = 2 ** (2**n + n)
        self.a = [int(v) for v in a]
        if not self.a:
            raise InvalidArgument("need at least one level")
        for v in self.a:
            if v <= self.N:
                raise InvalidArgument(f"need a_k > N = {self.N}, got {v}")
        self.m = [_exact_even_root(v, n) for v in self.a]
        self.sides = [1]
        for mk in self.m:
            self.sides.append(self.sides[-1] * mk)  # sides[k] = cells per edge of C_k

    @property
    def levels(self) -> int:
        return len(self.a)

    def _pattern_black(self, t: np.ndarray, m: int) -> np.ndarray:
        """Black mask for tile coordinates t in [0, m)^n at one level."""
        slot = t >> 1
        corner = t & 1
        half = m // 2
        slot_idx = np.zeros(t.shape[0], dtype=np.int64)
        corner_idx = np.zeros(t.shape[0], dtype=np.int64)
        for i in range(self.n):
            slot_idx = slot_idx * half + slot[:, i]
            corner_idx = corner_idx * 2 + corner[:, i]
        n_corners = 2**self.n
        in_blocks = slot_idx < 2**n_corners
        shift = (n_corners - 1 - corner_idx).astype(np.int64)
        bits = (slot_idx >> shift) & 1
        return np.where(in_blocks, bits == 1, True)

    def cell_is_white(self, cells: np.ndarray) -> np.ndarray:
        cells = np.asarray(cells, dtype=np.int64)
        if cells.ndim == 1:
            cells = cells.reshape(-1, self.n)
        x = np.where(cells < 0, -1 - cells, cells)
        if x.size and int(x.max()) >= self.sides[-1]:
            raise WindowTooSmall(
                f"cells reach beyond level {self.levels} "
                f"(side {self.sides[-1]}); construct more levels"
            )
        inv = np.zeros(x.shape[0], dtype=bool)
        for k in range(self.levels, 1, -1):
            side = self.sides[k - 1]
            t = x // side
            x = x % side
            inv ^= self._pattern_black(t, self.m[k - 1])
        base = self._pattern_black(x, self.m[0])
        return ~(base ^ inv)

    def white_count_in_box(self, lo: Sequence[int], hi: Sequence[int]) -> int:
        """Exact number of white cells c with lo <= c < hi per axis."""
        axes = [np.arange(int(l), int(h), dtype=np.int64) for l, h in zip(lo, hi)]
        if any(ax.size == 0 for ax in axes):
            return 0
        grids = np.meshgrid(*axes, indexing="ij")
        cells = np.stack([g.ravel() for g in grids], axis=1)
        return int(np.count_nonzero(self.cell_is_white(cells)))

    def rho(self, k: int) -> Fraction:
        val = Fraction(1, 2) + Fraction((-1) ** k, 2) * self.partial_product(k)
        return val

    def partial_product(self, k: int) -> Fraction:
        out = Fraction(1)
        for j in range(k):
            out *= 1 - Fraction(self.N, self.a[j])
        return out


def rho_sequence(n: int, a: Sequence[int]) -> tuple:
    """White-cell proportions rho_0..rho_K, by recursion and closed form.

    Both routes are computed independently and must agree exactly; the pair
    of lists is returned so callers can re-check.
    """
    st = TwoColorStructure(n, a)
    N = st.N
    rec = [Fraction(1)]
    for ak in st.a:
        w = Fraction(N, 2 * ak)
        rec.append(w * rec[-1] + (1 - w) * (1 - rec[-1]))
    closed = [st.rho(k) for k in range(st.levels + 1)]
    if rec != closed:
        raise AssertionError("recursion and closed form disagree")
    return rec, closed


def gen_two_color(n: int, a: Sequence[int], coding: str = "pair-offset") -> PointSetSource:
    if coding != "pair-offset":
        raise InvalidArgument(f"unknown coding {coding!r}")
    st = TwoColorStructure(n, a)

    # address basis: row 0 spans the pair offset direction, rows 1..n-1 are
    # plain lattice steps. A cell c maps to first coordinate 3*c_1 (white)
    # or 3*c_1 -+ 1 (black pair), so whiteness is first coordinate mod 3.
    proj = np.zeros((n, n))
    proj[0, :] = 1.0 / 3.0
    for i in range(1, n):
        proj[i, i] = 1.0

    def addr_of_cells(cells: np.ndarray, shift: int) -> np.ndarray:
        out = np.empty_like(cells)
        out[:, 0] = 3 * cells[:, 0] + shift
        for i in range(1, n):
            out[:, i] = cells[:, i] - cells[:, 0]
        return out

    def mat(region: Region) -> ExactPointSet:
        box = region.bounding_box()
        lo = [math.floor(a_ - 1e-9) - 1 for a_, _ in box.intervals]
        hi = [math.ceil(b_ + 1e-9) + 1 for _, b_ in box.intervals]
        axes = [np.arange(l, h + 1, dtype=np.int64) for l, h in zip(lo, hi)]
        grids = np.meshgrid(*axes, indexing="ij")
        cells = np.stack([g.ravel() for g in grids], axis=1)
        white = st.cell_is_white(cells)
        addr = np.concatenate(
            [
                addr_of_cells(cells[white], 0),
                addr_of_cells(cells[~white], -1),
                addr_of_cells(cells[~white], +1),
            ],
            axis=0,
        )
        pts = addr.astype(float) @ proj
        keep = region.contains(pts)
        return ExactPointSet(n, n, proj, addr[keep], region)

    rhos, _ = rho_sequence(n, a)
    return PointSetSource(
        name="two_color",
        params={"n": n, "a": list(st.a), "coding": coding},
        dimension=n,
        rank=n,
        materialize_fn=mat,
        declared_r=1.0 / 6.0,
        declared_R=None,
        extras={
            "structure": st,
            "rho": rhos,
            "N": st.N,
            "scales": st.sides[1:],
            "is_white_address": lambda addr: np.asarray(addr)[:, 0] % 3 == 0,
        },
    )


# ---------------------------------------------------------------------------
# Registry used by the CLI and the verification harness


def build_source(name: str, params: Optional[dict] = None) -> PointSetSource:
    params = dict(params or {})
    try:
        if name == "zn":
            return gen_integer_lattice(
                int(params.get("n", 1)), params.get("deletions", ())
            )
        if name == "beatty":
            return gen_beatty(
                params.get("alpha", "golden"), float(params.get("tau", GOLDEN_TAU))
            )
        if name == "fibonacci":
            return gen_fibonacci()
        if name == "cut_project":
            return gen_cut_project_1d(params.get("alpha", "golden"))
        if name == "deleted_lines":
            return gen_deleted_lines(params.get("a", [4]))
        if name == "two_color":
            return gen_two_color(
                int(params.get("n", 1)), params.get("a", [16, 32, 64, 128])
            )
        if name == "product":
            factors = [
                build_source(f["set"], f.get("params")) for f in params.get("factors", [])
            ]
            return gen_product(factors)
    except (TypeError, KeyError, ValueError) as exc:
        raise InvalidArgument(f"bad parameters for {name!r}: {exc}") from exc
    raise InvalidArgument(f"unknown set name {name!r}")
