"""Construction generators: walks, congruences, hierarchical colorings."""

import math
from fractions import Fraction

import numpy as np
import pytest

from delone_lab.contfrac import ContinuedFraction
from delone_lab.core import Region
from delone_lab.errors import InvalidArgument, WindowTooSmall
from delone_lab.generators import (
    GOLDEN_TAU,
    build_source,
    gen_beatty,
    gen_cut_project_1d,
    gen_deleted_lines,
    gen_fibonacci,
    gen_integer_lattice,
    gen_product,
    gen_two_color,
    rho_sequence,
)


def isqrt_floor_golden(k: int) -> int:
    return (math.isqrt(5 * k * k) - k) // 2


class TestIntegerLattice:
    def test_line_count(self):
        ps = gen_integer_lattice(1).materialize(Region.box([(-3, 3)]))
        assert len(ps) == 7
        assert sorted(ps.points[:, 0]) == list(range(-3, 4))

    def test_square_count(self):
        ps = gen_integer_lattice(2).materialize(Region.box([(-5, 5)] * 2))
        assert len(ps) == 121

    def test_deletions(self):
        src = gen_integer_lattice(2, deletions=[(0, 0), (1, 1)])
        ps = src.materialize(Region.box([(-5, 5)] * 2))
        assert len(ps) == 119
        as_tuples = {tuple(a) for a in ps.addresses}
        assert (0, 0) not in as_tuples and (1, 1) not in as_tuples

    def test_declared_constants(self):
        src = gen_integer_lattice(3)
        assert src.declared_r == 0.5
        assert src.declared_R == pytest.approx(math.sqrt(3) / 2)
        assert gen_integer_lattice(2, deletions=[(0, 0)]).declared_R is None

    def test_ball_window(self):
        ps = gen_integer_lattice(2).materialize(Region.ball([0.0, 0.0], 2.0))
        # |.|^2 <= 4: 13 lattice points
        assert len(ps) == 13


class TestBeatty:
    def test_golden_gap_word(self):
        src = gen_fibonacci()
        ps = src.materialize(Region.box([(-1, 30)]))
        x = np.sort(ps.points[:, 0])
        i0 = int(np.argmin(np.abs(x)))
        gaps = np.diff(x)[i0:]
        word = [1 if g > 1.3 else 0 for g in gaps[:11]]
        # index-0 symbol is floor(alpha) - floor(0) = 0, a unit gap
        assert word == [0, 1, 0, 1, 1, 0, 1, 0, 1, 1, 0]
        assert word[1:] == ContinuedFraction.golden().beatty_word(1, 10)

    def test_positions_match_floor_formula(self):
        # the k-th point right of the origin sits at k + floor(k alpha) tau
        src = gen_fibonacci()
        ps = src.materialize(Region.box([(0, 40)]))
        x = np.sort(ps.points[:, 0])
        assert x[0] == pytest.approx(0.0)
        for k in range(1, len(x)):
            want = (k - isqrt_floor_golden(k)) + isqrt_floor_golden(k) * GOLDEN_TAU
            assert x[k] == pytest.approx(want, abs=1e-9)

    def test_addresses_project_exactly(self):
        ps = gen_fibonacci().materialize(Region.box([(-50, 50)]))
        rebuilt = ps.addresses[:, 0] + GOLDEN_TAU * ps.addresses[:, 1]
        assert np.allclose(ps.points[:, 0], rebuilt)

    def test_backward_walk_symmetry(self):
        big = gen_fibonacci().materialize(Region.box([(-40, 40)]))
        left = gen_fibonacci().materialize(Region.box([(-40, 0)]))
        left_addr = {tuple(a) for a in left.addresses}
        big_addr = {tuple(a) for a in big.addresses}
        assert left_addr <= big_addr

    def test_rational_alpha_periodic_gaps(self):
        src = gen_beatty(ContinuedFraction.parse("0.5"), 2.0)
        ps = src.materialize(Region.box([(0, 20)]))
        gaps = np.diff(np.sort(ps.points[:, 0]))
        assert set(np.round(gaps, 9)) == {1.0, 2.0}
        # alternating pattern: no two equal gaps in a row
        assert all(gaps[i] != gaps[i + 1] for i in range(len(gaps) - 1))

    def test_tau_validation(self):
        with pytest.raises(InvalidArgument):
            gen_beatty(ContinuedFraction.golden(), 1.0)
        with pytest.raises(InvalidArgument):
            gen_beatty(ContinuedFraction.golden(), float("inf"))


class TestCutProject:
    def setup_method(self):
        self.src = gen_cut_project_1d(ContinuedFraction.golden())
        self.alpha = self.src.extras["alpha_float"]
        self.norm = self.src.extras["norm"]

    def test_origin_and_norm(self):
        ps = self.src.materialize(Region.box([(-10, 10)]))
        assert np.any(np.abs(ps.points[:, 0]) < 1e-12)
        assert self.norm == pytest.approx(math.sqrt(1 + self.alpha**2))

    def test_two_gap_values(self):
        ps = self.src.materialize(Region.box([(-40, 40)]))
        gaps = np.diff(np.sort(ps.points[:, 0]))
        short, long_ = 1.0 / self.norm, (1.0 + self.alpha) / self.norm
        for g in gaps:
            assert abs(g - short) < 1e-9 or abs(g - long_) < 1e-9
        assert 1 / math.sqrt(2) < gaps.min() <= gaps.max() < math.sqrt(2)

    def test_word_matches_symbols_away_from_origin(self):
        ps = self.src.materialize(Region.box([(-60, 60)]))
        x = np.sort(ps.points[:, 0])
        gaps = np.diff(x)
        mid = (1.0 + self.alpha / 2.0) / self.norm
        word = [1 if g > mid else 0 for g in gaps]
        i0 = int(np.argmin(np.abs(x)))
        cf = ContinuedFraction.golden()
        tail = word[i0 + 2 : i0 + 30]
        assert tail == cf.beatty_word(2, len(tail))

    def test_selection_rule_addresses(self):
        # address (m, p): p = floor(alpha m) + 1 away from the origin
        ps = self.src.materialize(Region.box([(-20, 20)]))
        cf = ContinuedFraction.golden()
        for m, p in ps.addresses:
            if m == 0:
                assert p == 0
            else:
                assert p == cf.floor_multiple(int(m)) + 1

    def test_rational_rejected(self):
        with pytest.raises(InvalidArgument):
            gen_cut_project_1d(ContinuedFraction.parse("0.5"))


class TestProduct:
    def test_box_counts_multiply(self):
        src = gen_product([gen_integer_lattice(1), gen_integer_lattice(1)])
        ps = src.materialize(Region.box([(-5, 5), (-3, 3)]))
        assert len(ps) == 11 * 7
        assert src.dimension == 2 and src.rank == 2

    def test_mixed_ranks(self):
        src = gen_product([gen_integer_lattice(1), gen_fibonacci()])
        assert src.dimension == 2 and src.rank == 3
        ps = src.materialize(Region.box([(-4, 4), (-4, 4)]))
        z_count = 9
        fib_count = len(gen_fibonacci().materialize(Region.box([(-4, 4)])))
        assert len(ps) == z_count * fib_count

    def test_ball_window_filters(self):
        src = gen_product([gen_integer_lattice(1), gen_integer_lattice(1)])
        ps = src.materialize(Region.ball([0.0, 0.0], 2.0))
        assert len(ps) == 13

    def test_needs_two_factors(self):
        with pytest.raises(InvalidArgument):
            gen_product([gen_integer_lattice(2)])


class TestDeletedLines:
    def test_scale_validation(self):
        gen_deleted_lines([4, 20])  # quotient 5: fine
        gen_deleted_lines([4, 36])  # quotient 9: fine
        for bad in ([4, 12], [4, 8], [4, 4], [4, 21], [0], [-4]):
            with pytest.raises(InvalidArgument):
                gen_deleted_lines(bad)

    def test_single_level_membership(self):
        src = gen_deleted_lines([4])
        present = src.extras["present"]
        # x-axis family at level 1: y = 4 mod 16, z = -4 mod 16
        assert not present(np.array([[0, 4, -4]]))[0]
        assert not present(np.array([[7, 4, 12]]))[0]
        # z-axis family fixes x and y instead
        assert not present(np.array([[4, -4, 3]]))[0]
        assert present(np.array([[0, 0, 0]]))[0]
        assert present(np.array([[0, 5, -5]]))[0]

    def test_level_two_returns_points(self):
        src = gen_deleted_lines([1, 5])
        levels = src.extras["levels"](np.array([[0, 5, -5], [0, 1, -1], [0, 0, 0]]))
        assert list(levels) == [2, 1, 0]
        present = src.extras["present"]
        assert present(np.array([[0, 5, -5]]))[0]  # even depth: kept
        assert not present(np.array([[0, 1, -1]]))[0]  # odd depth: removed

    def test_window_matches_congruences(self):
        src = gen_deleted_lines([2])
        ps = src.materialize(Region.box([(-10, 10)] * 3))
        kept = {tuple(a) for a in ps.addresses}
        m = 8
        for x in range(-10, 11):
            for y in range(-10, 11):
                for z in range(-10, 11):
                    on_line = (
                        ((y - 2) % m == 0 and (z + 2) % m == 0)
                        or ((z - 2) % m == 0 and (x + 2) % m == 0)
                        or ((x - 2) % m == 0 and (y + 2) % m == 0)
                    )
                    assert ((x, y, z) in kept) == (not on_line)

    def test_declared_constants(self):
        src = gen_deleted_lines([4])
        assert src.declared_r == 0.5
        assert src.declared_R == pytest.approx(math.sqrt(5) / 2)


class TestTwoColor:
    def test_first_scale_pattern(self):
        src = gen_two_color(1, [16, 32, 64, 128])
        st = src.extras["structure"]
        pattern = "".join(
            "W" if st.cell_is_white(np.array([c])) else "B" for c in range(16)
        )
        assert pattern == "WWWBBWBBBBBBBBBB"

    def test_mirror_fold(self):
        st = gen_two_color(1, [16, 32, 64, 128]).extras["structure"]
        for c in range(40):
            assert st.cell_is_white(np.array([-1 - c])) == st.cell_is_white(
                np.array([c])
            )

    def test_white_counts_frozen(self):
        st = gen_two_color(1, [16, 32, 64, 128]).extras["structure"]
        sides = [16, 512, 32768, 4194304]
        counts = [st.white_count_in_box([0], [s]) for s in sides]
        assert counts == [4, 352, 11008, 2742272]
        for k, (c, s) in enumerate(zip(counts, sides), start=1):
            assert Fraction(c, s) == st.rho(k)

    def test_rho_sequence_dual_route(self):
        recursion, closed = rho_sequence(1, [16, 32, 64, 128])
        assert recursion == closed
        assert closed[0] == 1
        assert closed[1:] == [
            Fraction(1, 4),
            Fraction(11, 16),
            Fraction(43, 128),
            Fraction(1339, 2048),
        ]

    def test_counts_out_of_range_raise(self):
        st = gen_two_color(1, [16, 32]).extras["structure"]
        with pytest.raises(WindowTooSmall):
            st.cell_is_white(np.array([512]))

    def test_coded_points(self):
        src = gen_two_color(1, [16, 32, 64, 128])
        ps = src.materialize(Region.box([(-8, 8)]))
        st = src.extras["structure"]
        is_white = src.extras["is_white_address"](ps.addresses)
        for pos, white in zip(ps.points[:, 0], is_white):
            if white:
                assert abs(pos - round(pos)) < 1e-12
                assert st.cell_is_white(np.array([int(round(pos))]))
            else:
                cell = int(math.floor(pos + 0.5))
                assert abs(abs(pos - cell) - 1.0 / 3.0) < 1e-9

    def test_white_count_half_per_level(self):
        # each scale places exactly half its new color budget as white blocks
        st = gen_two_color(1, [16, 32, 64, 128]).extras["structure"]
        assert st.white_count_in_box([0], [8]) == 4  # N/2 whites among N slots

    def test_declared_radius(self):
        src = gen_two_color(1, [16, 32, 64, 128])
        assert src.declared_r == pytest.approx(1.0 / 6.0)

    def test_bad_coding_rejected(self):
        with pytest.raises(InvalidArgument):
            gen_two_color(1, [16, 32], coding="nonsense")

    def test_scale_validation(self):
        with pytest.raises(InvalidArgument):
            gen_two_color(1, [4])  # scale below the color budget
        with pytest.raises(InvalidArgument):
            gen_two_color(1, [])


class TestRegistry:
    def test_known_names(self):
        for name in ("zn", "beatty", "fibonacci", "cut_project", "deleted_lines", "two_color"):
            src = build_source(name, None)
            assert src.dimension >= 1

    def test_unknown_name(self):
        with pytest.raises(InvalidArgument):
            build_source("nope", None)

    def test_bad_params(self):
        with pytest.raises(InvalidArgument):
            build_source("zn", {"n": "many"})

    def test_product_recursive(self):
        src = build_source(
            "product",
            {"factors": [{"set": "zn"}, {"set": "fibonacci"}]},
        )
        assert src.dimension == 2
