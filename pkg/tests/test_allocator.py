import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwcache.allocator import (
    allocate,
    breakpoints,
    lattice,
    rate_by_allocation,
    rate_l1,
    rate_l2,
    rate_l3,
    rate_theorem1,
    segment_breakpoints,
)
from gwcache.gray_wyner import RateTuple

UNIT = RateTuple(1200, 1200, 1200)

tuples = st.builds(
    RateTuple,
    st.integers(0, 8).map(lambda k: Fraction(k, 2)),
    st.integers(0, 8).map(lambda k: Fraction(k, 2)),
    st.integers(0, 8).map(lambda k: Fraction(k, 2)),
).filter(lambda t: t.sum_rate() > 0)


def best_split(M, t, step=Fraction(1, 2)):
    """Exhaustive search over budget splits on a grid."""
    best = None
    n = int(M / step)
    for i in range(n + 1):
        m1 = i * step
        if m1 > 3 * t.rho_priv:
            break
        for j in range(n - i + 1):
            m2 = j * step
            if m2 > 3 * t.rho_pair:
                break
            m3 = M - m1 - m2
            value = rate_l1(m1, t.rho_priv) + rate_l2(m2, t.rho_pair) + rate_l3(m3, t.rho0)
            best = value if best is None else min(best, value)
    return best


class TestAllocate:
    @pytest.mark.parametrize(
        "M, want",
        [
            (0, (0, 0, 0, 1)),
            (1000, (0, 1000, 0, 1)),
            (2400, (0, 1800, 600, 2)),
            (3000, (0, 1800, 1200, 2)),
            (4200, (1200, 1800, 1200, 2)),
            (5700, (1800, 2700, 1200, 3)),
            (7000, (2200, 3600, 1200, 4)),
            (8400, (3600, 3600, 1200, 4)),
        ],
    )
    def test_unit_examples(self, M, want):
        a = allocate(M, UNIT)
        assert (a.m1, a.m2, a.m3, a.regime_id) == want
        assert a.total == M

    def test_clamps_above_sum_rate(self):
        assert allocate(9000, UNIT).total == 8400

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            allocate(-1, UNIT)


class TestSublibraryRates:
    @pytest.mark.parametrize(
        "m, want", [(0, 3600), (300, 3000), (600, 2400), (1200, 1800), (1800, 1200), (2700, 600), (3600, 0)]
    )
    def test_l2(self, m, want):
        assert rate_l2(m, 1200) == want

    @pytest.mark.parametrize("m, want", [(0, 2400), (900, 1500), (1800, 600), (3600, 0)])
    def test_l1(self, m, want):
        assert rate_l1(m, 1200) == want

    def test_l3(self):
        assert rate_l3(0, 1200) == 1200
        assert rate_l3(500, 1200) == 700
        assert rate_l3(2000, 1200) == 0

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            rate_l2(3601, 1200)
        with pytest.raises(ValueError):
            rate_l1(-1, 1200)


class TestClosedForm:
    @pytest.mark.parametrize(
        "M, rate, branch",
        [(0, 7200, 1), (600, 6000, 2), (2400, 4200, 2), (4800, 1800, 3), (5700, 1200, 3), (6000, 1000, 3), (7500, 300, 4), (8400, 0, 4)],
    )
    def test_unit_examples(self, M, rate, branch):
        assert rate_theorem1(M, UNIT) == (rate, branch)

    def test_breakpoints(self):
        assert breakpoints(UNIT) == (600, 4800, 6600, 8400)

    def test_slopes(self):
        t = UNIT
        pts = [(100, 200), (1000, 2000), (5000, 5500), (6600, 7500)]
        slopes = [(rate_theorem1(b, t)[0] - rate_theorem1(a, t)[0]) / (b - a) for a, b in pts]
        assert slopes == [-2, -1, Fraction(-2, 3), Fraction(-1, 3)]

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            rate_theorem1(8401, UNIT)

    def test_single_file_reduction(self):
        # identical files: only the common part, delivered once unless cached
        t = RateTuple(1200, 0, 0)
        for M in (0, 300, 1200):
            assert rate_theorem1(M, t)[0] == 1200 - M

    def test_independent_reduction(self):
        t = RateTuple(0, 0, 1200)
        assert rate_theorem1(0, t)[0] == 2400
        assert rate_theorem1(1800, t)[0] == 600
        assert rate_theorem1(3600, t)[0] == 0

    @settings(max_examples=60, deadline=None)
    @given(tuples, st.integers(0, 10**6))
    def test_decomposition(self, t, k):
        M = t.sum_rate() * Fraction(k, 10**6)
        assert rate_theorem1(M, t)[0] == rate_by_allocation(M, t)
        assert allocate(M, t).total == M

    @settings(max_examples=60, deadline=None)
    @given(tuples)
    def test_continuous_nonincreasing(self, t):
        eps = Fraction(1, 10**9)
        for b in breakpoints(t)[:3]:
            if 0 < b < t.sum_rate():
                left = rate_theorem1(b - eps, t)[0]
                right = rate_theorem1(b, t)[0]
                assert abs(left - right) <= 2 * eps
        grid = lattice(t)
        rates = [rate_theorem1(M, t)[0] for M in grid]
        assert all(a >= b for a, b in zip(rates, rates[1:]))
        assert rates[-1] == 0

    @pytest.mark.parametrize("t", [(2, 2, 2), (0, 2, 4), (4, 0, 2), (2, 4, 0), (1, 3, 2)])
    def test_allocation_is_optimal(self, t):
        t = RateTuple(*t)
        step = Fraction(1, 2)
        M = Fraction(0)
        while M <= t.sum_rate():
            assert rate_theorem1(M, t)[0] == best_split(M, t, step)
            M += step


class TestLattice:
    def test_unit(self):
        grid = lattice(UNIT)
        assert len(grid) == 29
        for p in (0, 600, 1800, 3000, 4800, 5400, 5700, 6600, 8400):
            assert p in grid
        assert segment_breakpoints(UNIT) == [0, 600, 1800, 3000, 4800, 5400, 6600, 8400]

    def test_degenerate_breakpoints_collapse(self):
        assert segment_breakpoints(RateTuple(0, 0, 96)) == [0, 144, 288]
        assert lattice(RateTuple(96, 0, 0), per_segment=2) == [0, 48, 96]

    def test_bad_per_segment(self):
        with pytest.raises(ValueError):
            lattice(UNIT, 0)


def test_lattice_points_inside_range():
    for t in itertools.product((0, 24, 96), repeat=3):
        if not any(t):
            continue
        rt = RateTuple(*t)
        grid = lattice(rt)
        assert grid[0] == 0 and grid[-1] == rt.sum_rate()
