import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwcache.allocator import breakpoints, lattice, rate_theorem1
from gwcache.bounds import (
    LOW,
    MID,
    NOT_APPLICABLE,
    OPTIMAL,
    binding_constraint,
    gap_certificate,
    lower_bound,
    tilde_tuple,
)
from gwcache.gray_wyner import RateTuple
from gwcache.source_model import EntropyProfile, SourceSpec, entropy_profile_structured

UNIT = SourceSpec(1200, 1200, 1200)
H_UNIT = entropy_profile_structured(UNIT)
T_UNIT = tilde_tuple(UNIT)

specs = (
    st.tuples(
        st.integers(0, 6).map(lambda k: 4 * k),
        st.integers(0, 6).map(lambda k: 24 * k),
        st.integers(0, 6).map(lambda k: 24 * k),
    )
    .filter(any)
    .map(lambda c: SourceSpec(*c))
)


def lb_lines(h):
    """The lower-bound pieces as (intercept, slope) pairs."""
    half, third = Fraction(1, 2), Fraction(1, 3)
    return [
        (Fraction(0), Fraction(0)),
        (Fraction(h.h_pair), Fraction(-2)),
        (half * h.h_pair, -half),
        (third * h.h_triple, -third),
        (half * (h.h_triple + h.h_single), Fraction(-1)),
    ]


def exact_max_gap(spec):
    """Maximum gap over [0, h_triple] by checking every kink of both curves."""
    h = entropy_profile_structured(spec)
    t = tilde_tuple(spec)
    top = t.sum_rate()
    candidates = {Fraction(0), top, *breakpoints(t)}
    for (a1, s1), (a2, s2) in itertools.combinations(lb_lines(h), 2):
        if s1 != s2:
            x = (a2 - a1) / (s1 - s2)
            if 0 <= x <= top:
                candidates.add(x)
    best = max(candidates, key=lambda M: (rate_theorem1(M, t)[0] - lower_bound(M, h), -M))
    return rate_theorem1(best, t)[0] - lower_bound(best, h), best


class TestLowerBound:
    @pytest.mark.parametrize("M, want, binding", [(0, 7200, 1), (5700, 900, 3), (8400, 0, 0)])
    def test_unit(self, M, want, binding):
        assert lower_bound(M, H_UNIT) == want
        assert binding_constraint(M, H_UNIT) == binding

    def test_crossover_of_constraints_3_and_4(self):
        M = 1200 + Fraction(9 * 1200, 4) + Fraction(3 * 1200, 2)
        assert M == 5700
        third = Fraction(8400 - M, 3)
        fourth = Fraction(8400 + 4800, 2) - M
        assert third == fourth == 900

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            lower_bound(-1, H_UNIT)

    def test_float_profile(self):
        h = EntropyProfile(1.0, 1.5, 2.0, 1.0)
        assert lower_bound(0, h) == pytest.approx(1.5)

    def test_nonincreasing(self):
        values = [lower_bound(M, H_UNIT) for M in range(0, 8401, 100)]
        assert all(a >= b for a, b in zip(values, values[1:]))


class TestTildeTuple:
    def test_generating(self):
        assert T_UNIT == RateTuple(1200, 1200, 1200)
        assert tilde_tuple(SourceSpec(0, 0, 96)) == RateTuple(0, 0, 96)

    @settings(max_examples=30, deadline=None)
    @given(specs)
    def test_on_sum_rate_plane(self, spec):
        assert tilde_tuple(spec).sum_rate() == entropy_profile_structured(spec).h_triple


class TestCertificate:
    def test_optimal(self):
        c = gap_certificate(7000, T_UNIT, H_UNIT)
        assert (c.gap, c.theorem3_bound, c.label) == (0, 0, OPTIMAL)
        assert c.holds and c.certified

    def test_mid(self):
        c = gap_certificate(5700, T_UNIT, H_UNIT)
        assert (c.achievable, c.lower_bound, c.gap, c.theorem3_bound, c.label) == (1200, 900, 300, 300, MID)

    def test_low(self):
        c = gap_certificate(2400, T_UNIT, H_UNIT)
        assert (c.gap, c.theorem3_bound, c.label) == (0, 600, LOW)

    def test_range_edges(self):
        assert gap_certificate(4800, T_UNIT, H_UNIT).label == MID
        assert gap_certificate(6600, T_UNIT, H_UNIT).label == OPTIMAL
        assert gap_certificate(6599, T_UNIT, H_UNIT).label == MID

    def test_off_plane_not_applicable(self):
        c = gap_certificate(2400, RateTuple(1200, 1200, 1000), H_UNIT)
        assert c.label == NOT_APPLICABLE and not c.certified
        assert gap_certificate(2400, T_UNIT, H_UNIT, rho_maximal=False).label == NOT_APPLICABLE


@settings(max_examples=60, deadline=None)
@given(specs)
def test_dominance_and_gap_bounds(spec):
    h = entropy_profile_structured(spec)
    t = tilde_tuple(spec)
    _, _, opt_start, _ = breakpoints(t)
    for M in lattice(t, per_segment=8):
        c = gap_certificate(M, t, h)
        assert c.gap >= 0
        assert c.holds
        if M >= opt_start:
            assert c.gap == 0


@settings(max_examples=60, deadline=None)
@given(specs)
def test_gap_zero_in_regimes_2_and_4(spec):
    h = entropy_profile_structured(spec)
    t = tilde_tuple(spec)
    for M in lattice(t, per_segment=8):
        if rate_theorem1(M, t)[1] in (2, 4):
            assert gap_certificate(M, t, h).gap == 0


@settings(max_examples=60, deadline=None)
@given(specs.filter(lambda s: s.cp <= 2 * s.cv))
def test_sharpness(spec):
    gap, _ = exact_max_gap(spec)
    assert gap == Fraction(spec.cp, 4)
    M = spec.c0 + Fraction(9 * spec.cp, 4) + Fraction(3 * spec.cv, 2)
    assert gap_certificate(M, tilde_tuple(spec), entropy_profile_structured(spec)).gap == gap


def test_sharpness_fails_when_pairwise_dominates():
    # beyond cp = 2 cv the regime-3 gap peaks lower and elsewhere
    spec = SourceSpec(0, 2400, 600)
    gap, at = exact_max_gap(spec)
    assert (gap, at) == (500, 6000)
    assert gap < Fraction(spec.cp, 4)


@pytest.mark.parametrize("cv", [24, 96, 1200])
def test_independent_reduction(cv):
    spec = SourceSpec(0, 0, cv)
    h = entropy_profile_structured(spec)
    t = tilde_tuple(spec)
    for M in (0, Fraction(3 * cv, 2), 3 * cv):
        # bound for three independent files of cv bits each, two receivers
        independent = max(0, 2 * cv - 2 * M, Fraction(2 * cv - M, 2), Fraction(3 * cv - M, 3), 2 * cv - M)
        assert lower_bound(M, h) == independent
        assert gap_certificate(M, t, h).gap == 0
