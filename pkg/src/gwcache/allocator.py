"""Cache allocation across sublibraries and the analytic peak rates.

All quantities are exact :class:`~fractions.Fraction` values in bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .gray_wyner import RateTuple

HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)


@dataclass(frozen=True)
class CacheAllocation:
    m1: Fraction
    m2: Fraction
    m3: Fraction
    regime_id: int

    @property
    def total(self) -> Fraction:
        return self.m1 + self.m2 + self.m3


def breakpoints(t: RateTuple) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """Right ends of the four branches of the closed-form peak rate."""
    r0, rp, r = t.as_tuple()
    return (
        rp / 2,
        r0 + Fraction(3, 2) * (rp + r),
        r0 + 3 * rp + Fraction(3, 2) * r,
        t.sum_rate(),
    )


def allocate(M, t: RateTuple) -> CacheAllocation:
    """Water-filling split of ``M`` bits over L1, L2 and L3.

    L2 is filled to its coded/uncoded-halves corner first, then L3, then
    L1 up to its halves corner, then the rest of L2, then the rest of L1.
    """
    M = Fraction(M)
    if M < 0:
        raise ValueError(f"cache size must be nonnegative, got {M}")
    r0, rp, r = t.as_tuple()
    M = min(M, t.sum_rate())
    l2_half = Fraction(3, 2) * rp
    if M < l2_half:
        return CacheAllocation(Fraction(0), M, Fraction(0), 1)
    if M < r0 + Fraction(3, 2) * (rp + r):
        m3 = min(M - l2_half, r0)
        return CacheAllocation(M - l2_half - m3, l2_half, m3, 2)
    if M < r0 + 3 * rp + Fraction(3, 2) * r:
        return CacheAllocation(Fraction(3, 2) * r, M - r0 - Fraction(3, 2) * r, r0, 3)
    return CacheAllocation(M - r0 - 3 * rp, 3 * rp, r0, 4)


def _check_range(m, top, what):
    m = Fraction(m)
    if not 0 <= m <= top:
        raise ValueError(f"{what}={m} outside [0, {top}]")
    return m


def rate_l2(m2, rho_pair) -> Fraction:
    rp = Fraction(rho_pair)
    m = _check_range(m2, 3 * rp, "m2")
    if m < rp / 2:
        return 3 * rp - 2 * m
    if m < Fraction(3, 2) * rp:
        return Fraction(5, 2) * rp - m
    return 2 * rp - Fraction(2, 3) * m


def rate_l1(m1, rho_priv) -> Fraction:
    r = Fraction(rho_priv)
    m = _check_range(m1, 3 * r, "m1")
    if m < Fraction(3, 2) * r:
        return 2 * r - m
    return r - m / 3


def rate_l3(m3, rho0) -> Fraction:
    r0 = Fraction(rho0)
    m = Fraction(m3)
    if m < 0:
        raise ValueError(f"m3 must be nonnegative, got {m}")
    return r0 - min(m, r0)


def rate_theorem1(M, t: RateTuple) -> tuple[Fraction, int]:
    """Closed-form peak rate of the multiple-request scheme and its branch."""
    r0, rp, r = t.as_tuple()
    M = _check_range(M, t.sum_rate(), "M")
    b1, b2, b3, _ = breakpoints(t)
    if M < b1:
        return r0 + 3 * rp + 2 * r - 2 * M, 1
    if M < b2:
        return r0 + Fraction(5, 2) * rp + 2 * r - M, 2
    if M < b3:
        return Fraction(2, 3) * r0 + 2 * rp + Fraction(3, 2) * r - Fraction(2, 3) * M, 3
    return r0 / 3 + rp + r - M / 3, 4


def rate_by_allocation(M, t: RateTuple) -> Fraction:
    """Same peak rate, summed over sublibraries under :func:`allocate`."""
    a = allocate(M, t)
    return rate_l1(a.m1, t.rho_priv) + rate_l2(a.m2, t.rho_pair) + rate_l3(a.m3, t.rho0)


def segment_breakpoints(t: RateTuple) -> list[Fraction]:
    """Cache sizes where the allocation hits a sublibrary corner point.

    Between two consecutive values every sublibrary budget is affine in
    ``M``, so subdividing each interval into ``q`` equal steps keeps all
    memory-sharing fractions on the ``1/q`` grid.
    """
    r0, rp, r = t.as_tuple()
    h = Fraction(3, 2)
    points = {
        Fraction(0),
        rp / 2,
        h * rp,
        h * rp + r0,
        r0 + h * (rp + r),
        r0 + 2 * rp + h * r,
        r0 + 3 * rp + h * r,
        t.sum_rate(),
    }
    return sorted(points)


def lattice(t: RateTuple, per_segment: int = 4) -> list[Fraction]:
    """Breakpoints plus ``per_segment`` equal steps inside each interval."""
    if per_segment < 1:
        raise ValueError("per_segment must be at least 1")
    bps = segment_breakpoints(t)
    out = {bps[0]}
    for a, b in zip(bps, bps[1:]):
        for k in range(1, per_segment + 1):
            out.add(a + (b - a) * Fraction(k, per_segment))
    return sorted(out)


def achievable_curve(t: RateTuple, grid) -> list[tuple[Fraction, Fraction, int]]:
    return [(Fraction(M),) + rate_theorem1(M, t) for M in grid]
