"""Lower bound on the optimal peak rate and optimality-gap certificates."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .allocator import breakpoints, rate_theorem1
from .gray_wyner import RateTuple, generating_tuple
from .source_model import EntropyProfile, SourceSpec

LOW, MID, OPTIMAL = "low", "mid", "optimal"
NOT_APPLICABLE = "bound not applicable"


def lower_bound(M, h: EntropyProfile):
    """Largest of the four cut-type constraints, clamped at zero.

    Exact (Fraction) for integer/Fraction entropies, float otherwise.
    """
    if M < 0:
        raise ValueError(f"cache size must be nonnegative, got {M}")
    M = Fraction(M) if not isinstance(M, float) else M
    half, third = Fraction(1, 2), Fraction(1, 3)
    return max(
        0,
        h.h_pair - 2 * M,
        half * (h.h_pair - M),
        third * (h.h_triple - M),
        half * (h.h_triple + h.h_single) - M,
    )


def binding_constraint(M, h: EntropyProfile) -> int:
    """Index (1..4) of the binding constraint, 0 when the clamp binds."""
    M = Fraction(M)
    values = [
        0,
        h.h_pair - 2 * M,
        Fraction(1, 2) * (h.h_pair - M),
        Fraction(1, 3) * (h.h_triple - M),
        Fraction(1, 2) * (h.h_triple + h.h_single) - M,
    ]
    return max(range(5), key=lambda i: (values[i], -i))


def tilde_tuple(spec: SourceSpec) -> RateTuple:
    # independent components: the private rate cannot exceed cv = H(Xi | Xj, Xk)
    return generating_tuple(spec)


@dataclass(frozen=True)
class GapCertificate:
    M: Fraction
    achievable: Fraction
    lower_bound: Fraction
    gap: Fraction
    theorem3_bound: Fraction | None
    label: str
    tuple: RateTuple

    @property
    def certified(self) -> bool:
        return self.theorem3_bound is not None

    @property
    def holds(self) -> bool:
        return self.gap >= 0 and (self.theorem3_bound is None or self.gap <= self.theorem3_bound)


def gap_certificate(M, t: RateTuple, h: EntropyProfile, rho_maximal: bool = True) -> GapCertificate:
    """Compare the achievable rate at ``t`` with the lower bound at ``M``.

    The gap bounds are only attached when ``t`` lies on the sum-rate
    plane ``rho0 + 3 rho' + 3 rho = H(X1, X2, X3)`` and the caller vouches
    that its private rate is maximal (``rho_maximal``); otherwise the
    label is :data:`NOT_APPLICABLE`.
    """
    M = Fraction(M)
    achievable, _ = rate_theorem1(M, t)
    lb = lower_bound(M, h)
    gap = achievable - lb
    if not rho_maximal or t.sum_rate() != h.h_triple:
        return GapCertificate(M, achievable, lb, gap, None, NOT_APPLICABLE, t)
    _, mid_start, opt_start, _ = breakpoints(t)
    if M >= opt_start:
        bound, label = Fraction(0), OPTIMAL
    elif M < mid_start:
        bound, label = Fraction(1, 2) * h.h_pair_given_one - t.rho_priv, LOW
    else:
        bound, label = Fraction(1, 4) * h.h_pair_given_one - t.rho_priv / 2, MID
    return GapCertificate(M, achievable, lb, gap, bound, label, t)
