"""End-to-end simulation of the two-step scheme on structured libraries.

A :class:`Simulation` fixes the library and the cache size, performs the
placement once, and then serves any demand: it builds the L3, L2 and L1
codewords, lets both receivers decode their four descriptions, rebuilds
the requested files and compares them with the library bit for bit.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import schemes
from .allocator import CacheAllocation, allocate, lattice, rate_theorem1
from .bounds import gap_certificate, tilde_tuple
from .gray_wyner import L1, L2, DecodeError, gw_decode, gw_encode, request_sets
from .source_model import Library, SourceSpec, entropy_profile_structured, make_structured_library

log = logging.getLogger(__name__)

DEMANDS = tuple(itertools.product((1, 2, 3), repeat=2))


@dataclass(frozen=True, eq=False)
class DemandResult:
    demand: tuple[int, int]
    bits: int
    sublibrary_bits: dict[str, int]
    success: tuple[bool, bool]
    detail: tuple[str, str]
    codewords: dict[str, schemes.MulticastCodeword] = field(repr=False)


class Simulation:
    """Placement for one library and cache size ``M`` (in bits)."""

    def __init__(self, library: Library, M, q: int | None = None):
        self.library = library
        self.M = Fraction(M)
        self.q = library.spec.granularity_q if q is None else q
        self.descriptions = gw_encode(library)
        self.tuple = self.descriptions.tuple
        self.allocation: CacheAllocation = allocate(self.M, self.tuple)
        d = self.descriptions.descriptions
        a = self.allocation
        self.caches = {
            "L3": schemes.l3_place(a.m3, d["123"]),
            "L2": schemes.l2_place(a.m2, {s: d[s] for s in L2}, self.q),
            "L1": schemes.l1_place(a.m1, {s: d[s] for s in L1}, self.q),
        }

    def used_bits(self, receiver: int) -> int:
        return sum(c.used_bits(receiver) for c in self.caches.values())

    def deliver(self, demand) -> dict[str, schemes.MulticastCodeword]:
        d = self.descriptions.descriptions
        req = request_sets(demand)
        return {
            "L3": schemes.l3_deliver(self.caches["L3"], d["123"], req.demand),
            "L2": schemes.l2_deliver(req.l2_pattern, self.caches["L2"], {s: d[s] for s in L2}),
            "L1": schemes.l1_deliver(req.demand, self.caches["L1"], {s: d[s] for s in L1}),
        }

    def decode(self, receiver: int, demand, codewords) -> np.ndarray:
        req = request_sets(demand)
        recovered = {"123": schemes.l3_decode(receiver, self.caches["L3"], codewords["L3"])}
        recovered.update(schemes.l2_decode(receiver, self.caches["L2"], codewords["L2"], req.l2_pattern))
        recovered[str(req.demand[receiver - 1])] = schemes.l1_decode(
            receiver, self.caches["L1"], codewords["L1"], req.demand
        )
        return gw_decode(req.demand[receiver - 1], recovered, self.tuple)

    def run_demand(self, demand, tamper=None) -> DemandResult:
        """Deliver, decode and verify one demand.

        ``tamper`` may rewrite the codewords before decoding; it exists to
        check that verification catches a broken scheme.
        """
        codewords = self.deliver(demand)
        if tamper is not None:
            codewords = tamper(demand, codewords)
        success, detail = [], []
        for k in (1, 2):
            want = demand[k - 1]
            try:
                bits = self.decode(k, demand, codewords)
            except DecodeError as exc:
                success.append(False)
                detail.append(str(exc))
                continue
            ok = np.array_equal(bits, self.library.file(want))
            success.append(ok)
            detail.append("ok" if ok else f"r{k} rebuilt X{want} with wrong bits")
        sub_bits = {name: cw.total_bits for name, cw in codewords.items()}
        return DemandResult(
            tuple(demand), sum(sub_bits.values()), sub_bits, tuple(success), tuple(detail), codewords
        )


def run_demand(M, library: Library, demand) -> DemandResult:
    return Simulation(library, M).run_demand(demand)


@dataclass(frozen=True, eq=False)
class SimReport:
    M: Fraction
    allocation: CacheAllocation
    per_demand_bits: dict[tuple[int, int], int]
    peak_bits: int
    analytic_rate: Fraction
    regime_id: int
    lower_bound: Fraction
    gap: Fraction
    gap_bound: Fraction | None
    all_decoded: bool
    used_bits: tuple[int, int]
    detail: dict[tuple[int, int], tuple[str, str]]

    @property
    def matches_analytic(self) -> bool:
        return self.peak_bits == self.analytic_rate

    @property
    def worst_distinct_bits(self) -> int:
        return max(b for d, b in self.per_demand_bits.items() if d[0] != d[1])

    @property
    def worst_equal_bits(self) -> int:
        return max(b for d, b in self.per_demand_bits.items() if d[0] == d[1])


def run_peak(M, library: Library, tamper=None) -> SimReport:
    sim = Simulation(library, M)
    results = [sim.run_demand(d, tamper) for d in DEMANDS]
    spec = library.spec
    t = tilde_tuple(spec)
    analytic, regime = rate_theorem1(sim.M, sim.tuple)
    cert = gap_certificate(sim.M, t, entropy_profile_structured(spec))
    peak = max(r.bits for r in results)
    return SimReport(
        M=sim.M,
        allocation=sim.allocation,
        per_demand_bits={r.demand: r.bits for r in results},
        peak_bits=peak,
        analytic_rate=analytic,
        regime_id=regime,
        lower_bound=cert.lower_bound,
        gap=cert.gap,
        gap_bound=cert.theorem3_bound,
        all_decoded=all(all(r.success) for r in results),
        used_bits=(sim.used_bits(1), sim.used_bits(2)),
        detail={r.demand: r.detail for r in results},
    )


@dataclass(frozen=True)
class RateCurvePoint:
    M: Fraction
    achievable: Fraction
    lower_bound: Fraction
    gap: Fraction
    gap_bound: Fraction | None
    regime_id: int
    measured: int | None = None


@dataclass
class Verdict:
    passed: bool
    demands: int
    grid_points: int
    violations: list[str]
    max_gap: Fraction
    max_gap_at: Fraction

    def line(self) -> str:
        head = "PASS" if self.passed else "FAIL"
        text = f"{head} {self.demands} demands × {self.grid_points} grid points"
        if self.violations:
            text += f" ({len(self.violations)} violations)"
        return text


def default_grid(spec: SourceSpec) -> list[Fraction]:
    return lattice(tilde_tuple(spec), spec.granularity_q)


def sweep(spec: SourceSpec, seed: int, grid=None, tamper=None) -> tuple[list[RateCurvePoint], Verdict]:
    """Simulate every grid point and check the invariants of the scheme."""
    library = make_structured_library(spec, seed)
    grid = sorted(Fraction(M) for M in (default_grid(spec) if grid is None else grid))
    points, violations = [], []
    previous = None
    for M in grid:
        rep = run_peak(M, library, tamper)
        points.append(
            RateCurvePoint(M, rep.analytic_rate, rep.lower_bound, rep.gap, rep.gap_bound, rep.regime_id, rep.peak_bits)
        )
        violations += _check_report(rep, previous)
        previous = rep
    if not points:
        raise ValueError("empty grid")
    worst = max(points, key=lambda p: (p.gap, -p.M))
    for v in violations:
        log.info("invariant violated: %s", v)
    verdict = Verdict(not violations, len(DEMANDS), len(points), violations, worst.gap, worst.M)
    return points, verdict


def _check_report(rep: SimReport, previous: SimReport | None) -> list[str]:
    out = []
    at = f"M={rep.M}"
    if not rep.all_decoded:
        bad = [d for d, det in rep.detail.items() if det != ("ok", "ok")]
        out.append(f"{at}: decoding failed for demands {bad}")
    if rep.peak_bits != rep.analytic_rate:
        out.append(f"{at}: measured peak {rep.peak_bits} != closed form {rep.analytic_rate}")
    if max(rep.used_bits) > rep.M:
        out.append(f"{at}: cache use {rep.used_bits} exceeds budget")
    if rep.lower_bound > rep.peak_bits:
        out.append(f"{at}: lower bound {rep.lower_bound} above measured peak {rep.peak_bits}")
    if rep.worst_equal_bits > rep.worst_distinct_bits:
        out.append(f"{at}: equal demand sends more than the worst distinct demand")
    if rep.gap_bound is not None and rep.gap > rep.gap_bound:
        out.append(f"{at}: gap {rep.gap} above the certified bound {rep.gap_bound}")
    if previous is not None and rep.peak_bits > previous.peak_bits:
        out.append(f"{at}: peak rate increased from {previous.peak_bits} to {rep.peak_bits}")
    return out

