"""Placement, delivery and decoding for each sublibrary.

Every sublibrary scheme is a memory-sharing combination of at most two
*corner* schemes. A corner scheme splits each description (or one
segment of it) into equal packets, fills the caches with packets or XORs
of packets, and answers a request with a list of XOR combinations. All
coding is over GF(2) on whole packets.

* L3 (``W123``): both receivers cache the same prefix, the rest is
  multicast uncoded.
* L2 (``W12, W13, W23``): two-request scheme with corners at
  0, 1/2, 3/2, 2 and 3 times the description length. The 1/2 corner uses
  coded placement.
* L1 (``W1, W2, W3``): two-user single-request scheme with corners at
  0, 3/2 and 3 times the description length.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .gray_wyner import DISTINCT, EQUAL, L1, L2, L3, DecodeError, L2Pattern, request_sets
from .source_model import SUBSETS

XOR = "⊕"


class OffGridError(ValueError):
    """A cache budget that memory sharing cannot realize with whole packets."""

    def __init__(self, message: str, nearest: tuple = ()):
        super().__init__(message)
        self.nearest = nearest


@dataclass(frozen=True)
class PacketRef:
    """Packet ``index`` of the ``denominator`` equal parts of a segment of W_s.

    ``segment`` is empty when the description is not memory-shared.
    """

    subset: str
    index: int
    denominator: int
    segment: str = ""

    def __post_init__(self):
        if not 1 <= self.index <= self.denominator:
            raise ValueError(f"packet index {self.index} outside 1..{self.denominator}")

    def sort_key(self):
        return (SUBSETS.index(self.subset), self.segment, self.index)

    def label(self) -> str:
        seg = f":{self.segment}" if self.segment else ""
        return f"W{self.subset}{seg}({self.index})"


Composition = frozenset  # of PacketRef


def render(composition, sep: str = "+") -> str:
    return sep.join(p.label() for p in sorted(composition, key=PacketRef.sort_key))


@dataclass(frozen=True, eq=False)
class CacheUnit:
    """XOR of the packets in ``composition``; also used for transmissions."""

    payload: np.ndarray = field(repr=False)
    composition: frozenset

    def __post_init__(self):
        if not self.composition:
            raise ValueError("empty composition")

    @property
    def bits(self) -> int:
        return len(self.payload)

    def label(self, sep: str = "+") -> str:
        return render(self.composition, sep)


@dataclass(frozen=True)
class CornerScheme:
    """One corner point of a sublibrary's rate-memory curve.

    ``memory`` and ``rate`` are per-receiver cache use and peak delivery
    load, both in units of the description length. ``placement(seg)``
    returns the cache compositions of r1 and r2 and ``delivery(request,
    seg)`` the transmitted compositions.
    """

    name: str
    memory: Fraction
    rate: Fraction
    denominator: int
    placement: Callable = field(repr=False, compare=False)
    delivery: Callable = field(repr=False, compare=False)


@dataclass(frozen=True)
class Segment:
    name: str
    scheme: CornerScheme
    start: int
    stop: int

    @property
    def length(self) -> int:
        return self.stop - self.start


@dataclass(frozen=True, eq=False)
class CacheContents:
    """Cache units for one sublibrary at both receivers.

    Also records the segment plan, which the sender and both receivers
    share once placement is fixed.
    """

    subsets: tuple[str, ...]
    length: int
    budget: Fraction
    segments: tuple[Segment, ...]
    r1: tuple[CacheUnit, ...]
    r2: tuple[CacheUnit, ...]

    def units(self, receiver: int) -> tuple[CacheUnit, ...]:
        return (self.r1, self.r2)[receiver - 1]

    def used_bits(self, receiver: int) -> int:
        return sum(u.bits for u in self.units(receiver))


@dataclass(frozen=True, eq=False)
class MulticastCodeword:
    units: tuple[CacheUnit, ...]

    @property
    def total_bits(self) -> int:
        return sum(u.bits for u in self.units)

    def labels(self, sep: str = "+") -> list[str]:
        return [u.label(sep) for u in self.units]


# -- corner schemes ---------------------------------------------------------


def _refs(subsets, index, den, seg):
    return [PacketRef(s, index, den, seg) for s in subsets]


def _one(*refs):
    return frozenset(refs)


def _l2_corners() -> tuple[CornerScheme, ...]:
    def none_place(seg):
        return [], []

    def none_deliver(pat: L2Pattern, seg):
        wanted = (pat.common, pat.only_r1, pat.only_r2) if pat.kind == DISTINCT else (pat.only_r1, pat.only_r2)
        return [_one(PacketRef(s, 1, 1, seg)) for s in wanted]

    def coded_place(seg):
        return [frozenset(_refs(L2, 1, 2, seg))], [frozenset(_refs(L2, 2, 2, seg))]

    def coded_deliver(pat: L2Pattern, seg):
        P = lambda s, i: PacketRef(s, i, 2, seg)  # noqa: E731
        if pat.kind == EQUAL:
            a, b = pat.only_r1, pat.only_r2
            return [_one(P(a, 1)), _one(P(a, 2)), _one(P(b, 1)), _one(P(b, 2))]
        c, a, b = pat.common, pat.only_r1, pat.only_r2
        return [_one(P(c, 1)), _one(P(c, 2)), _one(P(a, 2)), _one(P(b, 1))]

    def halves_place(seg):
        return (
            [_one(p) for p in _refs(L2, 1, 2, seg)],
            [_one(p) for p in _refs(L2, 2, 2, seg)],
        )

    def halves_deliver(pat: L2Pattern, seg):
        P = lambda s, i: PacketRef(s, i, 2, seg)  # noqa: E731
        a, b = pat.only_r1, pat.only_r2
        if pat.kind == EQUAL:
            return [_one(P(a, 2), P(a, 1)), _one(P(b, 2), P(b, 1))]
        c = pat.common
        return [_one(P(c, 2), P(c, 1)), _one(P(a, 2), P(b, 1))]

    def thirds_place(seg):
        r1 = [_one(PacketRef(s, i, 3, seg)) for s in L2 for i in (1, 2)]
        r2 = [_one(PacketRef(s, i, 3, seg)) for s in L2 for i in (2, 3)]
        return r1, r2

    def thirds_deliver(pat: L2Pattern, seg):
        P = lambda s, i: PacketRef(s, i, 3, seg)  # noqa: E731
        a, b = pat.only_r1, pat.only_r2
        if pat.kind == EQUAL:
            return [_one(P(a, 3), P(a, 1)), _one(P(b, 3), P(b, 1))]
        c = pat.common
        return [_one(P(c, 3), P(c, 1)), _one(P(a, 3), P(b, 1))]

    def full_place(seg):
        units = [_one(p) for p in _refs(L2, 1, 1, seg)]
        return units, list(units)

    def full_deliver(pat, seg):
        return []

    F = Fraction
    return (
        CornerScheme("uncached", F(0), F(3), 1, none_place, none_deliver),
        CornerScheme("coded-halves", F(1, 2), F(2), 2, coded_place, coded_deliver),
        CornerScheme("uncoded-halves", F(3, 2), F(1), 2, halves_place, halves_deliver),
        CornerScheme("uncoded-thirds", F(2), F(2, 3), 3, thirds_place, thirds_deliver),
        CornerScheme("full", F(3), F(0), 1, full_place, full_deliver),
    )


def _l1_corners() -> tuple[CornerScheme, ...]:
    def none_place(seg):
        return [], []

    def none_deliver(demand, seg):
        d1, d2 = demand
        files = [d1] if d1 == d2 else [d1, d2]
        return [_one(PacketRef(str(d), 1, 1, seg)) for d in files]

    def halves_place(seg):
        return (
            [_one(p) for p in _refs(L1, 1, 2, seg)],
            [_one(p) for p in _refs(L1, 2, 2, seg)],
        )

    def halves_deliver(demand, seg):
        d1, d2 = demand
        return [_one(PacketRef(str(d1), 2, 2, seg), PacketRef(str(d2), 1, 2, seg))]

    def full_place(seg):
        units = [_one(p) for p in _refs(L1, 1, 1, seg)]
        return units, list(units)

    F = Fraction
    return (
        CornerScheme("uncached", F(0), F(2), 1, none_place, none_deliver),
        CornerScheme("uncoded-halves", F(3, 2), F(1, 2), 2, halves_place, halves_deliver),
        CornerScheme("full", F(3), F(0), 1, full_place, lambda demand, seg: []),
    )


def _l3_corners() -> tuple[CornerScheme, ...]:
    def none_deliver(demand, seg):
        return [_one(PacketRef("123", 1, 1, seg))]

    def full_place(seg):
        units = [_one(PacketRef("123", 1, 1, seg))]
        return units, list(units)

    F = Fraction
    return (
        CornerScheme("uncached", F(0), F(1), 1, lambda seg: ([], []), none_deliver),
        CornerScheme("cached", F(1), F(0), 1, full_place, lambda demand, seg: []),
    )


L2_CORNERS = _l2_corners()
L1_CORNERS = _l1_corners()
L3_CORNERS = _l3_corners()


# -- memory sharing -----------------------------------------------------------


def _split_ok(first: CornerScheme, second: CornerScheme, lam: Fraction, length: int) -> bool:
    a = lam * length
    if a.denominator != 1:
        return False
    a = int(a)
    return a % first.denominator == 0 and (length - a) % second.denominator == 0


def memory_share(
    first: CornerScheme, second: CornerScheme, m, length: int, q: int | None = None
) -> tuple[Segment, ...]:
    """Split descriptions of ``length`` bits so that the cache use is ``m``.

    ``first`` runs on a prefix holding a fraction ``lam`` of every
    description and ``second`` on the remaining suffix, where ``lam``
    solves ``lam * M_first + (1 - lam) * M_second = m``. When ``q`` is
    given, ``lam`` must be a multiple of ``1/q``; in every case both
    segments must split into whole packets.
    """
    m = Fraction(m)
    m_first, m_second = first.memory * length, second.memory * length
    if m_first == m_second:
        raise ValueError("corner schemes with equal memory cannot be shared")
    lam = (m_second - m) / (m_second - m_first)
    if not 0 <= lam <= 1:
        raise ValueError(f"budget {m} is not between {m_first} and {m_second}")
    grid = q if q is not None else max(length, 1)
    if (lam * grid).denominator != 1 or not _split_ok(first, second, lam, length):
        ok = [
            Fraction(k, grid)
            for k in range(grid + 1)
            if _split_ok(first, second, Fraction(k, grid), length)
        ]
        mems = sorted(l * m_first + (1 - l) * m_second for l in ok)
        below = [x for x in mems if x < m]
        above = [x for x in mems if x > m]
        nearest = tuple(x for x in (below[-1] if below else None, above[0] if above else None) if x is not None)
        raise OffGridError(
            f"cache budget {m} is not representable; nearest on-grid values: "
            + ", ".join(str(x) for x in nearest),
            nearest,
        )
    split = int(lam * length)
    if lam == 1:
        return (Segment("", first, 0, length),)
    if lam == 0:
        return (Segment("", second, 0, length),)
    return (Segment("a", first, 0, split), Segment("b", second, split, length))


def plan_segments(corners, m, length: int, q: int | None) -> tuple[Segment, ...]:
    """Memory-sharing plan between the two corners bracketing ``m``."""
    m = Fraction(m)
    if m < 0:
        raise ValueError(f"cache budget must be nonnegative, got {m}")
    if length == 0:
        if m != 0:
            raise ValueError(f"cache budget {m} exceeds the empty sublibrary")
        return ()
    top = corners[-1].memory * length
    if m > top:
        raise ValueError(f"cache budget {m} exceeds the sublibrary size {top}")
    for c in corners:
        if c.memory * length == m:
            return (Segment("", c, 0, length),)
    for lo, hi in zip(corners, corners[1:]):
        if lo.memory * length < m < hi.memory * length:
            return memory_share(lo, hi, m, length, q)
    raise AssertionError("unreachable")


# -- generic packet handling -------------------------------------------------


def _segment_map(segments) -> dict[str, Segment]:
    return {s.name: s for s in segments}


def packet_bits(ref: PacketRef, descriptions, segments) -> np.ndarray:
    seg = _segment_map(segments)[ref.segment]
    size = seg.length // ref.denominator
    start = seg.start + (ref.index - 1) * size
    return descriptions[ref.subset][start:start + size]


def _materialize(composition, descriptions, segments) -> CacheUnit:
    parts = [packet_bits(p, descriptions, segments) for p in composition]
    sizes = {len(x) for x in parts}
    if len(sizes) != 1:
        raise ValueError(f"unequal packet sizes in {render(composition)}")
    payload = np.bitwise_xor.reduce(np.stack(parts), axis=0).astype(np.uint8)
    payload.setflags(write=False)
    return CacheUnit(payload, frozenset(composition))


def _check_descriptions(subsets, descriptions) -> int:
    lengths = {len(descriptions[s]) for s in subsets}
    if len(lengths) != 1:
        raise ValueError(f"descriptions {subsets} must have equal lengths, got {sorted(lengths)}")
    return lengths.pop()


def _place(subsets, corners, m, descriptions, q) -> CacheContents:
    length = _check_descriptions(subsets, descriptions)
    segments = plan_segments(corners, m, length, q)
    r1, r2 = [], []
    for seg in segments:
        c1, c2 = seg.scheme.placement(seg.name)
        r1 += [_materialize(c, descriptions, segments) for c in c1]
        r2 += [_materialize(c, descriptions, segments) for c in c2]
    caches = CacheContents(tuple(subsets), length, Fraction(m), segments, tuple(r1), tuple(r2))
    for k in (1, 2):
        if caches.used_bits(k) > caches.budget:
            raise AssertionError(f"receiver {k} uses {caches.used_bits(k)} bits of a {m}-bit budget")
    return caches


def _deliver(caches: CacheContents, request, descriptions) -> MulticastCodeword:
    units = []
    for seg in caches.segments:
        for comp in seg.scheme.delivery(request, seg.name):
            if any(p.subset not in caches.subsets for p in comp):
                raise ValueError(f"{render(comp)} references packets outside the sublibrary")
            units.append(_materialize(comp, descriptions, caches.segments))
    return MulticastCodeword(tuple(units))


def peel(units, steps: list | None = None, tags=None) -> dict[PacketRef, np.ndarray]:
    """Solve for packets by repeatedly using units with one unknown packet.

    If ``steps`` is a list, ``(packet, unit, tag)`` is appended for every
    packet solved, where ``tag`` comes from the parallel ``tags`` sequence.
    """
    units = list(units)
    tags = list(tags) if tags is not None else [""] * len(units)
    known: dict[PacketRef, np.ndarray] = {}
    pending = list(zip(units, tags))
    progress = True
    while progress and pending:
        progress = False
        remaining = []
        for unit, tag in pending:
            unknown = [p for p in unit.composition if p not in known]
            if len(unknown) == 1:
                target = unknown[0]
                acc = unit.payload.copy()
                for p in unit.composition:
                    if p != target:
                        acc ^= known[p]
                known[target] = acc
                if steps is not None:
                    steps.append((target, unit, tag))
                progress = True
            elif unknown:
                remaining.append((unit, tag))
        pending = remaining
    return known


def decode_steps(receiver: int, caches: CacheContents, codeword: MulticastCodeword, sep: str = XOR) -> list[str]:
    """Human-readable account of how ``receiver`` resolves each packet."""
    cached = caches.units(receiver)
    steps: list = []
    peel(cached + codeword.units, steps, ["Z"] * len(cached) + ["Y"] * len(codeword.units))
    lines = []
    for target, unit, tag in steps:
        if len(unit.composition) == 1:
            lines.append(f"{target.label()} from {tag}")
            continue
        others = [p.label() for p in sorted(unit.composition - {target}, key=PacketRef.sort_key)]
        lines.append(f"{target.label()} = {tag}[{unit.label(sep)}] {sep} " + f" {sep} ".join(others))
    return lines


def _decode(receiver: int, caches: CacheContents, codeword: MulticastCodeword, wanted) -> dict[str, np.ndarray]:
    if receiver not in (1, 2):
        raise ValueError(f"receiver must be 1 or 2, got {receiver!r}")
    known = peel(caches.units(receiver) + codeword.units)
    out = {}
    for s in wanted:
        parts = []
        for seg in caches.segments:
            den = seg.scheme.denominator
            for i in range(1, den + 1):
                ref = PacketRef(s, i, den, seg.name)
                if ref not in known:
                    raise DecodeError(f"receiver r{receiver} cannot resolve packet {ref.label()}")
                parts.append(known[ref])
        bits = np.concatenate(parts).astype(np.uint8) if parts else np.zeros(0, np.uint8)
        if len(bits) != caches.length:
            raise DecodeError(f"receiver r{receiver} rebuilt W{s} with {len(bits)} bits, expected {caches.length}")
        out[s] = bits
    return out


# -- public per-sublibrary API -------------------------------------------------


def _as_pattern(request) -> L2Pattern:
    if isinstance(request, L2Pattern):
        return request
    return request_sets(request).l2_pattern


def l3_place(m3, w123: np.ndarray) -> CacheContents:
    """Both receivers cache the same ``m3``-bit prefix of W123."""
    if m3 < 0:
        raise ValueError(f"m3 must be nonnegative, got {m3}")
    m3 = min(Fraction(m3), len(w123))
    descriptions = {"123": w123}
    length = len(w123)
    if length == 0:
        segments = ()
    elif m3 in (0, length):
        segments = plan_segments(L3_CORNERS, m3, length, None)
    else:
        segments = memory_share(L3_CORNERS[1], L3_CORNERS[0], m3, length)
    r1, r2 = [], []
    for seg in segments:
        c1, c2 = seg.scheme.placement(seg.name)
        r1 += [_materialize(c, descriptions, segments) for c in c1]
        r2 += [_materialize(c, descriptions, segments) for c in c2]
    return CacheContents(L3, length, m3, segments, tuple(r1), tuple(r2))


def l3_deliver(caches: CacheContents, w123: np.ndarray, demand=None) -> MulticastCodeword:
    return _deliver(caches, demand, {"123": w123})


def l3_decode(receiver: int, caches: CacheContents, codeword: MulticastCodeword) -> np.ndarray:
    return _decode(receiver, caches, codeword, L3)["123"]


def l2_place(m2, descriptions, q: int | None = 4) -> CacheContents:
    return _place(L2, L2_CORNERS, m2, descriptions, q)


def l2_deliver(request, caches: CacheContents, descriptions) -> MulticastCodeword:
    """Codeword for an L2 demand pattern (or a file demand ``(d1, d2)``)."""
    return _deliver(caches, _as_pattern(request), descriptions)


def l2_decode(receiver: int, caches: CacheContents, codeword: MulticastCodeword, request) -> dict[str, np.ndarray]:
    pattern = _as_pattern(request)
    return _decode(receiver, caches, codeword, pattern.wanted[receiver - 1])


def l1_place(m1, descriptions, q: int | None = 4) -> CacheContents:
    return _place(L1, L1_CORNERS, m1, descriptions, q)


def l1_deliver(demand, caches: CacheContents, descriptions) -> MulticastCodeword:
    return _deliver(caches, tuple(demand), descriptions)


def l1_decode(receiver: int, caches: CacheContents, codeword: MulticastCodeword, demand) -> np.ndarray:
    s = str(demand[receiver - 1])
    return _decode(receiver, caches, codeword, (s,))[s]


def grid_values(corners, length: int, q: int) -> list[Fraction]:
    """All budgets reachable with lam on the 1/q grid between adjacent corners."""
    values = set()
    for lo, hi in zip(corners, corners[1:]):
        a, b = lo.memory * length, hi.memory * length
        for k in range(q + 1):
            values.add(a + (b - a) * Fraction(k, q))
    return sorted(values)
