"""Exhaustive search over linear delivery codes on a tiny L2 instance.

Each of the three pairwise descriptions is two bits long and split into
two one-bit half-packets, giving six packets. Vectors in GF(2)^6 are
stored as int bitmasks; a delivery code is a subspace, since the
receivers can XOR received units together.

This module is independent of :mod:`gwcache.schemes` and is used as an
oracle for the two-request scheme.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

from .gray_wyner import L2

PACKETS = tuple((s, i) for s in L2 for i in (1, 2))
N_PACKETS = len(PACKETS)


def unit(subset: str, index: int) -> int:
    return 1 << PACKETS.index((subset, index))


@lru_cache(maxsize=None)
def subspaces_by_dim(max_dim: int = N_PACKETS) -> tuple[tuple[frozenset, ...], ...]:
    """All subspaces of GF(2)^6 grouped by dimension, each as a set of vectors."""
    layers = [(frozenset([0]),)]
    for _ in range(max_dim):
        nxt = set()
        for space in layers[-1]:
            for v in range(1, 1 << N_PACKETS):
                if v not in space:
                    nxt.add(space | frozenset(x ^ v for x in space))
        if not nxt:
            break
        layers.append(tuple(nxt))
    return tuple(layers)


def _span(vectors) -> frozenset:
    space = {0}
    for v in vectors:
        space |= {x ^ v for x in space}
    return frozenset(space)


def decodable(code: frozenset, cache: frozenset, wanted) -> bool:
    """True if every wanted unit vector lies in code + span(cache)."""
    return all(any((w ^ c) in code for c in cache) for w in wanted)


def distinct_demands():
    """(common, only_r1, only_r2) for the six distinct-file demands."""
    return [(c, a, b) for c in L2 for a, b in permutations([s for s in L2 if s != c])]


def wanted_units(*subsets) -> list[int]:
    return [unit(s, i) for s in subsets for i in (1, 2)]


def min_code_dim(cache1, cache2, demand, max_dim: int = N_PACKETS) -> int:
    """Smallest number of transmitted half-packets serving ``demand``."""
    c, a, b = demand
    z1, z2 = _span(cache1), _span(cache2)
    w1, w2 = wanted_units(c, a), wanted_units(c, b)
    for k, layer in enumerate(subspaces_by_dim(max_dim)):
        if any(decodable(S, z1, w1) and decodable(S, z2, w2) for S in layer):
            return k
    raise AssertionError("the full space always decodes")


@dataclass(frozen=True)
class SearchResult:
    best_worst_case: int
    best_placements: tuple[tuple[int, int], ...]
    table: dict[tuple[int, int], int]


def search_uncoded(demands=None) -> SearchResult:
    """Best worst-case delivery length over all uncoded one-packet placements."""
    demands = distinct_demands() if demands is None else demands
    table = {}
    for p1 in range(N_PACKETS):
        for p2 in range(N_PACKETS):
            table[(p1, p2)] = max(min_code_dim([1 << p1], [1 << p2], d) for d in demands)
    best = min(table.values())
    return SearchResult(best, tuple(k for k, v in table.items() if v == best), table)


def coded_placement_worst_case(demands=None) -> int:
    """Worst-case length for the XOR-of-first-halves / XOR-of-second-halves caches."""
    demands = distinct_demands() if demands is None else demands
    z1 = [sum(unit(s, 1) for s in L2)]
    z2 = [sum(unit(s, 2) for s in L2)]
    return max(min_code_dim(z1, z2, d) for d in demands)
