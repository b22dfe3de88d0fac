"""
Is coded placement needed?
==========================

Exhaustive check on a two-bit instance. Every description is split into
two one-bit halves. Each receiver may cache one half-packet, and the
sender may transmit any linear combinations. We find the shortest
delivery code for the worst distinct demand.
"""

from __future__ import annotations

from collections import Counter

from gwcache.placement_search import PACKETS, coded_placement_worst_case, search_uncoded

result = search_uncoded()
print("best uncoded worst case:", result.best_worst_case, "bits")
print("placements reaching it:")
for p1, p2 in result.best_placements[:6]:
    print("  r1 caches", PACKETS[p1], " r2 caches", PACKETS[p2])

# %%
# How often does each worst-case length occur over the 36 placements?

print(sorted(Counter(result.table.values()).items()))

# %%
# Caching XORs of halves instead gets down to four bits.

print("coded placement worst case:", coded_placement_worst_case(), "bits")
