"""
Coded placement for two pairwise requests
=========================================

Only the pairwise components are present, so each file is two pairwise
descriptions. Each receiver caches the XOR of the first (or second)
halves, and four half-packets serve any pair of distinct demands.
"""

from __future__ import annotations

from gwcache import SourceSpec
from gwcache.cli import trace_lines

spec = SourceSpec(c0=0, cp=1200, cv=0)

# %%
# Demand (1, 2): receiver 1 wants W12 and W13, receiver 2 wants W12 and W23.

for line in trace_lines(spec, 600, (1, 2)):
    print(line)

# %%
# Both receivers asking for file 3 hits the EQUAL pattern instead.

for line in trace_lines(spec, 600, (3, 3)):
    print(line)
