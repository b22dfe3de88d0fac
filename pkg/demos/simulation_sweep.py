"""
Bit-level sweep over the cache grid
===================================

Build a random library, run all nine demands at every grid point, and
compare the measured peak with the closed form.
"""

from __future__ import annotations

from gwcache import SourceSpec, sweep
from gwcache.cli import fmt

spec = SourceSpec(c0=24, cp=48, cv=96)
points, verdict = sweep(spec, seed=7)

print(f"{'M':>8} {'closed':>8} {'measured':>8} {'bound':>8} {'gap':>6}")
for p in points:
    print(f"{fmt(p.M):>8} {fmt(p.achievable):>8} {fmt(p.measured):>8} {fmt(p.lower_bound):>8} {fmt(p.gap):>6}")

# %%

print(verdict.line())
print("largest gap", verdict.max_gap, "at M =", verdict.max_gap_at)
