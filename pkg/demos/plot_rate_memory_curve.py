"""
Rate-memory curve for three correlated files
============================================

Peak delivery rate of the two-step scheme against the lower bound, for a
library built from one shared, three pairwise and three private
components of 1200 bits each. The gap is largest in the third regime.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from gwcache import SourceSpec, entropy_profile_structured, gap_certificate, tilde_tuple
from gwcache.allocator import breakpoints

spec = SourceSpec(c0=1200, cp=1200, cv=1200)
t = tilde_tuple(spec)
h = entropy_profile_structured(spec)

# %%
# The curve is piecewise linear, so a fine grid only serves the plot.
# Exact values come back as fractions.

Ms = np.linspace(0, float(t.sum_rate()), 337)
certs = [gap_certificate(Fraction(M).limit_denominator(1000), t, h) for M in Ms]
R = np.array([float(c.achievable) for c in certs])
LB = np.array([float(c.lower_bound) for c in certs])

print("breakpoints:", [str(b) for b in breakpoints(t)])
worst = max(certs, key=lambda c: c.gap)
print(f"largest gap {worst.gap} bits at M={worst.M} ({worst.label} range)")

# %%
# Plot if matplotlib is around.

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(Ms, R, label="achievable")
    ax.plot(Ms, LB, "--", label="lower bound")
    for b in breakpoints(t)[:3]:
        ax.axvline(float(b), color="0.8", lw=0.8)
    ax.set_xlabel("cache size M (bits)")
    ax.set_ylabel("peak rate (bits)")
    ax.legend()
    fig.tight_layout()
    plt.show()
