"""
Disk overlaps and pair distances
================================

Two closed forms carry the analytic bounds: the overlap area of two equal
disks and the density of the distance between two uniform points in a square.
"""

import math

import numpy as np

from simperc.geometry import integrate, lens_area, pair_distance_pdf, pair_distance_pdf_branches

# The overlap falls from the full disk area to zero as the centers separate.
for d in np.linspace(0.0, 2.0, 9):
    print(f"d = {d:4.2f}   lens = {lens_area(d, 1.0):.6f}")

# A quick hit-count check at unit distance.
rng = np.random.default_rng(0)
pts = rng.uniform(-1, 1, size=(1_000_000, 2))
hit = (np.hypot(*pts.T) <= 1) & (np.hypot(pts[:, 0] - 1, pts[:, 1]) <= 1)
print("closed form", lens_area(1.0, 1.0), "  Monte Carlo", 4 * hit.mean())

# %%
# The distance density has two analytic branches that meet at t = side.
first, second = pair_distance_pdf_branches(1.0, 1.0)
print("seam values", first, second, "  2*pi - 6 =", 2 * math.pi - 6)

# Adaptive Simpson confirms the density integrates to one.
mass = integrate(lambda t: pair_distance_pdf(t, 1.0), 0.0, math.sqrt(2.0), abs_tol=1e-12)
print("total mass", mass)
