"""
One realization of the two networks
===================================

Primary users at 50 per km^2 link within 180 m; secondary users at the
same density link within 220 m but stay silent inside a 50 m guard zone
around every primary.  A PNG is written when matplotlib is available.
"""

import math

import numpy as np

from simperc import HeteroParams, SeededStream, Window, build_clusters, realize, simultaneous_crossing

params = HeteroParams(D_t=0.18, d_t=0.22, D_f=0.05, lambda_p=50.0, lambda_s=50.0, window=Window.from_size(2.0))
rz = realize(params, SeededStream(7))
print("primaries:", len(rz.primary), " secondaries:", len(rz.secondary), " active:", int(rz.active_mask.sum()))
print("crossings (primary, secondary):", simultaneous_crossing(rz, params))

# %%
# The active fraction matches the void probability of the guard disk.
fr = [realize(params, SeededStream(7, t)).active_mask.mean() for t in range(200)]
print(f"mean active fraction {np.mean(fr):.4f}, exp(-lambda_p pi D_f^2) = {math.exp(-50 * math.pi * 0.05**2):.4f}")

# %%
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    lab = build_clusters(rz.primary, params.D_t, params.window)
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.scatter(*rz.primary.points.T, c=lab.component_id, cmap="tab20", s=12, label="primary")
    sec = rz.secondary.points
    ax.scatter(*sec[rz.active_mask].T, marker="x", s=10, color="k", label="active secondary")
    ax.scatter(*sec[~rz.active_mask].T, marker="x", s=10, color="0.7", label="silenced secondary")
    ax.set_aspect("equal")
    ax.legend(loc="upper right", fontsize=7)
    fig.savefig("two_networks.png", dpi=120)
    print("wrote two_networks.png")
