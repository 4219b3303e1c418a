"""
Necessary and sufficient density limits
=======================================

Every closed-form limit at one parameter point, then the guard-radius
threshold of the bond-percolation argument.
"""

from simperc import HeteroParams, Window, bound_report
from simperc.bounds import (
    necessary_site_bound,
    necessary_site_bound_printed_cor,
    peierls_series,
    peierls_threshold,
)

rep = bound_report(HeteroParams(0.18, 0.08, 0.05, 50.0, 500.0, Window.from_size(1.0)))
for k, v in rep.as_dict().items():
    print(f"{k:32s} {v}")

# %%
# The shortcut form drops a factor; the two agree only for dense secondaries.
for x in (1.5, 3.0, 10.0, 30.0):
    ls = x / 0.04
    print(f"lambda_s d_t^2 = {x:4.1f}: site {necessary_site_bound(ls, 0.2, 0.05, 1 / 3):9.2f}  "
          f"printed {necessary_site_bound_printed_cor(ls, 0.2, 0.05):9.2f}")

# %%
t = peierls_threshold()
print("closed-edge threshold", t, " series there", peierls_series(t))
