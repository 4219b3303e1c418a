"""
Estimating the critical density
===============================

The critical density for unit connection distance is located by bisection
on the crossing probability of ``[0, 2n] x [0, n]`` windows.  The budget
here is small; ``simperc lambda-c --diameter 1`` runs the full one.
"""

from simperc import SeededStream, estimate_lambda_c

est = estimate_lambda_c(1.0, window_heights=(8.0, 16.0), trials=60, stream=SeededStream(1))
print(f"lambda_c(1) ~ {est.estimate:.4f}  CI [{est.ci_low:.4f}, {est.ci_high:.4f}]")
for h, e, lo, hi in est.per_height:
    print(f"  height {h:5.1f}: {e:.4f} [{lo:.4f}, {hi:.4f}]")
print("heights consistent:", est.heights_consistent)

# %%
# The model is scale free: doubling the distance divides the density by four.
est2 = estimate_lambda_c(2.0, window_heights=(16.0, 32.0), trials=60, stream=SeededStream(1))
print("lambda_c(2) * 4 =", 4 * est2.estimate)
