"""
Certifying a guard radius
=========================

The search grows a lattice spacing until secondary crossings of an edge
rectangle fail rarely enough, then picks the largest guard radius that
keeps the closed-edge bound under the threshold.  It takes about half a
minute on one core.
"""

from simperc import HeteroParams, SeededStream, Window, estimate_simultaneous, guard_zone_search

cert = guard_zone_search(lambda_p=60.0, lambda_s=400.0, D_t=0.18, d_t=0.2, trials=20000,
                         stream=SeededStream(5), threads=4)
print(f"certified={cert.certified} D_f={cert.D_f:.3e} km ell={cert.ell:.3f} km")
print(f"edge failures {cert.failures}/{cert.trials}, upper limit {cert.prob_A_closed_upper:.2e}")
print(f"q bound {cert.q_bound:.4e} < threshold {cert.threshold:.4e}")

# %%
# Check by direct simulation at the certified radius.
p = HeteroParams(0.18, 0.2, cert.D_f, 60.0, 400.0, Window.from_size(4.0))
est = estimate_simultaneous(p, 100, SeededStream(6), threads=4)
print({k: round(v.probability, 3) for k, v in est.items()})
