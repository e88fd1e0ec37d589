"""
Entanglement of excited ensembles on a disordered chain
=======================================================

For a short Anderson chain we compare the exact log-negativity of the
N-excitation ensemble with the two analytic upper bounds, for a handful of
disorder realizations.
"""

# %%
# One disorder realization
# ------------------------

import numpy as np

from oscneg.lattice import DisorderSpec, anderson_matrix, build_box, parse_region, sample_springs
from oscneg.negativity import exact_log_negativity, h_bound
from oscneg.spectral import build_correlation_frame, eigendecompose, symplectic_eigenvalues

box = build_box(1, 0, 3)
region = parse_region("left-half", box)
spec = DisorderSpec(coupling=1.0, k_max=8.0, seed=2)

frame = eigendecompose(anderson_matrix(box, spec.coupling, sample_springs(spec, box, 0)))
symp = symplectic_eigenvalues(build_correlation_frame(frame, region))
print("symplectic eigenvalues:", np.round(symp.d, 6))

# %%
# The bound chain
# ---------------
#
# ``exact <= product bound <= h bound``, and the product bound is linear in N.

print(f"\n{'N':>2} {'exact':>12} {'product':>12} {'h bound':>12} {'cutoffs':>14}")
for N in range(4):
    rep = exact_log_negativity(N, symp, frame=frame, region=region)
    print(f"{N:>2} {rep.log_negativity:12.8f} {rep.product_bound:12.8f} {rep.h_bound:12.8f} {str(rep.cutoffs):>14}")

# %%
# Disorder average
# ----------------

vals = []
for r in range(20):
    fr = eigendecompose(anderson_matrix(box, spec.coupling, sample_springs(spec, box, r)))
    s = symplectic_eigenvalues(build_correlation_frame(fr, region))
    vals.append([exact_log_negativity(N, s).log_negativity for N in range(4)])
vals = np.array(vals)
print("\nmean over 20 realizations:", np.round(vals.mean(axis=0), 6))
print("standard error:           ", np.round(vals.std(axis=0, ddof=1) / np.sqrt(len(vals)), 6))
print("h bounds for comparison:  ", [round(h_bound(frame, region, N), 4) for N in range(4)])
