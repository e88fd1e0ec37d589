"""
Negativity of two coupled oscillators
=====================================

The smallest interesting case: two sites with ``h = [[2, -1], [-1, 2]]`` and
the cut between them.  Everything here is small enough to check against a
brute-force truncated Fock computation.
"""

# %%
# Spectral frame and symplectic eigenvalues
# -----------------------------------------
#
# ``h`` has eigenvalues 1 and 3.  Cutting at site 0 gives a pair of symplectic
# eigenvalues ``3^(-1/4)`` and ``3^(1/4)``, reciprocal to each other.

import math

import numpy as np

from oscneg.fock import FockOracle
from oscneg.negativity import exact_log_negativity, h_bound, peres_witness, product_bound, pt_eigenvalue
from oscneg.spectral import build_correlation_frame, eigendecompose, symplectic_eigenvalues

h = np.array([[2.0, -1.0], [-1.0, 2.0]])
frame = eigendecompose(h)
symp = symplectic_eigenvalues(build_correlation_frame(frame, [0]))
print("gamma^2 =", frame.gamma2)
print("d       =", symp.d, " expected", [3**-0.25, 3**0.25])

# %%
# Exact negativity against the oracle
# -----------------------------------
#
# For the ground state the answer is ``ln(3) / 4``.  Excited ensembles need the
# full enumeration; the oracle diagonalizes the partially transposed density
# matrix on 30 levels per site.

oracle = FockOracle(h, 30, region=[0])
print(f"\n{'N':>2} {'exact':>14} {'oracle':>14} {'product':>10} {'h bound':>10}")
for N in range(3):
    rep = exact_log_negativity(N, symp)
    print(f"{N:>2} {rep.log_negativity:14.10f} {oracle.log_negativity(N):14.10f} "
          f"{product_bound(N, symp):10.6f} {h_bound(frame, [0], N):10.6f}")
print("ln(3)/4 =", math.log(3) / 4)

# %%
# Where the partial transpose goes negative
# -----------------------------------------
#
# An even excitation number in the mode with ``d < 1`` and none in the other
# gives a negative eigenvalue for the one-excitation ensemble.

w = peres_witness(1, symp)
print("\nwitness index", w, "eigenvalue", pt_eigenvalue(w, 1, symp))
