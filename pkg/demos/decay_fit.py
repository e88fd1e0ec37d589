"""
Decay of the disorder-averaged kernel
=====================================

The area-law constant is built from the exponential decay of
``E |<x| h^(-1/2) |y>|`` in ``|x - y|``.  We fit it on a 1-d chain and turn the
fit into the constant.
"""

# %%
# Fit
# ---

import numpy as np

from oscneg.lattice import DisorderSpec, build_box
from oscneg.spectral import effective_area_constant, eigencorrelator_decay

box = build_box(1, 0, 29)
spec = DisorderSpec(coupling=1.0, k_max=8.0, seed=1)
fit = eigencorrelator_decay(box, spec, realizations=100)

print(f"C = {fit.C:.4f}   mu = {fit.mu:.4f}   rms log residual = {fit.residual:.3f}")
for r in range(0, 8):
    print(f"r = {r}:  mean {fit.means[r]:.3e}   fit {fit.C * np.exp(-fit.mu * r):.3e}")

# %%
# Constant
# --------

print("\nC tilde =", effective_area_constant(fit, box.d, spec.coupling, spec.k_max))
