"""
Logarithmic negativity of N-modes ensemble states on harmonic oscillator
lattices, with analytic bounds and a truncated-Fock reference oracle.
"""

from . import errors  # noqa: F401
from .lattice import DisorderSpec, LatticeBox, Region, anderson_matrix, build_box, parse_region, sample_springs
from .modes import ScaledModeOperator, TruncationPolicy
from .negativity import (
    EnsembleSpec,
    NegativityReport,
    exact_log_negativity,
    h_bound,
    product_bound,
)
from .spectral import build_correlation_frame, eigendecompose, symplectic_eigenvalues

__version__ = "0.1.0"
