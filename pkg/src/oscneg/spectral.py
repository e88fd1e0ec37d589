"""
Spectral data of the one-particle operator ``h`` and the derived
position-momentum matrices.

``M = diag(h^{-1/2}, h^{1/2})`` is twice the symmetric part of the ground
state correlation matrix.  Conjugating the momentum block with the sign
matrix ``P`` (``-1`` on the subregion) gives ``Mtilde``, whose symplectic
eigenvalues are the square roots of the eigenvalues of

    Z = h^{1/4} P h^{-1/2} P h^{1/4}.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    CrossCheckError,
    NotPositiveDefiniteError,
    NumericalDegeneracyError,
    UnavailableConstantError,
)
from .lattice import DisorderSpec, LatticeBox, Region, anderson_matrix, sample_springs

__all__ = [
    "DegenerateSpectrumWarning",
    "SpectralFrame",
    "CorrelationFrame",
    "SymplecticSpectrum",
    "DecayFit",
    "eigendecompose",
    "fractional_power",
    "build_correlation_frame",
    "symplectic_eigenvalues",
    "symplectic_cross_check",
    "symplectic_form",
    "eigencorrelator_decay",
    "effective_area_constant",
]


class DegenerateSpectrumWarning(UserWarning):
    pass


def _sym(x: np.ndarray) -> np.ndarray:
    return 0.5 * (x + x.T)


def symplectic_form(n: int) -> np.ndarray:
    """``J = [[0, -I], [I, 0]]`` in (q, p) block ordering."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


@dataclass(frozen=True)
class SpectralFrame:
    h: np.ndarray
    O: np.ndarray
    gamma2: np.ndarray
    _powers: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def size(self) -> int:
        return self.gamma2.shape[0]

    @property
    def gamma(self) -> np.ndarray:
        return np.sqrt(self.gamma2)

    def power(self, s: float) -> np.ndarray:
        s = float(s)
        if s not in self._powers:
            self._powers[s] = _sym((self.O * self.gamma2**s) @ self.O.T)
        return self._powers[s]


def eigendecompose(h, rel_tol: float = 1e-10, degeneracy_tol: float = 1e-8) -> SpectralFrame:
    """Diagonalize a real symmetric positive-definite ``h = O diag(gamma2) O^T``.

    Eigenvalues come out ascending.  Eigenvector signs are fixed so that the
    largest-magnitude entry of each column is positive.
    """
    h = np.array(h, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"h must be square, got shape {h.shape}")
    scale = max(np.linalg.norm(h, 2), np.finfo(float).tiny)
    if np.max(np.abs(h - h.T), initial=0.0) > 1e-12 * scale:
        raise ValueError("h is not symmetric")
    h = _sym(h)
    gamma2, O = np.linalg.eigh(h)
    if gamma2[0] <= 0:
        raise NotPositiveDefiniteError(f"smallest eigenvalue {gamma2[0]:.3e} is not positive")
    pivots = np.argmax(np.abs(O), axis=0)
    O = O * np.sign(O[pivots, np.arange(O.shape[1])])
    err = np.linalg.norm((O * gamma2) @ O.T - h, 2)
    if err > rel_tol * scale:
        raise NumericalDegeneracyError(f"reconstruction error {err:.2e} exceeds {rel_tol:.0e}*|h|")
    if gamma2.size > 1 and np.min(np.diff(gamma2)) < degeneracy_tol * scale:
        warnings.warn(
            f"near-degenerate spectrum (gap {np.min(np.diff(gamma2)):.2e})",
            DegenerateSpectrumWarning,
            stacklevel=2,
        )
    return SpectralFrame(h, O, gamma2)


def fractional_power(frame: SpectralFrame, s: float) -> np.ndarray:
    return frame.power(s)


@dataclass(frozen=True)
class CorrelationFrame:
    frame: SpectralFrame
    signs: np.ndarray
    M: np.ndarray
    Mtilde: np.ndarray

    @property
    def P(self) -> np.ndarray:
        return np.diag(self.signs)

    @property
    def J(self) -> np.ndarray:
        return symplectic_form(self.frame.size)

    def ground_correlation(self) -> np.ndarray:
        """``Gamma_0 = (M - iJ) / 2``."""
        return 0.5 * (self.M - 1j * self.J)


def _signs_for(frame: SpectralFrame, region) -> np.ndarray:
    if isinstance(region, Region):
        if region.volume != frame.size:
            raise ValueError("region volume does not match frame size")
        return region.signs()
    signs = np.ones(frame.size)
    idx = list(region)
    if idx:
        signs[idx] = -1.0
    return signs


def build_correlation_frame(frame: SpectralFrame, region) -> CorrelationFrame:
    signs = _signs_for(frame, region)
    n = frame.size
    zero = np.zeros((n, n))
    M = np.block([[frame.power(-0.5), zero], [zero, frame.power(0.5)]])
    mom = signs[:, None] * frame.power(0.5) * signs[None, :]
    Mtilde = np.block([[frame.power(-0.5), zero], [zero, mom]])
    return CorrelationFrame(frame, signs, M, Mtilde)


@dataclass(frozen=True)
class SymplecticSpectrum:
    d: np.ndarray
    Z: np.ndarray

    @property
    def zeta(self) -> np.ndarray:
        return (self.d - 1.0) / (self.d + 1.0)

    @property
    def size(self) -> int:
        return self.d.shape[0]

    @classmethod
    def from_values(cls, d: Sequence[float]) -> "SymplecticSpectrum":
        """Spectrum without a backing frame, for model calculations."""
        d = np.sort(np.asarray(d, dtype=float))
        if np.any(d <= 0):
            raise ValueError("symplectic eigenvalues must be positive")
        return cls(d, np.diag(d**2))


def symplectic_eigenvalues(corr: CorrelationFrame, tol: float = 1e-12) -> SymplecticSpectrum:
    frame = corr.frame
    q = frame.power(0.25)
    # Z - I = h^{1/4} (P h^{-1/2} P - h^{-1/2}) h^{1/4}; the middle factor only
    # has entries across the cut, so trivial cuts give Z = I exactly.
    flip = corr.signs[:, None] * corr.signs[None, :] - 1.0
    Z = np.eye(frame.size) + _sym(q @ (flip * frame.power(-0.5)) @ q)
    z = np.linalg.eigvalsh(Z)
    if z[0] <= tol * max(1.0, z[-1]):
        raise NumericalDegeneracyError(f"Z is not positive definite (min eigenvalue {z[0]:.3e})")
    return SymplecticSpectrum(np.sqrt(z), Z)


def symplectic_cross_check(corr: CorrelationFrame, tol: float = 1e-8) -> np.ndarray:
    """Positive eigenvalues of the Hermitian ``i Mt^{1/2} J Mt^{1/2}``.

    Raises when they disagree with :func:`symplectic_eigenvalues` beyond ``tol``
    (relative to ``max(1, d)``).
    """
    w, V = np.linalg.eigh(corr.Mtilde)
    if w[0] <= 0:
        raise NumericalDegeneracyError("Mtilde is not positive definite")
    root = _sym((V * np.sqrt(w)) @ V.T)
    L = 1j * root @ corr.J @ root
    L = 0.5 * (L + L.conj().T)
    ev = np.linalg.eigvalsh(L)
    n = corr.frame.size
    d_herm = np.sort(ev[n:])
    d_z = symplectic_eigenvalues(corr).d
    gap = np.max(np.abs(d_herm - d_z) / np.maximum(1.0, d_z))
    if gap > tol:
        raise CrossCheckError(f"symplectic paths disagree by {gap:.2e}")
    return d_herm


@dataclass(frozen=True)
class DecayFit:
    """Fit of the disorder-averaged ``|<x| h^{-1/2} |y>|`` against ``|x - y|``.

    ``C`` is the smallest prefactor making ``C exp(-mu r)`` an upper envelope of
    the measured means at every distance; ``mu`` and ``residual`` come from a
    least-squares fit of ``log(mean)`` on ``r >= 1``.
    """

    C: float
    mu: float
    residual: float
    flagged: bool = False
    distances: np.ndarray = field(default=None, repr=False)
    means: np.ndarray = field(default=None, repr=False)
    stderr: np.ndarray = field(default=None, repr=False)
    realizations: int = 0


def _correlator_by_distance(box: LatticeBox, spec: DisorderSpec, realization: int, dist: np.ndarray, rmax: int):
    k = sample_springs(spec, box, realization)
    frame = eigendecompose(anderson_matrix(box, spec.coupling, k))
    a = np.abs(frame.power(-0.5))
    sums = np.bincount(dist.ravel(), weights=a.ravel(), minlength=rmax + 1)
    counts = np.bincount(dist.ravel(), minlength=rmax + 1)
    return sums / np.maximum(counts, 1)


def eigencorrelator_decay(
    boxes, spec: DisorderSpec, realizations: int, workers: int = 1
) -> DecayFit:
    if isinstance(boxes, LatticeBox):
        boxes = [boxes]
    rmax = max(int(b.distance_matrix().max()) for b in boxes)
    jobs = [(b, r) for b in boxes for r in range(realizations)]
    dists = {id(b): b.distance_matrix() for b in boxes}

    def one(job):
        b, r = job
        return _correlator_by_distance(b, spec, r, dists[id(b)], rmax)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(one, jobs))
    else:
        rows = [one(j) for j in jobs]
    samples = np.vstack(rows)
    means = np.array([math.fsum(col) for col in samples.T]) / samples.shape[0]
    stderr = samples.std(axis=0, ddof=1) / math.sqrt(samples.shape[0]) if samples.shape[0] > 1 else np.full(rmax + 1, np.nan)
    r = np.arange(rmax + 1)
    sel = (r >= 1) & (means > 0)
    if sel.sum() < 2:
        return DecayFit(math.nan, math.nan, math.nan, True, r, means, stderr, realizations)
    slope, intercept = np.polyfit(r[sel], np.log(means[sel]), 1)
    resid = np.log(means[sel]) - (slope * r[sel] + intercept)
    mu = -slope
    residual = float(np.sqrt(np.mean(resid**2)))
    pos = means > 0
    C = float(np.max(means[pos] * np.exp(mu * r[pos])))
    return DecayFit(C, float(mu), residual, bool(mu <= 0), r, means, stderr, realizations)


def effective_area_constant(
    fit: DecayFit, d: int, coupling: float, k_max: float, cutoff: float = 1e-12
) -> float:
    """``C * (4 d coupling + k_max)^{1/2} * (sum_{x in Z^d} exp(-mu |x|))^2``.

    The lattice sum factorizes over axes; the one-dimensional sum is truncated
    once its terms drop below ``cutoff``.
    """
    mu = fit.mu
    if not (mu > 0) or fit.flagged or not math.isfinite(fit.C):
        raise UnavailableConstantError(f"no decay constant available (mu={mu})")
    if math.isinf(mu):
        line = 1.0
    else:
        terms = []
        n = 1
        while True:
            t = math.exp(-mu * n)
            if t < cutoff:
                break
            terms.append(t)
            n += 1
        line = 1.0 + 2.0 * math.fsum(terms)
    return fit.C * math.sqrt(4 * d * coupling + k_max) * line ** (2 * d)
