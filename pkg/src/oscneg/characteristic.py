"""
Closed-form characteristic functions ``<W(f)>`` for the harmonic lattice.

A test function ``f: Lambda -> C`` is identified with the stacked real vector
``ftilde = (Re f, Im f)``.  The quadratic forms that appear in the formulas
are evaluated in the rotated frame

    V f = gamma^{-1/2} O^T Re f + i gamma^{1/2} O^T Im f,

where ``|Vf|^2 = <ftilde, M ftilde>`` and ``|(Vf)_k|^2`` is the k-th mode's
share of it.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .spectral import SpectralFrame, _signs_for
from .special import generalized_laguerre, laguerre, sector_size

__all__ = [
    "stack",
    "rotate",
    "gaussian_char",
    "ground_state_char",
    "eigenstate_char",
    "ensemble_pt_char",
    "ensemble_char",
    "normal_mode_char",
]


def stack(f) -> np.ndarray:
    """``(Re f, Im f)`` as one real vector of length ``2 |Lambda|``."""
    f = np.asarray(f, dtype=complex)
    return np.concatenate([f.real, f.imag])


def rotate(frame: SpectralFrame, f) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    g = frame.gamma
    return (frame.O.T @ f.real) / np.sqrt(g) + 1j * np.sqrt(g) * (frame.O.T @ f.imag)


def gaussian_char(Gamma, f) -> float:
    """``exp(-<ftilde, Gamma ftilde> / 2)`` using the symmetric real part of ``Gamma``."""
    Gamma = np.asarray(Gamma)
    G = 0.5 * (Gamma + Gamma.T).real
    ft = stack(f)
    return math.exp(-0.5 * float(ft @ G @ ft))


def ground_state_char(frame: SpectralFrame, f) -> float:
    v = rotate(frame, f)
    return math.exp(-0.25 * float(np.vdot(v, v).real))


def eigenstate_char(frame: SpectralFrame, alpha: Sequence[int], f) -> float:
    alpha = list(alpha)
    if len(alpha) != frame.size:
        raise ValueError(f"occupation vector has length {len(alpha)}, expected {frame.size}")
    v = rotate(frame, f)
    w = np.abs(v) ** 2
    value = math.exp(-0.25 * math.fsum(w))
    for a, wk in zip(alpha, w):
        if a:
            value *= float(laguerre(a, wk / 2))
    return value


def _pt_quadratic_form(frame: SpectralFrame, region, f) -> float:
    """``<ftilde, Mtilde ftilde>``: the momentum part sees ``P Im f``."""
    f = np.asarray(f, dtype=complex)
    signs = _signs_for(frame, region)
    v = rotate(frame, f.real + 1j * signs * f.imag)
    return float(np.vdot(v, v).real)


def ensemble_pt_char(frame: SpectralFrame, region, N: int, f) -> float:
    """Characteristic function of the partially transposed N-modes ensemble."""
    if N < 0:
        raise ValueError("N must be non-negative")
    s = _pt_quadratic_form(frame, region, f)
    q = float(generalized_laguerre(N, frame.size - 1, s / 2))
    return q / sector_size(frame.size, N) * math.exp(-s / 4)


def ensemble_char(frame: SpectralFrame, N: int, f) -> float:
    return ensemble_pt_char(frame, (), N, f)


def normal_mode_char(d: Sequence[float], N: int, f) -> float:
    """The same ensemble after symplectic diagonalization, in normal-mode variables."""
    d = np.asarray(d, dtype=float)
    s = float(np.sum(d * np.abs(np.asarray(f, dtype=complex)) ** 2))
    q = float(generalized_laguerre(N, d.size - 1, s / 2))
    return q / sector_size(d.size, N) * math.exp(-s / 4)
