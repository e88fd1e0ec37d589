"""
Brute-force reference on a truncated Fock space.

Everything here is built from ladder matrices: the Hamiltonian, its ground
state (by diagonalization), Bogoliubov modes, eigenstates, ensemble density
matrices, partial transposes, trace norms and Weyl operators.  Nothing is
imported from the analytic modules, so agreement between the two is a real
check.

Sites of the subregion are moved to the leading tensor factors; ``order``
records the permutation (tensor position ``s`` holds original site
``order[s]``).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import TruncationLeakError

__all__ = [
    "TruncatedFockSpace",
    "OracleTolerances",
    "FockOracle",
    "ladder_matrices",
    "hamiltonian_matrix",
    "ground_state",
    "bogoliubov_b_matrices",
    "eigenstate_vector",
    "ensemble_density",
    "partial_transpose_dense",
    "trace_norm_dense",
    "weyl_site_matrix",
    "weyl_matrix",
    "weyl_apply",
]

MAX_DIM = 20_000
MAX_DENSE_DIM = 5_000


@dataclass(frozen=True)
class TruncatedFockSpace:
    sites: int
    n_cut: int
    order: tuple[int, ...]
    n_first: int = 0
    max_dim: int = MAX_DIM

    def __post_init__(self):
        if self.n_cut < 2:
            raise ValueError("n_cut must be at least 2")
        if sorted(self.order) != list(range(self.sites)):
            raise ValueError("order must be a permutation of the sites")
        if self.dim > self.max_dim:
            raise ValueError(f"dimension {self.dim} exceeds guard {self.max_dim}")

    @classmethod
    def build(cls, sites: int, n_cut: int, region: Sequence[int] = (), max_dim: int = MAX_DIM):
        first = sorted(int(x) for x in region)
        rest = [x for x in range(sites) if x not in set(first)]
        return cls(sites, n_cut, tuple(first + rest), len(first), max_dim)

    @property
    def dim(self) -> int:
        return self.n_cut**self.sites

    def permute_vector(self, f) -> np.ndarray:
        return np.asarray(f)[list(self.order)]

    def permute_matrix(self, h) -> np.ndarray:
        h = np.asarray(h)
        o = list(self.order)
        return h[np.ix_(o, o)]


@dataclass(frozen=True)
class OracleTolerances:
    char_tol: float = 1e-6
    state_tol: float = 1e-6
    norm_tol: float = 1e-6


def _matrix_of(frame_or_h) -> np.ndarray:
    return np.asarray(getattr(frame_or_h, "h", frame_or_h), dtype=float)


def ladder_matrices(n_cut: int) -> tuple[np.ndarray, np.ndarray]:
    if n_cut < 2:
        raise ValueError("n_cut must be at least 2")
    a = np.diag(np.sqrt(np.arange(1, n_cut, dtype=float)), k=1)
    return a, a.T.copy()


def _site_op(space: TruncatedFockSpace, op, pos: int) -> sp.csr_matrix:
    left = sp.identity(space.n_cut**pos, format="csr")
    right = sp.identity(space.n_cut ** (space.sites - pos - 1), format="csr")
    return sp.kron(sp.kron(left, sp.csr_matrix(op)), right, format="csr")


def hamiltonian_matrix(space: TruncatedFockSpace, frame_or_h) -> sp.csr_matrix:
    """``sum_x p_x^2 + sum_{x,y} q_x h_xy q_y`` in tensor-position order (sparse)."""
    h = space.permute_matrix(_matrix_of(frame_or_h))
    a, ad = ladder_matrices(space.n_cut)
    q1 = (a + ad) / math.sqrt(2)
    p2 = -((a - ad) @ (a - ad)) / 2
    q = [_site_op(space, q1, s) for s in range(space.sites)]
    H = sp.csr_matrix((space.dim, space.dim))
    for s in range(space.sites):
        H = H + _site_op(space, p2, s)
    for x in range(space.sites):
        for y in range(space.sites):
            if h[x, y] != 0.0:
                H = H + h[x, y] * (q[x] @ q[y])
    return ((H + H.T) / 2).tocsr()


def _fix_sign(v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(v)))
    return v * np.sign(v[i])


def ground_state(space: TruncatedFockSpace, frame_or_h, H=None) -> tuple[float, np.ndarray]:
    H = hamiltonian_matrix(space, frame_or_h) if H is None else H
    if space.dim <= 3000:
        w, v = np.linalg.eigh(H.toarray())
        return float(w[0]), _fix_sign(v[:, 0])
    w, v = spla.eigsh(H, k=1, sigma=-1.0, which="LM", tol=1e-13)
    return float(w[0]), _fix_sign(v[:, 0] / np.linalg.norm(v[:, 0]))


def bogoliubov_b_matrices(space: TruncatedFockSpace, frame_or_h) -> list[sp.csr_matrix]:
    """``b_k = sum_x O_xk (c+_k a_x + c-_k a_x^*)`` with ``c+- = (g^{1/2} +- g^{-1/2}) / 2``.

    Modes are indexed by ascending eigenvalue of ``h``.
    """
    h = space.permute_matrix(_matrix_of(frame_or_h))
    g2, O = np.linalg.eigh(h)
    g = np.sqrt(g2)
    a, ad = ladder_matrices(space.n_cut)
    A = [_site_op(space, a, s) for s in range(space.sites)]
    Ad = [_site_op(space, ad, s) for s in range(space.sites)]
    out = []
    for k in range(space.sites):
        cp = 0.5 * (math.sqrt(g[k]) + 1 / math.sqrt(g[k]))
        cm = 0.5 * (math.sqrt(g[k]) - 1 / math.sqrt(g[k]))
        b = sp.csr_matrix((space.dim, space.dim))
        for x in range(space.sites):
            if O[x, k] != 0.0:
                b = b + O[x, k] * (cp * A[x] + cm * Ad[x])
        out.append(b.tocsr())
    return out


def _top_occupancy(space: TruncatedFockSpace, psi: np.ndarray) -> float:
    t = np.abs(psi.reshape((space.n_cut,) * space.sites)) ** 2
    worst = 0.0
    for s in range(space.sites):
        idx = [slice(None)] * space.sites
        idx[s] = space.n_cut - 1
        worst = max(worst, float(t[tuple(idx)].sum()))
    return worst


def eigenstate_vector(
    space: TruncatedFockSpace,
    frame_or_h,
    alpha: Sequence[int],
    ground: np.ndarray | None = None,
    b_mats=None,
    leak_tol: float = 1e-8,
) -> np.ndarray:
    """``prod_k (b_k^*)^{alpha_k} / sqrt(alpha_k!) psi_0``, renormalized."""
    if ground is None:
        ground = ground_state(space, frame_or_h)[1]
    b_mats = bogoliubov_b_matrices(space, frame_or_h) if b_mats is None else b_mats
    psi = ground.copy()
    for k, n in enumerate(alpha):
        bd = b_mats[k].T
        for _ in range(int(n)):
            psi = bd @ psi
        psi = psi / math.sqrt(math.factorial(int(n)))
    norm = float(np.linalg.norm(psi))
    leak = max(abs(norm - 1.0), _top_occupancy(space, psi))
    if leak > leak_tol:
        raise TruncationLeakError(f"truncation leak {leak:.2e} for alpha={tuple(alpha)}")
    return psi / norm


def _sector(sites: int, N: int):
    return [al for al in itertools.product(range(N + 1), repeat=sites) if sum(al) == N]


def ensemble_density(space: TruncatedFockSpace, frame_or_h, N: int, ground=None, b_mats=None, leak_tol=1e-8):
    if space.dim > MAX_DENSE_DIM:
        raise ValueError(f"dense density matrix of dimension {space.dim} exceeds {MAX_DENSE_DIM}")
    if ground is None:
        ground = ground_state(space, frame_or_h)[1]
    b_mats = bogoliubov_b_matrices(space, frame_or_h) if b_mats is None else b_mats
    alphas = _sector(space.sites, N)
    vecs = np.column_stack(
        [eigenstate_vector(space, frame_or_h, al, ground, b_mats, leak_tol) for al in alphas]
    )
    return (vecs @ vecs.T) / len(alphas)


def partial_transpose_dense(space: TruncatedFockSpace, rho: np.ndarray, n_first: int | None = None) -> np.ndarray:
    """Transpose the leading ``n_first`` tensor factors."""
    n_first = space.n_first if n_first is None else n_first
    dA = space.n_cut**n_first
    dB = space.dim // dA
    r = np.asarray(rho).reshape(dA, dB, dA, dB)
    return r.transpose(2, 1, 0, 3).reshape(space.dim, space.dim)


def trace_norm_dense(m: np.ndarray, herm_tol: float = 1e-10) -> float:
    m = np.asarray(m)
    scale = max(1.0, float(np.max(np.abs(m), initial=0.0)))
    if np.max(np.abs(m - m.conj().T), initial=0.0) > herm_tol * scale:
        raise ValueError("input is not Hermitian")
    return math.fsum(np.abs(np.linalg.eigvalsh(0.5 * (m + m.conj().T))))


def weyl_site_matrix(n_cut: int, z: complex, pad: int | None = None) -> np.ndarray:
    """``exp(i (conj(z) a + z a^*) / sqrt 2)`` computed on a padded space, then cut."""
    pad = n_cut if pad is None else pad
    a, ad = ladder_matrices(n_cut + pad)
    G = 1j * (np.conj(z) * a + z * ad) / math.sqrt(2)
    return scipy.linalg.expm(G)[:n_cut, :n_cut]


def weyl_matrix(space: TruncatedFockSpace, f) -> np.ndarray:
    if space.dim > MAX_DENSE_DIM:
        raise ValueError(f"dense Weyl matrix of dimension {space.dim} exceeds {MAX_DENSE_DIM}")
    fz = space.permute_vector(np.asarray(f, dtype=complex))
    W = np.ones((1, 1), dtype=complex)
    for z in fz:
        W = np.kron(W, weyl_site_matrix(space.n_cut, z))
    return W


def weyl_apply(space: TruncatedFockSpace, f, vec: np.ndarray) -> np.ndarray:
    fz = space.permute_vector(np.asarray(f, dtype=complex))
    t = np.asarray(vec, dtype=complex).reshape((space.n_cut,) * space.sites)
    for s, z in enumerate(fz):
        w = weyl_site_matrix(space.n_cut, z)
        t = np.moveaxis(np.tensordot(w, t, axes=([1], [s])), 0, s)
    return t.reshape(space.dim)


class FockOracle:
    """Caches the Hamiltonian, ground state and Bogoliubov modes for one frame."""

    def __init__(self, h, n_cut: int, region: Sequence[int] = (), max_dim: int = MAX_DIM, leak_tol: float = 1e-8):
        self.h = _matrix_of(h)
        self.space = TruncatedFockSpace.build(self.h.shape[0], n_cut, region, max_dim)
        self.leak_tol = leak_tol
        self.H = hamiltonian_matrix(self.space, self.h)
        self.ground_energy, self.ground = ground_state(self.space, self.h, self.H)
        self.b = bogoliubov_b_matrices(self.space, self.h)

    def eigenstate(self, alpha) -> np.ndarray:
        return eigenstate_vector(self.space, self.h, alpha, self.ground, self.b, self.leak_tol)

    def eigenstate_char(self, alpha, f) -> float:
        psi = self.eigenstate(alpha)
        val = np.vdot(psi, weyl_apply(self.space, f, psi))
        return float(val.real)

    def density(self, N: int) -> np.ndarray:
        return ensemble_density(self.space, self.h, N, self.ground, self.b, self.leak_tol)

    def log_negativity(self, N: int) -> float:
        rho = self.density(N)
        return math.log(trace_norm_dense(partial_transpose_dense(self.space, rho)))

    def ensemble_pt_char(self, N: int, f) -> float:
        rt = partial_transpose_dense(self.space, self.density(N))
        W = weyl_matrix(self.space, f)
        return float(np.sum(W * rt.T).real)

    def energy(self, N: int) -> float:
        vals = []
        for al in _sector(self.space.sites, N):
            psi = self.eigenstate(al)
            vals.append(float(psi @ (self.H @ psi)))
        return math.fsum(vals) / len(vals)
