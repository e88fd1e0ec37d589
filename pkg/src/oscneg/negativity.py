"""
Exact logarithmic negativity of N-modes ensemble states and its upper bounds.

After symplectic diagonalization the partial transpose of the ensemble is the
sector average of products of scaled single-mode operators, so its eigenvalue
at the multi-index ``nvec`` is

    lambda(nvec) = |J_N|^{-1} sum_{alpha in J_N} prod_k T_k[alpha_k, n_k]

with ``T_k[m, n]`` the n-th eigenvalue of ``rho_{d_k}^(m)``.  The sum over the
sector equals the ``t^N`` coefficient of ``prod_k sum_m T_k[m, n_k] t^m``; the
enumeration builds these truncated polynomials mode by mode over blocks of the
multi-index grid.  Mixed ensembles reuse all lower coefficients.

Logarithms are natural.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import EnumerationTooLargeError, InsufficientTruncationError
from .modes import TruncationPolicy, eigenvalue_table, tail_table, trace_norm_bound
from .spectral import SpectralFrame, SymplecticSpectrum, _signs_for
from .special import enumerate_sector, sector_size

__all__ = [
    "EnsembleSpec",
    "NegativityReport",
    "DEFAULT_BUDGET",
    "mode_cutoffs",
    "pt_eigenvalue",
    "pt_eigenvalues_grid",
    "exact_log_negativity",
    "mixed_log_negativity",
    "ground_state_negativity_closed_form",
    "product_bound",
    "product_bound_from_z",
    "h_bound",
    "peres_candidates",
    "peres_witness",
    "ensemble_energy",
    "ensemble_energy_bruteforce",
]

DEFAULT_BUDGET = 10**8
_CHUNK_ELEMS = 1 << 21


@dataclass(frozen=True)
class EnsembleSpec:
    """Pure ensemble ``rho_N`` or, with ``weights``, the mixture ``sum_L w_L rho_L``."""

    N: int
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.N < 0:
            raise ValueError("N must be non-negative")
        if self.weights is not None:
            w = tuple(float(x) for x in self.weights)
            object.__setattr__(self, "weights", w)
            if len(w) != self.N + 1:
                raise ValueError(f"expected {self.N + 1} weights, got {len(w)}")
            if any(x < 0 for x in w):
                raise ValueError("weights must be non-negative")
            if abs(math.fsum(w) - 1.0) > 1e-12:
                raise ValueError("weights must sum to 1")

    @classmethod
    def mixture(cls, weights: Sequence[float]) -> "EnsembleSpec":
        return cls(len(weights) - 1, tuple(weights))

    def coefficients(self, size: int) -> np.ndarray:
        """``c_L = w_L / |J_L|`` for ``L = 0..N``."""
        c = np.zeros(self.N + 1)
        if self.weights is None:
            c[self.N] = 1.0 / sector_size(size, self.N)
        else:
            for L, w in enumerate(self.weights):
                c[L] = w / sector_size(size, L)
        return c


def _as_spec(spec) -> EnsembleSpec:
    return spec if isinstance(spec, EnsembleSpec) else EnsembleSpec(int(spec))


@dataclass
class NegativityReport:
    log_negativity: float
    trace_norm: float
    tail_bound: float
    trace_check: float
    product_bound: float
    h_bound: float | None
    n_max: int
    N: int
    seed: int | None = None
    cutoffs: tuple[int, ...] = ()
    timings: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        keys = ("log_negativity", "trace_norm", "tail_bound", "trace_check",
                "product_bound", "h_bound", "n_max", "N", "seed")
        d = asdict(self)
        return {k: d[k] for k in keys}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


# --- per-mode tables -------------------------------------------------------


def _tables(symp: SymplecticSpectrum, L: int, cutoffs: Sequence[int]):
    return [eigenvalue_table(float(d), L, int(n)) for d, n in zip(symp.d, cutoffs)]


def _global_tail(tables, tails, coeffs) -> float:
    """Bound on ``sum |lambda|`` over multi-indices outside the window.

    Uses ``sum_alpha sum_k tail_k(alpha_k) prod_{j != k} mass_j(alpha_j)``,
    evaluated as polynomial coefficients.
    """
    L = len(coeffs) - 1
    masses = [np.abs(T).sum(axis=1) + t for T, t in zip(tables, tails)]
    K = len(tables)
    total = np.zeros(L + 1)
    prefix = [np.zeros(L + 1) for _ in range(K + 1)]
    prefix[0][0] = 1.0
    for k in range(K):
        prefix[k + 1] = np.convolve(prefix[k], masses[k])[: L + 1]
    suffix = np.zeros(L + 1)
    suffix[0] = 1.0
    for k in range(K - 1, -1, -1):
        total += np.convolve(np.convolve(prefix[k], tails[k])[: L + 1], suffix)[: L + 1]
        suffix = np.convolve(suffix, masses[k])[: L + 1]
    return float(np.abs(coeffs) @ total)


def mode_cutoffs(symp: SymplecticSpectrum, L: int, policy: TruncationPolicy) -> list[int]:
    """Per-mode Fock cutoffs.

    Adaptive policies pick, per mode, the smallest cutoff whose worst tail over
    ``m <= L`` fits a share of ``tail_eps``; modes with ``d`` close to one need
    very few levels.  Cutoffs never exceed ``policy.n_max``.
    """
    K = symp.size
    lo = max(L, 1)
    if policy.n_max < lo:
        raise ValueError(f"n_max={policy.n_max} below the highest mode order {L}")
    if not policy.adaptive:
        return [policy.n_max] * K
    share = policy.tail_eps / (2 * K)
    cuts = []
    for d in symp.d:
        n = lo
        while n < policy.n_max and np.max(tail_table(float(d), L, n)) > share:
            n += 1
        cuts.append(n)
    return cuts


def _certified_setup(symp, coeffs, policy):
    L = len(coeffs) - 1
    share = policy.tail_eps / (2 * symp.size)
    adaptive = policy.adaptive
    for _ in range(8):
        pol = TruncationPolicy(policy.n_max, share * 2 * symp.size, adaptive)
        cuts = mode_cutoffs(symp, L, pol)
        tables = _tables(symp, L, cuts)
        tails = [tail_table(float(d), L, n) for d, n in zip(symp.d, cuts)]
        tail = _global_tail(tables, tails, coeffs)
        if tail <= policy.tail_eps or not adaptive or all(c == policy.n_max for c in cuts):
            return cuts, tables, tail
        share /= 10.0
    return cuts, tables, tail


# --- block enumeration ----------------------------------------------------


def _extend(A: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Multiply polynomials ``A[..., deg]`` by mode table ``T[m, n]``, truncated."""
    L = A.shape[-1] - 1
    out = np.zeros(A.shape[:-1] + (T.shape[1], L + 1))
    for m in range(L + 1):
        out[..., m:] += A[..., None, : L + 1 - m] * T[m][:, None]
    return out


def _block_values(tables, prefix, coeffs) -> np.ndarray:
    L = len(coeffs) - 1
    poly = np.zeros(L + 1)
    poly[0] = 1.0
    for T, i in zip(tables, prefix):
        poly = np.convolve(poly, T[:, i])[: L + 1]
    A = poly
    for T in tables[len(prefix):]:
        A = _extend(A, T)
    return A @ coeffs


def _split(tables, L, chunk):
    sizes = [T.shape[1] for T in tables]
    p = 0
    while p < len(sizes) and math.prod(sizes[p:]) * (L + 1) > chunk:
        p += 1
    return p, list(itertools.product(*(range(s) for s in sizes[:p])))


def _enumerate(tables, coeffs, workers=1, chunk=_CHUNK_ELEMS, track_min=False):
    L = len(coeffs) - 1
    p, prefixes = _split(tables, L, chunk)

    def one(prefix):
        lam = _block_values(tables, prefix, coeffs)
        flat = np.ravel(lam)
        res = [math.fsum(np.abs(flat)), math.fsum(flat)]
        if track_min:
            i = int(np.argmin(flat))
            res += [float(flat[i]), prefix + np.unravel_index(i, np.shape(lam))]
        return res

    if workers > 1 and len(prefixes) > 1:
        with ThreadPoolExecutor(workers) as pool:
            blocks = list(pool.map(one, prefixes))
    else:
        blocks = [one(pr) for pr in prefixes]
    abs_sum = math.fsum(b[0] for b in blocks)
    total = math.fsum(b[1] for b in blocks)
    if not track_min:
        return abs_sum, total, None, None
    best = min(blocks, key=lambda b: b[2])
    return abs_sum, total, best[2], tuple(int(i) for i in best[3])


def pt_eigenvalues_grid(spec, symp: SymplecticSpectrum, cutoffs: Sequence[int]) -> np.ndarray:
    """All eigenvalues on the window ``n_k <= cutoffs[k]`` as a dense array."""
    spec = _as_spec(spec)
    coeffs = spec.coefficients(symp.size)
    tables = _tables(symp, spec.N, cutoffs)
    return _block_values(tables, (), coeffs)


def pt_eigenvalue(nvec: Sequence[int], spec, symp: SymplecticSpectrum) -> float:
    spec = _as_spec(spec)
    nvec = [int(n) for n in nvec]
    if len(nvec) != symp.size:
        raise ValueError(f"index has length {len(nvec)}, expected {symp.size}")
    coeffs = spec.coefficients(symp.size)
    tables = _tables(symp, spec.N, [max(n, 1) for n in nvec])
    return float(_block_values(tables, tuple(nvec), coeffs))


# --- reports ----------------------------------------------------------------


def exact_log_negativity(
    spec,
    symp: SymplecticSpectrum,
    policy: TruncationPolicy | None = None,
    *,
    frame: SpectralFrame | None = None,
    region=None,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
    chunk: int = _CHUNK_ELEMS,
    seed: int | None = None,
) -> NegativityReport:
    """Trace norm of the partial transpose by certified enumeration.

    Raises :class:`EnumerationTooLargeError` when the window exceeds ``budget``
    multi-indices and :class:`InsufficientTruncationError` when the certified
    tail exceeds ``policy.tail_eps``.
    """
    spec = _as_spec(spec)
    policy = policy or TruncationPolicy()
    t0 = time.perf_counter()
    coeffs = spec.coefficients(symp.size)
    cuts, tables, tail = _certified_setup(symp, coeffs, policy)
    window = math.prod(c + 1 for c in cuts)
    if window > budget:
        raise EnumerationTooLargeError(
            f"window of {window:.3g} indices exceeds budget {budget:.3g}; use bounds-only mode"
        )
    if tail > policy.tail_eps:
        raise InsufficientTruncationError(
            f"certified tail {tail:.3e} exceeds {policy.tail_eps:.1e}", tail
        )
    t1 = time.perf_counter()
    abs_sum, total, _, _ = _enumerate(tables, coeffs, workers=workers, chunk=chunk)
    t2 = time.perf_counter()
    hb = h_bound(frame, region, spec.N) if frame is not None and region is not None else None
    return NegativityReport(
        log_negativity=math.log(abs_sum),
        trace_norm=abs_sum,
        tail_bound=tail,
        trace_check=total,
        product_bound=product_bound(spec, symp),
        h_bound=hb,
        n_max=max(cuts),
        N=spec.N,
        seed=seed,
        cutoffs=tuple(cuts),
        timings={"tables": t1 - t0, "enumeration": t2 - t1},
    )


def mixed_log_negativity(weights, symp, policy=None, **kwargs) -> NegativityReport:
    return exact_log_negativity(EnsembleSpec.mixture(weights), symp, policy, **kwargs)


def ground_state_negativity_closed_form(symp: SymplecticSpectrum) -> float:
    return math.fsum(-math.log(d) for d in symp.d if d < 1)


def product_bound(spec, symp: SymplecticSpectrum) -> float:
    """``sum_k log g_{d_k}(N)``; mixtures use their top sector ``N``."""
    N = _as_spec(spec).N
    return math.fsum(math.log(trace_norm_bound(float(d), N)) for d in symp.d)


def product_bound_from_z(symp: SymplecticSpectrum, N: int) -> float:
    """``(2N+1)/2 * sum_{z > 1} log z`` over the eigenvalues of ``Z``."""
    z = np.linalg.eigvalsh(symp.Z)
    return 0.5 * (2 * N + 1) * math.fsum(math.log(v) for v in z if v > 1)


def h_bound(frame: SpectralFrame, region, N: int) -> float:
    """``(2N+1) |h^{1/2}| sum_{x in A, y not in A} |<x| h^{-1/2} |y>|``."""
    inside = _signs_for(frame, region) < 0
    if not inside.any() or inside.all():
        return 0.0
    block = np.abs(frame.power(-0.5)[np.ix_(inside, ~inside)])
    return (2 * N + 1) * float(np.max(frame.gamma)) * math.fsum(block.ravel())


# --- Peres-Horodecki witnesses ---------------------------------------------------


def peres_candidates(symp: SymplecticSpectrum, extra: int = 3, tol: float = 1e-12) -> list[tuple[int, ...]]:
    """Indices with ``n_k = 0`` where ``d_k >= 1`` and an even ``n_k`` above
    ``ceil(zeta^2 / (1 - zeta^2)) + 1`` where ``d_k < 1``; shifted by ``+2s``.

    Modes with ``|zeta| <= tol`` count as ``d_k = 1``: they carry no weight
    beyond ``n_k = 0``.
    """
    low = _low_modes(symp, tol)
    base = []
    for k, z in enumerate(symp.zeta):
        if k in low:
            n = math.ceil(z * z / (1 - z * z)) + 1
            base.append(n + (n % 2))
        else:
            base.append(0)
    return [tuple(n + 2 * s if k in low else n for k, n in enumerate(base)) for s in range(extra + 1)]


def _low_modes(symp: SymplecticSpectrum, tol: float = 1e-12) -> set[int]:
    return {k for k, z in enumerate(symp.zeta) if z < -tol}


def _near_candidates(symp: SymplecticSpectrum, N: int):
    """Candidates first, then single-mode shifts by up to ``N`` on modes with ``d < 1``."""
    cands = peres_candidates(symp)
    yield from cands
    low = sorted(_low_modes(symp))
    for shift in range(1, N + 1):
        for c in cands:
            for k in low:
                for t in (shift, -shift):
                    if c[k] + t >= 0:
                        yield c[:k] + (c[k] + t,) + c[k + 1:]


def _certified_negative(nvec, spec: EnsembleSpec, symp: SymplecticSpectrum, rel: float = 1e-12) -> bool:
    """``lambda(nvec) < 0`` with a margin relative to the sum of absolute terms."""
    coeffs = spec.coefficients(symp.size)
    tables = _tables(symp, spec.N, [max(n, 1) for n in nvec])
    lam = float(_block_values(tables, tuple(nvec), coeffs))
    scale = float(_block_values([np.abs(T) for T in tables], tuple(nvec), np.abs(coeffs)))
    return lam < -rel * scale


def peres_witness(spec, symp: SymplecticSpectrum, policy: TruncationPolicy | None = None):
    """A multi-index with a negative eigenvalue of the partial transpose, or ``None``.

    Candidate indices and their single-mode neighbours are tried first, then
    the whole truncation window.  A sign counts only when it exceeds the
    rounding scale of the terms at that index.
    """
    spec = _as_spec(spec)
    policy = policy or TruncationPolicy()
    for cand in _near_candidates(symp, spec.N):
        if _certified_negative(cand, spec, symp):
            return cand
    coeffs = spec.coefficients(symp.size)
    cuts = mode_cutoffs(symp, spec.N, policy)
    tables = _tables(symp, spec.N, cuts)
    abs_sum, _, lam_min, arg = _enumerate(tables, coeffs, track_min=True)
    if lam_min is not None and lam_min < -1e-14 * abs_sum:
        return arg
    return None


# --- energy ------------------------------------------------------------------------


def _gammas(frame_or_gamma) -> np.ndarray:
    if isinstance(frame_or_gamma, SpectralFrame):
        return frame_or_gamma.gamma
    return np.asarray(frame_or_gamma, dtype=float)


def ensemble_energy(frame_or_gamma, N: int) -> float:
    """``(1 + 2N/|Lambda|) * sum_k gamma_k``."""
    g = _gammas(frame_or_gamma)
    return (1.0 + 2.0 * N / g.size) * math.fsum(g)


def ensemble_energy_bruteforce(frame_or_gamma, N: int) -> float:
    """Sector average of ``sum_k gamma_k (2 alpha_k + 1)``."""
    g = _gammas(frame_or_gamma)
    vals = [math.fsum(gk * (2 * a + 1) for gk, a in zip(g, alpha)) for alpha in enumerate_sector(g.size, N)]
    return math.fsum(vals) / len(vals)
