"""
Scaled single-mode operators ``rho_a^(l)``.

``rho_a^(l)`` is diagonal in the number basis.  Its characteristic function
is that of the Fock state ``|l><l|`` evaluated at ``sqrt(a) z``:

    chi(z) = L_l(a |z|^2 / 2) exp(-a |z|^2 / 4).

With ``zeta = (a - 1) / (a + 1)`` the eigenvalues are

    lambda_n = sum_j sigma_{j,l}(zeta) * omega_{n,j,l}(zeta)

which may be negative for ``l >= 1``.  They always sum to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientTruncationError
from .special import laguerre

__all__ = [
    "ScaledModeOperator",
    "TruncationPolicy",
    "sigma",
    "omega",
    "eigenvalue",
    "eigenvalues",
    "eigenvalue_table",
    "tail_bound",
    "tail_table",
    "trace_norm_bound",
    "truncated_trace_norm",
    "char_function",
    "char_function_from_spectrum",
]


@dataclass(frozen=True)
class ScaledModeOperator:
    a: float
    ell: int

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"scale a must be positive, got {self.a}")
        if self.ell < 0:
            raise ValueError("ell must be non-negative")

    @property
    def zeta(self) -> float:
        return (self.a - 1.0) / (self.a + 1.0)


@dataclass(frozen=True)
class TruncationPolicy:
    """Per-mode Fock cutoff and admissible total tail mass."""

    n_max: int = 40
    tail_eps: float = 1e-10
    adaptive: bool = True

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be positive")
        if not self.tail_eps > 0:
            raise ValueError("tail_eps must be positive")


def sigma(j: int, ell: int, x: float) -> float:
    if not 0 <= j <= ell:
        raise IndexError(f"j={j} outside 0..{ell}")
    return math.comb(ell, j) * (-x) ** j * (1.0 + x) ** (ell - j)


def omega(n, j: int, ell: int, x: float):
    """``binom(n, m) x^(n-m) (1-x)^(m+1)`` with ``m = ell - j``, zero for ``n < m``.

    ``n`` may be an integer array.
    """
    m = ell - j
    n_arr = np.atleast_1d(np.asarray(n, dtype=np.int64))
    out = np.zeros(n_arr.shape)
    ok = n_arr >= m
    if np.any(ok):
        nn = n_arr[ok]
        binoms = np.array([float(math.comb(int(v), m)) for v in nn])
        out[ok] = binoms * np.power(x, (nn - m).astype(float)) * (1.0 - x) ** (m + 1)
    return out if np.ndim(n) else float(out[0])


def eigenvalues(op: ScaledModeOperator, n_max: int) -> np.ndarray:
    """``lambda_0 .. lambda_{n_max}``, each a compensated sum over ``j``."""
    n = np.arange(n_max + 1)
    z = op.zeta
    parts = np.array([sigma(j, op.ell, z) * omega(n, j, op.ell, z) for j in range(op.ell + 1)])
    return np.array([math.fsum(col) for col in parts.T])


def eigenvalue(op: ScaledModeOperator, n: int) -> float:
    z = op.zeta
    return math.fsum(sigma(j, op.ell, z) * omega(n, j, op.ell, z) for j in range(op.ell + 1))


def eigenvalue_table(a: float, L: int, n_max: int) -> np.ndarray:
    """``T[m, n]`` = ``n``-th eigenvalue of ``rho_a^(m)`` for ``m <= L``."""
    return np.vstack([eigenvalues(ScaledModeOperator(a, m), n_max) for m in range(L + 1)])


def tail_bound(op: ScaledModeOperator, n_max: int) -> float:
    """Certified upper bound on ``sum_{n > n_max} |lambda_n|``.

    Each ``j``-term is dominated by ``|sigma_j| (1 - zeta)^(m+1) t_n`` with
    ``t_n = binom(n, m) |zeta|^(n-m)``.  For ``n >= n_max`` the ratio
    ``t_{n+1}/t_n`` is at most ``r = (n_max+1)/(n_max+1-m) |zeta|``; when
    ``r < 1`` the tail is at most ``t_{n_max} r / (1 - r)``.
    """
    z = op.zeta
    az = abs(z)
    if az == 0.0:
        return 0.0 if n_max >= op.ell else math.inf
    total = []
    for j in range(op.ell + 1):
        m = op.ell - j
        s = abs(sigma(j, op.ell, z))
        if s == 0.0:
            continue
        if n_max < m:
            return math.inf
        r = (n_max + 1) / (n_max + 1 - m) * az
        if r >= 1.0:
            return math.inf
        t_last = math.comb(n_max, m) * az ** (n_max - m)
        total.append(s * (1.0 - z) ** (m + 1) * t_last * r / (1.0 - r))
    return math.fsum(total)


def tail_table(a: float, L: int, n_max: int) -> np.ndarray:
    return np.array([tail_bound(ScaledModeOperator(a, m), n_max) for m in range(L + 1)])


def trace_norm_bound(a: float, ell: int) -> float:
    """``a^l`` for ``a >= 1``, ``(1/a)^(l+1)`` otherwise."""
    if not a > 0:
        raise ValueError("a must be positive")
    return a**ell if a >= 1 else (1.0 / a) ** (ell + 1)


def truncated_trace_norm(op: ScaledModeOperator, policy: TruncationPolicy) -> tuple[float, float]:
    """``(sum_{n <= n_max} |lambda_n|, certified tail bound)``."""
    if policy.n_max < op.ell:
        raise ValueError("n_max must be at least ell")
    lam = eigenvalues(op, policy.n_max)
    tail = tail_bound(op, policy.n_max)
    if tail > policy.tail_eps:
        raise InsufficientTruncationError(
            f"tail bound {tail:.3e} exceeds {policy.tail_eps:.1e} at n_max={policy.n_max}", tail
        )
    return math.fsum(np.abs(lam)), tail


def char_function(op: ScaledModeOperator, z: complex) -> float:
    r2 = abs(z) ** 2
    return float(laguerre(op.ell, op.a * r2 / 2)) * math.exp(-op.a * r2 / 4)


def char_function_from_spectrum(op: ScaledModeOperator, z: complex, n_max: int) -> float:
    """``sum_n lambda_n <n|W_z|n>`` with the Fock-state values ``L_n(|z|^2/2) e^{-|z|^2/4}``."""
    r2 = abs(z) ** 2
    lam = eigenvalues(op, n_max)
    lag = np.empty(n_max + 1)
    prev, cur = 0.0, 1.0
    x = r2 / 2
    for n in range(n_max + 1):
        lag[n] = cur
        prev, cur = cur, ((2 * n + 1 - x) * cur - n * prev) / (n + 1)
    return math.fsum(lam * lag) * math.exp(-r2 / 4)
