"""
Laguerre polynomials and occupation-number combinatorics.

The sector ``J_N`` of a system with ``size`` modes is the set of occupation
vectors with non-negative entries summing to ``N``.  Enumeration order is a
odometer with the first coordinate running from ``N`` down to ``0`` and the
last coordinate varying fastest.
"""

from __future__ import annotations

import math
from typing import Iterator, Sequence

import numpy as np

from .errors import CountOverflowError, DivergenceError

__all__ = [
    "binomial",
    "sector_size",
    "laguerre",
    "laguerre_sum",
    "generalized_laguerre",
    "generalized_laguerre_sum",
    "enumerate_sector",
    "sector_array",
    "sector_first_coordinate_sum",
    "laguerre_product_sum",
    "erdelyi_lhs",
    "erdelyi_rhs",
]

_INT128_MAX = 2**127 - 1
_INT64_MAX = 2**63 - 1


def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient, refusing results beyond 128-bit range."""
    if k < 0 or n < 0 or k > n:
        return 0
    value = math.comb(n, k)
    if value > _INT128_MAX:
        raise CountOverflowError(f"binomial({n}, {k}) exceeds 128-bit range")
    return value


def sector_size(size: int, N: int) -> int:
    """``|J_N| = binom(N + size - 1, N)``."""
    value = binomial(N + size - 1, N)
    if value > _INT64_MAX:
        raise CountOverflowError(f"sector ({size}, {N}) has more than 2**63 - 1 elements")
    return value


def laguerre(k: int, x):
    """Laguerre polynomial ``L_k(x)`` by the three-term recurrence."""
    if k < 0:
        raise ValueError("degree must be non-negative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if k == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 - x
    for n in range(1, k):
        prev, cur = cur, ((2 * n + 1 - x) * cur - n * prev) / (n + 1)
    return cur if cur.ndim else float(cur)


def laguerre_sum(k: int, x: float) -> float:
    """Defining sum of ``L_k``; reference path for the recurrence."""
    return math.fsum((-1) ** n * math.comb(k, n) * x**n / math.factorial(n) for n in range(k + 1))


def generalized_laguerre(N: int, m: int, x):
    """Generalized Laguerre polynomial ``L_N^{(m)}(x)`` for integer ``m >= 0``."""
    if N < 0 or m < 0:
        raise ValueError("degree and order must be non-negative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if N == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + m - x
    for n in range(1, N):
        prev, cur = cur, ((2 * n + 1 + m - x) * cur - (n + m) * prev) / (n + 1)
    return cur if cur.ndim else float(cur)


def generalized_laguerre_sum(N: int, m: int, x: float) -> float:
    return math.fsum(
        (-1) ** j * binomial(N + m, N - j) * x**j / math.factorial(j) for j in range(N + 1)
    )


def enumerate_sector(size: int, N: int, first: int | None = None) -> Iterator[tuple[int, ...]]:
    """Yield every composition of ``N`` into ``size`` non-negative parts once.

    ``first`` restricts the enumeration to vectors with that leading entry,
    which partitions the sector into independent blocks.
    """
    if size < 1 or N < 0:
        raise ValueError("need size >= 1 and N >= 0")
    sector_size(size, N)
    heads = range(N, -1, -1) if first is None else ([first] if 0 <= first <= N else [])
    if size == 1:
        for h in heads:
            if h == N:
                yield (N,)
        return
    for h in heads:
        for tail in enumerate_sector(size - 1, N - h):
            yield (h,) + tail


def sector_array(size: int, N: int) -> np.ndarray:
    """The sector as an integer array of shape ``(|J_N|, size)``."""
    count = sector_size(size, N)
    out = np.fromiter(
        (v for alpha in enumerate_sector(size, N) for v in alpha), dtype=np.int64, count=count * size
    )
    return out.reshape(count, size)


def sector_first_coordinate_sum(size: int, N: int) -> int:
    """Closed form of the sum of ``alpha_1`` over the sector: ``binom(N + size - 1, size)``."""
    if size < 1 or N < 0:
        raise ValueError("need size >= 1 and N >= 0")
    value = binomial(N + size - 1, size)
    if value > _INT64_MAX:
        raise CountOverflowError("first-coordinate sum exceeds 64-bit range")
    return value


def laguerre_product_sum(xs: Sequence[float], N: int) -> float:
    """Sum over the sector of ``prod_k L_{alpha_k}(x_k)`` by explicit enumeration."""
    xs = [float(x) for x in xs]
    if not xs:
        raise ValueError("xs must be nonempty")
    table = [[laguerre(n, x) for n in range(N + 1)] for x in xs]
    terms = (math.prod(table[k][a] for k, a in enumerate(alpha)) for alpha in enumerate_sector(len(xs), N))
    return math.fsum(terms)


def erdelyi_lhs(zeta: float, x: float, k: int, terms: int) -> float:
    """Partial sum ``sum_{n=k}^{k+terms-1} binom(n, k) zeta^(n-k) L_n(x)``."""
    if not abs(zeta) < 1:
        raise DivergenceError(f"series diverges for |zeta| = {abs(zeta)}")
    acc = []
    prev, cur = 0.0, 1.0  # cur holds L_n
    for n in range(k + terms):
        if n >= k:
            acc.append(math.comb(n, k) * zeta ** (n - k) * cur)
        prev, cur = cur, ((2 * n + 1 - x) * cur - n * prev) / (n + 1)
    return math.fsum(acc)


def erdelyi_rhs(zeta: float, x: float, k: int) -> float:
    """Closed form of the multiplication theorem for ``|zeta| < 1``."""
    if not abs(zeta) < 1:
        raise DivergenceError(f"series diverges for |zeta| = {abs(zeta)}")
    return math.exp(-zeta * x / (1 - zeta)) / (1 - zeta) ** (k + 1) * laguerre(k, x / (1 - zeta))
