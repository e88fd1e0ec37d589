"""
Lattice geometry and disorder for harmonic oscillator systems.

A box ``Lambda = Z^d ∩ [lo, hi]^d`` carries the l1 metric.  Sites are stored in
lexicographic order of their coordinates; this ordering is part of the stable
API because every matrix downstream is indexed by it.

The one-particle operator is the Anderson-type matrix

    h = coupling * h0 + diag(k)

with ``h0`` the free-boundary graph Laplacian of the nearest neighbour graph.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import GeometryError, RegionError

__all__ = [
    "LatticeBox",
    "Region",
    "DisorderSpec",
    "build_box",
    "boundary",
    "build_laplacian",
    "sample_springs",
    "realization_rng",
    "anderson_matrix",
    "parse_region",
]


@dataclass(frozen=True)
class LatticeBox:
    d: int
    lo: int
    hi: int
    sites: tuple[tuple[int, ...], ...] = field(repr=False)
    index: dict = field(repr=False, compare=False, hash=False)

    @property
    def volume(self) -> int:
        return len(self.sites)

    @property
    def side(self) -> int:
        return self.hi - self.lo + 1

    def coords(self) -> np.ndarray:
        """Integer coordinates as an array of shape ``(volume, d)``."""
        return np.asarray(self.sites, dtype=np.int64).reshape(self.volume, self.d)

    def distance(self, i: int, j: int) -> int:
        return sum(abs(a - b) for a, b in zip(self.sites[i], self.sites[j]))

    def distance_matrix(self) -> np.ndarray:
        c = self.coords()
        return np.abs(c[:, None, :] - c[None, :, :]).sum(axis=-1)

    def edges(self) -> list[tuple[int, int]]:
        """Undirected nearest-neighbour edges ``(i, j)`` with ``i < j``."""
        out = []
        for i, x in enumerate(self.sites):
            for axis in range(self.d):
                y = list(x)
                y[axis] += 1
                j = self.index.get(tuple(y))
                if j is not None:
                    out.append((i, j))
        return out


@dataclass(frozen=True)
class Region:
    """A subregion Lambda_0 of a box, stored as a set of site indices."""

    members: frozenset[int]
    volume: int

    def __post_init__(self):
        bad = [m for m in self.members if not 0 <= m < self.volume]
        if bad:
            raise RegionError(f"region indices {sorted(bad)} outside 0..{self.volume - 1}")

    @classmethod
    def of(cls, members: Iterable[int], volume: int) -> "Region":
        return cls(frozenset(int(m) for m in members), int(volume))

    def complement(self) -> frozenset[int]:
        return frozenset(range(self.volume)) - self.members

    def mask(self) -> np.ndarray:
        m = np.zeros(self.volume, dtype=bool)
        m[list(self.members)] = True
        return m

    def signs(self) -> np.ndarray:
        """Diagonal of the sign matrix: -1 on the region, +1 elsewhere."""
        return np.where(self.mask(), -1.0, 1.0)

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class DisorderSpec:
    """I.i.d. spring constants, uniform on ``[0, k_max]`` by default.

    ``springs`` switches to deterministic mode: the given vector is used as is.
    """

    coupling: float
    k_max: float
    seed: int = 0
    distribution: str = "uniform"
    springs: tuple[float, ...] | None = None

    def __post_init__(self):
        if not self.coupling >= 0:
            raise ValueError("coupling must be non-negative")
        if not self.k_max > 0:
            raise ValueError("k_max must be positive")
        if self.distribution != "uniform":
            raise ValueError(f"unsupported distribution {self.distribution!r}")


def build_box(d: int, lo: int, hi: int) -> LatticeBox:
    if d < 1:
        raise GeometryError(f"dimension must be >= 1, got {d}")
    if not lo < hi:
        raise GeometryError(f"empty or degenerate box: lo={lo}, hi={hi}")
    sites = tuple(itertools.product(range(lo, hi + 1), repeat=d))
    return LatticeBox(d, lo, hi, sites, {s: i for i, s in enumerate(sites)})


def _as_region(box: LatticeBox, region) -> Region:
    if isinstance(region, Region):
        if region.volume != box.volume:
            raise RegionError("region was built for a different box")
        return region
    return Region.of(region, box.volume)


def boundary(box: LatticeBox, region) -> frozenset[int]:
    """Sites of the region with at least one nearest neighbour outside it."""
    region = _as_region(box, region)
    inside = region.members
    out = set()
    for i, j in box.edges():
        if (i in inside) != (j in inside):
            out.add(i if i in inside else j)
    return frozenset(out)


def build_laplacian(box: LatticeBox) -> np.ndarray:
    n = box.volume
    h0 = np.zeros((n, n))
    for i, j in box.edges():
        h0[i, i] += 1.0
        h0[j, j] += 1.0
        h0[i, j] -= 1.0
        h0[j, i] -= 1.0
    return h0


def realization_rng(seed: int, realization: int = 0) -> np.random.Generator:
    """Counter-based stream for ``(seed, realization)``; independent of scheduling."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(realization)])))


def sample_springs(spec: DisorderSpec, box: LatticeBox, realization: int = 0) -> np.ndarray:
    if spec.springs is not None:
        k = np.asarray(spec.springs, dtype=float)
        if k.shape != (box.volume,):
            raise ValueError(f"expected {box.volume} springs, got {k.shape}")
        return k.copy()
    rng = realization_rng(spec.seed, realization)
    return rng.uniform(0.0, spec.k_max, size=box.volume)


def anderson_matrix(box: LatticeBox, coupling: float, springs: Sequence[float]) -> np.ndarray:
    return coupling * build_laplacian(box) + np.diag(np.asarray(springs, dtype=float))


_BOX_RE = re.compile(r"^box:\((-?\d+)\.\.(-?\d+)\)\^(\d+)$")


def parse_region(spec, box: LatticeBox) -> Region:
    """Region from a config value.

    Accepted forms: ``"left-half"`` (first coordinate in the lower half),
    ``"empty"``, ``"all"``, ``"box:(lo..hi)^d"`` and an explicit index list.
    """
    if isinstance(spec, (list, tuple)):
        return Region.of(spec, box.volume)
    if not isinstance(spec, str):
        raise RegionError(f"cannot interpret region {spec!r}")
    s = spec.replace(" ", "")
    if s == "left-half":
        cut = box.lo + box.side // 2
        return Region.of((i for i, x in enumerate(box.sites) if x[0] < cut), box.volume)
    if s == "empty":
        return Region.of((), box.volume)
    if s == "all":
        return Region.of(range(box.volume), box.volume)
    m = _BOX_RE.match(s)
    if m:
        lo, hi, d = (int(g) for g in m.groups())
        if d != box.d:
            raise RegionError(f"region dimension {d} does not match box dimension {box.d}")
        if lo > hi or lo < box.lo or hi > box.hi:
            raise RegionError(f"sub-box ({lo}..{hi}) not inside ({box.lo}..{box.hi})")
        members = (box.index[x] for x in itertools.product(range(lo, hi + 1), repeat=d))
        return Region.of(members, box.volume)
    raise RegionError(f"unrecognised region spec {spec!r}")
