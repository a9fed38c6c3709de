"""Picard lattice Z^{1,n}, line classes and the line graphs G_d.

A divisor class ``aH - sum(b_i E_i)`` is stored as the integer tuple
``(a, b_1, ..., b_n)``.  With this sign convention the exceptional curve
``E_i`` has coordinates ``(0, ..., -1, ...)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import isqrt

import numpy as np

from .permgrp import Permutation, PermutationGroup

__all__ = [
    "DivisorClass",
    "LineConfiguration",
    "anticanonical",
    "enumerate_lines",
    "simple_roots",
    "reflect",
    "weyl_group",
    "verify_pair_orbits",
    "PairOrbitReport",
]


def _check_degree(d: int) -> None:
    if not isinstance(d, (int, np.integer)) or not 1 <= d <= 7:
        raise ValueError(f"degree must be an integer in 1..7, got {d!r}")


@dataclass(frozen=True, order=True)
class DivisorClass:
    coords: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.coords) - 1

    def dot(self, other: "DivisorClass") -> int:
        x, y = self.coords, other.coords
        return x[0] * y[0] - sum(a * b for a, b in zip(x[1:], y[1:]))

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        return DivisorClass(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        return DivisorClass(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def scale(self, k: int) -> "DivisorClass":
        return DivisorClass(tuple(k * a for a in self.coords))

    def is_line(self) -> bool:
        return self.dot(self) == -1 and self.dot(anticanonical(self.n)) == 1

    def is_root(self) -> bool:
        return self.dot(self) == -2 and self.dot(anticanonical(self.n)) == 0

    def __str__(self) -> str:
        a, *b = self.coords
        return f"({a}; {', '.join(map(str, b))})"


def anticanonical(n: int) -> DivisorClass:
    return DivisorClass((3,) + (1,) * n)


def exceptional(n: int, i: int) -> DivisorClass:
    """The class E_i (1-based) in Z^{1,n}."""
    c = [0] * (n + 1)
    c[i] = -1
    return DivisorClass(tuple(c))


def hyperplane(n: int) -> DivisorClass:
    return DivisorClass((1,) + (0,) * n)


def simple_roots(n: int) -> list[DivisorClass]:
    """H-E1-E2-E3 (when n >= 3) followed by E_i - E_{i+1}."""
    roots = []
    if n >= 3:
        roots.append(hyperplane(n) - exceptional(n, 1) - exceptional(n, 2) - exceptional(n, 3))
    roots.extend(exceptional(n, i) - exceptional(n, i + 1) for i in range(1, n))
    return roots


def reflect(x: DivisorClass, r: DivisorClass) -> DivisorClass:
    """Reflection in a root: x + <x, r> r."""
    return x + r.scale(x.dot(r))


def _solutions(n: int, a: int) -> list[tuple[int, ...]]:
    # integer b with sum b = 3a - 1 and sum b^2 = a^2 + 1
    target_sum, target_sq = 3 * a - 1, a * a + 1
    bound = isqrt(target_sq)
    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int], s: int, q: int) -> None:
        k = n - len(prefix)
        if k == 0:
            if s == target_sum and q == target_sq:
                out.append(tuple(prefix))
            return
        rs, rq = target_sum - s, target_sq - q
        if rq < 0:
            return
        # Cauchy-Schwarz on the remaining k coordinates
        if rs * rs > k * rq:
            return
        for b in range(-bound, bound + 1):
            if b * b <= rq:
                prefix.append(b)
                rec(prefix, s + b, q + b * b)
                prefix.pop()

    rec([], 0, 0)
    return out


@dataclass(frozen=True)
class LineConfiguration:
    """The graph G_d: line classes plus the intersection matrix."""

    degree: int
    vertices: tuple[DivisorClass, ...]
    mult: np.ndarray

    @property
    def size(self) -> int:
        return len(self.vertices)

    def index(self, c: DivisorClass) -> int:
        return self._lookup()[c.coords]

    def _lookup(self) -> dict:
        cache = self.__dict__.get("_index_cache")
        if cache is None:
            cache = {v.coords: i for i, v in enumerate(self.vertices)}
            object.__setattr__(self, "_index_cache", cache)
        return cache

    def coordinates(self) -> np.ndarray:
        return np.array([v.coords for v in self.vertices], dtype=np.int64)

    def rank(self) -> int:
        return int(np.linalg.matrix_rank(self.mult.astype(float)))

    def max_multiplicity(self) -> int:
        off = self.mult[~np.eye(self.size, dtype=bool)]
        return int(off.max())

    def adjacent(self, i: int, j: int) -> bool:
        return i != j and self.mult[i, j] > 0

    def to_text(self) -> str:
        lines = [f"{self.degree} {self.size}"]
        lines += [" ".join(map(str, v.coords)) for v in self.vertices]
        lines += [" ".join(map(str, row)) for row in self.mult.tolist()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LineConfiguration":
        rows = [r.split() for r in text.strip().splitlines()]
        d, n = int(rows[0][0]), int(rows[0][1])
        verts = tuple(DivisorClass(tuple(int(x) for x in r)) for r in rows[1:1 + n])
        mult = np.array([[int(x) for x in r] for r in rows[1 + n:1 + 2 * n]], dtype=np.int64)
        if mult.shape != (n, n):
            raise ValueError("malformed adjacency file")
        return cls(d, verts, mult)


@lru_cache(maxsize=None)
def enumerate_lines(d: int) -> LineConfiguration:
    """All classes l with l.l = -1 and l.(-K) = 1 in Z^{1,9-d}, sorted lexicographically."""
    _check_degree(d)
    n = 9 - d
    found = []
    for a in range(0, 7):
        found.extend((a,) + b for b in _solutions(n, a))
    found.sort()
    verts = tuple(DivisorClass(c) for c in found)
    X = np.array(found, dtype=np.int64)
    J = np.diag([1] + [-1] * n)
    mult = X @ J @ X.T
    return LineConfiguration(d, verts, mult)


def reflection_permutation(conf: LineConfiguration, r: DivisorClass) -> Permutation:
    lookup = conf._lookup()
    images = []
    for v in conf.vertices:
        w = reflect(v, r)
        if w.coords not in lookup:
            raise RuntimeError(f"reflection in {r} does not preserve the line set")
        images.append(lookup[w.coords])
    return Permutation(images)


@lru_cache(maxsize=None)
def weyl_group(d: int) -> PermutationGroup:
    """W(E_{9-d}) acting on the vertices of G_d, generated by simple reflections."""
    conf = enumerate_lines(d)
    n = 9 - d
    gens = [reflection_permutation(conf, r) for r in simple_roots(n)]
    base_hint = [conf.index(exceptional(n, i)) for i in range(1, n + 1)]
    return PermutationGroup(gens, degree=conf.size, base_hint=base_hint)


@dataclass(frozen=True)
class PairOrbitReport:
    degree: int
    sizes: tuple[int, ...]
    orbit_multiplicities: tuple[tuple[int, ...], ...]
    rank: int
    alternative_ranks: tuple[int, ...]

    @property
    def small_orbit_is_double_edges(self) -> bool:
        smallest = min(range(len(self.sizes)), key=lambda i: self.sizes[i])
        return self.orbit_multiplicities[smallest] == (2,)


def verify_pair_orbits(d: int = 2) -> PairOrbitReport:
    """Orbits of the Weyl group on unordered pairs of distinct lines.

    ``orbit_multiplicities[k]`` lists the distinct intersection numbers seen
    on orbit ``k``.  ``alternative_ranks`` holds the ranks of the intersection
    matrices obtained by declaring some other single orbit to be "adjacent"
    (with the multiplicity-2 orbit kept), as in the rank disambiguation.
    """
    conf = enumerate_lines(d)
    G = weyl_group(d)
    N = conf.size
    pairs = list(combinations(range(N), 2))
    orbits = G.orbits_on_sets(pairs)
    sizes = tuple(len(o) for o in orbits)
    mults = tuple(tuple(sorted({int(conf.mult[i, j]) for i, j in o})) for o in orbits)

    alt = []
    double = [k for k, m in enumerate(mults) if m == (2,)]
    others = [k for k in range(len(orbits)) if k not in double]
    for adj in others:
        M = -np.eye(N, dtype=np.int64)
        for k in double:
            for i, j in orbits[k]:
                M[i, j] = M[j, i] = 2
        for i, j in orbits[adj]:
            M[i, j] = M[j, i] = 1
        alt.append(int(np.linalg.matrix_rank(M.astype(float))))
    order = sorted(range(len(orbits)), key=lambda k: (sizes[k], mults[k]))
    return PairOrbitReport(
        degree=d,
        sizes=tuple(sizes[k] for k in order),
        orbit_multiplicities=tuple(mults[k] for k in order),
        rank=conf.rank(),
        alternative_ranks=tuple(sorted(alt)),
    )
