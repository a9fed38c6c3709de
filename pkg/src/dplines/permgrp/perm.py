"""Permutations and permutation groups with a base and strong generating set.

Composition follows function composition: ``(g * h)(x) == g(h(x))``.
"""

from __future__ import annotations

from collections import Counter
from math import gcd
from typing import Iterable, Sequence

import numpy as np

__all__ = ["Permutation", "PermutationGroup"]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


class Permutation:
    """A bijection of {0, ..., N-1} given by its image vector."""

    __slots__ = ("images", "_hash")

    def __init__(self, images: Iterable[int], check: bool = True):
        t = tuple(int(x) for x in images)
        if check and sorted(t) != list(range(len(t))):
            raise ValueError("images do not form a permutation")
        self.images = t
        self._hash = hash(t)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(n), check=False)

    @classmethod
    def from_cycles(cls, n: int, *cycles: Sequence[int]) -> "Permutation":
        img = list(range(n))
        seen: set[int] = set()
        for cyc in cycles:
            if seen.intersection(cyc) or len(set(cyc)) != len(cyc):
                raise ValueError("cycles must be disjoint")
            seen.update(cyc)
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                img[a] = b
        return cls(img)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        s = self.images
        return Permutation((s[i] for i in other.images), check=False)

    def __pow__(self, k: int) -> "Permutation":
        if k < 0:
            return self.inverse() ** (-k)
        result = Permutation.identity(self.degree)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(inv, check=False)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Permutation") -> bool:
        return self.images < other.images

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        seen = [False] * self.degree
        out = []
        for i in range(self.degree):
            if seen[i]:
                continue
            cyc = [i]
            seen[i] = True
            j = self.images[i]
            while j != i:
                cyc.append(j)
                seen[j] = True
                j = self.images[j]
            out.append(tuple(cyc))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted(len(c) for c in self.cycles()))

    def order(self) -> int:
        o = 1
        for c in self.cycles():
            o = _lcm(o, len(c))
        return o

    def fixed_points(self) -> frozenset[int]:
        return frozenset(i for i, j in enumerate(self.images) if i == j)

    def __repr__(self) -> str:
        cyc = [c for c in self.cycles() if len(c) > 1]
        if not cyc:
            return f"Permutation.identity({self.degree})"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc)


class _Level:
    __slots__ = ("point", "gens", "transversal")

    def __init__(self, point: int):
        self.point = point
        self.gens: list[np.ndarray] = []
        self.transversal: dict[int, np.ndarray] = {}


class PermutationGroup:
    """A permutation group on {0, ..., N-1} given by generators.

    The stabilizer chain is built lazily with the deterministic Schreier-Sims
    algorithm; ``base_hint`` supplies preferred base points.
    """

    def __init__(self, generators: Iterable[Permutation], degree: int | None = None,
                 base_hint: Sequence[int] = ()):
        gens = list(generators)
        if degree is None:
            if not gens:
                raise ValueError("degree required for a group without generators")
            degree = gens[0].degree
        for g in gens:
            if not isinstance(g, Permutation):
                raise TypeError("generators must be Permutation instances")
            if g.degree != degree:
                raise ValueError("generators act on different degrees")
        self.degree = degree
        self.generators: tuple[Permutation, ...] = tuple(gens)
        self._base_hint = tuple(base_hint)
        self._levels: list[_Level] | None = None

    # -- stabilizer chain ---------------------------------------------------

    def _arrays(self) -> list[np.ndarray]:
        return [np.array(g.images, dtype=np.int64) for g in self.generators
                if not g.is_identity()]

    def _chain(self) -> list[_Level]:
        if self._levels is None:
            self._levels = _schreier_sims(self._arrays(), self.degree, self._base_hint)
        return self._levels

    @property
    def base(self) -> tuple[int, ...]:
        return tuple(lv.point for lv in self._chain())

    def basic_orbit_lengths(self) -> tuple[int, ...]:
        return tuple(len(lv.transversal) for lv in self._chain())

    def strong_generators(self) -> list[Permutation]:
        seen, out = set(), []
        for lv in self._chain():
            for g in lv.gens:
                key = g.tobytes()
                if key not in seen:
                    seen.add(key)
                    out.append(Permutation(g, check=False))
        return out

    def order(self) -> int:
        o = 1
        for lv in self._chain():
            o *= len(lv.transversal)
        return o

    def __len__(self) -> int:
        return self.order()

    def contains(self, g: Permutation) -> bool:
        if g.degree != self.degree:
            return False
        h, j = _strip(np.array(g.images, dtype=np.int64), self._chain(), 0)
        return j == len(self._chain()) and _is_identity(h)

    __contains__ = contains

    def transversal_arrays(self) -> list[tuple[int, list[np.ndarray]]]:
        """(base point, transversal elements) per level, in a fixed order."""
        return [(lv.point, [lv.transversal[p] for p in sorted(lv.transversal)])
                for lv in self._chain()]

    def elements(self) -> list[Permutation]:
        """All elements, as products of transversal elements (small groups only)."""
        elems = [np.arange(self.degree)]
        for _, trans in reversed(self.transversal_arrays()):
            elems = [u[e] for u in trans for e in elems]
        return sorted(Permutation(e, check=False) for e in elems)

    def random_element(self, rng: np.random.Generator) -> Permutation:
        g = np.arange(self.degree)
        for _, trans in self.transversal_arrays():
            g = g[trans[rng.integers(len(trans))]]
        return Permutation(g, check=False)

    # -- orbits ---------------------------------------------------------------

    def orbits(self) -> list[tuple[int, ...]]:
        parent = list(range(self.degree))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in self.generators:
            for i, j in enumerate(g.images):
                a, b = find(i), find(j)
                if a != b:
                    parent[max(a, b)] = min(a, b)
        groups: dict[int, list[int]] = {}
        for i in range(self.degree):
            groups.setdefault(find(i), []).append(i)
        return [tuple(v) for v in groups.values()]

    def orbit(self, point: int) -> tuple[int, ...]:
        for o in self.orbits():
            if point in o:
                return o
        raise ValueError("point out of range")

    def orbit_type(self) -> tuple[int, ...]:
        return tuple(sorted(len(o) for o in self.orbits()))

    def orbits_on_sets(self, sets: Sequence[Sequence[int]]) -> list[list[tuple[int, ...]]]:
        """Orbits on a G-invariant family of subsets, each given as a tuple of points."""
        keys = [tuple(sorted(s)) for s in sets]
        index = {k: i for i, k in enumerate(keys)}
        parent = list(range(len(keys)))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in self.generators:
            im = g.images
            for i, k in enumerate(keys):
                j = index[tuple(sorted(im[x] for x in k))]
                a, b = find(i), find(j)
                if a != b:
                    parent[max(a, b)] = min(a, b)
        groups: dict[int, list[tuple[int, ...]]] = {}
        for i, k in enumerate(keys):
            groups.setdefault(find(i), []).append(k)
        return list(groups.values())

    def is_transitive(self) -> bool:
        return len(self.orbits()) == 1

    def fixed_points(self) -> frozenset[int]:
        return frozenset(o[0] for o in self.orbits() if len(o) == 1)

    # -- structure ------------------------------------------------------------

    def is_cyclic(self) -> bool:
        n = self.order()
        if n == 1:
            return True
        if n > 200_000:
            # large groups here are never cyclic; guard anyway via exponent bound
            return False
        return any(g.order() == n for g in self.elements())

    def subgroup(self, gens: Iterable[Permutation]) -> "PermutationGroup":
        return PermutationGroup(gens, degree=self.degree, base_hint=self.base)

    def derived_subgroup(self) -> "PermutationGroup":
        """Normal closure of the commutators of the generators."""
        gens = self.generators
        comms = []
        for i, a in enumerate(gens):
            for b in gens[i + 1:]:
                c = a.inverse() * b.inverse() * a * b
                if not c.is_identity():
                    comms.append(c)
        return self.normal_closure(comms)

    def normal_closure(self, elements: Iterable[Permutation]) -> "PermutationGroup":
        N = PermutationGroup(list(elements), degree=self.degree, base_hint=self.base)
        queue = list(N.generators)
        while queue:
            x = queue.pop()
            for g in self.generators:
                y = g * x * g.inverse()
                if not N.contains(y):
                    N = PermutationGroup(list(N.generators) + [y], degree=self.degree,
                                         base_hint=self.base)
                    queue.append(y)
        return N

    def is_solvable(self) -> bool:
        H = self
        while H.order() > 1:
            D = H.derived_subgroup()
            if D.order() == H.order():
                return False
            H = D
        return True

    def cycle_type_counts(self) -> Counter:
        return Counter(g.cycle_type() for g in self.elements())

    def __repr__(self) -> str:
        return f"PermutationGroup(degree={self.degree}, ngens={len(self.generators)})"


def _is_identity(a: np.ndarray) -> bool:
    return bool(np.all(a == np.arange(len(a))))


def _inverse(a: np.ndarray) -> np.ndarray:
    inv = np.empty_like(a)
    inv[a] = np.arange(len(a))
    return inv


def _strip(g: np.ndarray, levels: list[_Level], start: int) -> tuple[np.ndarray, int]:
    for i in range(start, len(levels)):
        lv = levels[i]
        beta = int(g[lv.point])
        u = lv.transversal.get(beta)
        if u is None:
            return g, i
        # u(b) = beta, so u^{-1} g fixes b
        g = _inverse(u)[g]
    return g, len(levels)


def _orbit_transversal(point: int, gens: list[np.ndarray], n: int) -> dict[int, np.ndarray]:
    trans = {point: np.arange(n)}
    queue = [point]
    while queue:
        nxt = []
        for b in queue:
            u = trans[b]
            for s in gens:
                c = int(s[b])
                if c not in trans:
                    trans[c] = s[u]
                    nxt.append(c)
        queue = nxt
    return trans


def _moved_point(g: np.ndarray, hint: Sequence[int]) -> int:
    for p in hint:
        if g[p] != p:
            return int(p)
    return int(np.nonzero(g != np.arange(len(g)))[0][0])


def _schreier_sims(gens: list[np.ndarray], n: int, hint: Sequence[int]) -> list[_Level]:
    levels: list[_Level] = []
    base: list[int] = []
    for g in gens:
        if all(g[b] == b for b in base):
            p = _moved_point(g, hint)
            base.append(p)
            levels.append(_Level(p))
    for i, lv in enumerate(levels):
        lv.gens = [g for g in gens if all(g[b] == b for b in base[:i])]
        lv.transversal = _orbit_transversal(lv.point, lv.gens, n)

    i = len(levels) - 1
    while i >= 0:
        lv = levels[i]
        added = False
        for beta in list(lv.transversal):
            u_beta = lv.transversal[beta]
            for s in lv.gens:
                gamma = int(s[beta])
                h = _inverse(lv.transversal[gamma])[s[u_beta]]
                y, j = _strip(h, levels, i + 1)
                if j < len(levels) or not _is_identity(y):
                    if j == len(levels):
                        p = _moved_point(y, hint)
                        levels.append(_Level(p))
                    for l in range(i + 1, j + 1):
                        levels[l].gens.append(y)
                        levels[l].transversal = _orbit_transversal(levels[l].point,
                                                                   levels[l].gens, n)
                    i = j
                    added = True
                    break
            if added:
                break
        if not added:
            i -= 1
    return levels
