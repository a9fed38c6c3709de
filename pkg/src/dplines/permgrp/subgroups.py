"""Conjugacy classes of subgroups.

Every subgroup K has a chain P = K_0 < K_1 < ... < K_r = K where P is the
perfect residual of K and each K_i is normal of prime index in K_{i+1}.  So
all classes are reached by starting from the perfect subgroups and
repeatedly adjoining an element g of the normalizer with g^p in the current
subgroup.  Perfect subgroups are found as closures of pairs of elements.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .perm import Permutation, PermutationGroup
from .table import ElementTable, TierExceeded, components

__all__ = [
    "TIER_A",
    "TIER_B",
    "SubgroupClass",
    "SubgroupClassList",
    "element_table",
    "subgroup_classes",
    "perfect_subgroups",
    "conjugacy_classes",
    "is_conjugate_subgroup",
]

log = logging.getLogger(__name__)

TIER_A = 100_000
TIER_B = 3_000_000



def _primitive_root(p: int) -> int:
    for k in range(1, p):
        if len({pow(k, i, p) for i in range(1, p)}) == p - 1:
            return k
    return 1

_tables: dict[tuple, ElementTable] = {}


def element_table(G: PermutationGroup, tier: str = "a") -> ElementTable:
    """Cached element table for ``G``; raises TierExceeded beyond the tier bound."""
    bound = {"a": TIER_A, "b": TIER_B}[tier.lower()]
    key = (G.degree, tuple(g.images for g in G.generators))
    T = _tables.get(key)
    if T is None:
        if G.order() > bound:
            raise TierExceeded(f"|G| = {G.order()} exceeds tier {tier.upper()} bound {bound}")
        T = ElementTable(G, bound)
        _tables[key] = T
    return T


@dataclass
class SubgroupClass:
    """One conjugacy class of subgroups.

    ``generators`` are element indices into the ambient element table.  The
    remaining fields are recorded while the elements are at hand:
    ``min_fixed`` is the least number of points fixed by an element,
    ``max_element_order`` the largest element order, ``residual_order`` the
    order of the perfect residual (1 exactly for solvable subgroups) and
    ``orbits`` the orbits on points.
    """

    order: int
    class_size: int
    generators: list[int]
    min_fixed: int = 0
    max_element_order: int = 1
    residual_order: int = 1
    orbits: tuple[tuple[int, ...], ...] = ()
    invariant: tuple = field(repr=False, default=())

    @property
    def orbit_type(self) -> tuple[int, ...]:
        return tuple(sorted(len(o) for o in self.orbits))

    @property
    def solvable(self) -> bool:
        return self.residual_order == 1


@dataclass
class SubgroupClassList:
    """Representatives of the conjugacy classes of subgroups of ``ambient``."""

    ambient: PermutationGroup
    table: ElementTable = field(repr=False)
    classes: list[SubgroupClass]

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self) -> Iterator[SubgroupClass]:
        return iter(self.classes)

    def group(self, i: int) -> PermutationGroup:
        return self.table.as_group(self.classes[i].generators)

    def elements(self, i: int) -> np.ndarray:
        return self.table.closure(self.classes[i].generators)

    def total_subgroups(self) -> int:
        return sum(c.class_size for c in self.classes)

    def to_json(self) -> str:
        T = self.table
        doc = {
            "ambient": {
                "degree": self.ambient.degree,
                "order": self.ambient.order(),
                "generators": [list(g.images) for g in self.ambient.generators],
            },
            "classes": [
                {
                    "order": c.order,
                    "class_size": c.class_size,
                    "generators": [T.E[g].tolist() for g in c.generators],
                }
                for c in self.classes
            ],
        }
        return json.dumps(doc, separators=(",", ":"))

    @staticmethod
    def load_generators(text: str) -> list[tuple[int, int, list[Permutation]]]:
        doc = json.loads(text)
        return [(c["order"], c["class_size"], [Permutation(g) for g in c["generators"]])
                for c in doc["classes"]]


def _invariant(T: ElementTable, elems: np.ndarray, gens) -> tuple:
    hist = T.class_histogram(elems)
    orbits = sorted(len(o) for o in T.point_orbits(gens))
    return (len(elems), hist.tobytes(), tuple(orbits))


class _Bucket:
    """Pairwise non-conjugate subgroups of one order."""

    def __init__(self, T: ElementTable):
        self.T = T
        self.reps: list[tuple[np.ndarray, list[int], tuple, int]] = []
        self._by_inv: dict[tuple, list[int]] = {}

    def add(self, elems: np.ndarray, gens: list[int], tag: int = 0,
            inv: tuple | None = None) -> bool:
        if inv is None:
            inv = _invariant(self.T, elems, gens)
        same = self._by_inv.setdefault(inv, [])
        for i in same:
            if self.T.transporter_set(elems, gens, self.reps[i][0], first_only=True).size:
                return False
        same.append(len(self.reps))
        self.reps.append((elems, gens, inv, tag))
        return True


def perfect_subgroups(T: ElementTable, first_orders: tuple[int, ...] | None = None
                      ) -> list[tuple[np.ndarray, list[int]]]:
    """Non-trivial perfect subgroups up to conjugacy, as (elements, generators).

    Candidates are closures <a, b> with a a class representative and b running
    over representatives of the C(a)-orbits.  By default a runs over all
    classes and b only over classes of equal or larger (size, id), so every
    unordered pair is seen.  With ``first_orders`` a is restricted to elements
    of those orders and b is unrestricted, which is much cheaper for large
    groups.
    """
    G_gens = [T.lookup(g) for g in T.group.generators]
    top = T.derived_series_end(T.all, G_gens)
    if len(top) == 1:
        return []
    found = _Bucket(T)
    found.add(top, T.small_generating_set(top))
    limit = len(top) // 5
    top_cid = T.class_id[top]
    top_size = T.class_sizes[top_cid]
    classes_in_top = sorted((int(c) for c in np.unique(top_cid)
                             if T.class_reps[c] != T.identity),
                            key=lambda c: (T.class_sizes[c], c))
    if first_orders is None:
        firsts = classes_in_top
    else:
        firsts = [c for c in classes_in_top
                  if T.element_order[T.class_reps[c]] in first_orders]
    use_chain = T.order > TIER_A
    E = T.E
    for c in firsts:
        a = int(T.class_reps[c])
        cent_gens = T.small_generating_set(T.centralizers[c])
        sc = T.class_sizes[c]
        later = (top_size > sc) | ((top_size == sc) & (top_cid >= c))
        if first_orders is not None:
            earlier = np.isin(top_cid, [x for x in firsts
                                        if (T.class_sizes[x], x) < (sc, c)])
            pool = top[~earlier]
        else:
            pool = top[later]
        for b in _orbit_representatives(T, pool, cent_gens):
            b = int(b)
            if T.mul(a, b)[0] == T.mul(b, a)[0]:
                continue
            if not _even_on_orbits(E[a].astype(np.int64), E[b].astype(np.int64)):
                continue
            if use_chain:
                size = PermutationGroup([T.permutation(a), T.permutation(b)]).order()
                if size > limit or size < 60:
                    continue
            P = T.closure([a, b], limit=limit)
            # the smallest non-trivial perfect group has order 60
            if P is None or len(P) < 60:
                continue
            if len(T.derived_subgroup(P, [a, b])) != len(P):
                continue
            found.add(P, [a, b])
    return [(e, g) for e, g, _, _ in found.reps]


def _orbit_representatives(T: ElementTable, pool: np.ndarray, gens) -> np.ndarray:
    """Smallest element of each orbit of <gens> acting on ``pool`` by conjugation."""
    idx = np.arange(len(pool))
    src, dst = [idx], [idx]
    for h in gens:
        src.append(idx)
        dst.append(np.searchsorted(pool, T.conj(pool, h)))
    ncomp, lab = components(len(pool), np.concatenate(src), np.concatenate(dst))
    first = np.full(ncomp, -1, dtype=np.int64)
    first[lab[::-1]] = idx[::-1]
    return pool[np.sort(first)]


def _even_on_orbits(a: np.ndarray, b: np.ndarray) -> bool:
    """Both permutations restrict to even permutations on every orbit of <a, b>."""
    n = len(a)
    parent = np.arange(n)

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in (a, b):
        for i in range(n):
            r, s = find(i), find(int(p[i]))
            if r != s:
                parent[max(r, s)] = min(r, s)
    roots = np.array([find(i) for i in range(n)])
    for p in (a, b):
        seen = np.zeros(n, dtype=bool)
        parity: dict[int, int] = {}
        for i in range(n):
            if seen[i]:
                continue
            length = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = int(p[j])
                length += 1
            r = int(roots[i])
            parity[r] = parity.get(r, 0) ^ ((length - 1) & 1)
        if any(parity.values()):
            return False
    return True


def subgroup_classes(G: PermutationGroup, tier: str = "a") -> SubgroupClassList:
    """All conjugacy classes of subgroups of ``G``, ordered by (order, discovery)."""
    T = element_table(G, tier)
    big = T.order > TIER_A
    order = T.order
    pending: dict[int, list[tuple[int, int]]] = {}
    seeds: dict[int, list[tuple[np.ndarray, list[int]]]] = {1: [(np.array([T.identity]), [])]}
    for elems, gens in perfect_subgroups(T, first_orders=(2, 3) if big else None):
        seeds.setdefault(len(elems), []).append((elems, gens))

    results: list[SubgroupClass] = []
    orders = sorted(d for d in range(1, order + 1) if order % d == 0)
    for o in orders:
        if o not in seeds and o not in pending:
            continue
        bucket = _Bucket(T)
        for elems, gens in seeds.get(o, []):
            bucket.add(elems, gens, tag=len(elems))
        # candidates arrive grouped by parent class
        cache: tuple[int, np.ndarray] | None = None
        for parent, g, p in pending.pop(o, []):
            if cache is None or cache[0] != parent:
                cache = (parent, T.closure(results[parent].generators))
            elems = T.extend(cache[1], g, p)
            gens = results[parent].generators + [g]
            bucket.add(elems, gens, tag=results[parent].residual_order)
        log.debug("order %d: %d classes", o, len(bucket.reps))
        for elems, gens, inv, residual in bucket.reps:
            idx = len(results)
            N = T.normalizer(elems, gens)
            orbits = tuple(tuple(x) for x in T.point_orbits(gens))
            results.append(SubgroupClass(
                order=len(elems), class_size=order // len(N), generators=list(gens),
                min_fixed=int(T.nfix[elems].min()),
                max_element_order=int(T.element_order[elems].max()),
                residual_order=residual, orbits=orbits, invariant=inv))
            _extend_candidates(T, idx, elems, gens, N, pending)
    return SubgroupClassList(G, T, results)


def _extend_candidates(T: ElementTable, idx: int, H: np.ndarray, H_gens: list[int],
                       N: np.ndarray, pending: dict) -> None:
    h = len(H)
    if len(N) == h:
        return
    outside = N[~T.member(H, N)]
    n_gens = T.generators_mod(N, H, H_gens)
    for p in T.primes:
        if (len(N) // h) % p:
            continue
        cand = outside[T.member(H, T.pow(outside, p))]
        if cand.size == 0:
            continue
        m = len(cand)
        idxs = np.arange(m)
        src, dst = [idxs], [idxs]
        for n in n_gens:
            src.append(idxs)
            dst.append(np.searchsorted(cand, T.conj(cand, n)))
        for hg in H_gens:
            src.append(idxs)
            dst.append(np.searchsorted(cand, T.mul(cand, hg)))
        k = _primitive_root(p)
        if k > 1:
            src.append(idxs)
            dst.append(np.searchsorted(cand, T.pow(cand, k)))
        ncomp, lab = components(m, np.concatenate(src), np.concatenate(dst))
        first = np.full(ncomp, -1, dtype=np.int64)
        first[lab[::-1]] = idxs[::-1]
        for i in first:
            pending.setdefault(h * p, []).append((idx, int(cand[i]), p))


def conjugacy_classes(G: PermutationGroup, tier: str = "a") -> list[tuple[Permutation, int]]:
    """Element conjugacy classes as (representative, class size)."""
    T = element_table(G, tier)
    return [(T.permutation(int(r)), int(s)) for r, s in zip(T.class_reps, T.class_sizes)]


def is_conjugate_subgroup(G: PermutationGroup, H1: PermutationGroup, H2: PermutationGroup,
                          tier: str = "a") -> bool:
    """Whether g H1 g^-1 = H2 for some g in G; ValueError if H1 or H2 is not in G."""
    T = element_table(G, tier)
    g1 = [T.lookup(h) for h in H1.generators]
    g2 = [T.lookup(h) for h in H2.generators]
    return T.conjugate(T.closure(g1), g1, T.closure(g2))
