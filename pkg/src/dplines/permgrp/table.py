"""Fully enumerated groups.

An :class:`ElementTable` lists every element of a permutation group as a row
of a ``uint8`` array, in the mixed-radix order of the stabilizer chain: the
element u_0 u_1 ... u_{k-1} (u_i from the i-th transversal) sits at the index
whose digits are the positions of the u_i.  Sifting the images of the base
points recovers those digits, so products, inverses and conjugates cost a
few small gathers per element.  Element classes
come with transporters: ``transporter[x]`` conjugates the class
representative to ``x``.  That turns centralizer, normalizer and conjugacy
questions into filtering of explicit cosets.
"""

from __future__ import annotations

import numpy as np
from numba import njit
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .perm import Permutation, PermutationGroup

__all__ = ["ElementTable", "TierExceeded", "components"]


class TierExceeded(RuntimeError):
    """The group is larger than the configured enumeration bound."""


def _primes_dividing(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def components(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[int, np.ndarray]:
    """Connected components of an undirected graph on ``n`` nodes."""
    if n == 0:
        return 0, np.zeros(0, dtype=np.int64)
    g = csr_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
    return connected_components(g, directed=True, connection="weak")


@njit(cache=True)
def _sift_one(v, pos, uinv, stride):
    k = v.shape[0]
    idx = 0
    for lv in range(k):
        t = pos[lv, v[lv]]
        if t < 0:
            return -1
        idx += t * stride[lv]
        for j in range(lv + 1, k):
            v[j] = uinv[lv, t, v[j]]
    return idx


@njit(cache=True)
def _sift_rows(img, pos, uinv, stride, out):
    v = np.empty(img.shape[1], np.int64)
    for i in range(img.shape[0]):
        for j in range(img.shape[1]):
            v[j] = img[i, j]
        out[i] = _sift_one(v, pos, uinv, stride)


@njit(cache=True)
def _mul_rows(E, base, pos, uinv, stride, a, b, out):
    k = base.shape[0]
    v = np.empty(k, np.int64)
    for i in range(a.shape[0]):
        ai = a[i]
        bi = b[i]
        for j in range(k):
            v[j] = E[ai, E[bi, base[j]]]
        out[i] = _sift_one(v, pos, uinv, stride)


@njit(cache=True)
def _conj_rows(E, Einvb, pos, uinv, stride, x, g, out):
    k = Einvb.shape[1]
    v = np.empty(k, np.int64)
    for i in range(x.shape[0]):
        xi = x[i]
        gi = g[i]
        for j in range(k):
            v[j] = E[gi, E[xi, Einvb[gi, j]]]
        out[i] = _sift_one(v, pos, uinv, stride)


class ElementTable:
    def __init__(self, group: PermutationGroup, max_order: int):
        order = group.order()
        if order > max_order:
            raise TierExceeded(f"group of order {order} exceeds the bound {max_order}")
        n = group.degree
        if n > 256:
            raise TierExceeded("degree above 256 is not supported by the element table")
        self.group = group
        self.degree = n
        self.order = order
        self.base = np.array(group.base, dtype=np.int64)
        k = len(self.base)
        levels = group.transversal_arrays()
        sizes = [len(t) for _, t in levels]
        self._stride = np.array([int(np.prod(sizes[i + 1:], dtype=np.int64)) for i in range(k)],
                                dtype=np.int64)
        width = max(sizes, default=1)
        self._pos = np.full((max(k, 1), n), -1, dtype=np.int64)
        self._uinv = np.zeros((max(k, 1), width, n), dtype=np.int64)
        for lv, (point, trans) in enumerate(levels):
            for i, u in enumerate(trans):
                self._pos[lv, int(u[point])] = i
                self._uinv[lv, i, u] = np.arange(n)

        # element index = sum of transversal positions times strides
        E = np.arange(n, dtype=np.uint8)[None, :]
        for _, trans in reversed(levels):
            m = E.shape[0]
            out = np.empty((len(trans) * m, n), dtype=np.uint8)
            for i, u in enumerate(trans):
                out[i * m:(i + 1) * m] = u.astype(np.uint8)[E]
            E = out
        self.E = E
        self.identity = int(self._sift(self.base[None, :])[0]) if k else 0

        # inverse images of base points
        self.Einvb = np.empty((order, k), dtype=np.uint8)
        for i, b in enumerate(self.base):
            self.Einvb[:, i] = (self.E == b).argmax(axis=1)
        self.inverse = self._sift(self.Einvb) if k else np.zeros(1, dtype=np.int64)
        self.nfix = (self.E == np.arange(n, dtype=np.uint8)).sum(axis=1).astype(np.int16)
        self.all = np.arange(order, dtype=np.int64)
        self.primes = _primes_dividing(order)
        self._element_classes()
        rep_orders = np.array([self.permutation(int(r)).order() for r in self.class_reps],
                              dtype=np.int32)
        self.element_order = rep_orders[self.class_id]

    # -- arithmetic -----------------------------------------------------------

    def _sift(self, images: np.ndarray, check: bool = False) -> np.ndarray:
        """Element indices from the images of the base points (one row each)."""
        out = np.empty(images.shape[0], dtype=np.int64)
        _sift_rows(np.ascontiguousarray(images, dtype=np.int64), self._pos, self._uinv,
                   self._stride, out)
        if check and (out < 0).any():
            raise ValueError("permutation is not in the group")
        return out

    def lookup(self, g: Permutation) -> int:
        if g.degree != self.degree:
            raise ValueError("degree mismatch")
        img = np.array(g.images)[self.base][None, :]
        i = int(self._sift(img, check=True)[0]) if len(self.base) else 0
        if not np.array_equal(self.E[i], np.array(g.images, dtype=np.uint8)):
            raise ValueError("permutation is not in the group")
        return i

    def permutation(self, i: int) -> Permutation:
        return Permutation(self.E[i].tolist(), check=False)

    def mul(self, a, b) -> np.ndarray:
        """Indices of a*b (apply b first), broadcasting scalars."""
        a, b = np.broadcast_arrays(np.atleast_1d(a), np.atleast_1d(b))
        out = np.zeros(a.shape, dtype=np.int64)
        if len(self.base):
            _mul_rows(self.E, self.base, self._pos, self._uinv, self._stride,
                      np.ascontiguousarray(a, dtype=np.int64),
                      np.ascontiguousarray(b, dtype=np.int64), out)
        return out

    def conj(self, x, g) -> np.ndarray:
        """Indices of g x g^-1."""
        x, g = np.broadcast_arrays(np.atleast_1d(x), np.atleast_1d(g))
        out = np.zeros(x.shape, dtype=np.int64)
        if len(self.base):
            _conj_rows(self.E, self.Einvb, self._pos, self._uinv, self._stride,
                       np.ascontiguousarray(x, dtype=np.int64),
                       np.ascontiguousarray(g, dtype=np.int64), out)
        return out

    def pow(self, x, e: int) -> np.ndarray:
        x = np.atleast_1d(x)
        result = np.full(x.shape, self.identity, dtype=np.int64)
        base = x
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def _element_classes(self) -> None:
        cid = np.full(self.order, -1, dtype=np.int32)
        transporter = np.zeros(self.order, dtype=np.int64)
        reps: list[int] = []
        cents: list[np.ndarray] = []
        while True:
            free = np.flatnonzero(cid < 0)
            if free.size == 0:
                break
            r = int(free[0])
            y = self.conj(r, self.all)
            cid[y] = len(reps)
            transporter[y] = self.all
            reps.append(r)
            cents.append(np.flatnonzero(y == r))
        self.class_id = cid
        self.transporter = transporter
        self.class_reps = np.array(reps, dtype=np.int64)
        self.centralizers = cents
        self.class_sizes = np.bincount(cid, minlength=len(reps))

    # -- subgroups as sorted index arrays --------------------------------------

    def closure(self, gens, limit: int | None = None) -> np.ndarray | None:
        """Sorted elements of the subgroup generated by ``gens``.

        Returns None as soon as more than ``limit`` elements are found.
        """
        gens = [int(g) for g in gens if int(g) != self.identity]
        mask = np.zeros(self.order, dtype=bool)
        mask[self.identity] = True
        chunks = [np.array([self.identity], dtype=np.int64)]
        frontier = chunks[0]
        total = 1
        while frontier.size:
            new = np.unique(np.concatenate([self.mul(frontier, g) for g in gens])) \
                if gens else frontier[:0]
            new = new[~mask[new]]
            mask[new] = True
            total += new.size
            if limit is not None and total > limit:
                return None
            chunks.append(new)
            frontier = new
        return np.sort(np.concatenate(chunks))

    @staticmethod
    def member(elems: np.ndarray, x: np.ndarray) -> np.ndarray:
        pos = np.searchsorted(elems, x)
        pos[pos == len(elems)] = 0
        return elems[pos] == x

    def extend(self, elems: np.ndarray, g: int, index: int) -> np.ndarray:
        """Elements of <H, g> when g normalizes H and g^index lies in H."""
        parts = [elems]
        cur = g
        for _ in range(index - 1):
            parts.append(self.mul(elems, cur))
            cur = int(self.mul(cur, g)[0])
        return np.sort(np.concatenate(parts))

    def generators_mod(self, elems: np.ndarray, sub: np.ndarray, sub_gens) -> list[int]:
        """Elements that together with ``sub`` generate the group ``elems``."""
        gens: list[int] = []
        cur = sub
        cur_gens = list(sub_gens)
        while len(cur) < len(elems):
            missing = elems[~self.member(cur, elems)]
            g = int(missing[0])
            gens.append(g)
            cur_gens.append(g)
            cur = self.closure(cur_gens)
        return gens

    def small_generating_set(self, elems: np.ndarray) -> list[int]:
        return self.generators_mod(elems, np.array([self.identity], dtype=np.int64), [])

    def class_histogram(self, elems: np.ndarray) -> np.ndarray:
        return np.bincount(self.class_id[elems], minlength=len(self.class_reps))

    def _coset_candidates(self, k: int, targets: np.ndarray) -> np.ndarray:
        """All g with g k g^-1 in ``targets`` (all of k's class)."""
        c = int(self.class_id[k])
        C = self.centralizers[c]
        tk_inv = self.inverse[self.transporter[k]]
        left = self.transporter[targets]
        prod = self.mul(np.repeat(left, len(C)), np.tile(C, len(left)))
        return self.mul(prod, tk_inv)

    def _pick_element(self, elems: np.ndarray, target_hist: np.ndarray) -> int:
        """An element of ``elems`` whose class is cheapest to transport into the target."""
        present = np.unique(self.class_id[elems])
        present = present[present != self.class_id[self.identity]]
        cost = target_hist[present] * (self.order // self.class_sizes[present])
        c = int(present[int(np.argmin(cost))])
        return int(elems[np.argmax(self.class_id[elems] == c)])

    def transporter_set(self, elems1: np.ndarray, gens1, elems2: np.ndarray,
                        first_only: bool = False) -> np.ndarray:
        """All g in G with g H1 g^-1 = H2 (H1, H2 of equal order)."""
        if len(elems1) != len(elems2):
            return np.zeros(0, dtype=np.int64)
        if len(elems1) == 1:
            return self.all
        hist2 = self.class_histogram(elems2)
        k = self._pick_element(elems1, hist2)
        targets = elems2[self.class_id[elems2] == self.class_id[k]]
        cand = self._coset_candidates(k, targets)
        for h in gens1:
            if cand.size == 0:
                break
            cand = cand[self.member(elems2, self.conj(int(h), cand))]
        if first_only:
            return cand[:1]
        return np.sort(cand)

    def normalizer(self, elems: np.ndarray, gens) -> np.ndarray:
        return self.transporter_set(elems, gens, elems)

    def conjugate(self, elems1: np.ndarray, gens1, elems2: np.ndarray) -> bool:
        if len(elems1) != len(elems2):
            return False
        if not np.array_equal(self.class_histogram(elems1), self.class_histogram(elems2)):
            return False
        return self.transporter_set(elems1, gens1, elems2, first_only=True).size > 0

    def derived_subgroup(self, elems: np.ndarray, gens) -> np.ndarray:
        gens = [int(g) for g in gens]
        inv = self.inverse
        dg = []
        for i, a in enumerate(gens):
            for b in gens[i + 1:]:
                c = int(self.mul(self.mul(inv[a], inv[b]), self.mul(a, b))[0])
                if c != self.identity:
                    dg.append(c)
        D = self.closure(dg)
        changed = True
        while changed:
            changed = False
            for g in gens:
                im = self.conj(np.array(dg, dtype=np.int64), g) if dg else np.zeros(0, np.int64)
                bad = im[~self.member(D, im)]
                if bad.size:
                    dg.append(int(bad[0]))
                    D = self.closure(dg)
                    changed = True
        return D

    def derived_series_end(self, elems: np.ndarray, gens) -> np.ndarray:
        cur, cur_gens = elems, list(gens)
        while True:
            D = self.derived_subgroup(cur, cur_gens)
            if len(D) == len(cur):
                return cur
            cur = D
            cur_gens = self.small_generating_set(D)

    def point_orbits(self, gens) -> list[list[int]]:
        gens = [int(g) for g in gens]
        if not gens:
            return [[i] for i in range(self.degree)]
        src = np.concatenate([np.arange(self.degree)] * len(gens))
        dst = np.concatenate([self.E[g].astype(np.int64) for g in gens])
        ncomp, lab = components(self.degree, src, dst)
        out: list[list[int]] = [[] for _ in range(ncomp)]
        for i, c in enumerate(lab):
            out[c].append(i)
        return out

    def as_group(self, gens) -> PermutationGroup:
        return PermutationGroup([self.permutation(int(g)) for g in gens], degree=self.degree)
