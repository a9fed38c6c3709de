from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dplines.permgrp import (
    Permutation,
    PermutationGroup,
    TierExceeded,
    conjugacy_classes,
    element_table,
    is_conjugate_subgroup,
    subgroup_classes,
)
from dplines.permgrp import subgroups
from dplines.picard import weyl_group


def P(n, *cycles):
    return Permutation.from_cycles(n, *cycles)


def sym(n):
    return PermutationGroup([P(n, (0, 1)), P(n, tuple(range(n)))])


# -- brute-force oracle --------------------------------------------------------


def _all_elements(G):
    return sorted(g.images for g in G.elements())


def _compose(a, b):
    return tuple(a[x] for x in b)


def _closure(gens, ident):
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = _compose(g, x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def oracle_subgroups(G):
    """Every subgroup, by adjoining single elements to known subgroups until stable.

    Closing only <= 2-element subsets misses subgroups needing three
    generators (e.g. elementary abelian 2^3), so the oracle grows subgroups
    one element at a time from the trivial group instead.
    """
    elems = _all_elements(G)
    ident = tuple(range(G.degree))
    found = {frozenset([ident]): []}
    frontier = list(found)
    while frontier:
        nxt = []
        for H in frontier:
            gens = found[H]
            for g in elems:
                if g in H:
                    continue
                K = _closure(gens + [g], ident)
                if K not in found:
                    found[K] = gens + [g]
                    nxt.append(K)
        frontier = nxt
    return set(found), elems


def oracle_classes(G):
    subs, elems = oracle_subgroups(G)
    inv = {g: tuple(np.argsort(g)) for g in elems}
    remaining = set(subs)
    classes = []
    while remaining:
        H = min(remaining, key=lambda s: (len(s), sorted(s)))
        orbit = {frozenset(_compose(_compose(g, h), inv[g]) for h in H) for g in elems}
        remaining -= orbit
        classes.append((len(H), len(orbit)))
    return sorted(classes), len(subs)


ORACLE_GROUPS = {
    "S3": sym(3),
    "S4": sym(4),
    "D6": PermutationGroup([P(6, (0, 1, 2, 3, 4, 5)), P(6, (1, 5), (2, 4))]),
    "C2^3": PermutationGroup([P(6, (0, 1)), P(6, (2, 3)), P(6, (4, 5))]),
    "D4xC2": PermutationGroup([P(6, (0, 1, 2, 3)), P(6, (1, 3)), P(6, (4, 5))]),
    "Q8": PermutationGroup([P(8, (0, 1, 3, 6), (2, 5, 7, 4)), P(8, (0, 2, 3, 7), (1, 4, 6, 5))]),
    "A5": PermutationGroup([P(5, (0, 1, 2)), P(5, (0, 1, 2, 3, 4))]),
    "S5": sym(5),
    "W(E3)": weyl_group(6),
    "W(E4)": weyl_group(5),
    "S3xS3": PermutationGroup([P(6, (0, 1)), P(6, (0, 1, 2)), P(6, (3, 4)), P(6, (3, 4, 5))]),
    "PSL(2,7)": PermutationGroup([P(7, (0, 1, 2, 3, 4, 5, 6)), P(7, (1, 2, 4), (3, 6, 5)),
                                  P(7, (1, 6), (2, 3))]),
}


@pytest.mark.parametrize("name", sorted(ORACLE_GROUPS))
def test_subgroup_classes_match_oracle(name):
    G = ORACLE_GROUPS[name]
    L = subgroup_classes(G)
    expected, total = oracle_classes(G)
    got = sorted((c.order, c.class_size) for c in L.classes)
    assert got == expected
    assert L.total_subgroups() == total


def test_known_class_counts():
    assert len(subgroup_classes(sym(4))) == 11
    assert len(subgroup_classes(sym(5))) == 19
    assert len(subgroup_classes(weyl_group(5))) == 19
    assert len(subgroup_classes(weyl_group(7))) == 2


def test_class_list_invariants():
    G = weyl_group(5)
    L = subgroup_classes(G)
    T = L.table
    assert L.classes[0].order == 1 and L.classes[-1].order == 120
    for i, c in enumerate(L.classes):
        H = L.group(i)
        assert H.order() == c.order
        assert G.order() % c.order == 0
        assert sum(len(o) for o in c.orbits) == G.degree
    # representatives pairwise non-conjugate
    for i in range(len(L)):
        for j in range(i):
            if L.classes[i].order == L.classes[j].order:
                a, b = L.elements(i), L.elements(j)
                assert not T.conjugate(a, L.classes[i].generators, b)


def test_json_export_round_trip():
    L = subgroup_classes(sym(4))
    rows = L.load_generators(L.to_json())
    assert [(o, s) for o, s, _ in rows] == [(c.order, c.class_size) for c in L.classes]
    for (o, _, gens), c in zip(rows, L.classes):
        assert PermutationGroup(gens, degree=4).order() == o


def test_deterministic():
    a = subgroup_classes(weyl_group(6))
    subgroups._tables.clear()
    b = subgroup_classes(weyl_group(6))
    assert [(c.order, c.generators) for c in a] == [(c.order, c.generators) for c in b]


# -- operation examples --------------------------------------------------------


def test_group_order_examples():
    assert sym(5).order() == 120
    assert PermutationGroup([], degree=4).order() == 1
    assert weyl_group(4).order() == 1920


def test_element_classes():
    cls = conjugacy_classes(sym(5))
    assert len(cls) == 7
    assert sum(s for _, s in cls) == 120
    assert len(conjugacy_classes(PermutationGroup([], degree=3))) == 1
    cls6 = conjugacy_classes(weyl_group(6))
    assert len(cls6) == 6
    # brute-force check on the dihedral group of order 12
    elems = weyl_group(6).elements()
    brute = set()
    for x in elems:
        brute.add(frozenset((g * x * g.inverse()).images for g in elems))
    assert len(brute) == 6


def test_fixed_points():
    assert Permutation.identity(27).fixed_points() == frozenset(range(27))
    assert P(3, (0, 1)).fixed_points() == frozenset({2})
    T = element_table(weyl_group(5))
    five = [int(r) for r in T.class_reps if T.element_order[r] == 5]
    assert five and all(T.nfix[r] == 0 for r in five)


def test_is_conjugate_subgroup():
    S5 = sym(5)
    H = S5.subgroup([P(5, (0, 1))])
    assert is_conjugate_subgroup(S5, H, H)
    assert is_conjugate_subgroup(S5, H, S5.subgroup([P(5, (3, 4))]))
    assert not is_conjugate_subgroup(S5, H, S5.subgroup([P(5, (0, 1), (2, 3))]))
    A4 = S5.subgroup([P(5, (0, 1, 2)), P(5, (0, 1), (2, 3))])
    D6 = S5.subgroup([P(5, (0, 1, 2)), P(5, (0, 1)), P(5, (3, 4))])
    assert A4.order() == D6.order() == 12
    assert not is_conjugate_subgroup(S5, A4, D6)
    with pytest.raises(ValueError):
        is_conjugate_subgroup(S5.subgroup([P(5, (0, 1, 2))]), H, H)


def test_transitive_and_cyclic():
    C10 = PermutationGroup([P(10, tuple(range(10)))])
    assert C10.is_transitive() and C10.is_cyclic()
    triv = PermutationGroup([], degree=2)
    assert not triv.is_transitive() and triv.is_cyclic()
    # F20 inside S5 acting on the Petersen graph
    L = subgroup_classes(weyl_group(5))
    (f20,) = [i for i, c in enumerate(L.classes) if c.order == 20]
    assert L.group(f20).is_transitive()


def test_tier_exceeded():
    with pytest.raises(TierExceeded):
        element_table(weyl_group(2), "a")


# -- properties ----------------------------------------------------------------

perm7 = st.permutations(list(range(7))).map(Permutation)


@given(perm7, perm7)
def test_inverse_of_product(a, b):
    assert (a * b).inverse() == b.inverse() * a.inverse()
    assert (a * a.inverse()).is_identity()


@given(perm7)
def test_order_is_lcm_of_cycles(a):
    assert (a ** a.order()).is_identity()
    assert sum(a.cycle_type()) == 7
    for k in range(1, a.order()):
        assert not (a ** k).is_identity()


@settings(max_examples=40, deadline=None)
@given(st.lists(perm7, min_size=1, max_size=3))
def test_order_matches_closure(gens):
    G = PermutationGroup(gens)
    ident = tuple(range(7))
    elems = _closure([g.images for g in gens], ident)
    assert G.order() == len(elems)
    for g in gens:
        assert G.contains(g)
    assert sorted(len(o) for o in G.orbits()) == list(G.orbit_type())


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 50), min_size=1, max_size=8), st.data())
def test_membership_of_words(word, data):
    G = weyl_group(4)
    gens = G.generators
    g = Permutation.identity(G.degree)
    for i in word:
        g = g * gens[i % len(gens)]
    assert G.contains(g)
    # a transposition of two lines does not preserve intersections
    a, b = data.draw(st.tuples(st.integers(0, 15), st.integers(0, 15)).filter(lambda t: t[0] != t[1]))
    assert not G.contains(Permutation.from_cycles(16, (a, b)))


def test_all_permutations_of_s4_are_members():
    G = sym(4)
    for p in permutations(range(4)):
        assert G.contains(Permutation(p))
