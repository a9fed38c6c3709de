import pytest

from dplines.classify import (
    class_reports,
    closed_form_answer,
    criterion,
    find_orbit_type,
    fixed_point_counts,
    required_tier,
    skew,
    solvable_split,
    subgroup_group,
    table,
)
from dplines.permgrp import PermutationGroup, TierExceeded
from dplines.picard import enumerate_lines, weyl_group

PUBLISHED = {5: (19, 3, 7, 9, 2), 4: (197, 51, 18, 19, 0), 3: (350, 25, 25, 172, 3)}


@pytest.mark.parametrize("d", [5, 4, 3])
def test_published_rows(d):
    assert table(d).counts() == PUBLISHED[d]


@pytest.mark.parametrize("d,row", [(7, (2, 0, 2, 2, 0)), (6, (10, 3, 6, 2, 0))])
def test_small_degree_rows(d, row):
    # cross-checked by brute-force subgroup enumeration of W(A1) and W(A2 x A1)
    assert table(d).counts() == row


@pytest.mark.parametrize("d", [7, 6, 5, 4, 3])
def test_report_invariants(d):
    n = enumerate_lines(d).size
    tab = table(d)
    assert tab.criterion <= tab.classes - tab.transitive - tab.cyclic
    for r in class_reports(d):
        assert sum(r.orbit_type) == n
        assert list(r.orbit_type) == sorted(r.orbit_type)
        if r.satisfies_criterion:
            assert not r.has_global_fixed_point
            assert not r.cyclic
            assert not r.transitive


def _group_in_w(d, order, orbit_type):
    out = [i for i, r in enumerate(class_reports(d))
           if r.order == order and r.orbit_type == tuple(orbit_type)]
    assert len(out) == 1
    return subgroup_group(d, out[0])


def test_criterion_examples():
    v4 = _group_in_w(5, 4, [2, 2, 2, 4])
    r = criterion(v4, 10)
    assert r.satisfies_criterion and r.orbit_type == (2, 2, 2, 4)
    a4 = criterion(_group_in_w(5, 12, [4, 6]), 10)
    assert a4.satisfies_criterion and a4.orbit_type == (4, 6)
    triv = criterion(PermutationGroup([], degree=27), 27)
    assert triv.has_global_fixed_point and not triv.satisfies_criterion
    full = criterion(weyl_group(5), 10)
    assert full.transitive and not full.satisfies_criterion
    with pytest.raises(ValueError):
        criterion(weyl_group(5), 27)


def test_criterion_matches_class_reports():
    for i, r in enumerate(class_reports(5)):
        c = criterion(subgroup_group(5, i))
        assert (c.order, c.transitive, c.cyclic, c.has_global_fixed_point,
                c.satisfies_criterion, c.orbit_type) == \
               (r.order, r.transitive, r.cyclic, r.has_global_fixed_point,
                r.satisfies_criterion, r.orbit_type)


def test_closed_forms():
    v7 = closed_form_answer(7)
    assert v7.criterion_classes == 0 and v7.computed
    v6 = closed_form_answer(6)
    assert v6.criterion_classes == 0
    assert "2 non-transitive non-cyclic classes" in v6.reason
    assert closed_form_answer(9).verdict == "Hasse principle holds (closed form)"
    assert not closed_form_answer(8).computed
    with pytest.raises(ValueError):
        closed_form_answer(5)


def test_degree_5_criterion_classes():
    crit = sorted((r.order, r.orbit_type) for r in class_reports(5) if r.satisfies_criterion)
    assert crit == [(4, (2, 2, 2, 4)), (12, (4, 6))]
    conf = enumerate_lines(5)
    for r in class_reports(5):
        if r.satisfies_criterion:
            assert all(skew(conf, o) for o in r.orbits if len(o) == 4)


def test_degree_3_orbit_types():
    d5 = find_orbit_type(3, (2, 5, 5, 5, 10))
    assert [r.order for r in d5] == [10]
    pair = find_orbit_type(3, (2, 5, 10, 10))
    assert sorted(r.order for r in pair) == [20, 120]
    crit = [r for r in class_reports(3) if r.satisfies_criterion]
    assert len(crit) == 3
    both = find_orbit_type(3, (2, 5, 10, 10), skew_sizes=(2, 5)) + \
        find_orbit_type(3, (2, 5, 5, 5, 10), skew_sizes=(2,))
    assert len(both) == 3
    conf = enumerate_lines(3)
    for r in crit:
        assert any(len(o) == 5 and skew(conf, o) for o in r.orbits)


def test_degree_3_group_structure():
    (d5,) = find_orbit_type(3, (2, 5, 5, 5, 10))
    G = subgroup_group(3, d5.index)
    # dihedral of order 10: non-abelian, one class of involutions
    assert not G.is_cyclic()
    assert sorted(G.cycle_type_counts().values()) == [1, 4, 5]
    (f20,) = find_orbit_type(3, (2, 5, 10, 10), predicate=lambda r: r.order == 20)
    assert f20.solvable
    (s5,) = find_orbit_type(3, (2, 5, 10, 10), predicate=lambda r: r.order == 120)
    assert not s5.solvable


def test_solvable_split():
    assert solvable_split(3) == (2, 1)
    assert solvable_split(4) == (0, 0)
    assert solvable_split(5) == (2, 0)


def test_fixed_point_counts_of_order_20_class():
    (f20,) = find_orbit_type(3, (2, 5, 10, 10), predicate=lambda r: r.order == 20)
    assert fixed_point_counts(3, f20.index) == frozenset({1, 2, 7, 27})


def test_tiers():
    assert required_tier(3) == "a" and required_tier(2) == "b"
    with pytest.raises(TierExceeded):
        table(2, "a")
    with pytest.raises(ValueError):
        table(8)


def test_skew():
    conf = enumerate_lines(7)
    ends = [i for i, v in enumerate(conf.vertices) if v.coords[0] == 0]
    assert skew(conf, ends)
    assert not skew(conf, range(3))
