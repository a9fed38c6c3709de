"""One test per acceptance criterion; each prints a single pass/fail line."""

import os
import time

import numpy as np
import pytest
import sympy

from dplines.classify import (
    class_reports,
    closed_form_answer,
    find_orbit_type,
    fixed_point_counts,
    skew,
    solvable_split,
    table,
)
from dplines.etale import (
    dedekind_factorization_shape,
    hasse_failure_check,
    poly_discriminant,
    qp_soluble,
    rational_points,
)
from dplines.fixtures import A4_QUARTIC, D5_QUINTIC, S5_QUINTIC, named_example
from dplines.geom import (
    CubicSurface,
    count_lines_mod_p,
    counterexample_surface,
    pencil_discriminant,
    verify_surface,
)
from dplines.permgrp import subgroup_classes
from dplines.picard import enumerate_lines, verify_pair_orbits, weyl_group

from test_etale import brute_zp_root
from test_permgrp import ORACLE_GROUPS, oracle_classes

TIER_B = os.environ.get("DPLINES_TIER_B") == "1"


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_criterion_1_line_counts(record):
    expected = {7: 3, 6: 6, 5: 10, 4: 16, 3: 27, 2: 56, 1: 240}
    enumerate_lines.cache_clear()

    def run():
        return {d: enumerate_lines(d) for d in range(1, 8)}

    confs, dt = _timed(run)
    counts = {d: c.size for d, c in confs.items()}
    mult = all((c.max_multiplicity() > 1) == (d <= 2) for d, c in confs.items())
    ok = counts == expected and mult and dt < 1
    record(1, ok, f"counts {[counts[d] for d in range(7, 0, -1)]}, multiplicity>1 iff d<=2: "
                  f"{mult}, {dt:.2f}s")
    assert ok


def test_criterion_2_weyl_orders(record):
    expected = [2, 12, 120, 1920, 51840, 2903040, 696729600]
    orders, dt = _timed(lambda: [weyl_group(d).order() for d in range(7, 0, -1)])
    ok = orders == expected and dt < 10
    record(2, ok, f"orders {orders}, {dt:.2f}s")
    assert ok


def test_criterion_3_pair_orbits(record):
    rep, dt = _timed(lambda: verify_pair_orbits(2))
    ok = (sorted(rep.sizes) == [28, 756, 756] and rep.small_orbit_is_double_edges
          and rep.rank == 8 and dt < 60)
    record(3, ok, f"orbit sizes {rep.sizes}, 28-orbit has multiplicity 2: "
                  f"{rep.small_orbit_is_double_edges}, rank {rep.rank} "
                  f"(other choice {max(rep.alternative_ranks)}), {dt:.1f}s")
    assert ok


def test_criterion_4_tier_a_tables(record):
    expected = {5: (19, 3, 7, 9, 2), 4: (197, 51, 18, 19, 0), 3: (350, 25, 25, 172, 3)}
    rows, dt = _timed(lambda: {d: table(d).counts() for d in (5, 4, 3)})
    low = {d: closed_form_answer(d).criterion_classes for d in (7, 6)}
    ok = rows == expected and low == {7: 0, 6: 0} and dt < 1800
    record(4, ok, f"rows {rows}, criterion classes d=7,6: {low[7]},{low[6]}, {dt:.1f}s")
    assert ok


def test_criterion_5_tier_b_tables(record):
    record(5, None, "d=1 (W(E8), order 696729600) skipped: subgroup lattice out of reach")
    if not TIER_B:
        record(5, None, "d=2 skipped; set DPLINES_TIER_B=1 to run W(E7) (~10 min)")
        pytest.skip("tier B disabled")
    row, dt = _timed(lambda: table(2, "b").counts())
    ok = row == (8074, 32, 60, 350, 60)
    record(5, ok, f"d=2 row {row}, {dt:.0f}s")
    assert ok


def test_criterion_6_orbit_types(record):
    d5 = sorted((r.order, r.orbit_type) for r in class_reports(5) if r.satisfies_criterion)
    ok5 = d5 == [(4, (2, 2, 2, 4)), (12, (4, 6))]
    conf5 = enumerate_lines(5)
    skew5 = all(skew(conf5, o) for r in class_reports(5) if r.satisfies_criterion
                for o in r.orbits if len(o) == 4)
    d3 = sorted((r.order, r.orbit_type) for r in class_reports(3) if r.satisfies_criterion)
    ok3 = d3 == [(10, (2, 5, 5, 5, 10)), (20, (2, 5, 10, 10)), (120, (2, 5, 10, 10))]
    conf3 = enumerate_lines(3)
    skew3 = all(any(len(o) == 2 and skew(conf3, o) for o in r.orbits)
                and any(len(o) == 5 and skew(conf3, o) for o in r.orbits)
                for r in class_reports(3) if r.satisfies_criterion)
    ok = ok5 and skew5 and ok3 and skew3
    record(6, ok, f"d=5 {d5}; d=3 {d3}; skew 4-orbits (d=5) {skew5}, "
                  f"skew 2- and 5-orbits (d=3) {skew3}")
    assert ok


def test_criterion_6_degree_2(record):
    record(6, None, "d=1 solvable count 7775 skipped with W(E8)")
    if not TIER_B:
        record(6, None, "d=2 non-solvable count skipped; set DPLINES_TIER_B=1")
        pytest.skip("tier B disabled")
    split = solvable_split(2, "b")
    conic = find_orbit_type(2, [2] * 12 + [4] * 8, tier="b")
    ok = split[1] == 2 and len(conic) > 0
    record(6, ok, f"d=2 (solvable, non-solvable) = {split}, "
                  f"[2x12, 4x8] criterion classes: {len(conic)}")
    assert ok


def test_criterion_7_etale(record):
    details, ok = [], True
    for key in ("biquadratic-2-17-34", "z5z4-101", "a4-163", "d5-47", "s5-101833"):
        ex = named_example(key)
        v, dt = _timed(lambda: hasse_failure_check(ex.scheme, ex.certificate, 10_000))
        ok &= v.status == "fails_HP" and dt < 10
        details.append(f"{key} {v.status} {dt:.2f}s")
    discs = (poly_discriminant(A4_QUARTIC).value, poly_discriminant(D5_QUINTIC).value,
             poly_discriminant(S5_QUINTIC).value)
    shapes = (dedekind_factorization_shape(A4_QUARTIC, 163),
              dedekind_factorization_shape(D5_QUINTIC, 47))
    ok &= discs == (163 ** 2, 47 ** 2, 101833)
    ok &= shapes == ([(1, 1), (3, 1)], [(1, 1), (2, 1), (2, 1)])
    record(7, ok, "; ".join(details) + f"; discriminants {discs}; shapes {shapes}")
    assert ok


def _random_cubics_quintics(n, seed=20):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        deg = int(rng.choice([3, 5]))
        p = int(rng.choice([2, 3, 5, 7]))
        f = tuple(int(a) for a in rng.integers(-30, 31, size=deg)) + (1,)
        disc = int(sympy.discriminant(sum(a * sympy.Symbol("x") ** i for i, a in enumerate(f))))
        # exhaustive search mod p^k with k = 2 v_p(disc) + 1 <= 4 decides Z_p-solubility
        if disc == 0 or disc % (p * p) == 0:
            continue
        out.append((f, p))
    return out


def test_criterion_8_oracles(record):
    parts = {}
    sub_ok = True
    for name, G in ORACLE_GROUPS.items():
        expected, total = oracle_classes(G)
        L = subgroup_classes(G)
        sub_ok &= sorted((c.order, c.class_size) for c in L.classes) == expected
        sub_ok &= L.total_subgroups() == total
    parts["subgroup classes"] = sub_ok
    cases = _random_cubics_quintics(100)
    parts["qp_soluble"] = all(qp_soluble(f, p).soluble == brute_zp_root(f, p) for f, p in cases)
    rng = np.random.default_rng(3)
    rp_ok = True
    for _ in range(100):
        f = tuple(int(a) for a in rng.integers(-20, 21, size=3)) + (1,)
        if f[0] == 0 or sympy.discriminant(sum(a * sympy.Symbol("x") ** i
                                               for i, a in enumerate(f))) == 0:
            continue
        divs = {s * d for d in sympy.divisors(abs(f[0])) for s in (1, -1)}
        want = {r for r in divs if sum(a * r ** i for i, a in enumerate(f)) == 0}
        rp_ok &= {r for _, r in rational_points([f])} == want
    parts["rational_points"] = rp_ok
    F = CubicSurface.fermat()
    parts["Fermat 27/3"] = (count_lines_mod_p(F, 7), count_lines_mod_p(F, 5)) == (27, 3)
    ok = all(parts.values())
    record(8, ok, ", ".join(f"{k}: {'ok' if v else 'MISMATCH'}" for k, v in parts.items())
           + f" ({len(ORACLE_GROUPS)} groups, {len(cases)} polynomials)")
    assert ok


def _surface_checks(S, allowed):
    rep = verify_surface(S, prime_bound=200, allowed_counts=allowed, zero_search=25)
    return rep, {
        "3 smoothness certificates": len(rep.smooth_certificates) >= 3,
        "all good p <= 200 have a line": rep.all_primes_have_lines,
        "counts in fixed-point set": bool(rep.counts_in_set),
        "zero-line prime among first 25 good primes": rep.zero_line_prime is not None,
    }


def test_criterion_9_end_to_end(record):
    t0 = time.perf_counter()
    (f20,) = [r for r in find_orbit_type(3, (2, 5, 10, 10)) if r.order == 20]
    allowed = fixed_point_counts(3, f20.index)
    C = counterexample_surface(101)
    rep, built = _surface_checks(C.surface, allowed)
    _, shipped = _surface_checks(CubicSurface.reference(), allowed)
    dt = time.perf_counter() - t0
    ok = all(built.values()) and all(shipped.values()) and dt < 900
    failed = [k for k, v in {**{"built " + k: v for k, v in built.items()},
                             **{"shipped " + k: v for k, v in shipped.items()}}.items() if not v]
    record(9, ok, f"fixed-point set {sorted(allowed)}, counts seen "
                  f"{sorted(set(rep.line_counts.values()))}, smooth at "
                  f"{list(rep.smooth_certificates)}, {dt:.0f}s"
                  + (f"; failed: {', '.join(failed)}" if failed else ""))
    assert ok


def test_criterion_10_pencils(record):
    t0 = time.perf_counter()
    results = []
    for n in (1, 2, 3):
        N = 2 * n + 3
        eye = np.eye(N, dtype=int).tolist()
        good = pencil_discriminant(eye, np.diag(range(1, N + 1)).tolist())
        bad = pencil_discriminant(eye, np.diag([1, 1] + list(range(3, N + 1))).tolist())
        results.append(good.degree == N and len(good.coeffs) == N + 1
                       and good.separable and not bad.separable)
    dt = time.perf_counter() - t0
    ok = all(results) and dt < 1
    record(10, ok, f"n=1,2,3 degrees 5,7,9 with correct separability: {results}, {dt:.2f}s")
    assert ok
