from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dplines.geom import (
    ClosedPoint,
    CubicSurface,
    Form,
    count_lines_mod_p,
    counterexample_surface,
    dp1_conic_bundle_g,
    dp2_anticanonical_relation,
    forms_through,
    general_position_mod_p,
    geiser_contract,
    monomials,
    pencil_discriminant,
    singular_points_mod_p,
    smoothness_mod_p,
    vanishing_conditions,
    verify_conic_bundle_dp2,
    verify_surface,
    z5z4_points,
)

SMOOTH_COUNTS = {0, 1, 2, 3, 5, 7, 9, 15, 27}


# -- naive line oracle ---------------------------------------------------------


def _points_on(S, p):
    allp = []
    for lead in range(4):
        rest = 3 - lead
        for idx in range(p ** rest):
            v = [0] * lead + [1]
            for _ in range(rest):
                v.append(idx % p)
                idx //= p
            allp.append(tuple(v))
    arr = np.array(allp, dtype=np.int64)
    on = S.form.evaluate_mod_p(arr, p) == 0
    return [allp[i] for i in np.flatnonzero(on)]


def _normalize(v, p):
    for x in v:
        if x % p:
            inv = pow(int(x), -1, p)
            return tuple(int(y) * inv % p for y in v)
    return None


def naive_line_count(S, p):
    """Lines through pairs of F_p-points of S all of whose points lie on S."""
    pts = _points_on(S, p)
    on = set(pts)
    lines = set()
    for u, v in combinations(pts, 2):
        line = frozenset(_normalize([(a * s + b) % p for a, b in zip(u, v)], p)
                         for s in range(p)) | {u}
        if line <= on:
            lines.add(line)
    return len(lines)


def random_cubic(draw_coeffs):
    mons = monomials(4, 3)
    return CubicSurface(Form(4, 3, tuple(draw_coeffs[: len(mons)])))


coeff20 = st.lists(st.integers(-3, 3), min_size=20, max_size=20)


@settings(max_examples=25, deadline=None)
@given(coeff20, st.sampled_from([5, 7]))
def test_line_count_matches_naive_oracle(cs, p):
    S = random_cubic(cs)
    if not S.form.reduce(p)[1].size:
        return
    assert count_lines_mod_p(S, p, check=False) == naive_line_count(S, p)


@settings(max_examples=40, deadline=None)
@given(coeff20, st.sampled_from([5, 7, 11]))
def test_smoothness_agrees_with_point_scan(cs, p):
    S = random_cubic(cs)
    smooth = smoothness_mod_p(S, p)
    if len(singular_points_mod_p(S, p)):
        assert not smooth
    if smooth:
        assert count_lines_mod_p(S, p) in SMOOTH_COUNTS


def test_fermat():
    S = CubicSurface.fermat()
    assert smoothness_mod_p(S, 7) and not smoothness_mod_p(S, 3)
    assert count_lines_mod_p(S, 7) == 27
    assert count_lines_mod_p(S, 13) == 27
    assert count_lines_mod_p(S, 5) == 3
    assert count_lines_mod_p(S, 11) == 3
    with pytest.raises(ValueError):
        count_lines_mod_p(S, 3)


def test_singular_examples():
    cone = CubicSurface.from_terms({(3, 0, 0, 0): 1, (0, 3, 0, 0): 1, (0, 0, 3, 0): 1})
    assert not smoothness_mod_p(cone, 7)
    assert [tuple(r) for r in singular_points_mod_p(cone, 7)] == [(0, 0, 0, 1)]
    # Cayley's nodal cubic has four nodes
    cayley = CubicSurface.from_terms({(1, 1, 1, 0): 1, (1, 1, 0, 1): 1, (1, 0, 1, 1): 1,
                                      (0, 1, 1, 1): 1})
    assert not smoothness_mod_p(cayley, 7)
    assert len(singular_points_mod_p(cayley, 7)) == 4
    with pytest.raises(ValueError):
        smoothness_mod_p(cayley, 9)


def test_reference_surface():
    S = CubicSurface.reference()
    rep = verify_surface(S, prime_bound=60, allowed_counts={1, 2, 7, 27})
    assert rep.smooth_certificates == (3, 7, 11)
    assert set(rep.bad_primes) == {2, 5, 13}
    assert rep.all_primes_have_lines and rep.counts_in_set
    assert CubicSurface.from_json(S.to_json()) == S


def test_forms_through_dimensions():
    P, Q = z5z4_points(101)
    assert len(forms_through([P, Q], 3)) == 3
    assert len(forms_through([P, Q], 6, order=2)) == 7
    assert len(forms_through([P], 1)) == 1
    assert len(forms_through([Q], 2)) == 1
    assert len(vanishing_conditions(Q, 6, order=2)) == 15


def test_closed_point_validation():
    with pytest.raises(ValueError):
        ClosedPoint((-4, 0, 1), ((0, 1), (1,), (1,)))
    with pytest.raises(ValueError):
        ClosedPoint((-5, 0, 1), ((0,), (0,), (0,)))
    P = ClosedPoint((-5, 0, 1), ((0, 1), (2,), (1,)))
    assert P.conjugates_mod_p(7) is None
    assert sorted(P.conjugates_mod_p(11)) == [(1, 5, 8), (1, 6, 3)]  # [4:2:1] and [7:2:1]


def test_general_position():
    P, Q = z5z4_points(101)
    gp = general_position_mod_p([P, Q])
    assert gp.general and gp.prime == 61
    # three collinear rational points
    pts = [ClosedPoint((0, 1), ((a,), (a,), (1,))) for a in range(3)]
    assert not general_position_mod_p(pts).general


def test_construction_101():
    C = counterexample_surface(101)
    assert C.model.corank == 1
    assert C.surface.form.is_integral()
    assert smoothness_mod_p(C.surface, 7)
    assert not smoothness_mod_p(C.surface, 101)
    for p in (7, 11, 13):
        assert count_lines_mod_p(C.surface, p) in {1, 2, 7, 27}
    with pytest.raises(ValueError):
        counterexample_surface(103)


def test_relation_and_geiser_errors():
    cubic = Form.from_dict(3, 3, {(3, 0, 0): 1})
    with pytest.raises(ValueError):
        dp2_anticanonical_relation([cubic, cubic], Form.from_dict(3, 6, {(6, 0, 0): 1}))
    with pytest.raises(ValueError):
        dp2_anticanonical_relation([cubic] * 3, cubic)
    zero2 = Form.from_dict(3, 2, {})
    f4 = Form.from_dict(3, 4, {(0, 4, 0): 1, (0, 0, 4): 1})
    with pytest.raises(ValueError):
        geiser_contract(zero2, f4)


def test_geiser_on_split_model():
    # w^2 - x1^2 x2^2 + x0 (x0^3 + x1^3 + x2^3) splits over x0 = 0
    f2 = Form.from_dict(3, 2, {})
    f4 = Form.from_dict(3, 4, {(0, 2, 2): -1, (4, 0, 0): 1, (1, 3, 0): 1, (1, 0, 3): 1})
    S = geiser_contract(f2, f4)
    assert S.form.is_integral()
    t = S.form.terms()
    assert t[(1, 0, 0, 2)] == 1


# -- pencils, conic bundles ----------------------------------------------------


def test_pencil_examples():
    D = pencil_discriminant(np.eye(5, dtype=int).tolist(), np.diag([1, 2, 3, 4, 5]).tolist())
    assert D.coeffs == (120, 274, 225, 85, 15, 1) and D.separable
    assert not pencil_discriminant(np.eye(5, dtype=int).tolist(),
                                   np.diag([1, 1, 3, 4, 5]).tolist()).separable
    D3 = pencil_discriminant(np.eye(3, dtype=int).tolist(), np.diag([1, 2, 3]).tolist())
    assert D3.coeffs == (6, 11, 6, 1)
    drop = pencil_discriminant(np.diag([0, 1, 2]).tolist(), np.eye(3, dtype=int).tolist())
    assert drop.coeffs[-1] == 0 and drop.separable
    assert not pencil_discriminant(np.diag([0, 0, 2]).tolist(),
                                   np.eye(3, dtype=int).tolist()).separable
    D7 = pencil_discriminant(np.eye(7, dtype=int).tolist(), np.diag(range(7)).tolist())
    assert D7.separable and D7.degree == 7
    with pytest.raises(ValueError):
        pencil_discriminant(np.eye(4).tolist(), np.eye(4).tolist())
    with pytest.raises(ValueError):
        pencil_discriminant([[1, 1, 0], [0, 1, 0], [0, 0, 1]], np.eye(3).tolist())


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=6, max_size=6),
       st.lists(st.integers(-4, 4), min_size=6, max_size=6))
def test_pencil_matches_sympy_det(u, v):
    import sympy

    def sym(c):
        return [[c[0], c[1], c[2]], [c[1], c[3], c[4]], [c[2], c[4], c[5]]]
    lam, mu = sympy.symbols("lam mu")
    D = pencil_discriminant(sym(u), sym(v))
    expect = sympy.expand((lam * sympy.Matrix(sym(u)) + mu * sympy.Matrix(sym(v))).det())
    assert sympy.expand(D.as_expr() - expect) == 0


def test_conic_bundle():
    r = verify_conic_bundle_dp2(17, 103)
    assert r.labels == {13: "b", 2: "b", -14: "a", 3: "a", -2: "ab", 11: "ab"}
    assert r.split_counts == {"a": 2, "b": 2, "ab": 2} and r.verified
    assert r.local_lines == "fails_HP"
    with pytest.raises(ValueError):
        verify_conic_bundle_dp2(4, 3)
    r2 = verify_conic_bundle_dp2(Fraction(2, 3), 5)
    assert r2.local_lines is None


def test_dp1_interpolation():
    assert dp1_conic_bundle_g((0, 1, 2, 3), 0, 1, 1) == (1,)
    g = dp1_conic_bundle_g((0, 1, 2, 3), 2, 3, 5)
    assert len(g) == 5 and g[-1] == 2
    for x, val in zip((0, 1, 2, 3), (1, 3, 5, 15)):
        assert sum(c * x ** k for k, c in enumerate(g)) == val
    with pytest.raises(ValueError):
        dp1_conic_bundle_g((0, 1, 1, 3), 0, 2, 3)
