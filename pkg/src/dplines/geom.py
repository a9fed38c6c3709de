"""Exact constructions of surfaces and their verification modulo primes.

The main pipeline starts from a closed point of degree 2 and one of degree 5
in P^2, computes the degree 2 del Pezzo surface obtained by blowing them up
as a double cover of P^2 branched in a quartic, and contracts one of the two
rational lines on it to reach a cubic surface.  Everything in characteristic
0 is exact linear algebra over Q; smoothness, general position and line
counts are certified by reduction modulo primes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import gcd, lcm
from itertools import combinations, combinations_with_replacement
from typing import Iterable, Sequence

import numpy as np
import sympy
from sympy import QQ, Poly, symbols
from sympy.polys.matrices import DomainMatrix

from .etale import coeffs, frobenius_cycle_type, _roots_mod_p

__all__ = [
    "Form",
    "ClosedPoint",
    "CubicSurface",
    "GeneralPositionReport",
    "Dp2Model",
    "Construction",
    "SurfaceReport",
    "ConicBundleReport",
    "PencilDiscriminant",
    "monomials",
    "vanishing_conditions",
    "general_position_mod_p",
    "forms_through",
    "dp2_anticanonical_relation",
    "geiser_contract",
    "build_cubic",
    "z5z4_points",
    "counterexample_surface",
    "smoothness_mod_p",
    "singular_points_mod_p",
    "count_lines_mod_p",
    "verify_surface",
    "verify_conic_bundle_dp2",
    "dp1_conic_bundle_g",
    "pencil_discriminant",
]

VARS = ("x", "y", "z", "w")


# ---------------------------------------------------------------------------
# forms


@lru_cache(maxsize=None)
def monomials(nvars: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of degree ``degree`` in ``nvars`` variables, lex descending."""
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return tuple(out)


@lru_cache(maxsize=None)
def _monomial_index(nvars: int, degree: int) -> dict[tuple[int, ...], int]:
    return {m: i for i, m in enumerate(monomials(nvars, degree))}


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    num = getattr(c, "numerator", None)
    if num is not None:
        num, den = c.numerator, c.denominator
        return Fraction(int(num() if callable(num) else num),
                        int(den() if callable(den) else den))
    return Fraction(str(c))


@dataclass(frozen=True)
class Form:
    """A homogeneous form with exact rational coefficients.

    ``coeffs`` is dense and indexed by ``monomials(nvars, degree)``.
    """

    nvars: int
    degree: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coeffs) != len(monomials(self.nvars, self.degree)):
            raise ValueError("coefficient vector has the wrong length")
        object.__setattr__(self, "coeffs", tuple(_frac(c) for c in self.coeffs))

    @classmethod
    def from_dict(cls, nvars: int, degree: int, terms: dict) -> "Form":
        idx = _monomial_index(nvars, degree)
        c = [Fraction(0)] * len(idx)
        for e, v in terms.items():
            e = tuple(e)
            if len(e) != nvars or sum(e) != degree:
                raise ValueError(f"monomial {e} is not of degree {degree}")
            c[idx[e]] += _frac(v)
        return cls(nvars, degree, tuple(c))

    @classmethod
    def from_poly(cls, P: Poly, degree: int | None = None) -> "Form":
        nvars = len(P.gens)
        if P.is_zero:
            if degree is None:
                raise ValueError("degree of the zero form is ambiguous")
            return cls(nvars, degree, (Fraction(0),) * len(monomials(nvars, degree)))
        degs = {sum(m) for m in P.monoms()}
        if len(degs) != 1:
            raise ValueError("polynomial is not homogeneous")
        return cls.from_dict(nvars, degs.pop(), dict(P.terms()))

    def terms(self) -> dict[tuple[int, ...], Fraction]:
        return {m: c for m, c in zip(monomials(self.nvars, self.degree), self.coeffs) if c}

    def to_poly(self, gens=None) -> Poly:
        gens = gens or symbols(VARS[:self.nvars] if self.nvars <= 4 else f"x0:{self.nvars}")
        terms = {m: QQ(c.numerator, c.denominator) for m, c in self.terms().items()}
        if not terms:
            return Poly(0, *gens, domain=QQ)
        return Poly.from_dict(terms, *gens, domain=QQ)

    def __mul__(self, other: "Form") -> "Form":
        return Form.from_poly(self.to_poly() * other.to_poly(), self.degree + other.degree)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def partial(self, i: int) -> "Form":
        out: dict[tuple[int, ...], Fraction] = {}
        for m, c in self.terms().items():
            if m[i]:
                e = list(m)
                e[i] -= 1
                out[tuple(e)] = c * m[i]
        return Form.from_dict(self.nvars, self.degree - 1, out)

    def primitive(self) -> "Form":
        """Integral multiple with coprime coefficients (leading sign kept)."""
        den = lcm(*(c.denominator for c in self.coeffs))
        ints = [int(c * den) for c in self.coeffs]
        g = gcd(*ints) or 1
        return Form(self.nvars, self.degree, tuple(Fraction(a // g) for a in ints))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def reduce(self, p: int) -> tuple[np.ndarray, np.ndarray]:
        """(exponents, coefficients mod p) of the non-zero terms."""
        exps, vals = [], []
        for m, c in self.terms().items():
            if c.denominator % p == 0:
                raise ValueError(f"{p} divides a denominator")
            v = c.numerator * pow(c.denominator, -1, p) % p
            if v:
                exps.append(m)
                vals.append(v)
        return (np.array(exps, dtype=np.int64).reshape(-1, self.nvars),
                np.array(vals, dtype=np.int64))

    def evaluate_mod_p(self, pts: np.ndarray, p: int) -> np.ndarray:
        """Values at the rows of ``pts`` (integers) modulo p."""
        exps, vals = self.reduce(p)
        pts = np.asarray(pts, dtype=np.int64) % p
        out = np.zeros(len(pts), dtype=np.int64)
        powers = [[np.ones(len(pts), dtype=np.int64)] for _ in range(self.nvars)]
        for i in range(self.nvars):
            for _ in range(self.degree):
                powers[i].append(powers[i][-1] * pts[:, i] % p)
        for e, v in zip(exps, vals):
            t = np.full(len(pts), v, dtype=np.int64)
            for i, k in enumerate(e):
                if k:
                    t = t * powers[i][k] % p
            out = (out + t) % p
        return out

    def to_text(self) -> str:
        parts = []
        for m, c in self.terms().items():
            mono = "*".join(f"{VARS[i]}^{k}" if k > 1 else VARS[i]
                            for i, k in enumerate(m) if k) or "1"
            parts.append(f"{c}*{mono}")
        return " + ".join(parts) or "0"


# ---------------------------------------------------------------------------
# closed points


@dataclass(frozen=True)
class ClosedPoint:
    """A closed point of P^2 with residue field Q[t]/(g).

    ``coords`` are three polynomials in t of degree < deg g, constant term
    first, with rational coefficients.
    """

    g: tuple[int, ...]
    coords: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        g = coeffs(self.g)
        if g[-1] != 1:
            raise ValueError("g must be monic")
        r = len(g) - 1
        if not 1 <= r <= 8:
            raise ValueError("closed points of degree 1..8 only")
        if len(self.coords) != 3:
            raise ValueError("three coordinates expected")
        cs = []
        for c in self.coords:
            c = tuple(_frac(a) for a in c)
            if len(c) > r:
                c = tuple(_frac(a) for a in
                          _poly_t(c).rem(_poly_t(g)).all_coeffs()[::-1])
            cs.append(c + (Fraction(0),) * (r - len(c)))
        if all(not any(c) for c in cs):
            raise ValueError("coordinates are all zero")
        if not Poly(list(reversed(g)), _T, domain=QQ).is_irreducible:
            raise ValueError("g must be irreducible")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "coords", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.g) - 1

    def conjugates_mod_p(self, p: int) -> list[tuple[int, int, int]] | None:
        """Normalized F_p-points of the conjugates, or None unless g splits at p."""
        roots = _roots_mod_p(self.g, p)
        if len(roots) != self.degree:
            return None
        out = []
        for rho in roots:
            v = []
            for c in self.coords:
                s = 0
                for a in reversed(c):
                    if a.denominator % p == 0:
                        return None
                    s = (s * rho + a.numerator * pow(a.denominator, -1, p)) % p
                v.append(s)
            pt = _normalize(v, p)
            if pt is None:
                return None
            out.append(pt)
        return out


_T = sympy.Symbol("t")


def _poly_t(c: Sequence) -> Poly:
    return Poly([QQ(_frac(a).numerator, _frac(a).denominator) for a in reversed(c)] or [0],
                _T, domain=QQ)


def _normalize(v: Sequence[int], p: int) -> tuple[int, ...] | None:
    for a in v:
        if a % p:
            inv = pow(int(a), -1, p)
            return tuple(int(b) * inv % p for b in v)
    return None


def _monomial_values(P: ClosedPoint, m: int) -> dict[tuple[int, ...], list[Fraction]]:
    """Each monomial of degree m evaluated at P, as a vector over the basis t^i."""
    g = _poly_t(P.g)
    pw = []
    for c in P.coords:
        x = _poly_t(c)
        row = [Poly(1, _T, domain=QQ)]
        for _ in range(m):
            row.append((row[-1] * x).rem(g))
        pw.append(row)
    out = {}
    for e in monomials(3, m):
        v = (pw[0][e[0]] * pw[1][e[1]]).rem(g)
        v = (v * pw[2][e[2]]).rem(g)
        cs = [_frac(a) for a in v.all_coeffs()[::-1]]
        out[e] = cs + [Fraction(0)] * (P.degree - len(cs))
    return out


def vanishing_conditions(P: ClosedPoint, m: int, order: int = 1) -> list[list[Fraction]]:
    """Rational linear conditions on degree-m ternary forms for vanishing at P.

    Rows are indexed like ``monomials(3, m)``.  Order 1 gives deg P rows.  Order
    2 asks for all three partial derivatives to vanish (3 deg P rows); by
    Euler's formula this includes vanishing of the form itself.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    mons = monomials(3, m)
    r = P.degree
    if order == 1:
        vals = _monomial_values(P, m)
        return [[vals[e][j] for e in mons] for j in range(r)]
    if m < 1:
        raise ValueError("double points need degree at least 1")
    vals = _monomial_values(P, m - 1)
    rows = []
    for i in range(3):
        for j in range(r):
            row = []
            for e in mons:
                if e[i] == 0:
                    row.append(Fraction(0))
                else:
                    d = list(e)
                    d[i] -= 1
                    row.append(e[i] * vals[tuple(d)][j])
            rows.append(row)
    return rows


def _dm(rows: list[list[Fraction]], ncols: int) -> DomainMatrix:
    return DomainMatrix([[QQ(c.numerator, c.denominator) for c in r] for r in rows],
                        (len(rows), ncols), QQ)


def _nullspace(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    N = _dm(rows, ncols).nullspace()
    return [[_frac(c) for c in row] for row in N.to_list()]


def _rank(rows: list[list[Fraction]], ncols: int) -> int:
    return _dm(rows, ncols).rank() if rows else 0


def forms_through(points: Iterable[ClosedPoint], m: int, order: int = 1) -> list[Form]:
    """A basis of the degree-m ternary forms vanishing to ``order`` at every point."""
    rows = []
    for P in points:
        rows += vanishing_conditions(P, m, order)
    n = len(monomials(3, m))
    return [Form(3, m, tuple(v)) for v in _nullspace(rows, n)]


# ---------------------------------------------------------------------------
# arithmetic modulo p


def _rank_mod_p(M: np.ndarray, p: int) -> int:
    A = np.array(M, dtype=np.int64) % p
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = np.nonzero(A[r:, c])[0]
        if piv.size == 0:
            continue
        k = r + int(piv[0])
        if k != r:
            A[[r, k]] = A[[k, r]]
        A[r] = A[r] * pow(int(A[r, c]), -1, p) % p
        nz = np.nonzero(A[:, c])[0]
        nz = nz[nz != r]
        if nz.size:
            A[nz] = (A[nz] - np.outer(A[nz, c], A[r])) % p
        r += 1
    return r


def _ternary_rows_mod_p(pts: Sequence[tuple[int, ...]], m: int, p: int) -> np.ndarray:
    mons = np.array(monomials(3, m), dtype=np.int64)
    P = np.array(pts, dtype=np.int64)
    out = np.ones((len(P), len(mons)), dtype=np.int64)
    for i in range(3):
        for j, e in enumerate(mons[:, i]):
            out[:, j] = out[:, j] * np.array([pow(int(a), int(e), p) for a in P[:, i]]) % p
    return out


@dataclass(frozen=True)
class GeneralPositionReport:
    general: bool
    prime: int | None
    tried: tuple[int, ...]
    reason: str = ""


def _general_position_at(pts: list[tuple[int, ...]], p: int) -> str:
    """Empty string when the F_p-points are in general position, else the failure."""
    n = len(pts)
    if len(set(pts)) != n:
        return "points collide"
    lin = _ternary_rows_mod_p(pts, 1, p)
    for tri in combinations(range(n), 3):
        if _rank_mod_p(lin[list(tri)], p) < 3:
            return f"points {tri} are collinear"
    if n >= 6:
        quad = _ternary_rows_mod_p(pts, 2, p)
        for six in combinations(range(n), 6):
            if _rank_mod_p(quad[list(six)], p) < 6:
                return f"points {six} lie on a conic"
    if n == 8:
        cub = _ternary_rows_mod_p(pts, 3, p)
        mons = monomials(3, 3)
        for i in range(8):
            extra = []
            for v in range(3):
                row = []
                for e in mons:
                    if e[v] == 0:
                        row.append(0)
                        continue
                    d = list(e)
                    d[v] -= 1
                    val = e[v]
                    for k in range(3):
                        val = val * pow(pts[i][k], d[k], p) % p
                    row.append(val)
                extra.append(row)
            M = np.vstack([cub, np.array(extra, dtype=np.int64)])
            if _rank_mod_p(M, p) < 10:
                return f"a cubic through all points is singular at point {i}"
    return ""


def general_position_mod_p(points: Sequence[ClosedPoint], start: int = 11,
                           retries: int = 5, bound: int = 100_000) -> GeneralPositionReport:
    """Certify general position of the conjugates of ``points`` modulo a split prime.

    A pass at one prime certifies general position over Q, since each
    degeneracy is a closed condition.  A failure is inconclusive and the next
    split prime is tried, up to ``retries`` primes.
    """
    if sum(P.degree for P in points) > 8:
        raise ValueError("at most 8 geometric points")
    tried: list[int] = []
    reason = "no split prime found"
    for p in sympy.primerange(start, bound):
        pts: list[tuple[int, ...]] = []
        for P in points:
            c = P.conjugates_mod_p(p)
            if c is None:
                break
            pts += c
        else:
            tried.append(p)
            reason = _general_position_at(pts, p)
            if not reason:
                return GeneralPositionReport(True, p, tuple(tried))
            if len(tried) >= retries:
                break
    return GeneralPositionReport(False, None, tuple(tried), reason)


# ---------------------------------------------------------------------------
# the degree 2 del Pezzo surface and the Geiser contraction


@dataclass(frozen=True)
class Dp2Model:
    """w^2 + f2(x0, x1, x2) w + f4(x0, x1, x2) = 0 in P(1, 1, 1, 2)."""

    f2: Form
    f4: Form
    corank: int


def dp2_anticanonical_relation(c: Sequence[Form], s: Form) -> Dp2Model:
    """The relation s^2 + f2(c0, c1, c2) s + f4(c0, c1, c2) = 0 among degree 12 forms."""
    if len(c) != 3 or any(ci.degree != 3 or ci.nvars != 3 for ci in c):
        raise ValueError("three ternary cubics expected")
    if s.degree != 6 or s.nvars != 3:
        raise ValueError("s must be a ternary sextic")
    cp = [ci.to_poly() for ci in c]
    sp = s.to_poly()
    mon2 = monomials(3, 2)
    mon4 = monomials(3, 4)

    def ev(e):
        out = Poly(1, *sp.gens, domain=QQ)
        for k, ek in enumerate(e):
            out = out * cp[k] ** ek
        return out

    cols = [sp * sp] + [sp * ev(e) for e in mon2] + [ev(e) for e in mon4]
    n12 = len(monomials(3, 12))
    mat = [Form.from_poly(P, 12).coeffs for P in cols]
    rows = [[mat[j][i] for j in range(len(cols))] for i in range(n12)]
    null = _nullspace(rows, len(cols))
    if len(null) != 1:
        raise ValueError(f"relation space has dimension {len(null)}, expected 1")
    v = null[0]
    if v[0] == 0:
        raise ValueError("relation does not involve s^2")
    v = [a / v[0] for a in v]
    f2 = Form(3, 2, tuple(v[1:1 + len(mon2)]))
    f4 = Form(3, 4, tuple(v[1 + len(mon2):]))
    return Dp2Model(f2, f4, corank=len(null))


def _poly_sqrt(D: Poly) -> Poly | None:
    """A square root of D in Q[gens], or None."""
    if D.is_zero:
        return D
    lc, facs = D.factor_list()
    root = Poly(1, *D.gens, domain=QQ)
    for f, e in facs:
        if e % 2:
            return None
        root = root * f ** (e // 2)
    r = sympy.sqrt(sympy.Rational(lc))
    if not r.is_rational:
        return None
    return root * r


def geiser_contract(f2: Form, f4: Form) -> "CubicSurface":
    """Contract one line above x0 = 0 on w^2 + f2 w + f4 = 0.

    The preimage of x0 = 0 must split into two rational lines, that is
    w^2 + f2(0, x1, x2) w + f4(0, x1, x2) factors over Q.  Shifting w by one
    of the roots a gives w^2 + f2' w + x0 f3, and the cubic surface is
    x0 w^2 + f2' w + f3 = 0 in coordinates (x0, x1, x2, w).
    """
    x0, x1, x2 = symbols("x0 x1 x2")
    F2 = f2.to_poly((x0, x1, x2))
    F4 = f4.to_poly((x0, x1, x2))
    b2 = Poly(F2.as_expr().subs(x0, 0), x1, x2, domain=QQ)
    b4 = Poly(F4.as_expr().subs(x0, 0), x1, x2, domain=QQ)
    root = _poly_sqrt(b2 ** 2 - 4 * b4)
    if root is None:
        raise ValueError("the preimage of x0 = 0 is not a union of two rational lines")
    a = Poly(((-b2 + root) * QQ(1, 2)).as_expr(), x0, x1, x2, domain=QQ)
    g2 = F2 + 2 * a
    g4 = F4 + F2 * a + a * a
    f3, rem = g4.div(Poly(x0, x0, x1, x2, domain=QQ))
    if not rem.is_zero:
        raise ValueError("f4 is not divisible by x0 after the change of coordinates")
    w = sympy.Symbol("w")
    gens = (x0, x1, x2, w)
    cubic = Poly(x0 * w ** 2 + g2.as_expr() * w + f3.as_expr(), *gens, domain=QQ)
    return CubicSurface(Form.from_poly(cubic, 3).primitive())


# ---------------------------------------------------------------------------
# cubic surfaces


@dataclass(frozen=True)
class CubicSurface:
    """A cubic surface in P^3 with coordinates (x, y, z, w)."""

    form: Form

    def __post_init__(self):
        if self.form.nvars != 4 or self.form.degree != 3:
            raise ValueError("a cubic surface needs a quaternary cubic form")

    @classmethod
    def from_terms(cls, terms: dict) -> "CubicSurface":
        return cls(Form.from_dict(4, 3, terms))

    @classmethod
    def fermat(cls) -> "CubicSurface":
        return cls.from_terms({(3, 0, 0, 0): 1, (0, 3, 0, 0): 1, (0, 0, 3, 0): 1,
                               (0, 0, 0, 3): 1})

    @classmethod
    def reference(cls) -> "CubicSurface":
        """The shipped counter-example surface over Q."""
        text = resources.files("dplines").joinpath("data/reference_cubic.json").read_text()
        return cls.from_json(text)

    def to_json(self) -> str:
        terms = {",".join(map(str, m)): int(c) if c.denominator == 1 else str(c)
                 for m, c in self.form.terms().items()}
        return json.dumps({"degree": 3, "variables": list(VARS), "coefficients": terms},
                          indent=1)

    @classmethod
    def from_json(cls, text: str) -> "CubicSurface":
        doc = json.loads(text)
        if doc.get("degree", 3) != 3:
            raise ValueError("not a cubic surface")
        terms = {tuple(int(a) for a in k.split(",")): Fraction(v)
                 for k, v in doc["coefficients"].items()}
        return cls.from_terms(terms)

    def __str__(self) -> str:
        return self.form.to_text()


def _grid(p: int, k: int) -> np.ndarray:
    """All of F_p^k as rows."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    axes = np.meshgrid(*[np.arange(p, dtype=np.int64)] * k, indexing="ij")
    return np.stack([a.ravel() for a in axes], axis=1)


def _projective_points(n: int, p: int) -> np.ndarray:
    """All normalized points of P^{n-1}(F_p) (first non-zero coordinate 1)."""
    blocks = []
    for lead in range(n):
        free = n - lead - 1
        grid = _grid(p, free)
        blk = np.zeros((len(grid), n), dtype=np.int64)
        blk[:, lead] = 1
        blk[:, lead + 1:] = grid
        blocks.append(blk)
    return np.vstack(blocks)


def singular_points_mod_p(S: CubicSurface, p: int) -> np.ndarray:
    """F_p-rational singular points of S mod p, by exhaustive scan."""
    pts = _projective_points(4, p)
    mask = S.form.evaluate_mod_p(pts, p) == 0
    for i in range(4):
        mask &= S.form.partial(i).evaluate_mod_p(pts, p) == 0
    return pts[mask]


def _macaulay_matrix(forms: Sequence[Form], degree: int, p: int) -> np.ndarray:
    target = _monomial_index(4, degree)
    cols = []
    for F in forms:
        exps, vals = F.reduce(p)
        for m in monomials(4, degree - F.degree):
            col = np.zeros(len(target), dtype=np.int64)
            for e, v in zip(exps, vals):
                col[target[tuple(int(a) + b for a, b in zip(e, m))]] += v
            cols.append(col % p)
    return np.array(cols, dtype=np.int64).T


def smoothness_mod_p(S: CubicSurface, p: int) -> bool:
    """True when S mod p is smooth over the algebraic closure of F_p.

    The four partial derivatives have no common zero exactly when they
    generate every form of degree 5, a rank condition on the Macaulay matrix.
    For p = 3 Euler's formula does not put the common zeros of the partials
    on S, so the form itself is added and the test is only sufficient.
    """
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    try:
        forms = [S.form.partial(i) for i in range(4)]
        if p == 3:
            forms.append(S.form)
        if all(not f.reduce(p)[1].size for f in forms):
            return False
        M = _macaulay_matrix(forms, 5, p)
    except ValueError:
        return False
    return _rank_mod_p(M, p) == len(monomials(4, 5))


def count_lines_mod_p(S: CubicSurface, p: int, check: bool = True) -> int:
    """Number of lines of P^3 over F_p contained in S mod p.

    Lines are enumerated through the six row-reduced echelon charts of the
    Grassmannian.  A line spanned by u and v lies on S iff F(u) = F(v) = 0
    and grad F(u).v = grad F(v).u = 0.
    """
    if check and not smoothness_mod_p(S, p):
        raise ValueError(f"S has bad reduction at {p}")
    F = S.form
    grads = [F.partial(i) for i in range(4)]
    total = 0
    for i, j in combinations(range(4), 2):
        free_u = [k for k in range(i + 1, 4) if k != j]
        free_v = list(range(j + 1, 4))
        U = _chart_rows(i, free_u, p)
        V = _chart_rows(j, free_v, p)
        U = U[F.evaluate_mod_p(U, p) == 0]
        V = V[F.evaluate_mod_p(V, p) == 0]
        if not len(U) or not len(V):
            continue
        GU = np.stack([g.evaluate_mod_p(U, p) for g in grads], axis=1)
        GV = np.stack([g.evaluate_mod_p(V, p) for g in grads], axis=1)
        A = (GU @ V.T) % p
        B = (U @ GV.T) % p
        total += int(np.count_nonzero((A == 0) & (B == 0)))
    return total


def _chart_rows(lead: int, free: list[int], p: int) -> np.ndarray:
    grid = _grid(p, len(free))
    rows = np.zeros((len(grid), 4), dtype=np.int64)
    rows[:, lead] = 1
    rows[:, free] = grid
    return rows


@dataclass(frozen=True)
class SurfaceReport:
    """Mod-p evidence about a cubic surface over Q."""

    smooth_certificates: tuple[int, ...]
    bad_primes: tuple[int, ...]
    line_counts: dict[int, int]
    all_primes_have_lines: bool
    counts_in_set: bool | None
    zero_line_prime: int | None

    def to_dict(self) -> dict:
        return {
            "smooth_certificates": list(self.smooth_certificates),
            "bad_primes": list(self.bad_primes),
            "line_counts": {str(p): n for p, n in self.line_counts.items()},
            "all_primes_have_lines": self.all_primes_have_lines,
            "counts_in_set": self.counts_in_set,
            "zero_line_prime": self.zero_line_prime,
        }


def verify_surface(S: CubicSurface, prime_bound: int = 200,
                   allowed_counts: Iterable[int] | None = None,
                   zero_search: int = 25) -> SurfaceReport:
    """Smoothness certificates and line counts at the good primes up to ``prime_bound``.

    ``zero_line_prime`` is the first of the first ``zero_search`` good primes at
    which S has no F_p-line; such a prime rules out a line over Q.
    """
    good, bad = [], []
    counts: dict[int, int] = {}
    for p in sympy.primerange(2, prime_bound + 1):
        if smoothness_mod_p(S, p):
            good.append(p)
            counts[p] = count_lines_mod_p(S, p, check=False)
        else:
            bad.append(p)
    zero = None
    q = prime_bound
    extra = [p for p in good[:zero_search]]
    while len(extra) < zero_search:
        q = int(sympy.nextprime(q))
        if smoothness_mod_p(S, q):
            extra.append(q)
    for p in extra:
        n = counts[p] if p in counts else count_lines_mod_p(S, p, check=False)
        if n == 0:
            zero = p
            break
    allowed = None if allowed_counts is None else set(allowed_counts)
    return SurfaceReport(
        smooth_certificates=tuple(good[:3]),
        bad_primes=tuple(bad),
        line_counts=counts,
        all_primes_have_lines=all(n >= 1 for n in counts.values()),
        counts_in_set=None if allowed is None else set(counts.values()) <= allowed,
        zero_line_prime=zero,
    )


# ---------------------------------------------------------------------------
# the construction pipeline


def z5z4_points(p: int) -> tuple[ClosedPoint, ClosedPoint]:
    """[t : 2 : 1] over Q(sqrt 5) and [t : t^2 : 1] over Q(p^(1/5))."""
    P = ClosedPoint((-5, 0, 1), ((0, 1), (2,), (1,)))
    Q = ClosedPoint((-p, 0, 0, 0, 0, 1), ((0, 1), (0, 0, 1), (1,)))
    return P, Q


@dataclass(frozen=True)
class Construction:
    points: tuple[ClosedPoint, ...]
    general_position: GeneralPositionReport
    cubics: tuple[Form, Form, Form]
    sextic: Form
    model: Dp2Model
    surface: CubicSurface


def _independent_of(span: list[Form], candidates: list[Form]) -> Form:
    base = [list(f.coeffs) for f in span]
    n = len(span[0].coeffs) if span else len(candidates[0].coeffs)
    r = _rank(base, n)
    for c in candidates:
        if _rank(base + [list(c.coeffs)], n) > r:
            return c
    raise ValueError("no candidate outside the span")


def build_cubic(quadratic_point: ClosedPoint, quintic_point: ClosedPoint) -> Construction:
    """Blow up the two closed points and contract the line over the quadratic one."""
    if quadratic_point.degree != 2 or quintic_point.degree != 5:
        raise ValueError("expected closed points of degrees 2 and 5")
    pts = (quadratic_point, quintic_point)
    gp = general_position_mod_p(pts)
    if not gp.general:
        raise ValueError(f"general position not certified: {gp.reason}")
    cubics = forms_through(pts, 3)
    if len(cubics) != 3:
        raise ValueError(f"expected 3 independent cubics, found {len(cubics)}")
    (line,) = forms_through([quadratic_point], 1)
    (conic,) = forms_through([quintic_point], 2)
    c0 = line * conic
    c1 = _independent_of([c0], cubics)
    c2 = _independent_of([c0, c1], cubics)
    sextics = forms_through(pts, 6, order=2)
    products = [a * b for a, b in combinations_with_replacement((c0, c1, c2), 2)]
    s = _independent_of(products, sextics)
    model = dp2_anticanonical_relation((c0, c1, c2), s)
    surface = geiser_contract(model.f2, model.f4)
    return Construction(pts, gp, (c0, c1, c2), s, model, surface)


def counterexample_surface(p: int) -> Construction:
    """The cubic surface built from (x^2 - 5)(x^5 - p) for a prime p = 1 mod 25."""
    if not sympy.isprime(p) or p % 25 != 1:
        raise ValueError(f"{p} is not a prime congruent to 1 mod 25")
    return build_cubic(*z5z4_points(p))


# ---------------------------------------------------------------------------
# conic bundles


def _square_class(q: Fraction) -> int:
    """The square-free integer in the square class of a non-zero rational."""
    if q == 0:
        raise ValueError("zero has no square class")
    n = q.numerator * q.denominator
    sign = -1 if n < 0 else 1
    out = 1
    for prime, e in sympy.factorint(abs(n)).items():
        if e % 2:
            out *= prime
    return sign * out


@dataclass(frozen=True)
class ConicBundleReport:
    """Singular fibres of f x^2 + g y^2 + h z^2 = 0 and their splitting classes."""

    a: Fraction
    b: Fraction
    fibres: dict[int, int]
    labels: dict[int, str]
    split_counts: dict[str, int]
    verified: bool
    local_lines: str | None = None

    def to_dict(self) -> dict:
        return {
            "a": str(self.a), "b": str(self.b),
            "fibres": {str(t): c for t, c in self.fibres.items()},
            "labels": {str(t): s for t, s in self.labels.items()},
            "split_counts": self.split_counts,
            "verified": self.verified,
            "local_lines": self.local_lines,
        }


def verify_conic_bundle_dp2(a, b) -> ConicBundleReport:
    """Check the six singular fibres of the degree 2 conic bundle.

    f = a(t - 13)(2 - t), g = b(t + 14)(3 - t), h = (t + 2)(t - 11).  At a root
    of one coefficient the fibre is a pair of lines defined over the square
    root of minus the product of the other two.
    """
    a, b = Fraction(a), Fraction(b)
    cls = {"a": _square_class(a), "b": _square_class(b), "ab": _square_class(a * b)}
    if 1 in cls.values():
        raise ValueError("a, b and ab must all be non-squares")
    f = lambda t: a * (t - 13) * (2 - t)
    g = lambda t: b * (t + 14) * (3 - t)
    h = lambda t: Fraction((t + 2) * (t - 11))
    fibres: dict[int, int] = {}
    for roots, (u, v) in (((13, 2), (g, h)), ((-14, 3), (f, h)), ((-2, 11), (f, g))):
        for t in roots:
            fibres[t] = _square_class(-u(t) * v(t))
    inv = {c: k for k, c in cls.items()}
    labels = {t: inv.get(c, str(c)) for t, c in fibres.items()}
    counts = {k: sum(1 for s in labels.values() if s == k) for k in ("a", "b", "ab")}
    local = None
    if a.denominator == 1 and b.denominator == 1:
        from .etale import EtaleScheme, GaloisCertificate, hasse_failure_check
        from .etale import v4_on_three_quadratics
        ai, bi = int(a), int(b)
        X = EtaleScheme.of((-ai, 0, 1), (-bi, 0, 1), (-ai * bi, 0, 1))
        local = hasse_failure_check(X, GaloisCertificate.for_scheme(X, v4_on_three_quadratics()),
                                    prime_bound=2_000).status
    return ConicBundleReport(a, b, fibres, labels, counts,
                             verified=all(n == 2 for n in counts.values()), local_lines=local)


def dp1_conic_bundle_g(e: Sequence, lam, a, b) -> tuple[Fraction, ...]:
    """g = lam f + Lagrange interpolation of (1, a, b, ab) at e1..e4.

    f = (t - e1)(t - e2)(t - e3)(t - e4).  Returned constant term first.
    """
    e = [Fraction(x) for x in e]
    if len(e) != 4 or len(set(e)) != 4:
        raise ValueError("four pairwise distinct nodes expected")
    lam, a, b = Fraction(lam), Fraction(a), Fraction(b)
    t = sympy.Symbol("t")
    f = Poly(sympy.prod([t - sympy.Rational(x.numerator, x.denominator) for x in e]), t,
             domain=QQ)
    values = [Fraction(1), a, b, a * b]
    g = f * QQ(lam.numerator, lam.denominator)
    for i in range(4):
        basis = Poly(1, t, domain=QQ)
        for j in range(4):
            if j != i:
                d = e[i] - e[j]
                basis = basis * Poly(t - sympy.Rational(e[j].numerator, e[j].denominator), t,
                                     domain=QQ) * QQ(d.denominator, d.numerator)
        g = g + basis * QQ(values[i].numerator, values[i].denominator)
    out = tuple(_frac(c) for c in g.all_coeffs()[::-1])
    for x, v in zip(e, values):
        got = sum(c * x ** k for k, c in enumerate(out))
        if got != v:
            raise AssertionError("interpolation identity failed")
    if len(out) > 5:
        raise AssertionError("degree of g exceeds 4")
    return out


# ---------------------------------------------------------------------------
# pencils of quadrics


@dataclass(frozen=True)
class PencilDiscriminant:
    """det(lam Q1 + mu Q2) = sum c_k lam^k mu^(N-k), coefficients c_0..c_N."""

    coeffs: tuple[Fraction, ...]
    degree: int
    separable: bool

    def as_expr(self):
        lam, mu = symbols("lam mu")
        return sum(sympy.Rational(c.numerator, c.denominator) * lam ** k * mu ** (self.degree - k)
                   for k, c in enumerate(self.coeffs))


def pencil_discriminant(Q1, Q2) -> PencilDiscriminant:
    """The binary form det(lam Q1 + mu Q2) and whether it has distinct roots on P^1.

    A drop in degree in lam counts as a root at mu = 0.
    """
    A = [[Fraction(x) for x in row] for row in Q1]
    B = [[Fraction(x) for x in row] for row in Q2]
    N = len(A)
    for M in (A, B):
        if len(M) != N or any(len(r) != N for r in M):
            raise ValueError("matrices must be square of the same size")
        if any(M[i][j] != M[j][i] for i in range(N) for j in range(N)):
            raise ValueError("matrices must be symmetric")
    if N < 3 or N % 2 == 0:
        raise ValueError("size must be odd and at least 3")
    # interpolate P(lam) = det(lam A + B) at N + 1 points
    xs = list(range(N + 1))
    ys = []
    for x in xs:
        rows = [[A[i][j] * x + B[i][j] for j in range(N)] for i in range(N)]
        ys.append(_frac(_dm(rows, N).det()))
    t = sympy.Symbol("t")
    P = Poly(sympy.interpolate(list(zip(xs, [sympy.Rational(y.numerator, y.denominator)
                                             for y in ys])), t), t, domain=QQ)
    cs = [_frac(c) for c in P.all_coeffs()[::-1]] if not P.is_zero else []
    cs += [Fraction(0)] * (N + 1 - len(cs))
    if P.is_zero:
        separable = False
    else:
        drop = N - P.degree()
        sqfree = P.degree() < 1 or sympy.gcd(P, P.diff(t)).degree() == 0
        separable = drop <= 1 and sqfree
    return PencilDiscriminant(tuple(cs), N, separable)
