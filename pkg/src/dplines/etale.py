"""Finite etale Q-schemes given by monic integer polynomials, and local solubility.

Polynomials are passed around as integer coefficient tuples with the constant
term first, e.g. ``(-2, 0, 1)`` for x^2 - 2.  sympy supplies the polynomial
arithmetic (discriminants, factorization over F_p, real root isolation); the
p-adic root tree, the Dedekind test and the Hasse-principle check live here.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, gcd, isqrt
from typing import Iterable, Sequence, Union

import sympy
from sympy import ZZ, Poly, Symbol
from sympy.polys import galoistools as gf

from ._gfp import MAX_PRIME, factor_degrees
from .permgrp import PermutationGroup

__all__ = [
    "Coeffs",
    "EtaleScheme",
    "GaloisCertificate",
    "SolubilityVerdict",
    "DiscriminantReport",
    "HasseVerdict",
    "CertificateError",
    "NOT_MONOGENIC",
    "coeffs",
    "qp_soluble",
    "real_soluble",
    "frobenius_cycle_type",
    "rational_points",
    "poly_discriminant",
    "is_irreducible",
    "dedekind_factorization_shape",
    "pair_sum_resolvent",
    "hasse_failure_check",
    "biquadratic_scheme",
]

Coeffs = tuple[int, ...]
PolyLike = Union[Sequence[int], Poly, sympy.Expr]

X = Symbol("x")
NOT_MONOGENIC = "non-monogenic at p"
DEFAULT_PRIME_BOUND = 10_000


class CertificateError(ValueError):
    """A sampled Frobenius cycle type does not occur in the certificate group."""


def coeffs(f: PolyLike) -> Coeffs:
    """Normalize to an integer coefficient tuple, constant term first."""
    if isinstance(f, Poly):
        c = [int(a) for a in reversed(f.all_coeffs())]
    elif isinstance(f, sympy.Expr):
        c = [int(a) for a in reversed(Poly(f, X).all_coeffs())]
    else:
        c = [int(a) for a in f]
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return tuple(c)


def _poly(f: Coeffs) -> Poly:
    return Poly(list(reversed(f)), X, domain=ZZ)


def _hi(f: Coeffs) -> list[int]:
    return list(reversed(f))


def _evaluate(f: Coeffs, x: int) -> int:
    acc = 0
    for a in reversed(f):
        acc = acc * x + a
    return acc


def _derivative(f: Coeffs) -> Coeffs:
    return tuple(i * a for i, a in enumerate(f))[1:] or (0,)


def _vp(n: int, p: int) -> int | float:
    if n == 0:
        return float("inf")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _require_monic(f: Coeffs) -> None:
    if len(f) < 2 or f[-1] != 1:
        raise ValueError(f"polynomial {f} is not monic of positive degree")


def to_expr(f: Coeffs) -> sympy.Expr:
    return _poly(f).as_expr()


# -- schemes and certificates --------------------------------------------------


@dataclass(frozen=True)
class EtaleScheme:
    """Spec of a product of number fields, one monic square-free polynomial each."""

    polys: tuple[Coeffs, ...]

    def __post_init__(self):
        norm = tuple(coeffs(f) for f in self.polys)
        for f in norm:
            _require_monic(f)
            if _poly(f).gcd(_poly(f).diff(X)).degree() > 0:
                raise ValueError(f"polynomial {f} is not square-free")
        object.__setattr__(self, "polys", norm)

    @classmethod
    def of(cls, *polys: PolyLike) -> "EtaleScheme":
        return cls(tuple(coeffs(f) for f in polys))

    @property
    def degree(self) -> int:
        return sum(len(f) - 1 for f in self.polys)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(f) - 1 for f in self.polys)

    def to_text(self) -> str:
        return "".join(" ".join(map(str, f)) + "\n" for f in self.polys)

    @classmethod
    def from_text(cls, text: str) -> "EtaleScheme":
        return cls(tuple(tuple(int(a) for a in line.split())
                         for line in text.splitlines() if line.strip()))

    def discriminant_primes(self) -> frozenset[int]:
        primes: set[int] = set()
        for f in self.polys:
            primes.update(_prime_divisors(abs(_discriminant(f))))
        return frozenset(primes)


def _prime_divisors(n: int) -> list[int]:
    if n in (0, 1):
        return []
    return sorted(sympy.factorint(n))


@dataclass(frozen=True)
class GaloisCertificate:
    """A group acting on the roots of a scheme, component by component.

    Points 0..deg(f_1)-1 are the roots of the first polynomial, the next
    deg(f_2) points those of the second, and so on.
    """

    group: PermutationGroup
    ramified_primes: frozenset[int]

    @classmethod
    def for_scheme(cls, scheme: EtaleScheme, group: PermutationGroup) -> "GaloisCertificate":
        if group.degree != scheme.degree:
            raise ValueError("certificate degree differs from the scheme degree")
        return cls(group, scheme.discriminant_primes())

    @lru_cache(maxsize=None)
    def component_cycle_types(self, degrees: tuple[int, ...]) -> frozenset:
        """Per-component cycle types of all group elements."""
        cuts = [0]
        for d in degrees:
            cuts.append(cuts[-1] + d)
        out = set()
        for g in self.group.elements():
            out.add(tuple(_restricted_cycle_type(g.images, cuts[i], cuts[i + 1])
                          for i in range(len(degrees))))
        return frozenset(out)

    def __hash__(self) -> int:
        return hash((self.group.degree, self.group.generators, self.ramified_primes))


def _restricted_cycle_type(images: Sequence[int], lo: int, hi: int) -> tuple[int, ...]:
    seen, out = set(), []
    for i in range(lo, hi):
        if i in seen:
            continue
        n, j = 0, i
        while j not in seen:
            seen.add(j)
            j = images[j]
            n += 1
        out.append(n)
    return tuple(sorted(out))


@dataclass(frozen=True)
class SolubilityVerdict:
    """Whether a component has a point over Q_p (``place`` = p) or over R."""

    place: int | str
    soluble: bool
    witness: dict | None = None

    def to_dict(self) -> dict:
        return {"place": self.place, "soluble": self.soluble, "witness": self.witness}


# -- local solubility -------------------------------------------------------------


def _roots_mod_p(f: Coeffs, p: int) -> list[int]:
    """Roots in F_p of f mod p (f need not be monic)."""
    h = gf.gf_from_int_poly(_hi(f), p)
    if not h:
        raise ValueError("polynomial vanishes identically mod p")
    if len(h) == 1:
        return []
    if p < 64:
        return [r for r in range(p) if gf.gf_eval(h, r, p, ZZ) == 0]
    h = gf.gf_monic(h, p, ZZ)[1]
    xp = gf.gf_pow_mod([1, 0], p, h, p, ZZ)
    lin = gf.gf_gcd(h, gf.gf_sub(xp, [1, 0], p, ZZ), p, ZZ)
    if len(lin) <= 1:
        return []
    roots = []
    for fac in gf.gf_factor_sqf(lin, p, ZZ)[1]:
        roots.append((-fac[1]) % p)
    return sorted(roots)


def _substitute(f: Coeffs, r: int, p: int) -> Coeffs:
    """Coefficients of f(r + p*y) in y."""
    out = [0] * len(f)
    # Horner in the polynomial ring: acc = acc*(r + p y) + a
    for a in reversed(f):
        new = [0] * len(f)
        for i, c in enumerate(out):
            if c:
                new[i] += c * r
                if i + 1 < len(f):
                    new[i + 1] += c * p
        new[0] += a
        out = new
    return tuple(out)


def _content_strip(f: Coeffs, p: int) -> Coeffs:
    v = min(_vp(a, p) for a in f if a != 0)
    return tuple(a // p ** v for a in f)


def _hensel(f: Coeffs, r: int, p: int, k: int) -> int:
    """Lift a simple root r of f mod p to a root mod p^k."""
    df = _derivative(f)
    mod = p
    while mod < p ** k:
        mod = min(mod * mod, p ** k)
        r = (r - _evaluate(f, r) * pow(_evaluate(df, r), -1, mod)) % mod
    return r % p ** k


def _padic_root(f: Coeffs, p: int, depth: int, limit: int, lift: int) -> int | None:
    """A p-adic integer root of f (mod p^lift), or None if there is none."""
    if depth > limit:
        raise RuntimeError("p-adic root tree exceeded its depth bound")
    df = _derivative(f)
    for r in _roots_mod_p(f, p):
        if _evaluate(df, r) % p:
            return _hensel(f, r, p, lift)
        g = _content_strip(_substitute(f, r, p), p)
        y = _padic_root(g, p, depth + 1, limit, lift)
        if y is not None:
            return r + p * y
    return None


def qp_soluble(f: PolyLike, p: int, precision: int = 20) -> SolubilityVerdict:
    """Decide whether the monic polynomial f has a root in Q_p.

    The witness is an integer r with f(r) = 0 mod p^N and N > 2 v_p(f'(r)),
    where N is at least ``precision`` (raised when needed), so Hensel's lemma
    produces an actual root near r.
    """
    f = coeffs(f)
    _require_monic(f)
    if precision < 1:
        raise ValueError("precision must be positive")
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    disc = _discriminant(f)
    if disc == 0:
        raise ValueError("polynomial is not square-free")
    limit = int(_vp(disc, p)) + 1
    lift = precision + 2 * limit + 2
    r = _padic_root(f, p, 0, limit, lift)
    if r is None:
        return SolubilityVerdict(p, False, None)
    r %= p ** lift
    v_df = _vp(_evaluate(_derivative(f), r), p)
    N = max(precision, 2 * int(v_df) + 1)
    if N > lift or _evaluate(f, r) % p ** N:
        raise RuntimeError("internal error: p-adic witness failed its check")
    r = int(r % p ** N)
    return SolubilityVerdict(p, True, {"root": r, "modulus": f"{p}^{N}", "precision": N,
                                       "v_p(f'(r))": int(v_df)})


def real_soluble(f: PolyLike) -> SolubilityVerdict:
    """Existence of a real root, witnessed by an isolating interval."""
    f = coeffs(f)
    if all(a == 0 for a in f):
        raise ValueError("zero polynomial")
    ivs = _poly(f).intervals()
    if not ivs:
        return SolubilityVerdict("real", False, None)
    (lo, hi), _ = ivs[0]
    return SolubilityVerdict("real", True, {"interval": [str(lo), str(hi)]})


# -- arithmetic over F_p and Q -----------------------------------------------------


@lru_cache(maxsize=256)
def _discriminant(f: Coeffs) -> int:
    return int(sympy.discriminant(_poly(f)))


def frobenius_cycle_type(f: PolyLike, p: int) -> tuple[int, ...]:
    """Degrees of the irreducible factors of f mod p, for p not dividing disc(f)."""
    f = coeffs(f)
    _require_monic(f)
    if _discriminant(f) % p == 0:
        raise ValueError(f"{p} divides the discriminant")
    if p < MAX_PRIME:
        return factor_degrees(list(f), p)
    h = gf.gf_from_int_poly(_hi(f), p)
    out: list[int] = []
    for fac, d in gf.gf_ddf_zassenhaus(h, p, ZZ):
        out.extend([d] * ((len(fac) - 1) // d))
    return tuple(sorted(out))


def rational_points(X: EtaleScheme | Sequence[PolyLike]) -> list[tuple[int, int]]:
    """All rational roots, as (component index, root); monic forces them to be integers."""
    polys = X.polys if isinstance(X, EtaleScheme) else tuple(coeffs(f) for f in X)
    out = []
    for i, f in enumerate(polys):
        for r in sorted(_poly(f).ground_roots()):
            out.append((i, int(r)))
    return out


@dataclass(frozen=True)
class DiscriminantReport:
    value: int
    squarefree: bool
    certainty: str
    factors: dict[int, int] = field(default_factory=dict)


def poly_discriminant(f: PolyLike, trial_bound: int = 10_000) -> DiscriminantReport:
    """Exact discriminant, with a square-free test on its absolute value.

    Small primes are removed by trial division.  The cofactor is certified
    when it is 1, a prime, a product of two distinct primes above the trial
    bound, or small enough to factor completely; otherwise the answer is
    reported as "probable".
    """
    f = coeffs(f)
    D = _discriminant(f)
    n = abs(D)
    factors: dict[int, int] = {}
    for p in sympy.primerange(2, trial_bound + 1):
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
        if n == 1:
            break
    certainty = "certified"
    if n > 1:
        if sympy.isprime(n) and n < 2 ** 64:
            factors[n] = 1
        elif isqrt(n) ** 2 == n:
            factors[isqrt(n)] = 2
        elif n < trial_bound ** 3:
            # composite, not a square, no prime factor below the bound: p*q with p != q
            factors[n] = 1
        elif n < 10 ** 30:
            for q, e in sympy.factorint(n).items():
                factors[q] = factors.get(q, 0) + e
        else:
            certainty = "probable"
            factors[n] = 1
    sqfree = all(e == 1 for e in factors.values())
    return DiscriminantReport(D, sqfree, certainty, dict(sorted(factors.items())))


def is_irreducible(f: PolyLike) -> bool:
    return _poly(coeffs(f)).is_irreducible


def dedekind_factorization_shape(f: PolyLike, p: int):
    """Shape of pO_K as sorted (e, f) pairs, when Z[theta] is p-maximal.

    Returns NOT_MONOGENIC when Dedekind's criterion fails at p.
    """
    f = coeffs(f)
    _require_monic(f)
    if not is_irreducible(f):
        raise ValueError("polynomial is reducible over Q")
    h = gf.gf_from_int_poly(_hi(f), p)
    _, facs = gf.gf_factor(h, p, ZZ)
    g_bar = [1]
    h_bar = [1]
    for fac, e in facs:
        g_bar = gf.gf_mul(g_bar, fac, p, ZZ)
        h_bar = gf.gf_mul(h_bar, gf.gf_pow(fac, e - 1, p, ZZ), p, ZZ)
    lift = lambda c: Poly([int(a) for a in c], X, domain=ZZ)
    gh = lift(g_bar) * lift(h_bar)
    F = (gh - _poly(f))
    Fc = [int(a) for a in F.all_coeffs()]
    if any(a % p for a in Fc):
        raise RuntimeError("internal error: lifted factorization is not congruent to f")
    F_bar = gf.gf_from_int_poly([a // p for a in Fc], p)
    d = gf.gf_gcd(gf.gf_gcd(F_bar, g_bar, p, ZZ), h_bar, p, ZZ)
    if len(d) > 1:
        return NOT_MONOGENIC
    return sorted((e, len(fac) - 1) for fac, e in facs)


def _power_sums(f: Coeffs, k_max: int) -> list:
    """Power sums P_0..P_kmax of the roots of monic f (Newton's identities)."""
    n = len(f) - 1
    e = [1] + [(-1) ** k * f[n - k] for k in range(1, n + 1)]
    P = [n]
    for k in range(1, k_max + 1):
        s = (-1) ** (k - 1) * k * e[k] if k <= n else 0
        for i in range(1, k):
            if i <= n:
                s += (-1) ** (i - 1) * e[i] * P[k - i]
        P.append(s)
    return P


def _from_power_sums(P: list, m: int) -> Coeffs:
    """Monic polynomial of degree m with the given power sums of its roots."""
    e = [sympy.Integer(1)]
    for k in range(1, m + 1):
        s = sum((-1) ** (i - 1) * e[k - i] * P[i] for i in range(1, k + 1))
        e.append(sympy.Rational(s, k))
    c = [(-1) ** k * e[k] for k in range(m + 1)]
    if any(not x.is_integer for x in c):
        raise RuntimeError("resolvent coefficients are not integral")
    return tuple(int(c[m - i]) for i in range(m + 1))


def pair_sum_resolvent(f: PolyLike) -> Coeffs:
    """The polynomial whose roots are theta_i + theta_j over pairs i < j."""
    f = coeffs(f)
    _require_monic(f)
    n = len(f) - 1
    m = comb(n, 2)
    P = _power_sums(f, m)
    Q = [m]
    for k in range(1, m + 1):
        tot = sum(comb(k, j) * (P[j] * P[k - j] - P[k]) for j in range(k + 1))
        Q.append(tot // 2)
    return _from_power_sums(Q, m)


# -- the Hasse principle -----------------------------------------------------------


@dataclass
class HasseVerdict:
    """Outcome of :func:`hasse_failure_check`.

    ``status`` is "fails_HP", "has_rational_point" or "locally_insoluble";
    ``place`` names the offending place for the last one.
    """

    status: str
    place: int | str | None = None
    rational_points: list = field(default_factory=list)
    fixed_point_free_elements: int = 0
    ramified: dict = field(default_factory=dict)
    real: dict | None = None
    primes_sampled: int = 0
    prime_bound: int = 0
    observed_cycle_types: int = 0
    group_cycle_types: int = 0
    rootless_primes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "place": self.place,
            "rational_points": self.rational_points,
            "fixed_point_free_elements": self.fixed_point_free_elements,
            "ramified": {str(k): v for k, v in sorted(self.ramified.items())},
            "real": self.real,
            "primes_sampled": self.primes_sampled,
            "prime_bound": self.prime_bound,
            "observed_cycle_types": self.observed_cycle_types,
            "group_cycle_types": self.group_cycle_types,
            "rootless_primes": self.rootless_primes[:20],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def hasse_failure_check(X: EtaleScheme, cert: GaloisCertificate,
                        prime_bound: int = DEFAULT_PRIME_BOUND) -> HasseVerdict:
    """Decide whether X has points everywhere locally but no rational point.

    Unramified places are covered by the certificate: every element of the
    group fixes a root.  Ramified primes and the real place are checked
    directly.  Frobenius cycle types at primes up to ``prime_bound`` are
    compared with the certificate group.
    """
    if cert.group.degree != X.degree:
        raise ValueError("certificate degree differs from the scheme degree")
    missing = X.discriminant_primes() - cert.ramified_primes
    if missing:
        raise ValueError(f"certificate omits ramified primes {sorted(missing)}")

    allowed = cert.component_cycle_types(X.degrees)
    observed: set = set()
    rootless: list[int] = []
    sampled = 0
    bad = cert.ramified_primes
    for p in sympy.primerange(2, prime_bound + 1):
        if p in bad:
            continue
        try:
            ct = tuple(frobenius_cycle_type(f, p) for f in X.polys)
        except ValueError:
            continue
        sampled += 1
        if ct not in allowed:
            raise CertificateError(f"Frobenius cycle type {ct} at p={p} is not in the group")
        observed.add(ct)
        if not any(1 in c for c in ct):
            rootless.append(p)

    fpf = sum(1 for g in cert.group.elements() if not g.fixed_points())
    verdict = HasseVerdict(status="fails_HP", prime_bound=prime_bound, primes_sampled=sampled,
                           observed_cycle_types=len(observed), group_cycle_types=len(allowed),
                           fixed_point_free_elements=fpf, rootless_primes=rootless)
    verdict.rational_points = rational_points(X)
    if verdict.rational_points:
        verdict.status = "has_rational_point"
        return verdict
    for p in sorted(cert.ramified_primes):
        local = [qp_soluble(f, p) for f in X.polys]
        ok = next((v for v in local if v.soluble), None)
        verdict.ramified[p] = ok.witness if ok else None
        if ok is None:
            verdict.status, verdict.place = "locally_insoluble", p
            return verdict
    real = next((v for v in map(real_soluble, X.polys) if v.soluble), None)
    verdict.real = real.witness if real else None
    if real is None:
        verdict.status, verdict.place = "locally_insoluble", "real"
        return verdict
    if fpf:
        verdict.status = "locally_insoluble"
        verdict.place = rootless[0] if rootless else None
    return verdict


def biquadratic_scheme(p: int, q: int, prime_bound: int = DEFAULT_PRIME_BOUND
                       ) -> tuple[EtaleScheme, HasseVerdict]:
    """(x^2 - p)(x^2 - q)(x^2 - pq) for primes p = 1 mod 8 and q = 1 mod p."""
    if not (sympy.isprime(p) and sympy.isprime(q)):
        raise ValueError("p and q must be prime")
    if p % 8 != 1:
        raise ValueError(f"{p} is not 1 mod 8")
    if q % p != 1:
        raise ValueError(f"{q} is not 1 mod {p}")
    return _biquadratic(p, q, p * q, prime_bound)


def _biquadratic(a: int, b: int, c: int, prime_bound: int) -> tuple[EtaleScheme, HasseVerdict]:
    X = EtaleScheme.of((-a, 0, 1), (-b, 0, 1), (-c, 0, 1))
    cert = GaloisCertificate.for_scheme(X, v4_on_three_quadratics())
    return X, hasse_failure_check(X, cert, prime_bound)


def v4_on_three_quadratics() -> PermutationGroup:
    from .permgrp import Permutation

    return PermutationGroup([Permutation.from_cycles(6, (0, 1), (4, 5)),
                             Permutation.from_cycles(6, (2, 3), (4, 5))])


def observed_types(X: EtaleScheme, primes: Iterable[int]) -> Counter:
    """Frobenius cycle types of the scheme at the given primes (skipping bad ones)."""
    out: Counter = Counter()
    for p in primes:
        try:
            out[tuple(frobenius_cycle_type(f, p) for f in X.polys)] += 1
        except ValueError:
            continue
    return out
