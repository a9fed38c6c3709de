"""Named etale schemes with their Galois certificates.

Each certificate is the Galois group of the splitting field acting on the
roots of the scheme, component by component.  The actions are written down
from the structure of the fields:

* V4 on (x^2 - 2)(x^2 - 17)(x^2 - 34): independent sign changes of sqrt 2 and
  sqrt 17.
* A4 on a quartic with square discriminant plus its pair-sum resolvent.
* D5 on a quintic with discriminant 47^2 plus the quadratic field Q(sqrt -47).
* S5 on a quintic of prime discriminant, its quadratic subfield and the
  pair-sum resolvent.
* Z/5 x| Z/4 on (x^2 - 5)(x^5 - p): x -> x + 1 and x -> 2x on the indices of
  the roots zeta^i p^(1/5); the second one moves sqrt 5 to -sqrt 5.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .etale import EtaleScheme, GaloisCertificate, pair_sum_resolvent
from .permgrp import Permutation, PermutationGroup

__all__ = ["NamedExample", "EXAMPLE_IDS", "named_example", "z5z4_scheme", "action_on"]

A4_QUARTIC = (9, 2, -7, -1, 1)
D5_QUINTIC = (1, 0, -1, 2, -2, 1)
D5_QUADRATIC = (12, -1, 1)
S5_QUINTIC = (-1, 2, 5, -5, -1, 1)
S5_QUADRATIC = (-25458, -1, 1)

EXAMPLE_IDS = ("biquadratic-2-17-34", "a4-163", "d5-47", "s5-101833", "z5z4-101", "cubic-1-2")


@dataclass(frozen=True)
class NamedExample:
    key: str
    scheme: EtaleScheme
    certificate: GaloisCertificate
    group_name: str
    shape_prime: int | None = None
    shape_poly: tuple[int, ...] | None = None


def action_on(perms: list[tuple[int, ...]], n: int, quadratic=None, roots: bool = True,
              pairs: bool = False) -> PermutationGroup:
    """A subgroup of S_n acting on up to three blocks of points.

    The blocks are two points swapped by the elements where ``quadratic``
    returns 1 (the roots of the quadratic subfield), the n roots, and the
    unordered pairs of roots.
    """
    pair_list = list(combinations(range(n), 2))
    pair_index = {p: i for i, p in enumerate(pair_list)}
    gens = []
    for g in perms:
        img: list[int] = []
        off = 0
        if quadratic is not None:
            img += [1, 0] if quadratic(g) else [0, 1]
            off = 2
        if roots:
            img += [off + g[i] for i in range(n)]
            off += n
        if pairs:
            for a, b in pair_list:
                img.append(off + pair_index[tuple(sorted((g[a], g[b])))])
        gens.append(Permutation(img))
    return PermutationGroup(gens)


def _parity(g: tuple[int, ...]) -> int:
    return sum(len(c) - 1 for c in Permutation(g).cycles()) % 2


def _reflection(g: tuple[int, ...]) -> int:
    """1 for the maps i -> b - i of Z/n, 0 for rotations."""
    return int((g[1] - g[0]) % len(g) == len(g) - 1)


def z5z4_scheme(p: int) -> tuple[EtaleScheme, GaloisCertificate]:
    """(x^2 - 5)(x^5 - p) with the Frobenius group of order 20."""
    X = EtaleScheme.of((-5, 0, 1), (-p, 0, 0, 0, 0, 1))
    sigma = Permutation([0, 1] + [2 + (i + 1) % 5 for i in range(5)])
    tau = Permutation([1, 0] + [2 + (2 * i) % 5 for i in range(5)])
    return X, GaloisCertificate.for_scheme(X, PermutationGroup([sigma, tau]))


def named_example(key: str) -> NamedExample:
    if key == "biquadratic-2-17-34":
        X = EtaleScheme.of((-2, 0, 1), (-17, 0, 1), (-34, 0, 1))
        G = PermutationGroup([Permutation.from_cycles(6, (0, 1), (4, 5)),
                              Permutation.from_cycles(6, (2, 3), (4, 5))])
        return NamedExample(key, X, GaloisCertificate.for_scheme(X, G), "V4")
    if key == "a4-163":
        X = EtaleScheme.of(A4_QUARTIC, pair_sum_resolvent(A4_QUARTIC))
        G = action_on([(1, 2, 0, 3), (1, 0, 3, 2)], 4, pairs=True)
        return NamedExample(key, X, GaloisCertificate.for_scheme(X, G), "A4",
                            shape_prime=163, shape_poly=A4_QUARTIC)
    if key == "d5-47":
        X = EtaleScheme.of(D5_QUADRATIC, D5_QUINTIC)
        G = action_on([(1, 2, 3, 4, 0), (0, 4, 3, 2, 1)], 5, quadratic=_reflection)
        return NamedExample(key, X, GaloisCertificate.for_scheme(X, G), "D5",
                            shape_prime=47, shape_poly=D5_QUINTIC)
    if key == "s5-101833":
        X = EtaleScheme.of(S5_QUADRATIC, S5_QUINTIC, pair_sum_resolvent(S5_QUINTIC))
        G = action_on([(1, 2, 3, 4, 0), (1, 0, 2, 3, 4)], 5, quadratic=_parity, pairs=True)
        return NamedExample(key, X, GaloisCertificate.for_scheme(X, G), "S5")
    if key == "z5z4-101":
        X, cert = z5z4_scheme(101)
        return NamedExample(key, X, cert, "Z/5 x| Z/4")
    raise KeyError(f"unknown example {key!r}; choose from {', '.join(EXAMPLE_IDS)}")

