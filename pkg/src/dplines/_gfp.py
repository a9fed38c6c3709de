"""Distinct-degree factorization over F_p for small p, compiled with numba.

Polynomials are int64 arrays, constant term first, with the degree carried
separately so that arrays never need resizing.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# p^2 * (degree + 1) must stay below 2^63
MAX_PRIME = 1 << 28


@njit(cache=True)
def _inv(a, p):
    r = 1
    e = p - 2
    a %= p
    while e:
        if e & 1:
            r = r * a % p
        a = a * a % p
        e >>= 1
    return r


@njit(cache=True)
def _deg(a, d):
    while d >= 0 and a[d] == 0:
        d -= 1
    return d


@njit(cache=True)
def _rem(a, da, b, db, p):
    """a mod b in place; returns the new degree of a.  b must be non-zero."""
    inv = _inv(b[db], p)
    da = _deg(a, da)
    while da >= db:
        c = a[da] * inv % p
        s = da - db
        for i in range(db + 1):
            a[s + i] = (a[s + i] - c * b[i]) % p
        da = _deg(a, da - 1)
    return da


@njit(cache=True)
def _mulmod(a, da, b, db, m, dm, p, buf):
    for i in range(da + db + 1):
        buf[i] = 0
    for i in range(da + 1):
        if a[i]:
            for j in range(db + 1):
                buf[i + j] = (buf[i + j] + a[i] * b[j]) % p
    return _rem(buf, da + db, m, dm, p)


@njit(cache=True)
def _powmod(a, da, e, m, dm, p):
    n = 2 * dm + 2
    r = np.zeros(n, np.int64)
    r[0] = 1
    dr = 0
    base = np.zeros(n, np.int64)
    base[:da + 1] = a[:da + 1]
    db = _rem(base, da, m, dm, p)
    buf = np.zeros(n, np.int64)
    while e:
        if e & 1:
            d = _mulmod(r, dr, base, db, m, dm, p, buf)
            r[:] = 0
            r[:max(d, 0) + 1] = buf[:max(d, 0) + 1]
            dr = d
        e >>= 1
        if e:
            d = _mulmod(base, db, base, db, m, dm, p, buf)
            base[:] = 0
            base[:max(d, 0) + 1] = buf[:max(d, 0) + 1]
            db = d
    return r, dr


@njit(cache=True)
def _gcd(a, da, b, db, p):
    a = a.copy()
    b = b.copy()
    da = _deg(a, da)
    db = _deg(b, db)
    while db >= 0:
        da = _rem(a, da, b, db, p)
        a, b = b, a
        da, db = db, da
    inv = _inv(a[da], p)
    for i in range(da + 1):
        a[i] = a[i] * inv % p
    return a, da


@njit(cache=True)
def _divexact(a, da, b, db, p):
    q = np.zeros(da + 1, np.int64)
    a = a.copy()
    inv = _inv(b[db], p)
    for k in range(da - db, -1, -1):
        c = a[k + db] * inv % p
        q[k] = c
        for i in range(db + 1):
            a[k + i] = (a[k + i] - c * b[i]) % p
    return q, da - db


@njit(cache=True)
def ddf_degrees(f, p):
    """Counts of irreducible factors by degree for a square-free f mod p.

    Returns an array c with c[i] the number of factors of degree i.
    """
    n = len(f) - 1
    g = np.zeros(n + 1, np.int64)
    for i in range(n + 1):
        g[i] = f[i] % p
    dg = _deg(g, n)
    counts = np.zeros(n + 1, np.int64)
    h = np.zeros(2 * n + 2, np.int64)
    h[1] = 1
    dh = 1
    i = 1
    while dg >= 2 * i:
        h, dh = _powmod(h, dh, p, g, dg, p)
        t = h.copy()
        if dh < 1:
            dt = 1
        else:
            dt = dh
        t[1] = (t[1] - 1) % p
        dt = _deg(t, dt)
        d, dd = _gcd(g, dg, t, dt, p)
        if dd > 0:
            counts[i] += dd // i
            q, dq = _divexact(g, dg, d, dd, p)
            g = np.zeros(n + 1, np.int64)
            g[:dq + 1] = q[:dq + 1]
            dg = dq
            hh = np.zeros(2 * n + 2, np.int64)
            hh[:max(dh, 0) + 1] = h[:max(dh, 0) + 1]
            dh = _rem(hh, dh, g, dg, p)
            h = hh
        i += 1
    if dg > 0:
        counts[dg] += 1
    return counts


def factor_degrees(f_low: list[int], p: int) -> tuple[int, ...]:
    c = ddf_degrees(np.asarray(f_low, dtype=np.int64) % p, p)
    return tuple(d for d in range(1, len(c)) for _ in range(int(c[d])))
