"""Slow, independent reference implementations used only by the tests.

Prime fields only: polynomials are little-endian lists of ints mod p with
no trailing zeros.  Nothing here imports the package.
"""
from __future__ import annotations

import itertools
from fractions import Fraction


def trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def padd(a, b, p):
    n = max(len(a), len(b))
    return trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n)])


def pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return trim(out)


def pdivmod(a, b, p):
    a = trim(a)
    b = trim(b)
    inv = pow(b[-1], p - 2, p)
    q = [0] * max(0, len(a) - len(b) + 1)
    a = list(a)
    while len(a) >= len(b) and a:
        c = a[-1] * inv % p
        s = len(a) - len(b)
        q[s] = c
        for i, y in enumerate(b):
            a[s + i] = (a[s + i] - c * y) % p
        a = trim(a)
    return trim(q), a


def monic_polys(p, n):
    for tail in itertools.product(range(p), repeat=n):
        yield list(tail) + [1]


def is_irreducible(f, p):
    f = trim(f)
    n = len(f) - 1
    if n < 1:
        return False
    for k in range(1, n // 2 + 1):
        for g in monic_polys(p, k):
            if not pdivmod(f, g, p)[1]:
                return False
    return True


def monic_irreducibles(p, n):
    return [f for f in monic_polys(p, n) if is_irreducible(f, p)]


def valuation(f, g, p):
    f = trim(f)
    v = 0
    while True:
        quo, rem = pdivmod(f, g, p)
        if rem:
            return v
        f, v = quo, v + 1


def eisenstein_at(lower, lead, P, p):
    """Literal check of the Eisenstein conditions on numerators at P."""
    for i, h in enumerate(lower):
        h = trim(h)
        if not h:
            if i == 0:
                return False
            continue
        v = valuation(h, P, p)
        if v < 1 or (i == 0 and v != 1):
            return False
    if lead is not None:
        lead = trim(lead)
        return bool(lead) and valuation(lead, P, p) == 0
    return True


def eisenstein_places(lower, lead, p, excluded=()):
    """Scan every place up to the degree of h_0."""
    h0 = trim(lower[0])
    if not h0:
        raise ValueError("h0 = 0")
    out = []
    for n in range(1, len(h0)):
        for P in monic_irreducibles(p, n):
            if P in [list(e) for e in excluded]:
                continue
            if eisenstein_at(lower, lead, P, p):
                out.append(P)
    return out


def box(p, ell):
    """Every numerator vector of a Riemann-Roch box, last index fastest."""
    return [list(v) for v in itertools.product(range(p), repeat=ell)]


def not_eisenstein_fraction(p, ell, d, kind, T):
    """Brute-force fraction of tuples Eisenstein at no place of T."""
    elems = box(p, ell)
    arity = d + 1 if kind == "general" else d
    good = total = 0
    for tup in itertools.product(elems, repeat=arity):
        lower = tup[:d]
        lead = tup[d] if kind == "general" else None
        total += 1
        if not any(eisenstein_at(lower, lead, P, p) for P in T):
            good += 1
    return Fraction(good, total)


def local_factor(q, d, n, kind):
    if kind == "monic":
        return 1 - Fraction(q**n - 1, q ** ((d + 1) * n))
    return 1 - Fraction((q**n - 1) ** 2, q ** ((d + 2) * n))


def per_place_product(q, d, kind, degrees):
    out = Fraction(1)
    for n in degrees:
        out *= local_factor(q, d, n, kind)
    return out
