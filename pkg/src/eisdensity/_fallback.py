"""Pure-Python versions of the compiled kernels.

These are the reference semantics; ``_kernels.pyx`` must agree with them
bit for bit.  They are used when the extension is not built, when q is too
large for the kernel tables, or when forced via ``EISDENSITY_PURE=1``.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .gf import TABLE_MAX_Q, FieldCtx
from .polyring import Poly, gcd


def coprime_part(k: Poly, b: Poly) -> Poly:
    """Remove from k every irreducible factor it shares with b."""
    while k.degree > 0:
        t = gcd(k, b)
        if t.degree <= 0:
            break
        k = k // t
    return k


def eisenstein_witness(lower: Sequence[Poly], lead: Poly | None, u: Poly) -> Poly:
    """Squarefree polynomial whose prime factors are exactly the Eisenstein places.

    ``lower`` are the numerators of h_0..h_{d-1}, ``lead`` the numerator of
    h_d for the general kind (None for monic), ``u`` the product of the
    excluded finite places.  A place P divides the result iff P divides
    every lower numerator, P**2 does not divide h_0, P does not divide h_d
    and P does not divide u.
    """
    n0 = lower[0]
    ctx = n0.ctx
    if not n0:
        return Poly(ctx, ())
    g = n0
    for h in lower[1:]:
        g = gcd(g, h)
        if g.degree <= 0:
            return Poly.const(ctx, 1)
    g = g.monic()
    if g.degree <= 0:
        return Poly.const(ctx, 1)
    k = coprime_part(g, n0 // g)
    if k.degree > 0:
        k = coprime_part(k, g.derivative())
    if k.degree > 0 and lead is not None:
        k = coprime_part(k, lead)
    if k.degree > 0:
        k = coprime_part(k, u)
    return k


def classify_batch(ctx: FieldCtx, samples: np.ndarray, n_lower: int, has_lead: bool,
                   u_coeffs: Sequence[int], targets: Sequence[Sequence[int]]) -> int:
    u = Poly(ctx, u_coeffs)
    tpolys = [Poly(ctx, t) for t in targets]
    hits = 0
    for row in samples.tolist():
        polys = [Poly(ctx, c) for c in row]
        k = eisenstein_witness(polys[:n_lower], polys[n_lower] if has_lead else None, u)
        if k.degree <= 0:
            continue
        if not tpolys:
            hits += 1
        elif any(t.degree <= k.degree and not (k % t) for t in tpolys):
            hits += 1
    return hits


def count_hits(mask_arrays: Sequence[np.ndarray]) -> int:
    """Number of tuples whose masks have a nonzero bitwise AND."""
    levels = [[int(m) for m in arr] for arr in mask_arrays]
    last = len(levels) - 1

    def walk(level: int, acc: int) -> int:
        if level == last:
            return sum(1 for m in levels[level] if acc & m)
        total = 0
        for m in levels[level]:
            nxt = acc & m
            if nxt:
                total += walk(level + 1, nxt)
        return total

    return walk(0, (1 << 64) - 1)


def irreducible_sieve(ctx: FieldCtx, n: int, lower_irreducibles: list) -> np.ndarray:
    """Mark monic degree-n polynomials (lexicographic index) that are irreducible."""
    q = ctx.q
    out = np.ones(q**n, dtype=bool)
    weights = np.array([q ** (n - 1 - i) for i in range(n)], dtype=np.int64)
    for k in range(1, n // 2 + 1):
        m = n - k
        idx = np.arange(q**m, dtype=np.int64)
        # b digits: coefficient i is digit at weight q**(m-1-i)
        b = np.empty((q**m, m + 1), dtype=np.int64)
        for i in range(m):
            b[:, i] = (idx // q ** (m - 1 - i)) % q
        b[:, m] = 1
        for a in lower_irreducibles[k]:
            if q <= TABLE_MAX_Q:
                add, mul, _, _ = ctx.tables
                r = np.zeros((q**m, n + 1), dtype=np.int64)
                for i, ai in enumerate(a):
                    if ai:
                        prod = mul[ai][b]
                        r[:, i:i + m + 1] = add[r[:, i:i + m + 1], prod]
            else:
                r = np.array([(Poly(ctx, a) * Poly(ctx, row)).coeffs for row in b.tolist()],
                             dtype=np.int64)
            out[r[:, :n] @ weights] = False
    return out
