# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops.  Field elements are int codes and arithmetic goes
through the q*q tables from ``FieldCtx.tables``; see ``_fallback`` for the
reference Python versions of every function here."""

from libc.stdlib cimport malloc, free
from libc.string cimport memcpy
from libc.stdint cimport uint64_t, int32_t

import numpy as np

ctypedef struct Field:
    int q
    int p
    const int32_t* add
    const int32_t* mul
    const int32_t* neg
    const int32_t* inv


cdef inline int f_add(const Field* F, int a, int b) nogil:
    return F.add[a * F.q + b]


cdef inline int f_sub(const Field* F, int a, int b) nogil:
    return F.add[a * F.q + F.neg[b]]


cdef inline int f_mul(const Field* F, int a, int b) nogil:
    return F.mul[a * F.q + b]


cdef inline int trim(const int* a, int deg) nogil:
    while deg >= 0 and a[deg] == 0:
        deg -= 1
    return deg


cdef int p_mod(const Field* F, int* a, int da, const int* b, int db) nogil:
    # a <- a mod b in place; returns the new degree
    cdef int k, i, c, s
    cdef int il = F.inv[b[db]]
    if da < db:
        return da
    for k in range(da, db - 1, -1):
        c = a[k]
        if c:
            c = f_mul(F, c, il)
            s = k - db
            for i in range(db + 1):
                a[s + i] = f_sub(F, a[s + i], f_mul(F, c, b[i]))
    return trim(a, db - 1)


cdef int p_div(const Field* F, int* a, int da, const int* b, int db, int* quo) nogil:
    # quo <- a div b (a is destroyed); returns deg quo
    cdef int k, i, c, s
    cdef int il = F.inv[b[db]]
    if da < db:
        return -1
    for k in range(da, db - 1, -1):
        c = a[k]
        s = k - db
        if c:
            c = f_mul(F, c, il)
            for i in range(db + 1):
                a[s + i] = f_sub(F, a[s + i], f_mul(F, c, b[i]))
        quo[s] = c
    return da - db


cdef int p_gcd(const Field* F, int* a, int da, int* b, int db, int* out) nogil:
    # monic gcd copied into out; a and b are destroyed
    cdef int* t
    cdef int dt, i, il
    while db >= 0:
        da = p_mod(F, a, da, b, db)
        t = a; a = b; b = t
        dt = da; da = db; db = dt
    if da < 0:
        return -1
    il = F.inv[a[da]]
    for i in range(da + 1):
        out[i] = f_mul(F, a[i], il)
    return da


cdef int p_deriv(const Field* F, const int* a, int da, int* out) nogil:
    cdef int i
    if da <= 0:
        return -1
    for i in range(1, da + 1):
        out[i - 1] = f_mul(F, i % F.p, a[i])
    return trim(out, da - 1)


cdef int coprime_part(const Field* F, int* k, int dk, const int* b, int db,
                      int* s1, int* s2, int* s3, int* s4) nogil:
    # strip from k every irreducible factor it shares with b; returns new deg k
    cdef int dg, dq, i
    while dk > 0:
        memcpy(s1, k, (dk + 1) * sizeof(int))
        if db >= 0:
            memcpy(s2, b, (db + 1) * sizeof(int))
        dg = p_gcd(F, s1, dk, s2, db, s3)
        if dg <= 0:
            break
        memcpy(s1, k, (dk + 1) * sizeof(int))
        dq = p_div(F, s1, dk, s3, dg, s4)
        for i in range(dq + 1):
            k[i] = s4[i]
        dk = dq
    return dk


cdef int eisenstein_kernel(const Field* F, const int32_t* row, int ell, int L, int n_lower,
                           int has_lead, const int* u, int du, int* K, int* w) nogil:
    # Writes the squarefree polynomial whose prime factors are exactly the
    # places of S at which the tuple is Eisenstein; returns its degree
    # (<= 0 means Eisenstein nowhere).  w is scratch of 8 * L ints, L > ell.
    cdef int* g = w
    cdef int* a = w + L
    cdef int* c = w + 2 * L
    cdef int* dg_ = w + 3 * L
    cdef int* s1 = w + 4 * L
    cdef int* s2 = w + 5 * L
    cdef int* s3 = w + 6 * L
    cdef int* s4 = w + 7 * L
    cdef int i, j, dn0, da, dgg, dc, dk, dd
    # n_lower >= 2 always (degree d >= 2), so the gcd loop leaves g monic
    dn0 = -1
    for j in range(ell):
        g[j] = row[j]
        if row[j]:
            dn0 = j
    if dn0 < 0:
        return -1
    dgg = dn0
    for i in range(1, n_lower):
        da = -1
        for j in range(ell):
            a[j] = row[i * ell + j]
            if a[j]:
                da = j
        dgg = p_gcd(F, g, dgg, a, da, s1)
        for j in range(dgg + 1):
            g[j] = s1[j]
        if dgg <= 0:
            return 0
    # c = n0 / g
    for j in range(dn0 + 1):
        a[j] = row[j]
    dc = p_div(F, a, dn0, g, dgg, c)
    for j in range(dgg + 1):
        K[j] = g[j]
    dk = coprime_part(F, K, dgg, c, trim(c, dc), s1, s2, s3, s4)
    if dk <= 0:
        return dk
    dd = p_deriv(F, g, dgg, dg_)
    dk = coprime_part(F, K, dk, dg_, dd, s1, s2, s3, s4)
    if dk <= 0:
        return dk
    if has_lead:
        da = -1
        for j in range(ell):
            a[j] = row[n_lower * ell + j]
            if a[j]:
                da = j
        dk = coprime_part(F, K, dk, a, da, s1, s2, s3, s4)
        if dk <= 0:
            return dk
    if du > 0:
        dk = coprime_part(F, K, dk, u, du, s1, s2, s3, s4)
    return dk


def classify_batch(tables, int p, int32_t[:, :, ::1] samples, int n_lower, bint has_lead,
                   u_coeffs, targets):
    """Number of rows Eisenstein somewhere (``targets`` empty) or at one of ``targets``."""
    cdef const int32_t[:, ::1] add = tables[0]
    cdef const int32_t[:, ::1] mul = tables[1]
    cdef const int32_t[::1] neg = tables[2]
    cdef const int32_t[::1] inv = tables[3]
    cdef Field F
    F.q = add.shape[0]
    F.p = p
    F.add = &add[0, 0]
    F.mul = &mul[0, 0]
    F.neg = &neg[0]
    F.inv = &inv[0]
    cdef Py_ssize_t n = samples.shape[0]
    cdef int ell = samples.shape[2]
    cdef int arity = samples.shape[1]
    cdef int nt = len(targets)
    cdef int du = len(u_coeffs) - 1
    cdef int maxdeg_t = 0
    cdef int i, j, t, dk, dr, hit
    cdef Py_ssize_t s
    cdef long long hits = 0
    for t in range(nt):
        if len(targets[t]) - 1 > maxdeg_t:
            maxdeg_t = len(targets[t]) - 1
    cdef int L = max(ell, du + 1, maxdeg_t + 1) + 1
    cdef int* u = <int*>malloc(L * sizeof(int))
    cdef int* K = <int*>malloc(L * sizeof(int))
    cdef int* w = <int*>malloc(9 * L * sizeof(int))
    cdef int* tp = <int*>malloc((nt * L + 1) * sizeof(int))
    cdef int* td = <int*>malloc((nt + 1) * sizeof(int))
    cdef const int32_t* base = &samples[0, 0, 0] if n > 0 else NULL
    try:
        for j in range(du + 1):
            u[j] = u_coeffs[j]
        for t in range(nt):
            td[t] = len(targets[t]) - 1
            for j in range(td[t] + 1):
                tp[t * L + j] = targets[t][j]
        with nogil:
            for s in range(n):
                dk = eisenstein_kernel(&F, base + s * arity * ell, ell, L, n_lower, has_lead,
                                       u, du, K, w)
                if dk <= 0:
                    continue
                if nt == 0:
                    hits += 1
                    continue
                hit = 0
                for t in range(nt):
                    if td[t] > dk:
                        continue
                    for j in range(dk + 1):
                        w[8 * L + j] = K[j]
                    dr = p_mod(&F, w + 8 * L, dk, tp + t * L, td[t])
                    if dr < 0:
                        hit = 1
                        break
                hits += hit
    finally:
        free(u); free(K); free(w); free(tp); free(td)
    return int(hits)


cdef long long _count(const uint64_t** masks, const Py_ssize_t* sizes, int depth,
                      int level, uint64_t acc) nogil:
    cdef long long total = 0
    cdef Py_ssize_t i
    cdef uint64_t m
    cdef const uint64_t* arr = masks[level]
    if level == depth - 1:
        for i in range(sizes[level]):
            if acc & arr[i]:
                total += 1
        return total
    for i in range(sizes[level]):
        m = acc & arr[i]
        if m:
            total += _count(masks, sizes, depth, level + 1, m)
    return total


def count_hits(list mask_arrays):
    """Number of tuples (x_0, ..., x_k) with mask_0[x_0] & ... & mask_k[x_k] != 0."""
    cdef int depth = len(mask_arrays)
    cdef const uint64_t** masks = <const uint64_t**>malloc(depth * sizeof(uint64_t*))
    cdef Py_ssize_t* sizes = <Py_ssize_t*>malloc(depth * sizeof(Py_ssize_t))
    cdef const uint64_t[::1] mv
    cdef long long total
    cdef int i
    keep = []
    try:
        for i in range(depth):
            arr = np.ascontiguousarray(mask_arrays[i], dtype=np.uint64)
            keep.append(arr)
            mv = arr
            masks[i] = &mv[0]
            sizes[i] = mv.shape[0]
        with nogil:
            total = _count(masks, sizes, depth, 0, <uint64_t>0xFFFFFFFFFFFFFFFF)
    finally:
        free(masks)
        free(sizes)
    return int(total)


def irreducible_sieve(tables, int n, list lower_irreducibles):
    """Boolean array over monic degree-n polynomials (lexicographic index) marking irreducibles.

    ``lower_irreducibles[k]`` lists the irreducibles of degree k as coefficient tuples.
    """
    cdef const int32_t[:, ::1] add = tables[0]
    cdef const int32_t[:, ::1] mul = tables[1]
    cdef int q = add.shape[0]
    cdef Py_ssize_t total = q ** n
    out = np.ones(total, dtype=np.bool_)
    cdef unsigned char[::1] mark = out.view(np.uint8)
    cdef int k, i, j, m
    cdef Py_ssize_t bi, nb, idx
    cdef int a[64]
    cdef int b[64]
    cdef int r[64]
    for k in range(1, n // 2 + 1):
        m = n - k
        nb = q ** m
        for poly in lower_irreducibles[k]:
            for i in range(k + 1):
                a[i] = poly[i]
            with nogil:
                for bi in range(nb):
                    idx = bi
                    for i in range(m - 1, -1, -1):
                        b[i] = idx % q
                        idx //= q
                    b[m] = 1
                    for i in range(n + 1):
                        r[i] = 0
                    for i in range(k + 1):
                        if a[i]:
                            for j in range(m + 1):
                                r[i + j] = add[r[i + j], mul[a[i], b[j]]]
                    idx = 0
                    for i in range(n):
                        idx = idx * q + r[i]
                    mark[idx] = 0
    return out
