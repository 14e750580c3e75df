# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled residue-ring kernels: fixed-width Montgomery arithmetic mod p^M.

Data layout: a residue vector of length n is a C-contiguous uint64 array of
shape (n, L) holding L little-endian limbs per entry, kept in the Montgomery
domain (x*R mod m, R = 2^(64 L)).  The Python wrapper (ModulusContext in
linv._core) owns packing and unpacking.
"""

import numpy as np

ctypedef unsigned long long u64
cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"

DEF MAXL = 9

cdef struct Ctx:
    int L
    u64 m[MAXL]
    u64 n0inv
    u64 one[MAXL]      # R mod m (Montgomery image of 1)


cdef inline void _zero(u64* x, int L) nogil:
    cdef int i
    for i in range(L):
        x[i] = 0


cdef inline void _copy(u64* dst, const u64* src, int L) nogil:
    cdef int i
    for i in range(L):
        dst[i] = src[i]


cdef inline bint _is_zero(const u64* x, int L) nogil:
    cdef int i
    for i in range(L):
        if x[i]:
            return False
    return True


cdef inline bint _geq(const u64* a, const u64* b, int L) nogil:
    cdef int i
    for i in range(L - 1, -1, -1):
        if a[i] > b[i]:
            return True
        if a[i] < b[i]:
            return False
    return True


cdef inline void _sub_raw(u64* out, const u64* a, const u64* b, int L) nogil:
    cdef u64 borrow = 0, ai, bi
    cdef int i
    for i in range(L):
        ai = a[i]
        bi = b[i]
        out[i] = ai - bi - borrow
        borrow = 1 if (ai < bi or (borrow and ai == bi)) else 0


cdef inline void _add_mod(u64* out, const u64* a, const u64* b, Ctx* c) nogil:
    cdef u128 t
    cdef u64 tmp[MAXL]
    cdef u64 carry = 0
    cdef int i, L = c.L
    for i in range(L):
        t = <u128> a[i] + b[i] + carry
        tmp[i] = <u64> t
        carry = <u64> (t >> 64)
    if carry or _geq(tmp, c.m, L):
        _sub_raw(out, tmp, c.m, L)
    else:
        _copy(out, tmp, L)


cdef inline void _sub_mod(u64* out, const u64* a, const u64* b, Ctx* c) nogil:
    cdef u64 tmp[MAXL]
    cdef u128 t
    cdef u64 carry = 0
    cdef int i, L = c.L
    if _geq(a, b, L):
        _sub_raw(out, a, b, L)
    else:
        # a - b + m; the add wraps past 2^(64L) exactly once, drop the carry
        _sub_raw(tmp, a, b, L)
        for i in range(L):
            t = <u128> tmp[i] + c.m[i] + carry
            out[i] = <u64> t
            carry = <u64> (t >> 64)


cdef inline void _mont_mul(u64* out, const u64* a, const u64* b, Ctx* c) nogil:
    # CIOS Montgomery multiplication: out = a*b*R^{-1} mod m
    cdef u64 acc[MAXL + 2]
    cdef u128 t
    cdef u64 carry, u
    cdef int i, j, L = c.L
    for i in range(L + 2):
        acc[i] = 0
    for i in range(L):
        carry = 0
        for j in range(L):
            t = <u128> a[i] * b[j] + acc[j] + carry
            acc[j] = <u64> t
            carry = <u64> (t >> 64)
        t = <u128> acc[L] + carry
        acc[L] = <u64> t
        acc[L + 1] += <u64> (t >> 64)
        u = acc[0] * c.n0inv
        t = <u128> u * c.m[0] + acc[0]
        carry = <u64> (t >> 64)
        for j in range(1, L):
            t = <u128> u * c.m[j] + acc[j] + carry
            acc[j - 1] = <u64> t
            carry = <u64> (t >> 64)
        t = <u128> acc[L] + carry
        acc[L - 1] = <u64> t
        acc[L] = acc[L + 1] + <u64> (t >> 64)
        acc[L + 1] = 0
    if acc[L] or _geq(acc, c.m, L):
        _sub_raw(out, acc, c.m, L)
    else:
        _copy(out, acc, L)


cdef inline void _mont_pow(u64* out, const u64* base, const u64* ebits,
                           int nbits, Ctx* c) nogil:
    # out = base^e (Montgomery domain), e as little-endian limbs
    cdef u64 acc[MAXL]
    cdef u64 b[MAXL]
    cdef int i
    _copy(acc, c.one, c.L)
    _copy(b, base, c.L)
    for i in range(nbits):
        if (ebits[i >> 6] >> (i & 63)) & 1:
            _mont_mul(acc, acc, b, c)
        _mont_mul(b, b, b, c)
    _copy(out, acc, c.L)


cdef inline u64 _mod_small(const u64* x, u64 p, Ctx* c) nogil:
    cdef u128 acc = 0
    cdef int i
    for i in range(c.L - 1, -1, -1):
        acc = ((acc << 64) | x[i]) % p
    return <u64> acc


cdef inline int _val_small(const u64* x, u64 p, int cap, Ctx* c) nogil:
    # p-adic valuation of the canonical representative (== class valuation,
    # valid in the Montgomery domain because R is a unit)
    cdef u64 tmp[MAXL]
    cdef int v = 0, i
    cdef u128 cur
    cdef u64 rem
    if _is_zero(x, c.L):
        return cap
    _copy(tmp, x, c.L)
    while v < cap:
        rem = 0
        for i in range(c.L - 1, -1, -1):
            cur = (<u128> rem << 64) | tmp[i]
            tmp[i] = <u64> (cur // p)
            rem = <u64> (cur % p)
        if rem != 0:
            return v
        v += 1
    return cap


cdef Ctx _make_ctx(object mod_limbs, object n0inv, object one_limbs):
    cdef Ctx c
    cdef int i
    c.L = len(mod_limbs)
    for i in range(c.L):
        c.m[i] = mod_limbs[i]
        c.one[i] = one_limbs[i]
    c.n0inv = n0inv
    return c


# -- python-visible entry points -------------------------------------------


def mont_mul_batch(u64[:, ::1] out, u64[:, ::1] a, u64[:, ::1] b,
                   mod_limbs, n0inv, one_limbs):
    """Elementwise Montgomery product; b may have a single broadcast row."""
    cdef Ctx c = _make_ctx(mod_limbs, n0inv, one_limbs)
    cdef Py_ssize_t i, n = a.shape[0]
    cdef bint broadcast = b.shape[0] == 1
    with nogil:
        for i in range(n):
            _mont_mul(&out[i, 0], &a[i, 0], &b[0 if broadcast else i, 0], &c)


def series_mul(u64[:, ::1] a, u64[:, ::1] b, Py_ssize_t nout,
               mod_limbs, n0inv, one_limbs):
    """Truncated product of two residue series (Montgomery domain)."""
    cdef Ctx c = _make_ctx(mod_limbs, n0inv, one_limbs)
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0]
    out_arr = np.zeros((nout, c.L), dtype=np.uint64)
    cdef u64[:, ::1] out = out_arr
    cdef u64 prod[MAXL]
    cdef Py_ssize_t k, i, lo, hi
    with nogil:
        for k in range(nout):
            lo = k - (nb - 1)
            if lo < 0:
                lo = 0
            hi = k if k < na - 1 else na - 1
            for i in range(lo, hi + 1):
                _mont_mul(prod, &a[i, 0], &b[k - i, 0], &c)
                _add_mod(&out[k, 0], &out[k, 0], prod, &c)
    return out_arr


def series_inv(u64[:, ::1] a, Py_ssize_t nout, inv0_limbs,
               mod_limbs, n0inv, one_limbs):
    """Inverse of a series with unit constant term; inv0 = a[0]^{-1} (mont)."""
    cdef Ctx c = _make_ctx(mod_limbs, n0inv, one_limbs)
    cdef Py_ssize_t na = a.shape[0]
    out_arr = np.zeros((nout, c.L), dtype=np.uint64)
    cdef u64[:, ::1] out = out_arr
    cdef u64 b0[MAXL]
    cdef u64 acc[MAXL]
    cdef u64 prod[MAXL]
    cdef u64 zero[MAXL]
    cdef int li
    for li in range(c.L):
        b0[li] = inv0_limbs[li]
        zero[li] = 0
    _copy(&out[0, 0], b0, c.L)
    cdef Py_ssize_t n, k
    with nogil:
        for n in range(1, nout):
            _zero(acc, c.L)
            for k in range(1, n + 1):
                if k < na:
                    _mont_mul(prod, &a[k, 0], &out[n - k, 0], &c)
                    _add_mod(acc, acc, prod, &c)
            _mont_mul(acc, acc, b0, &c)
            _sub_mod(&out[n, 0], zero, acc, &c)
    return out_arr


def up_extract(u64[:, ::1] s, u64[:, ::1] w, Py_ssize_t p, Py_ssize_t nout,
               mod_limbs, n0inv, one_limbs):
    """Coefficients c[j] = sum_b s[p*j - b] * w[b]  (U_p applied to s*w)."""
    cdef Ctx c = _make_ctx(mod_limbs, n0inv, one_limbs)
    cdef Py_ssize_t ns = s.shape[0], nw = w.shape[0]
    out_arr = np.zeros((nout, c.L), dtype=np.uint64)
    cdef u64[:, ::1] out = out_arr
    cdef u64 prod[MAXL]
    cdef Py_ssize_t j, b, lo, hi, idx
    with nogil:
        for j in range(nout):
            idx = p * j
            lo = idx - (ns - 1)
            if lo < 0:
                lo = 0
            hi = idx if idx < nw - 1 else nw - 1
            for b in range(lo, hi + 1):
                _mont_mul(prod, &s[idx - b, 0], &w[b, 0], &c)
                _add_mod(&out[j, 0], &out[j, 0], prod, &c)
    return out_arr


def row_axpy(u64[:, ::1] dst, u64[:, ::1] src, coef_limbs,
             mod_limbs, n0inv, one_limbs):
    """dst -= coef * src over aligned residue vectors."""
    cdef Ctx c = _make_ctx(mod_limbs, n0inv, one_limbs)
    cdef u64 coef[MAXL]
    cdef u64 prod[MAXL]
    cdef int li
    for li in range(c.L):
        coef[li] = coef_limbs[li]
    cdef Py_ssize_t k
    cdef Py_ssize_t n = dst.shape[0] if dst.shape[0] < src.shape[0] else src.shape[0]
    with nogil:
        for k in range(n):
            _mont_mul(prod, coef, &src[k, 0], &c)
            _sub_mod(&dst[k, 0], &dst[k, 0], prod, &c)


def lu_factor(u64[:, :, ::1] B, Py_ssize_t p, inv_exp_bits,
              mod_limbs, n0inv, one_limbs):
    """Unit-pivot LU over the rows of B (nrows basis rows, ncols >= nrows).

    For each basis row a pivot column with a p-unit entry is chosen; the
    elimination stores multipliers in pivot-column slots and only touches
    still-unused columns.  Returns (pivot_columns, pivot_inverses) with B
    mutated into the packed LU, or None when no unit pivot exists (caller
    escalates: basis not saturated or too few coefficient columns).
    """
    cdef Ctx c = _make_ctx(mod_limbs, n0inv, one_limbs)
    cdef Py_ssize_t n = B.shape[0], m = B.shape[1]
    ebits_arr = np.ascontiguousarray(inv_exp_bits, dtype=np.uint64)
    cdef u64[::1] ebits = ebits_arr
    cdef int nbits = ebits_arr.shape[0] * 64
    piv_arr = np.full(n, -1, dtype=np.int64)
    cdef long long[::1] piv = piv_arr
    inv_arr = np.zeros((n, c.L), dtype=np.uint64)
    cdef u64[:, ::1] pivinv = inv_arr
    used_arr = np.zeros(m, dtype=np.uint8)
    cdef unsigned char[::1] used = used_arr
    cdef u64 f[MAXL]
    cdef u64 mult[MAXL]
    cdef Py_ssize_t k, j, i, col, best
    for k in range(n):
        best = -1
        for col in range(m):
            if not used[col] and _mod_small(&B[k, col, 0], p, &c) != 0:
                best = col
                break
        if best < 0:
            return None
        col = best
        piv[k] = col
        used[col] = 1
        _mont_pow(&pivinv[k, 0], &B[k, col, 0], &ebits[0], nbits, &c)
        with nogil:
            for i in range(k + 1, n):
                _mont_mul(mult, &B[i, col, 0], &pivinv[k, 0], &c)
                for j in range(m):
                    if not used[j]:
                        _mont_mul(f, mult, &B[k, j, 0], &c)
                        _sub_mod(&B[i, j, 0], &B[i, j, 0], f, &c)
                _copy(&B[i, col, 0], mult, c.L)
    return piv_arr, inv_arr


def lu_solve(u64[:, :, ::1] B, long long[::1] piv, u64[:, ::1] pivinv,
             u64[:, ::1] u, mod_limbs, n0inv, one_limbs):
    """Solve x^T B0 = u^T for the original rows B0, given lu_factor output."""
    cdef Ctx c = _make_ctx(mod_limbs, n0inv, one_limbs)
    cdef Py_ssize_t n = B.shape[0]
    x_arr = np.zeros((n, c.L), dtype=np.uint64)
    cdef u64[:, ::1] x = x_arr
    cdef u64 acc[MAXL]
    cdef u64 prod[MAXL]
    cdef Py_ssize_t k, i
    with nogil:
        for k in range(n):
            _copy(acc, &u[piv[k], 0], c.L)
            for i in range(k):
                _mont_mul(prod, &B[k, piv[i], 0], &x[i, 0], &c)
                _sub_mod(acc, acc, prod, &c)
            _copy(&x[k, 0], acc, c.L)
        for k in range(n - 1, -1, -1):
            _copy(acc, &x[k, 0], c.L)
            for i in range(k + 1, n):
                _mont_mul(prod, &B[k, piv[i], 0], &x[i, 0], &c)
                _sub_mod(acc, acc, prod, &c)
            _mont_mul(&x[k, 0], acc, &pivinv[k, 0], &c)
    return x_arr


def berkowitz_trunc(u64[:, :, ::1] A, Py_ssize_t D,
                    mod_limbs, n0inv, one_limbs):
    """First D+1 coefficients of det(1 - t A), division-free.

    Truncating the Berkowitz Toeplitz recurrence keeps the retained
    coefficients exactly equal to those of the full run.
    """
    cdef Ctx c = _make_ctx(mod_limbs, n0inv, one_limbs)
    cdef Py_ssize_t n = A.shape[0]
    if D > n:
        D = n
    pv_arr = np.zeros((D + 1, c.L), dtype=np.uint64)
    cdef u64[:, ::1] pv = pv_arr
    nxt_arr = np.zeros((D + 1, c.L), dtype=np.uint64)
    cdef u64[:, ::1] nxt = nxt_arr
    t_arr = np.zeros((D + 1, c.L), dtype=np.uint64)
    cdef u64[:, ::1] tvec = t_arr
    v_arr = np.zeros((n if n else 1, c.L), dtype=np.uint64)
    cdef u64[:, ::1] v = v_arr
    w_arr = np.zeros((n if n else 1, c.L), dtype=np.uint64)
    cdef u64[:, ::1] w = w_arr
    cdef u64 acc[MAXL]
    cdef u64 prod[MAXL]
    cdef u64 zero[MAXL]
    cdef Py_ssize_t r, j, i, tmax, plen, nlen, k, jcap
    _zero(zero, c.L)
    _copy(&pv[0, 0], c.one, c.L)
    plen = 1
    with nogil:
        for r in range(1, n + 1):
            tmax = r if r < D else D
            _copy(&tvec[0, 0], c.one, c.L)
            if tmax >= 1:
                _sub_mod(&tvec[1, 0], zero, &A[r - 1, r - 1, 0], &c)
            if tmax >= 2:
                for i in range(r - 1):
                    _copy(&v[i, 0], &A[i, r - 1, 0], c.L)
                for j in range(2, tmax + 1):
                    _zero(acc, c.L)
                    for i in range(r - 1):
                        _mont_mul(prod, &A[r - 1, i, 0], &v[i, 0], &c)
                        _add_mod(acc, acc, prod, &c)
                    _sub_mod(&tvec[j, 0], zero, acc, &c)
                    if j < tmax:
                        for i in range(r - 1):
                            _zero(acc, c.L)
                            for k in range(r - 1):
                                _mont_mul(prod, &A[i, k, 0], &v[k, 0], &c)
                                _add_mod(acc, acc, prod, &c)
                            _copy(&w[i, 0], acc, c.L)
                        for i in range(r - 1):
                            _copy(&v[i, 0], &w[i, 0], c.L)
            nlen = (r + 1) if r < D else (D + 1)
            for i in range(nlen):
                _zero(acc, c.L)
                jcap = i if i < tmax else tmax
                for j in range(jcap + 1):
                    if i - j < plen:
                        _mont_mul(prod, &tvec[j, 0], &pv[i - j, 0], &c)
                        _add_mod(acc, acc, prod, &c)
                _copy(&nxt[i, 0], acc, c.L)
            for i in range(nlen):
                _copy(&pv[i, 0], &nxt[i, 0], c.L)
            plen = nlen
    return pv_arr


def matrix_min_row_vals(u64[:, :, ::1] A, Py_ssize_t p, int cap,
                        mod_limbs, n0inv, one_limbs):
    """Per-row minimum p-adic valuation of a residue matrix (diagnostic)."""
    cdef Ctx c = _make_ctx(mod_limbs, n0inv, one_limbs)
    cdef Py_ssize_t n = A.shape[0], m = A.shape[1]
    out_arr = np.zeros(n, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef int best, v
    with nogil:
        for i in range(n):
            best = cap
            for j in range(m):
                v = _val_small(&A[i, j, 0], p, best, &c)
                if v < best:
                    best = v
                    if best == 0:
                        break
            out[i] = best
    return out_arr


def val_batch(u64[:, ::1] a, Py_ssize_t p, int cap,
              mod_limbs, n0inv, one_limbs):
    """Valuations of the entries of a residue vector (cap = precision)."""
    cdef Ctx c = _make_ctx(mod_limbs, n0inv, one_limbs)
    cdef Py_ssize_t i, n = a.shape[0]
    out_arr = np.zeros(n, dtype=np.int64)
    cdef long long[::1] out = out_arr
    with nogil:
        for i in range(n):
            out[i] = _val_small(&a[i, 0], p, cap, &c)
    return out_arr
