"""Pure-Python residue kernels: the fallback twin of the compiled core.

Residue vectors are plain lists of ints in [0, m); matrices are lists of
rows.  Series products go through Kronecker substitution (one CPython
big-int multiply) which keeps the fallback usable at desk scale.
"""


def _kron_pack(vals, width_bytes):
    buf = bytearray(width_bytes * len(vals))
    for i, v in enumerate(vals):
        buf[i * width_bytes : i * width_bytes + (v.bit_length() + 7) // 8] = v.to_bytes(
            (v.bit_length() + 7) // 8, "little"
        )
    return int.from_bytes(buf, "little")


def _kron_width(m, nterms):
    bits = 2 * m.bit_length() + nterms.bit_length() + 1
    return (bits + 7) // 8


def kron_product_coeffs(a, b, nout, m):
    """Coefficients 0..nout-1 of the product of integer coefficient vectors."""
    if not a or not b:
        return [0] * nout
    w = _kron_width(m, min(len(a), len(b)))
    prod = _kron_pack(a, w) * _kron_pack(b, w)
    total = prod.to_bytes(w * (len(a) + len(b)), "little")
    out = []
    for k in range(nout):
        out.append(int.from_bytes(total[k * w : (k + 1) * w], "little") % m)
    return out


def series_mul(a, b, nout, m):
    return kron_product_coeffs(a, b, nout, m)


def series_inv(a, nout, m):
    inv0 = pow(a[0], -1, m)
    out = [inv0]
    na = len(a)
    for n in range(1, nout):
        acc = 0
        for k in range(1, min(n, na - 1) + 1):
            acc += a[k] * out[n - k]
        out.append(-inv0 * acc % m)
    return out


def up_extract(s, w, p, nout, m):
    full = kron_product_coeffs(s, w, p * (nout - 1) + 1 if nout else 0, m)
    return [full[p * j] for j in range(nout)]


def row_axpy(dst, src, coef, m):
    n = min(len(dst), len(src))
    for i in range(n):
        dst[i] = (dst[i] - coef * src[i]) % m


def lu_factor(B, p, m):
    """Unit-pivot LU over basis rows; B is mutated. Returns (piv, pivinv)."""
    n = len(B)
    ncols = len(B[0]) if B else 0
    used = [False] * ncols
    piv = []
    pivinv = []
    for k in range(n):
        col = next(
            (j for j in range(ncols) if not used[j] and B[k][j] % p != 0), None
        )
        if col is None:
            return None
        used[col] = True
        piv.append(col)
        inv = pow(B[k][col], -1, m)
        pivinv.append(inv)
        rowk = B[k]
        for i in range(k + 1, n):
            mult = B[i][col] * inv % m
            if mult:
                rowi = B[i]
                for j in range(ncols):
                    if not used[j]:
                        rowi[j] = (rowi[j] - mult * rowk[j]) % m
            B[i][col] = mult
    return piv, pivinv


def lu_solve(B, piv, pivinv, u, m):
    n = len(B)
    y = []
    for k in range(n):
        acc = u[piv[k]]
        row = B[k]
        for i in range(k):
            acc -= row[piv[i]] * y[i]
        y.append(acc % m)
    x = [0] * n
    for k in range(n - 1, -1, -1):
        acc = y[k]
        row = B[k]
        for i in range(k + 1, n):
            acc -= row[piv[i]] * x[i]
        x[k] = acc * pivinv[k] % m
    return x


def berkowitz_trunc(A, D, m):
    """First D+1 coefficients of det(1 - t A), division-free."""
    n = len(A)
    D = min(D, n)
    pv = [1]
    for r in range(1, n + 1):
        tmax = min(r, D)
        t = [1]
        if tmax >= 1:
            t.append(-A[r - 1][r - 1] % m)
        if tmax >= 2:
            v = [A[i][r - 1] for i in range(r - 1)]
            row = A[r - 1]
            for j in range(2, tmax + 1):
                t.append(-sum(row[i] * v[i] for i in range(r - 1)) % m)
                if j < tmax:
                    v = [
                        sum(A[i][k] * v[k] for k in range(r - 1)) % m
                        for i in range(r - 1)
                    ]
        nlen = min(r, D) + 1
        plen = len(pv)
        nxt = []
        for i in range(nlen):
            acc = 0
            for j in range(min(i, tmax) + 1):
                if i - j < plen:
                    acc += t[j] * pv[i - j]
            nxt.append(acc % m)
        pv = nxt
    return pv


def matrix_min_row_vals(A, p, cap):
    out = []
    for row in A:
        best = cap
        for x in row:
            if x == 0:
                continue
            v = 0
            while v < best and x % p == 0:
                x //= p
                v += 1
            if x % p != 0 and v < best:
                best = v
                if best == 0:
                    break
        out.append(best)
    return out


def val_batch(a, p, cap):
    out = []
    for x in a:
        if x == 0:
            out.append(cap)
            continue
        v = 0
        while v < cap and x % p == 0:
            x //= p
            v += 1
        out.append(min(v, cap))
    return out
