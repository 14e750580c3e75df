"""Backend selection and the ModulusContext facade over the hot kernels.

The compiled extension (kernels_cy, fixed-width Montgomery limbs) is used
when importable; otherwise the pure-Python kernels take over.  Set
LINV_FORCE_BACKEND=py|cy to override, e.g. for the backend benchmark.
"""

import importlib
import os

from . import kernels_py

_forced = os.environ.get("LINV_FORCE_BACKEND")
kernels_cy = None
if _forced != "py":
    try:
        kernels_cy = importlib.import_module(".kernels_cy", __name__)
    except ImportError:
        kernels_cy = None
        if _forced == "cy":
            raise

HAVE_COMPILED = kernels_cy is not None
DEFAULT_BACKEND = "cy" if HAVE_COMPILED else "py"


def _ints_to_limbs(vals, L):
    import numpy as np

    buf = b"".join(v.to_bytes(8 * L, "little") for v in vals)
    arr = np.frombuffer(buf, dtype="<u8").reshape(len(vals), L)
    return np.ascontiguousarray(arr)


def _limbs_to_ints(arr):
    L = arr.shape[1]
    raw = arr.astype("<u8", copy=False).tobytes()
    step = 8 * L
    return [
        int.from_bytes(raw[i * step : (i + 1) * step], "little")
        for i in range(arr.shape[0])
    ]


class ModulusContext:
    """All residue arithmetic mod p^M for one run, backend-dispatched.

    Vector handles are opaque: limb arrays in the Montgomery domain for the
    compiled backend, plain int lists for the Python one.
    """

    def __init__(self, p, M, backend=None):
        self.p = p
        self.M = M
        self.modulus = p ** M
        self.backend = backend or DEFAULT_BACKEND
        if self.backend == "cy" and not HAVE_COMPILED:
            raise RuntimeError("compiled kernels unavailable")
        if self.backend == "cy":
            m = self.modulus
            L = max(1, (m.bit_length() + 63) // 64)
            if L > 8:
                raise ValueError(
                    f"modulus needs {L} limbs; compiled kernels support <= 8 "
                    "(use the python backend)"
                )
            self._L = L
            R = 1 << (64 * L)
            self._mod_limbs = _ints_to_limbs([m], L)[0].tolist()
            self._n0inv = (-pow(m, -1, 1 << 64)) % (1 << 64)
            self._one = _ints_to_limbs([R % m], L)
            self._one_limbs = self._one[0].tolist()
            self._r2 = _ints_to_limbs([R * R % m], L)
            self._plain_one = _ints_to_limbs([1], L)
            # exponent for unit inversion: phi(p^M) - 1
            e = p ** (M - 1) * (p - 1) - 1
            nlimb = max(1, (e.bit_length() + 63) // 64)
            self._inv_exp = _ints_to_limbs([e], nlimb)[0]

    # -- vectors ----------------------------------------------------------

    def pack(self, ints):
        ints = [v % self.modulus for v in ints]
        if self.backend == "py":
            return ints
        import numpy as np

        arr = _ints_to_limbs(ints, self._L)
        out = np.empty_like(arr)
        kernels_cy.mont_mul_batch(out, arr, self._r2, *self._args)
        return out

    def unpack(self, vec):
        if self.backend == "py":
            return list(vec)
        import numpy as np

        out = np.empty_like(vec)
        kernels_cy.mont_mul_batch(out, vec, self._plain_one, *self._args)
        return _limbs_to_ints(out)

    @property
    def _args(self):
        return (self._mod_limbs, self._n0inv, self._one_limbs)

    def zeros(self, n):
        if self.backend == "py":
            return [0] * n
        import numpy as np

        return np.zeros((n, self._L), dtype=np.uint64)

    def vec_len(self, vec):
        return len(vec)

    def copy_vec(self, vec):
        if self.backend == "py":
            return list(vec)
        return vec.copy()

    def slice_vec(self, vec, start, stop):
        if self.backend == "py":
            return vec[start:stop]
        import numpy as np

        return np.ascontiguousarray(vec[start:stop])

    # -- series ops --------------------------------------------------------

    def series_mul(self, a, b, nout):
        if self.backend == "py":
            return kernels_py.series_mul(a, b, nout, self.modulus)
        return kernels_cy.series_mul(a, b, nout, *self._args)

    def series_inv(self, a, nout):
        if self.backend == "py":
            return kernels_py.series_inv(a, nout, self.modulus)
        inv0 = pow(self.unpack(self.slice_vec(a, 0, 1))[0], -1, self.modulus)
        inv0_mont = self.pack([inv0])[0].tolist()
        return kernels_cy.series_inv(a, nout, inv0_mont, *self._args)

    def up_extract(self, s, w, nout):
        if self.backend == "py":
            return kernels_py.up_extract(s, w, self.p, nout, self.modulus)
        return kernels_cy.up_extract(s, w, self.p, nout, *self._args)

    def row_axpy(self, dst, src, coef_int):
        """dst -= coef * src (in place). coef given as a plain int."""
        if self.backend == "py":
            kernels_py.row_axpy(dst, src, coef_int % self.modulus, self.modulus)
            return
        coef = self.pack([coef_int])[0].tolist()
        kernels_cy.row_axpy(dst, src, coef, *self._args)

    def vals(self, vec, cap=None):
        cap = self.M if cap is None else cap
        if self.backend == "py":
            return kernels_py.val_batch(vec, self.p, cap)
        return list(kernels_cy.val_batch(vec, self.p, cap, *self._args))

    # -- matrices ----------------------------------------------------------

    def matrix_from_rows(self, rows, ncols):
        if self.backend == "py":
            return [list(r[:ncols]) + [0] * max(0, ncols - len(r)) for r in rows]
        import numpy as np

        n = len(rows)
        out = np.zeros((n, ncols, self._L), dtype=np.uint64)
        for i, r in enumerate(rows):
            k = min(ncols, r.shape[0])
            out[i, :k] = r[:k]
        return out

    def matrix_from_columns(self, cols):
        if self.backend == "py":
            n = len(cols)
            return [[cols[j][i] for j in range(n)] for i in range(len(cols[0]))]
        import numpy as np

        stacked = np.stack(cols, axis=1)  # (nrows, ncols, L)
        return np.ascontiguousarray(stacked)

    def lu_factor(self, mat):
        """mat: stack of basis rows (matrix_from_rows); mutated into packed LU."""
        if self.backend == "py":
            res = kernels_py.lu_factor(mat, self.p, self.modulus)
            if res is None:
                return None
            piv, pivinv = res
            return ("py", mat, piv, pivinv)
        res = kernels_cy.lu_factor(mat, self.p, self._inv_exp, *self._args)
        if res is None:
            return None
        piv, pivinv = res
        return ("cy", mat, piv, pivinv)

    def lu_solve(self, fact, u):
        kind, mat, piv, pivinv = fact
        if kind == "py":
            return kernels_py.lu_solve(mat, piv, pivinv, u, self.modulus)
        return kernels_cy.lu_solve(mat, piv, pivinv, u, *self._args)

    def berkowitz(self, mat, D):
        if self.backend == "py":
            return kernels_py.berkowitz_trunc(mat, D, self.modulus)
        return kernels_cy.berkowitz_trunc(mat, D, *self._args)

    def min_row_vals(self, mat, cap=None):
        cap = self.M if cap is None else cap
        if self.backend == "py":
            return kernels_py.matrix_min_row_vals(mat, self.p, cap)
        return list(
            kernels_cy.matrix_min_row_vals(mat, self.p, cap, *self._args)
        )
