# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled mod 2^64 kernels: truncated convolution and 2-adic elimination.

Semantics match ellbeta._kernels_py exactly.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil


cdef inline int ctz64(uint64_t x) noexcept nogil:
    if x == 0:
        return 64
    return __builtin_ctzll(x)


cdef inline uint64_t inv_odd(uint64_t x) noexcept nogil:
    # Newton iteration; x*x == 1 mod 8 seeds 3 correct bits
    cdef uint64_t y = x
    cdef int k
    for k in range(5):
        y = y * (2 - x * y)
    return y


def odd_inverse(x):
    x = int(x) & 0xFFFFFFFFFFFFFFFF
    if not x & 1:
        raise ValueError("even number has no inverse mod 2^64")
    return int(inv_odd(<uint64_t>x))


def mul_trunc(const uint64_t[::1] a, const uint64_t[::1] b, Py_ssize_t n):
    out = np.zeros(n, dtype=np.uint64)
    cdef uint64_t[::1] o = out
    cdef Py_ssize_t la = min(a.shape[0], n)
    cdef Py_ssize_t lb = min(b.shape[0], n)
    cdef Py_ssize_t i, j, lim
    cdef uint64_t ai
    with nogil:
        for i in range(la):
            ai = a[i]
            if ai == 0:
                continue
            lim = lb if lb < n - i else n - i
            for j in range(lim):
                o[i + j] += ai * b[j]
    return out


cdef void _swap_cols(uint64_t[:, ::1] A, Py_ssize_t k, Py_ssize_t c) noexcept nogil:
    cdef Py_ssize_t r
    cdef uint64_t t
    for r in range(A.shape[0]):
        t = A[r, k]
        A[r, k] = A[r, c]
        A[r, c] = t


cdef void _col_update(uint64_t[:, ::1] A, Py_ssize_t k, uint64_t[::1] f) noexcept nogil:
    cdef Py_ssize_t r, c, cols = A.shape[1]
    cdef uint64_t ark
    for r in range(A.shape[0]):
        ark = A[r, k]
        if ark == 0:
            continue
        for c in range(k + 1, cols):
            A[r, c] -= ark * f[c]


def eliminate(uint64_t[:, ::1] M, V, int bits, search_rows=None):
    cdef Py_ssize_t rows = M.shape[0], cols = M.shape[1]
    cdef Py_ssize_t srows = rows if search_rows is None else search_rows
    cdef uint64_t mask = 0xFFFFFFFFFFFFFFFF if bits >= 64 else ((<uint64_t>1) << bits) - 1
    cdef uint64_t[:, ::1] Vv
    cdef bint track = V is not None
    if track:
        Vv = V
    perm_arr = np.arange(cols, dtype=np.int64)
    cdef int64_t[::1] perm = perm_arr
    active_arr = np.ones(srows, dtype=np.uint8)
    cdef unsigned char[::1] active = active_arr
    f_arr = np.zeros(cols, dtype=np.uint64)
    cdef uint64_t[::1] f = f_arr
    pivot_rows = []
    vals = []
    cdef Py_ssize_t k, r, c, br, bc, kmax = min(srows, cols)
    cdef int v, best
    cdef uint64_t inv
    cdef int64_t tp
    for k in range(kmax):
        best = 64
        br = -1
        bc = -1
        with nogil:
            for r in range(srows):
                if not active[r]:
                    continue
                for c in range(k, cols):
                    v = ctz64(M[r, c] & mask)
                    if v < best:
                        best = v
                        br = r
                        bc = c
                        if v == 0:
                            break
                if best == 0:
                    break
        if best >= bits:
            break
        with nogil:
            if bc != k:
                _swap_cols(M, k, bc)
                tp = perm[k]
                perm[k] = perm[bc]
                perm[bc] = tp
                if track:
                    _swap_cols(Vv, k, bc)
            inv = inv_odd(M[br, k] >> best)
            for c in range(k + 1, cols):
                f[c] = (M[br, c] >> best) * inv
            _col_update(M, k, f)
            if track:
                _col_update(Vv, k, f)
            active[br] = 0
        pivot_rows.append(br)
        vals.append(best)
    return len(vals), perm_arr, np.array(pivot_rows, dtype=np.int64), np.array(vals, dtype=np.int64)
