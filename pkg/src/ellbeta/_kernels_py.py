"""Numpy implementations of the mod 2^64 kernels.

These are the reference versions; the compiled module ``_kernels`` mirrors
them operation for operation, including the pivot tie-breaking, so both
produce identical arrays.
"""
from __future__ import annotations

import numpy as np

ALL_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)


def odd_inverse(x: int) -> int:
    """Inverse of an odd integer modulo 2^64."""
    x &= 0xFFFFFFFFFFFFFFFF
    if not x & 1:
        raise ValueError("even number has no inverse mod 2^64")
    return pow(x, -1, 1 << 64)


def mul_trunc(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """First n coefficients of a*b modulo 2^64."""
    out = np.zeros(n, dtype=np.uint64)
    la, lb = min(len(a), n), min(len(b), n)
    if la == 0 or lb == 0:
        return out
    full = np.convolve(a[:la], b[:lb])
    m = min(n, len(full))
    out[:m] = full[:m]
    return out


def _valuations(block: np.ndarray, mask: np.uint64) -> np.ndarray:
    x = block & mask
    low = x & (~x + np.uint64(1))
    return np.bitwise_count(low - np.uint64(1)).astype(np.int64)


def eliminate(M: np.ndarray, V: np.ndarray | None, bits: int, search_rows: int | None = None):
    """2-adic column echelon form by full pivoting, in place.

    M is a (rows, cols) uint64 array read modulo 2^bits for pivot choice and
    updated modulo 2^64. Pivots are searched among the first ``search_rows``
    rows not yet used; the pivot is the entry of least 2-adic valuation, ties
    broken by the first occurrence in row-major order. Column swaps and the
    column operations are mirrored on V (shape (nv, cols)) when given.

    Returns (rank, perm, pivot_rows, vals).
    """
    rows, cols = M.shape
    if search_rows is None:
        search_rows = rows
    mask = ALL_ONES if bits >= 64 else np.uint64((1 << bits) - 1)
    perm = np.arange(cols, dtype=np.int64)
    active = np.ones(search_rows, dtype=bool)
    pivot_rows: list[int] = []
    vals: list[int] = []
    for k in range(min(search_rows, cols)):
        val = _valuations(M[:search_rows, k:], mask)
        val[~active] = 64
        flat = int(np.argmin(val))
        r, c = divmod(flat, cols - k)
        v = int(val[r, c])
        if v >= bits:
            break
        c += k
        if c != k:
            M[:, [k, c]] = M[:, [c, k]]
            perm[[k, c]] = perm[[c, k]]
            if V is not None:
                V[:, [k, c]] = V[:, [c, k]]
        inv = np.uint64(odd_inverse(int(M[r, k]) >> v))
        f = (M[r, k + 1:] >> np.uint64(v)) * inv
        if f.size:
            M[:, k + 1:] -= np.outer(M[:, k], f)
            if V is not None:
                V[:, k + 1:] -= np.outer(V[:, k], f)
        active[r] = False
        pivot_rows.append(r)
        vals.append(v)
    return len(vals), perm, np.array(pivot_rows, dtype=np.int64), np.array(vals, dtype=np.int64)
