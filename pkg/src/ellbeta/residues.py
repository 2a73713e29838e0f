"""q-expansions reduced modulo 2^64.

For 2-local questions (is an expansion divisible by 2^a, does it have a
2-integral expansion) the residues of the integer expansions modulo 2^64
carry all the information, as long as the 2-adic depth of the question
stays below 64 bits. 3-power and other odd denominators are units mod 2^64.
"""
from __future__ import annotations

import threading
from fractions import Fraction
from typing import Mapping

import numpy as np

from . import kernels
from .coords import terms_to_divided
from .exact import Scalar
from .forms import PrecisionError, eisenstein_odd_int

MOD = 1 << 64
MASK = MOD - 1
INFINITE = 1 << 30


def two_adic(x: Fraction) -> tuple[int, int]:
    """(u mod 2^64, v) with x = 2^v * u, u a 2-adic unit; (0, INFINITE) for 0."""
    x = Fraction(x)
    if x == 0:
        return 0, INFINITE
    n, d = x.numerator, x.denominator
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    while d % 2 == 0:
        d //= 2
        v -= 1
    return (n * pow(d, -1, MOD)) % MOD, v


def residue_of(x: Fraction, shift: int = 0) -> int:
    """2^shift * x mod 2^64; requires 2^shift * x to be 2-integral."""
    u, v = two_adic(x)
    if v >= INFINITE:
        return 0
    if v + shift < 0:
        raise ValueError("value is not 2-integral after shifting")
    if v + shift >= 64:
        return 0
    return (u << (v + shift)) & MASK


def ctz(x: int) -> int:
    x &= MASK
    if x == 0:
        return 64
    return (x & -x).bit_length() - 1


def valuation_vec(vec: np.ndarray) -> int:
    """Minimal 2-adic valuation of a residue vector (64 if it vanishes)."""
    low = vec & (~vec + np.uint64(1))
    nz = low[low != 0]
    if nz.size == 0:
        return 64
    return int(np.bitwise_count(nz.min() - np.uint64(1)))


def _bucket(prec: int) -> int:
    size = 64
    while size < prec:
        size *= 2
    return size


class ResidueBank:
    """Cached residues of E1^a E3^b and G^r C^b at a fixed precision."""

    def __init__(self, prec: int):
        self.prec = prec
        self._lock = threading.Lock()
        e1 = np.array([c % MOD for c in eisenstein_odd_int(1, prec)], dtype=np.uint64)
        e3 = np.array([c % MOD for c in eisenstein_odd_int(3, prec)], dtype=np.uint64)
        one = np.zeros(prec, dtype=np.uint64)
        one[0] = 1
        g = np.array([(c // 6) % MOD for c in eisenstein_odd_int(1, prec)], dtype=np.uint64)
        g[0] = 0
        # C = (E1^3 - E3)/27 exactly; 27 is odd, so divide by its inverse mod 2^64
        cube = kernels.mul_trunc(kernels.mul_trunc(e1, e1, prec), e1, prec)
        c = (cube - e3) * np.uint64(pow(27, -1, MOD))
        self._e1 = {0: one, 1: e1}
        self._e3 = {0: one, 1: e3}
        self._g = {0: one, 1: g}
        self._c = {0: one, 1: c}
        self._e1inv: dict[int, np.ndarray] = {0: one}
        self._mono: dict[tuple[int, int], np.ndarray] = {}
        self._div: dict[tuple[int, int], np.ndarray] = {}

    def _power(self, table: dict, n: int) -> np.ndarray:
        cur = table.get(n)
        if cur is not None:
            return cur
        hi = 1 << (n.bit_length() - 1)
        if hi == n:
            half = self._power(table, n // 2)
            cur = kernels.mul_trunc(half, half, self.prec)
        else:
            cur = kernels.mul_trunc(self._power(table, hi), self._power(table, n - hi), self.prec)
        table[n] = cur
        return cur

    def e1_inverse(self) -> np.ndarray:
        if 1 not in self._e1inv:
            e1 = self._e1[1]
            inv = np.zeros(self.prec, dtype=np.uint64)
            inv[0] = 1
            # E1 has constant term 1: inv[n] = -sum_{k>=1} e1[k] inv[n-k]
            for n in range(1, self.prec):
                s = np.dot(e1[1:n + 1], inv[n - 1::-1][:n]) if n else np.uint64(0)
                inv[n] = (~np.uint64(s)) + np.uint64(1)
            self._e1inv[1] = inv
        return self._e1inv[1]

    def monomial(self, a: int, b: int) -> np.ndarray:
        key = (a, b)
        out = self._mono.get(key)
        if out is None:
            with self._lock:
                if a >= 0:
                    pa = self._power(self._e1, a)
                else:
                    self.e1_inverse()
                    pa = self._power(self._e1inv, -a)
                out = kernels.mul_trunc(pa, self._power(self._e3, b), self.prec)
                self._mono[key] = out
        return out

    def divided(self, r: int, b: int) -> np.ndarray:
        key = (r, b)
        out = self._div.get(key)
        if out is None:
            with self._lock:
                if r > 0 and (r - 1, b) in self._div:
                    out = kernels.mul_trunc(self._div[(r - 1, b)], self._g[1], self.prec)
                elif r == 0 and b > 0 and (0, b - 1) in self._div:
                    out = kernels.mul_trunc(self._div[(0, b - 1)], self._c[1], self.prec)
                else:
                    out = kernels.mul_trunc(self._power(self._g, r), self._power(self._c, b), self.prec)
                self._div[key] = out
        return out

    def divided_matrix(self, keys, prec: int) -> np.ndarray:
        M = np.empty((prec, len(keys)), dtype=np.uint64)
        for k, (r, b) in enumerate(keys):
            M[:, k] = self.divided(r, b)[:prec]
        return M


_BANKS: dict[int, ResidueBank] = {}
_BANKS_LOCK = threading.Lock()


def bank(prec: int) -> ResidueBank:
    size = _bucket(prec)
    b = _BANKS.get(size)
    if b is None:
        with _BANKS_LOCK:
            b = _BANKS.get(size)
            if b is None:
                b = _BANKS[size] = ResidueBank(size)
    return b


def _rational(c) -> Fraction:
    if isinstance(c, Scalar):
        if c.im != 0:
            raise ValueError("split delta components before reducing mod 2^64")
        return c.re
    return Fraction(c)


def form_residues(terms: Mapping[tuple[int, int], Fraction], prec: int) -> tuple[np.ndarray, int]:
    """Residues of 2^shift * f mod 2^64 for a rational form f, plus shift.

    Terms with 2-integral coefficients are expanded from monomials; the rest
    are rewritten in divided coordinates first so that cancellations between
    2-adic denominators happen exactly before reducing mod 2^64.
    """
    integral: dict = {}
    fractional: dict = {}
    for key, c in terms.items():
        c = _rational(c)
        if c == 0:
            continue
        if key[0] < 0:
            integral[key] = c  # Laurent terms: only allowed with 2-integral coefficients
            if two_adic(c)[1] < 0:
                raise PrecisionError("Laurent terms with 2-adic denominators are not supported")
            continue
        (integral if two_adic(c)[1] >= 0 else fractional)[key] = c
    div = terms_to_divided(fractional) if fractional else {}
    shift = 0
    for c in div.values():
        shift = max(shift, -two_adic(c)[1])
    if shift >= 48:
        raise PrecisionError(f"2-adic denominator 2^{shift} too deep for 64-bit residues")
    bk = bank(prec)
    vec = np.zeros(prec, dtype=np.uint64)
    for (a, b), c in integral.items():
        r = residue_of(c, shift)
        if r:
            vec += np.uint64(r) * bk.monomial(a, b)[:prec]
    for (r_, b), c in div.items():
        r = residue_of(c, shift)
        if r:
            vec += np.uint64(r) * bk.divided(r_, b)[:prec]
    return vec, shift
