"""The lattice of divided congruences of top weight <= t, 2-locally.

Coordinates are divided coordinates (see coords.py). The lattice is

    D_t = { x in Z[1/6]^d : expansion(x) has 3-integral coefficients },

the divided congruences whose denominators involve only 2 and 3. It is
obtained by 2-adic saturation of the expansion matrix A (rows = q-powers,
columns = G^r C^b): full-pivot column elimination gives A V = L with V
unimodular over Z_(2) and column k of L divisible by exactly 2^{v_k} on the
pivot rows, so the columns V_k / 2^{v_k} form a basis of the lattice.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from . import kernels
from .coords import divided_index, divided_position, divided_to_terms, terms_to_divided
from .exact import Scalar, strip_three
from .forms import DEFAULT_GUARD, InhomForm, PrecisionError, precision_policy
from .residues import MASK, bank, ctz

# Valuations up to this many bits are accepted; the rest of the 64-bit word is
# kept as working precision for the saturated basis.
MAX_DEPTH = 40


def expansion_matrix(t: int, prec: int) -> np.ndarray:
    return bank(prec).divided_matrix(divided_index(t), prec)


def expansion_rank_certified(t: int, prec: int) -> bool:
    """Full column rank of the weight <= t expansion matrix at precision prec.

    A nonzero pivot modulo 2^64 in every column exhibits a nonvanishing
    maximal minor, which certifies rank over Q.
    """
    A = expansion_matrix(t, prec).copy()
    rank, *_ = kernels.eliminate(A, None, 64)
    return rank == A.shape[1]


# ---------------------------------------------------------------------------
# Hermite normal form modulo a power of two

def _ctz_array(x: np.ndarray, cap: int) -> np.ndarray:
    low = x & (~x + np.uint64(1))
    v = np.bitwise_count(low - np.uint64(1)).astype(np.int64)
    return np.minimum(v, cap)


def hnf_mod2k(gens: np.ndarray, E: int) -> tuple[np.ndarray, list[int]]:
    """Column HNF of span(gens) + 2^E Z^n.

    Returns (H, e) with H an upper triangular (n x n) integer matrix (uint64),
    H[i, i] = 2^e[i], and 0 <= H[i, j] < 2^e[i] for j > i. Requires E <= 62.
    """
    if E > 62:
        raise ValueError("hnf_mod2k works with E <= 62")
    n = gens.shape[0]
    mask = np.uint64((1 << E) - 1)
    W = np.array(gens, dtype=np.uint64) & mask
    H = np.zeros((n, n), dtype=np.uint64)
    exps = [E] * n
    for i in reversed(range(n)):
        if W.shape[1] == 0:
            H[i, i] = np.uint64(1 << E)
            continue
        vals = _ctz_array(W[i] & mask, E)
        c = int(np.argmin(vals))
        v = int(vals[c])
        if v >= E:
            H[i, i] = np.uint64(1 << E)
            continue
        inv = np.uint64(kernels.odd_inverse(int(W[i, c]) >> v))
        p = (W[:, c] * inv) & mask
        W = np.delete(W, c, axis=1)
        f = (W[i] & mask) >> np.uint64(v)
        W -= np.outer(p, f)
        W &= mask
        g = (p << np.uint64(E - v)) & mask
        g[i:] = 0
        keep = np.any(W != 0, axis=0)
        W = W[:, keep]
        if np.any(g):
            W = np.concatenate([W, g[:, None]], axis=1)
        H[:, i] = p
        exps[i] = v
    # canonical reduction of the entries above the diagonal
    for i in reversed(range(n)):
        if i + 1 >= n:
            continue
        e = exps[i]
        q = (H[i, i + 1:] & mask) >> np.uint64(e)
        col = H[:, i].copy()
        col[i] = np.uint64(1 << e)
        H[:, i + 1:] -= np.outer(col, q)
        H[:i + 1, i + 1:] &= mask
    for i in range(n):
        H[i, i] = np.uint64(1 << exps[i])
    return H, exps


# ---------------------------------------------------------------------------
# DLattice

@dataclass
class DLattice:
    top_weight: int
    prec: int
    verified_at: int
    keys: tuple[tuple[int, int], ...]
    V: np.ndarray  # (d, d) uint64, columns = 2-adic coefficient vectors
    vals: np.ndarray  # (d,) 2-adic exponents
    hnf: np.ndarray  # (d, d) uint64 upper triangular
    hnf_exponents: list[int]
    scale_exponent: int  # basis vectors are hnf columns / 2^scale_exponent
    guard: int = DEFAULT_GUARD
    _expansions: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def dim(self) -> int:
        return len(self.keys)

    @property
    def cleared_power(self) -> int:
        """Power of 3 scaled out of the basis (3 is a unit 2-locally)."""
        return 0

    @property
    def basis_matrix(self) -> list[list[int]]:
        return [[int(x) for x in row] for row in self.hnf]

    def elementary_exponents(self) -> list[int]:
        return sorted(int(v) for v in self.vals)

    def basis_vector(self, k: int) -> dict[tuple[int, int], Fraction]:
        """k-th HNF basis vector in divided coordinates."""
        den = 1 << self.scale_exponent
        return {key: Fraction(int(self.hnf[i, k]), den) for i, key in enumerate(self.keys) if self.hnf[i, k]}

    def basis_forms(self) -> list[InhomForm]:
        return [InhomForm.from_terms(divided_to_terms(self.basis_vector(k)), self.top_weight) for k in range(self.dim)]

    def coordinates(self, coords: Mapping[tuple[int, int], Fraction]) -> list[Fraction] | None:
        """Coordinates of a divided-coordinate vector in the HNF basis, or None
        if the vector involves monomials beyond the top weight."""
        pos = divided_position(self.top_weight)
        x = [Fraction(0)] * self.dim
        for key, c in coords.items():
            if key not in pos:
                if c:
                    return None
                continue
            x[pos[key]] = Fraction(c)
        scale = 1 << self.scale_exponent
        y = [Fraction(0)] * self.dim
        H = self.hnf
        for i in reversed(range(self.dim)):
            acc = scale * x[i]
            row = H[i]
            for k in range(i + 1, self.dim):
                if row[k] and y[k]:
                    acc -= int(row[k]) * y[k]
            y[i] = acc / (1 << self.hnf_exponents[i])
        return y

    def contains(self, x) -> bool:
        """Membership of a form (or divided-coordinate dict) in the lattice."""
        coords = _as_divided(x)
        y = self.coordinates(coords)
        if y is None:
            return False
        return all(strip_three(c.denominator)[0] == 1 for c in y)

    def solution_basis(self, prec: int) -> np.ndarray:
        """Residues of the saturated basis expansions (A V)_k / 2^{v_k} at prec.

        Column k is exact modulo 2^(64 - v_k). Integrality of every basis
        vector is re-checked at this precision.
        """
        got = self._expansions.get(prec)
        if got is not None:
            return got
        with self._lock:
            A = expansion_matrix(self.top_weight, prec)
            AV = A @ self.V
            out = np.empty_like(AV)
            for k in range(self.dim):
                v = int(self.vals[k])
                col = AV[:, k]
                if v and np.any(col & np.uint64((1 << v) - 1)):
                    raise PrecisionError(
                        f"lattice basis vector {k} of weight {self.top_weight} is not integral at precision {prec}")
                out[:, k] = col >> np.uint64(v)
            self._expansions[prec] = out
        return out

    def coefficient_vector(self, k: int) -> list[Fraction]:
        v = int(self.vals[k])
        return [Fraction(int(x), 1 << v) for x in self.V[:, k]]

    def to_json(self, dump: bool = False) -> dict:
        out = {
            "top_weight": self.top_weight,
            "dimension": self.dim,
            "prec": self.prec,
            "verified_at": self.verified_at,
            "coordinates": "divided: G^r C^b, G=(E1-1)/6, C=(E1^3-E3)/27",
            "scale_exponent": self.scale_exponent,
            "cleared_power": self.cleared_power,
            "elementary_exponents": self.elementary_exponents(),
            "index_log2": int(sum(int(v) for v in self.vals)),
        }
        if dump:
            out["basis_keys"] = [list(k) for k in self.keys]
            out["basis_matrix"] = [[str(int(x)) for x in row] for row in self.hnf]
        return out


def _as_divided(x) -> dict[tuple[int, int], Fraction]:
    if isinstance(x, Mapping):
        return {k: Fraction(v) for k, v in x.items()}
    terms = {}
    for key, c in x.items():
        c = Scalar.coerce(c)
        if c.im:
            raise ValueError("lattice membership expects rational coefficients")
        terms[key] = c.re
    return terms_to_divided(terms)


_CACHE: dict[tuple[int, int], DLattice] = {}
_CACHE_LOCK = threading.Lock()


def d_lattice(t: int, guard: int = DEFAULT_GUARD) -> DLattice:
    """2-local lattice of divided congruences of top weight <= t (cached)."""
    if t < 0:
        raise ValueError("weight must be nonnegative")
    key = (t, guard)
    got = _CACHE.get(key)
    if got is not None:
        return got
    g = guard
    last_error = None
    for _ in range(4):
        try:
            lat = _build_lattice(t, g)
        except PrecisionError as exc:
            last_error = exc
            g *= 2
            continue
        with _CACHE_LOCK:
            _CACHE.setdefault(key, lat)
        return _CACHE[key]
    raise PrecisionError(f"lattice of weight {t} failed after raising the guard: {last_error}")


def saturate(A: np.ndarray, search_rows: int, max_depth: int = MAX_DEPTH):
    """2-adic saturation of the column span of A (in place on A).

    Returns (S, V, vals): V (cols x cols, uint64) and vals with
    A_original @ V[:, k] = 2^vals[k] * S[:, k], where the columns S[:, k] are
    the saturated expansions (exact modulo 2^(64 - vals[k])). Pivots are
    taken among the first ``search_rows`` rows; the remaining rows serve as
    an independent integrality check.
    """
    d = A.shape[1]
    V = np.eye(d, dtype=np.uint64)
    rank, perm, prow, vals = kernels.eliminate(A, V, 64, search_rows=search_rows)
    if rank < d:
        raise PrecisionError(f"expansion matrix has 2-adic rank {rank} < {d} on {search_rows} rows")
    if int(vals.max(initial=0)) > max_depth:
        raise PrecisionError(f"2-adic depth {int(vals.max())} exceeds {max_depth} bits")
    for k in range(d):
        v = int(vals[k])
        if v and np.any(A[search_rows:, k] & np.uint64((1 << v) - 1)):
            raise PrecisionError(f"saturated column {k} fails integrality beyond {search_rows} coefficients")
    return _shifted(A, vals), V, vals


def _build_lattice(t: int, guard: int) -> DLattice:
    keys = divided_index(t)
    d = len(keys)
    prec = precision_policy(t, guard)
    prec2 = 2 * prec
    A = expansion_matrix(t, prec2).copy()
    S, V, vals = saturate(A, prec)
    E = int(vals.max(initial=0))
    gens = np.empty((d, d), dtype=np.uint64)
    for k in range(d):
        gens[:, k] = V[:, k] << np.uint64(E - int(vals[k]))
    H, exps = hnf_mod2k(gens, E) if E > 0 else (np.eye(d, dtype=np.uint64), [0] * d)
    lat = DLattice(t, prec, prec2, keys, V, vals, H, exps, E, guard)
    lat._expansions[prec2] = S
    return lat


def _shifted(L: np.ndarray, vals: np.ndarray) -> np.ndarray:
    out = np.empty_like(L)
    for k in range(L.shape[1]):
        out[:, k] = L[:, k] >> np.uint64(int(vals[k]))
    return out


def solve_mod2k(M: np.ndarray, Y: np.ndarray, bits: int, search_rows: int) -> np.ndarray | None:
    """A solution z of M z = Y (mod 2^bits), or None.

    Pivots come from the first ``search_rows`` rows. If the system is
    solvable there but the residual does not vanish on the remaining rows,
    the precision is insufficient and PrecisionError is raised. Returned
    entries are reduced modulo 2^bits.
    """
    if not 0 <= bits <= 64:
        raise PrecisionError(f"modulus 2^{bits} exceeds the 64-bit working precision")
    rows, cols = M.shape
    mask = np.uint64((1 << bits) - 1) if bits < 64 else np.uint64(MASK)
    if bits == 0:
        return np.zeros(cols, dtype=np.uint64)
    if cols == 0:
        L = M.copy()
        U = np.eye(0, dtype=np.uint64)
        rank, prow, vals = 0, [], []
    else:
        L = np.ascontiguousarray(M.copy())
        U = np.eye(cols, dtype=np.uint64)
        rank, _, prow, vals = kernels.eliminate(L, U, bits, search_rows=search_rows)
    R = np.array(Y, dtype=np.uint64).copy()
    y = np.zeros(cols, dtype=np.uint64)
    for k in range(rank):
        r, v = int(prow[k]), int(vals[k])
        rv = int(R[r]) & int(mask)
        if rv == 0:
            continue
        if ctz(rv) < v:
            return None
        unit = int(L[r, k]) >> v
        yk = ((rv >> v) * kernels.odd_inverse(unit)) & ((1 << (bits - v)) - 1)
        y[k] = np.uint64(yk)
        R -= np.uint64(yk) * L[:, k]
    if np.any(R[:search_rows] & mask):
        return None
    if np.any(R[search_rows:] & mask):
        raise PrecisionError("solution found on the certified rows fails on the verification rows")
    if cols == 0:
        return y
    return (U @ y) & mask
