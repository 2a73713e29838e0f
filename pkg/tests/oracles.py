"""Independent reference implementations used to check the package.

Everything here is deliberately naive: plain Python integers and Fractions,
no numpy, no shared code with the package.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb

MOD64 = 1 << 64


def chi3(d: int) -> int:
    return (0, 1, -1)[d % 3]


def divisor_chi_sum(n: int, power: int) -> int:
    return sum(chi3(d) * d ** power for d in range(1, n + 1) if n % d == 0)


def eisenstein_oracle(w: int, n_terms: int) -> list[Fraction]:
    """E_w = 1 - (2w / B_{w,chi}) sum_n sum_{d|n} chi(d) d^(w-1) q^n."""
    c = -Fraction(2 * w) / generalized_bernoulli(w)
    return [Fraction(1)] + [c * divisor_chi_sum(n, w - 1) for n in range(1, n_terms)]


def bernoulli_at(n: int) -> list[Fraction]:
    """B_0..B_n by the Akiyama-Tanigawa algorithm (B_1 = +1/2 convention)."""
    out = []
    for m in range(n + 1):
        a = [Fraction(0)] * (m + 1)
        for k in range(m + 1):
            a[k] = Fraction(1, k + 1)
            for j in range(k, 0, -1):
                a[j - 1] = j * (a[j - 1] - a[j])
        out.append(a[0])
    return out


def bernoulli_minus(n: int) -> list[Fraction]:
    """Bernoulli numbers with B_1 = -1/2."""
    b = bernoulli_at(n)
    if n >= 1:
        b[1] = -b[1]
    return b


def bernoulli_polynomial(n: int, x: Fraction) -> Fraction:
    b = bernoulli_minus(n)
    return sum(comb(n, k) * b[k] * Fraction(x) ** (n - k) for k in range(n + 1))


def generalized_bernoulli(w: int) -> Fraction:
    """B_{w,chi} = 3^(w-1) sum_{a=1}^{3} chi(a) B_w(a/3)."""
    return 3 ** (w - 1) * sum(chi3(a) * bernoulli_polynomial(w, Fraction(a, 3)) for a in (1, 2, 3))


def convolve(a: list, b: list, n: int) -> list:
    out = [0] * n
    for i in range(min(n, len(a))):
        if a[i] == 0:
            continue
        for j in range(min(n - i, len(b))):
            out[i + j] += a[i] * b[j]
    return out


def power(a: list, e: int, n: int) -> list:
    out = [1] + [0] * (n - 1)
    for _ in range(e):
        out = convolve(out, a, n)
    return out


def zeta_mul(x: tuple, y: tuple) -> tuple:
    """(u1 + w1 z)(u2 + w2 z) with z^2 = -1 - z."""
    u1, w1 = x
    u2, w2 = y
    return (u1 * u2 - w1 * w2, u1 * w2 + w1 * u2 - w1 * w2)


def expand_terms(terms: dict, n: int) -> list[tuple[Fraction, Fraction]]:
    """Exact expansion of sum c E1^a E3^b (a >= 0) as zeta components, naively."""
    e1 = eisenstein_oracle(1, n)
    e3 = eisenstein_oracle(3, n)
    out_u = [Fraction(0)] * n
    out_w = [Fraction(0)] * n
    for (a, b), (cu, cw) in terms.items():
        if a < 0:
            raise ValueError("oracle expands holomorphic terms only")
        s = convolve(power(e1, a, n), power(e3, b, n), n)
        for k in range(n):
            u, w = zeta_mul((cu, cw), (s[k], 0))
            out_u[k] += u
            out_w[k] += w
    return list(zip(out_u, out_w))


def is_three_power(n: int) -> bool:
    while n % 3 == 0:
        n //= 3
    return n == 1


def integral_away_from_three(x: Fraction) -> bool:
    return is_three_power(Fraction(x).denominator)


# ---------------------------------------------------------------------------
# integer Hermite normal form (fraction-free, dense)

def hnf_columns(cols: list[list[int]]) -> list[list[int]]:
    """Column-style HNF of the Z-span of the given integer column vectors.

    Returns lower-triangular generators as a list of columns: for each pivot
    row r (top to bottom) one column with positive pivot at r, zeros above,
    and entries to the right of earlier pivots reduced into [0, pivot).
    """
    if not cols:
        return []
    m = len(cols[0])
    work = [list(c) for c in cols if any(c)]
    basis = []
    for r in range(m):
        # gcd-combine all columns with a nonzero entry in row r
        piv = None
        rest = []
        for c in work:
            if c[r] == 0:
                rest.append(c)
                continue
            if piv is None:
                piv = c
                continue
            while c[r] != 0:
                q = piv[r] // c[r]
                piv = [p - q * x for p, x in zip(piv, c)]
                piv, c = c, piv
            if any(c):
                rest.append(c)
        if piv is None:
            work = rest
            continue
        if piv[r] < 0:
            piv = [-x for x in piv]
        basis.append((r, piv))
        work = rest
    # reduce entries below each pivot using later pivots
    for idx in range(len(basis) - 1, -1, -1):
        r, col = basis[idx]
        for r2, col2 in basis[idx + 1:]:
            q = col[r2] // col2[r2]
            if q:
                col = [a - q * b for a, b in zip(col, col2)]
        basis[idx] = (r, col)
    return [c for _, c in basis]


def same_lattice(cols_a: list[list[int]], cols_b: list[list[int]]) -> bool:
    return hnf_columns(cols_a) == hnf_columns(cols_b)


def solve_rational(A: list[list[Fraction]], y: list[Fraction]) -> list[Fraction] | None:
    """Some x with A x = y (Gauss-Jordan over Q), or None."""
    rows, cols = len(A), len(A[0]) if A else 0
    M = [list(map(Fraction, A[i])) + [Fraction(y[i])] for i in range(rows)]
    piv_cols = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        piv_cols.append(c)
        r += 1
    if any(M[i][cols] != 0 for i in range(r, rows)):
        return None
    x = [Fraction(0)] * cols
    for i, c in enumerate(piv_cols):
        x[c] = M[i][cols]
    return x
