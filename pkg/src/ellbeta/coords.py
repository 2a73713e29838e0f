"""Two coordinate systems on forms of weight <= t.

Monomial coordinates use E1^a E3^b. Divided coordinates use G^r C^b with
G = (E1 - 1)/6 and C = (E1^3 - E3)/27, both of which have integral
q-expansions (G = q + q^3 + ..., C = q + 3q^2 + 9q^3 + ...). Every monomial is
an integer polynomial in G and C, so a form whose monomial coordinates have
2-power denominators keeps (at most) those denominators in divided
coordinates, while the divided basis itself is integral. This is what keeps
2-adic precision under control in the lattice code.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Mapping


@lru_cache(maxsize=None)
def divided_index(t: int) -> tuple[tuple[int, int], ...]:
    """Ordered divided basis (r, b), r + 3b <= t."""
    return tuple((r, b) for b in range(t // 3 + 1) for r in range(t - 3 * b + 1))


@lru_cache(maxsize=None)
def divided_position(t: int) -> dict[tuple[int, int], int]:
    return {key: k for k, key in enumerate(divided_index(t))}


@lru_cache(maxsize=None)
def monomial_index(t: int) -> tuple[tuple[int, int], ...]:
    """All monomials of weight <= t, grouped by weight, decreasing a."""
    return tuple((k - 3 * b, b) for k in range(t + 1) for b in range(k // 3 + 1))


@lru_cache(maxsize=4096)
def mono_to_divided(a: int, b: int) -> tuple[tuple[tuple[int, int], int], ...]:
    """E1^a E3^b = sum_k C(b,k) (-27 C)^k (1 + 6G)^(a + 3b - 3k), integer coefficients."""
    if a < 0 or b < 0:
        raise ValueError("only holomorphic monomials have divided coordinates")
    out: dict[tuple[int, int], int] = {}
    for k in range(b + 1):
        ck = comb(b, k) * (-27) ** k
        e = a + 3 * (b - k)
        for i in range(e + 1):
            out[(i, k)] = out.get((i, k), 0) + ck * comb(e, i) * 6 ** i
    return tuple((key, v) for key, v in out.items() if v)


@lru_cache(maxsize=4096)
def divided_to_mono(r: int, b: int) -> tuple[tuple[tuple[int, int], Fraction], ...]:
    """G^r C^b = (E1 - 1)^r (E1^3 - E3)^b / (6^r 27^b)."""
    den = 6 ** r * 27 ** b
    out: dict[tuple[int, int], int] = {}
    for k in range(b + 1):
        ck = comb(b, k) * (-1) ** k
        for i in range(r + 1):
            key = (i + 3 * (b - k), k)
            out[key] = out.get(key, 0) + ck * comb(r, i) * (-1) ** (r - i)
    return tuple((key, Fraction(v, den)) for key, v in out.items() if v)


def terms_to_divided(terms: Mapping[tuple[int, int], Fraction]) -> dict[tuple[int, int], Fraction]:
    """Rational monomial coefficients -> rational divided coefficients."""
    acc: dict[tuple[int, int], Fraction] = {}
    for (a, b), c in terms.items():
        c = Fraction(c)
        for key, v in mono_to_divided(a, b):
            acc[key] = acc.get(key, 0) + c * v
    return {k: v for k, v in acc.items() if v}


def divided_to_terms(coords: Mapping[tuple[int, int], Fraction]) -> dict[tuple[int, int], Fraction]:
    acc: dict[tuple[int, int], Fraction] = {}
    for (r, b), c in coords.items():
        if not c:
            continue
        for key, v in divided_to_mono(r, b):
            acc[key] = acc.get(key, 0) + c * v
    return {k: v for k, v in acc.items() if v}
