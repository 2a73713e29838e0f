from fractions import Fraction as F
from math import prod

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ellbeta.coords import divided_index
from ellbeta.forms import E1, E3, InhomForm
from ellbeta.lattice import d_lattice, hnf_mod2k, solve_mod2k

import oracles

N = 60


def _odd_part(n: int) -> int:
    while n % 2 == 0:
        n //= 2
    return n


def divided_expansions(t: int, n: int) -> list[list[F]]:
    """Columns: q-expansions of G^r C^b, computed with the oracle series."""
    e1 = oracles.eisenstein_oracle(1, n)
    e3 = oracles.eisenstein_oracle(3, n)
    G = [(c - (1 if k == 0 else 0)) / 6 for k, c in enumerate(e1)]
    cube = oracles.power(e1, 3, n)
    C = [(a - b) / 27 for a, b in zip(cube, e3)]
    return [oracles.convolve(oracles.power(G, r, n), oracles.power(C, b, n), n) for r, b in divided_index(t)]


def row_lattice(t: int) -> list[list[int]]:
    cols = divided_expansions(t, N)
    d = len(cols)
    assert all(cols[k][i].denominator == 1 for k in range(d) for i in range(N))
    R = oracles.hnf_columns([[int(cols[k][i]) for k in range(d)] for i in range(N)])
    assert len(R) == d
    return R


def oracle_generators(t: int) -> list[list[F]]:
    """Generators of {x : sum x_k col_k integral}: the lattice dual to the
    row lattice of the expansion matrix."""
    R = row_lattice(t)
    d = len(R)
    return [oracles.solve_rational(R, [F(int(i == e)) for i in range(d)]) for e in range(d)]


@pytest.mark.parametrize("t", [0, 3, 6])
def test_lattice_matches_oracle(t):
    L = d_lattice(t)
    keys = divided_index(t)
    gens = oracle_generators(t)
    # every 2-local oracle generator lies in the lattice
    for g in gens:
        den = prod(c.denominator for c in g)
        odd = _odd_part(den)
        assert L.contains(dict(zip(keys, [c * odd for c in g])))
    # and every lattice basis vector has an integral expansion (3 inverted)
    cols = divided_expansions(t, N)
    for k in range(L.dim):
        b = L.basis_vector(k)
        series = [sum(b.get(key, 0) * cols[i][n] for i, key in enumerate(keys)) for n in range(N)]
        assert all(oracles.integral_away_from_three(c) for c in series)


@pytest.mark.parametrize("t", [3, 6])
def test_index_matches_oracle_determinant(t):
    # the row lattice HNF is triangular, so its determinant is the product of its pivots
    R = row_lattice(t)
    det = 1
    for r, col in enumerate(R):
        det *= next(x for x in col if x)
    assert det != 0
    two_part = (abs(det) & -abs(det)).bit_length() - 1
    assert two_part == sum(d_lattice(t).elementary_exponents())


def test_known_members_at_weight_three():
    L = d_lattice(3)
    h = (E1 ** 2 - 1) * F(1, 4)
    assert L.contains(h)
    assert not L.contains(h * F(1, 2))
    assert L.contains((E3 - 1 - h) * F(1, 2))
    assert not L.contains((E3 - 1 - h) * F(1, 4))
    assert L.contains(E1 * F(1, 3))  # 3 is inverted
    # regression values fixed by running the decision procedure
    assert not L.contains((E3 - E1 ** 3) * F(1, 4))
    assert L.contains(E3 - E1 ** 3)


def test_lattices_are_nested():
    small, big = d_lattice(3), d_lattice(6)
    for f in small.basis_forms():
        assert big.contains(f)
    assert not small.contains(E1 ** 6)


def test_lattice_json_is_deterministic():
    a = d_lattice(6).to_json(True)
    assert a == d_lattice(6).to_json(True)
    assert a["dimension"] == 12 and a["index_log2"] == 7


@given(st.lists(st.lists(st.integers(0, 255), min_size=4, max_size=4), min_size=1, max_size=5),
       st.integers(1, 8))
def test_hnf_mod2k_matches_oracle(cols, E):
    gens = np.array(cols, dtype=np.uint64).T.copy()
    H, exps = hnf_mod2k(gens, E)
    mine = [[int(H[i, k]) for i in range(4)] for k in range(4)]
    theirs = [list(c) for c in cols] + [[(1 << E) * int(i == k) for i in range(4)] for k in range(4)]
    assert oracles.same_lattice(mine, theirs)
    assert all(int(H[i, i]) == 1 << exps[i] for i in range(4))
    assert all(int(H[i, k]) == 0 for k in range(4) for i in range(k + 1, 4))


@given(st.lists(st.integers(0, 2 ** 20), min_size=12, max_size=12), st.lists(st.integers(0, 15), min_size=3, max_size=3))
def test_solve_mod2k_solutions_check(entries, z):
    M = np.array(entries, dtype=np.uint64).reshape(4, 3)
    Y = (M @ np.array(z, dtype=np.uint64))
    sol = solve_mod2k(M, Y, 20, 4)
    assert sol is not None
    assert np.array_equal((M @ sol) & np.uint64((1 << 20) - 1), Y & np.uint64((1 << 20) - 1))


def test_solve_mod2k_detects_unsolvable():
    M = np.array([[2], [4]], dtype=np.uint64)
    assert solve_mod2k(M, np.array([1, 0], dtype=np.uint64), 8, 2) is None


def test_contains_form_objects():
    assert d_lattice(3).contains(InhomForm.from_terms({(0, 0): 1}, 3))
