from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ellbeta.exact import DELTA, Scalar, bernoulli_number
from ellbeta.forms import (E1, E3, InhomForm, LaurentForm, ModForm, PrecisionError, RecognitionError,
                           basic_h, dim_forms, eisenstein_even_star, eisenstein_odd, expand, format_terms,
                           monomial_basis, precision_policy, recognize, recognize_inhom)

import oracles


@pytest.mark.parametrize("w", [1, 3, 5, 7])
def test_odd_eisenstein_against_divisor_sums(w):
    got = eisenstein_odd(w, 120)
    assert [c.re for c in got.coeffs] == oracles.eisenstein_oracle(w, 120)


def test_eisenstein_leading_terms():
    assert [c.re for c in eisenstein_odd(1, 4).coeffs] == [1, 6, 0, 6]
    assert [c.re for c in eisenstein_odd(3, 3).coeffs] == [1, -9, 27]


@pytest.mark.parametrize("two_n", [2, 4, 6])
def test_even_star_against_definition(two_n):
    n = 40
    const = -bernoulli_number(two_n) / (2 * two_n)
    g = [const] + [sum(d ** (two_n - 1) for d in range(1, m + 1) if m % d == 0) for m in range(1, n)]
    g3 = [g[m // 3] if m % 3 == 0 else 0 for m in range(n)]
    want = [a - 3 ** (two_n - 1) * b for a, b in zip(g, g3)]
    assert [c.re for c in eisenstein_even_star(two_n, n).coeffs] == want


def test_dimensions_and_bases():
    assert [dim_forms(k) for k in range(7)] == [1, 1, 1, 2, 2, 2, 3]
    assert monomial_basis(6) == [(6, 0), (3, 1), (0, 2)]


exps = st.tuples(st.integers(0, 4), st.integers(0, 2))
coef = st.fractions(min_value=-20, max_value=20, max_denominator=9)


@given(st.dictionaries(exps, st.tuples(coef, coef), min_size=1, max_size=4))
def test_expand_matches_naive_oracle(raw):
    terms = {k: Scalar.from_zeta_components(u, w) for k, (u, w) in raw.items()}
    f = InhomForm.from_terms({k: v for k, v in terms.items() if v} or {(0, 0): 1})
    n = 12
    got = [c.zeta_components() for c in expand(f, n).coeffs]
    want = oracles.expand_terms({k: c.zeta_components() for k, c in f.terms.items()}, n)
    assert got == want


def test_products_expand_multiplicatively():
    f = E1 ** 2 * 3 - E1 * E3 * DELTA
    g = E3 + E1 ** 3 * Fraction(1, 4)
    n = 30
    assert expand(f * g, n) == expand(f, n) * expand(g, n)


def test_laurent_form_inverse_of_e1():
    inv = LaurentForm(-1, {(-1, 0): 1})
    assert expand(inv * E1, 20) == expand(ModForm(0, {(0, 0): 1}), 20)
    assert inv.pole_order == 1


def test_weight_checks():
    with pytest.raises(ValueError):
        ModForm(2, {(1, 0): 1})
    with pytest.raises(ValueError):
        InhomForm.from_terms({(3, 1): 1}, 4)


def test_recognition_round_trip():
    f = E1 ** 6 * Fraction(121, 272160) - E1 ** 3 * E3 * Fraction(152, 272160) + E3 ** 2 * Fraction(40, 272160)
    assert recognize(expand(f, 30), 6) == f
    h = basic_h() ** 3
    assert recognize_inhom(expand(h, 60), 6) == h


def test_recognition_failures_are_explicit():
    with pytest.raises(PrecisionError):
        recognize(expand(E3, 5), 3)
    bad = expand(E1, 30) + expand(E3, 30)
    with pytest.raises(RecognitionError):
        recognize(bad, 3)


def test_basic_h_is_three_g_plus_nine_g_squared():
    G = (E1 - 1) * Fraction(1, 6)
    assert basic_h() == G * 3 + G * G * 9


def test_precision_policy_regression():
    # dimension of the coefficient space of weights <= t plus the guard of 10
    assert precision_policy(0) == 11
    assert precision_policy(6) == 22
    assert precision_policy(48) == 435


def test_json_round_trip():
    f = E1 ** 3 * DELTA - E3 * Fraction(2, 3)
    obj = f.to_json()
    assert obj["weight"] == 3 and {"a", "b", "c"} <= set(obj["monomials"][0])
    assert ModForm.from_json(obj) == f
    h = basic_h() ** 2
    assert InhomForm.from_json(h.to_json()) == h


def test_format_terms():
    assert format_terms({(2, 0): Scalar(1), (0, 0): Scalar(-1)}) == "(1)*E1^2 + (-1)*1"
    assert format_terms({}) == "0"
