from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ellbeta.exact import (DELTA, ONE, ZETA3, Scalar, bernoulli_number, bernoulli_poly_third,
                           generalized_bernoulli_chi, integrality, is_three_integral, legendre3,
                           rational_from_str, rational_to_str, scalar_is_integral, strip_three)

import oracles

rationals = st.fractions(min_value=-1000, max_value=1000, max_denominator=50)
scalars = st.builds(Scalar, rationals, rationals)


def test_delta_squares_to_minus_three():
    assert DELTA * DELTA == Scalar(-3)


def test_zeta3_is_a_primitive_cube_root():
    assert ZETA3 ** 3 == ONE
    assert ZETA3 != ONE
    assert ZETA3 * ZETA3 + ZETA3 + 1 == Scalar(0)


@given(scalars, scalars, scalars)
def test_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


@given(scalars)
def test_inverse(a):
    if a:
        assert a * a.inverse() == ONE
        assert a / a == ONE
    else:
        with pytest.raises(ZeroDivisionError):
            a.inverse()


@given(scalars)
def test_zeta_components_round_trip(a):
    u, w = a.zeta_components()
    assert Scalar.from_zeta_components(u, w) == a
    assert a == u + ZETA3 * w


@given(scalars)
def test_json_round_trip(a):
    assert Scalar.from_json(a.to_json()) == a
    assert "/" in a.to_json()["re"]


def test_rational_string_format():
    assert rational_to_str(Fraction(-3, 4)) == "-3/4"
    assert rational_to_str(Fraction(5)) == "5/1"
    assert rational_from_str("7/21") == Fraction(1, 3)


def test_integrality_in_z_zeta3_one_third():
    assert scalar_is_integral(ZETA3)
    assert scalar_is_integral(DELTA / 3)
    assert not scalar_is_integral(DELTA / 2)
    # (1 + delta)/2 = 1 + zeta3 is integral although both coordinates are halves
    assert scalar_is_integral(Scalar(Fraction(1, 2), Fraction(1, 2)))
    w = integrality([1, Fraction(1, 9), Scalar(0, Fraction(1, 27)), Fraction(1, 2)])
    assert not w and w.offending_index == 3 and w.odd_denominator_cleared == 3


def test_strip_three():
    assert strip_three(54) == (2, 3)
    assert is_three_integral(Fraction(5, 81))
    assert not is_three_integral(Fraction(1, 6))


def test_legendre_symbol():
    assert [legendre3(d) for d in range(7)] == [0, 1, -1, 0, 1, -1, 0]


def test_bernoulli_numbers_against_akiyama_tanigawa():
    ref = oracles.bernoulli_minus(40)
    assert [bernoulli_number(n) for n in range(41)] == ref


@pytest.mark.parametrize("w", [1, 3, 5, 7, 9, 11])
def test_generalized_bernoulli_against_oracle(w):
    assert generalized_bernoulli_chi(w) == oracles.generalized_bernoulli(w)


def test_generalized_bernoulli_small_values():
    assert generalized_bernoulli_chi(1) == Fraction(-1, 3)
    assert generalized_bernoulli_chi(3) == Fraction(2, 3)
    assert bernoulli_poly_third(1) == Fraction(-1, 6)


def test_generalized_bernoulli_rejects_even_weight():
    with pytest.raises(ValueError):
        generalized_bernoulli_chi(2)
