from fractions import Fraction as F

import pytest

from ellbeta.exact import DELTA
from ellbeta.forms import E1, E3, LaurentForm, ModForm, expand
from ellbeta.genus import (cp_genus, delta_parity, genus_series, hazewinkel_images, rational_part,
                           x_element, x_poly, x_relations_hold, z_element)
from ellbeta.vpoly import V2

I_OVER_ROOT3 = DELTA / 3  # i / sqrt(3)
ONE = ModForm(0, {(0, 0): 1})

DISPLAYED_GENUS = [
    ONE,
    E1 * (I_OVER_ROOT3 / 2),
    E1 ** 2 * F(1, 12),
    (E1 ** 3 - E3) * (I_OVER_ROOT3 / 18),
    (E1 ** 4 * 13 - E1 * E3 * 16) * F(1, 2160),
    E1 ** 2 * (E1 ** 3 - E3) * (I_OVER_ROOT3 / 216),
    (E1 ** 6 * 121 - E1 ** 3 * E3 * 152 + E3 ** 2 * 40) * F(1, 272160),
    E1 * (E1 ** 6 * 7 - E1 ** 3 * E3 * 11 + E3 ** 2 * 4) * (I_OVER_ROOT3 / 19440),
]


def test_genus_matches_displayed_expansion():
    g = genus_series(7)
    assert list(g.symbolic) == DISPLAYED_GENUS


def test_genus_independent_of_precision():
    assert genus_series(4, 40).symbolic == genus_series(4).symbolic


def test_genus_rejects_bad_order():
    with pytest.raises(ValueError):
        genus_series(0)


def test_projective_space_values():
    assert cp_genus(1) == E1 * I_OVER_ROOT3
    assert cp_genus(3) == (E1 ** 3 * 5 - E3 * 2) * (I_OVER_ROOT3 / 9)
    assert cp_genus(7) == (E1 ** 4 * E3 * 70 - E1 * E3 ** 2 * 14 - E1 ** 7 * 65) * (I_OVER_ROOT3 / 243)


def test_hazewinkel_images():
    h = hazewinkel_images()
    assert h.v1 == E1 * I_OVER_ROOT3
    assert h.v2 == (E1 ** 3 * 4 - E3) * (I_OVER_ROOT3 / 9)
    assert h.v3 == E1 * (E1 ** 3 * E3 * 5 - E3 ** 2 - E1 ** 6 * 4) * (I_OVER_ROOT3 / 81)
    assert h.v3 - h.v1 * h.v2 * (h.v2 + h.v1 ** 3) * 3 == ModForm(7, {})


def test_x_relations():
    assert x_relations_hold()
    assert x_poly(0) == V2
    assert x_poly(3) == x_poly(2) ** 2
    for n in range(4):
        x = x_element(n)
        assert x.is_holomorphic and x.weight == 3 * 2 ** n


def test_x2_closed_form():
    h = hazewinkel_images()
    x1 = h.v2 ** 2 - h.v1 ** 3 * (h.v2 + h.v1 ** 3) * 3
    assert x_element(1).value == x1
    assert x_element(2).value == h.v2 ** 4 - h.v1 ** 3 * h.v2 ** 3 * 7 + h.v1 ** 9 * h.v2 * 15 + h.v1 ** 12 * 9


@pytest.mark.parametrize("i,m", [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2)])
def test_z_congruent_to_one(i, m):
    z = z_element(i, m)
    assert z.weight == m * 2 ** i
    assert z.congruent_to_one(120)


def test_z_congruence_is_sharp():
    # z_{1,1} - 1 is divisible by 8 but not by 16 in its expansion
    z = z_element(1, 1)
    assert isinstance(z.value, LaurentForm)
    s = expand(z.value, 40)
    assert any(c.zeta_components()[0] % 16 for c in s.coeffs[1:] if c.zeta_components()[0].denominator == 1)


def test_delta_parity():
    assert delta_parity(E1 * DELTA) == 1
    assert delta_parity(E1 ** 2) == 0
    with pytest.raises(AssertionError):
        delta_parity(E1 * DELTA + E1)
    r, e = rational_part(hazewinkel_images().v1)
    assert e == 1 and r == E1 * F(1, 3)
