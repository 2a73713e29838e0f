"""The level-3 elliptic genus, its values on CP^n and the Hazewinkel images.

Also builds Shimomura's elements x_n and z_{i,m} as forms.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .exact import DELTA, bernoulli_poly_third, is_three_integral
from .forms import (E1, E3, DEFAULT_GUARD, LaurentForm, ModForm, RecognitionError, dim_forms,
                    eisenstein_even_star, eisenstein_odd, expand, recognize)
from .qseries import QSeries, XSeries, exp_series
from .residues import two_adic
from .vpoly import V1, V2, VPoly


def _default_prec(xmax: int) -> int:
    return dim_forms(xmax) + DEFAULT_GUARD + 10


def genus_exponent(xmax: int, prec: int) -> XSeries:
    """The logarithm of the genus series, truncated at x^xmax."""
    zero = QSeries.zero(prec)
    coeffs = [zero] * (xmax + 1)
    for n in range(1, xmax // 2 + 1):
        c = Fraction(3, factorial(2 * n))
        coeffs[2 * n] = eisenstein_even_star(2 * n, prec).scale(c)
    for k in range((xmax - 1) // 2 + 1):
        w = 2 * k + 1
        # -2 * (delta/2) * 3^(2k) B_w(1/3) / w / w!
        c = DELTA * (-Fraction(3 ** (2 * k)) * bernoulli_poly_third(w) / w / factorial(w))
        coeffs[w] = eisenstein_odd(w, prec).scale(c)
    return XSeries(coeffs, xmax)


@dataclass(frozen=True)
class GenusSeries:
    body: XSeries
    symbolic: tuple[ModForm, ...]

    @property
    def xmax(self) -> int:
        return self.body.xmax

    def to_json(self) -> dict:
        return {"xmax": self.xmax, "prec": self.body.qprec,
                "coefficients": [f.to_json() for f in self.symbolic]}


@lru_cache(maxsize=32)
def genus_series(xmax: int, prec: int | None = None) -> GenusSeries:
    """Q(x) to order x^xmax with each coefficient recognized as a form."""
    if xmax < 1:
        raise ValueError("xmax must be at least 1")
    if prec is None:
        prec = _default_prec(xmax)
    body = exp_series(genus_exponent(xmax, prec))
    symbolic = []
    for n in range(xmax + 1):
        try:
            symbolic.append(recognize(body[n], n))
        except RecognitionError as exc:
            raise RecognitionError(f"x^{n} coefficient of the genus is not a weight-{n} form") from exc
    if symbolic[0] != ModForm(0, {(0, 0): 1}):
        raise RecognitionError("genus series does not start with 1")
    return GenusSeries(body, tuple(symbolic))


def cp_genus(n: int, prec: int | None = None) -> ModForm:
    """phi(CP^n) = [x^n] Q(x)^(n+1), recognized as a weight-n form."""
    if n < 1:
        raise ValueError("n must be positive")
    if prec is None:
        prec = _default_prec(n)
    body = exp_series(genus_exponent(n, prec))
    return recognize((body ** (n + 1))[n], n)


@dataclass(frozen=True)
class HazewinkelImages:
    v1: ModForm
    v2: ModForm
    v3: ModForm

    def to_json(self) -> dict:
        return {"v1": self.v1.to_json(), "v2": self.v2.to_json(), "v3": self.v3.to_json()}


CLOSED_V1 = E1 * (DELTA / 3)
CLOSED_V2 = (E1 ** 3 * 4 - E3) * (DELTA / 27)
CLOSED_V3 = E1 * (E1 ** 3 * E3 * 5 - E3 ** 2 - E1 ** 6 * 4) * (DELTA / 243)


@lru_cache(maxsize=1)
def hazewinkel_images() -> HazewinkelImages:
    """v1, v2, v3 from the CP^n values, checked against their closed forms."""
    w1, w3, w7 = cp_genus(1), cp_genus(3), cp_genus(7)
    v1 = w1
    v2 = (w3 - w1 ** 3) / 2
    v3 = w7 / 4 - (w1 ** 7 + w1 * w3 ** 2) / 8
    for name, got, want in (("v1", v1, CLOSED_V1), ("v2", v2, CLOSED_V2), ("v3", v3, CLOSED_V3)):
        if got != want:
            raise AssertionError(f"{name} differs from its closed form: {got} != {want}")
    if v3 != v1 * v2 * (v2 + v1 ** 3) * 3:
        raise AssertionError("v3 is not 3 v1 v2 (v2 + v1^3)")
    return HazewinkelImages(v1, v2, v3)


# ---------------------------------------------------------------------------
# Shimomura's elements

X1_POLY = V2 ** 2 - 3 * V1 ** 3 * (V2 + V1 ** 3)
X2_POLY = V2 ** 4 - 7 * V1 ** 3 * V2 ** 3 + 15 * V1 ** 9 * V2 + 9 * V1 ** 12


@lru_cache(maxsize=None)
def x_poly(n: int) -> VPoly:
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return V2
    if n == 1:
        return X1_POLY
    if n == 2:
        return X2_POLY
    return x_poly(n - 1) ** 2


def z_poly(i: int, m: int) -> VPoly:
    if i < 1 or m < 1:
        raise ValueError("z_{i,m} needs i >= 1 and m >= 1")
    j = m * 2 ** i
    return VPoly.v1(j) - m * 2 ** (i + 1) * VPoly.v1(j - 3) * V2


@dataclass(frozen=True)
class ShimomuraElement:
    kind: str  # "x" or "z"
    index: tuple[int, ...]
    poly: VPoly
    value: ModForm | LaurentForm

    @property
    def weight(self) -> int:
        return self.value.weight

    @property
    def is_holomorphic(self) -> bool:
        return isinstance(self.value, ModForm)

    def congruent_to_one(self, prec: int = 100) -> bool:
        """For z_{i,m}: expansion - 1 divisible by 2^(i+2) (3 inverted)."""
        if self.kind != "z":
            raise ValueError("only z elements carry this congruence")
        need = self.index[0] + 2
        s = expand(self.value, prec) - QSeries.one(prec)
        for c in s.coeffs:
            for part in c.zeta_components():
                if part and (not is_three_integral(part) or two_adic(part)[1] < need):
                    return False
        return True

    def to_json(self) -> dict:
        return {"kind": self.kind, "index": list(self.index), "weight": self.weight,
                "value": self.value.to_json()}


@lru_cache(maxsize=None)
def x_element(n: int) -> ShimomuraElement:
    poly = x_poly(n)
    value = poly.to_form()
    if not isinstance(value, ModForm) or value.weight != 3 * 2 ** n:
        raise AssertionError(f"x_{n} is not a holomorphic form of weight {3 * 2 ** n}")
    return ShimomuraElement("x", (n,), poly, value)


@lru_cache(maxsize=None)
def z_element(i: int, m: int) -> ShimomuraElement:
    poly = z_poly(i, m)
    return ShimomuraElement("z", (i, m), poly, poly.to_form())


def x_relations_hold() -> bool:
    """Check both expressions for x1 and x2 against the v3 decomposition."""
    h = hazewinkel_images()
    v1, v2, v3 = h.v1, h.v2, h.v3
    x1 = X1_POLY.to_form()
    x2 = X2_POLY.to_form()
    # x1 = v2^2 - v1^2 v2^{-1} v3, checked after multiplying by v2
    ok1 = v2 * x1 == v2 ** 3 - v1 ** 2 * v3
    ok2 = x1 ** 2 - v1 ** 3 * v2 ** 3 - v1 ** 5 * v3 == x2
    return ok1 and ok2


def delta_parity(f) -> int:
    """Parity e with f = delta^e * (rational form); raises if f mixes parities."""
    re = any(c.re for _, c in f.items())
    im = any(c.im for _, c in f.items())
    if re and im:
        raise AssertionError("form mixes rational and delta-multiple coefficients")
    return 1 if im else 0


def rational_part(f):
    """delta^(-e) f as a rational form, together with e."""
    e = delta_parity(f)
    if e == 0:
        return f, 0
    return f * (-DELTA / 3), 1
