"""Polynomials in v1 (Laurent) and a second generator, with Scalar coefficients.

The second generator is v2 by default; the basis "E3" uses E3 instead, which
is convenient for the binomial identities in (v1, E3). Both pairs generate
the ring of level-3 forms over Z[zeta3, 1/3], so reductions modulo
(2^a, v1^j) can be carried out on either set of coordinates.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .exact import DELTA, ONE, Scalar, frozen_reduce
from .forms import LaurentForm, InhomForm, mul_terms, pow_terms, add_terms, scale_terms

V1_TERMS = {(1, 0): DELTA / 3}
V2_TERMS = {(3, 0): DELTA * Fraction(4, 27), (0, 1): -DELTA / 27}
E3_TERMS = {(0, 1): ONE}
# inverse substitution: E1 = -delta v1, E3 = delta (12 v1^3 + 9 v2)
E1_IN_V = {(1, 0): -DELTA}
E3_IN_V = {(3, 0): DELTA * 12, (0, 1): DELTA * 9}


class VPoly:
    """sum c[p, q] v1^p y^q with y = v2 (basis "v2") or y = E3 (basis "E3")."""

    __slots__ = ("terms", "basis")

    def __init__(self, terms: Mapping | None = None, basis: str = "v2"):
        if basis not in ("v2", "E3"):
            raise ValueError("basis must be 'v2' or 'E3'")
        clean = {}
        for (p, q), c in (terms or {}).items():
            c = Scalar.coerce(c)
            if q < 0:
                raise ValueError("negative powers of the second generator are not allowed")
            if c:
                clean[(int(p), int(q))] = c
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "basis", basis)

    def __setattr__(self, name, value):
        raise AttributeError("VPoly is immutable")

    __reduce__ = frozen_reduce

    @staticmethod
    def v1(power: int = 1, basis: str = "v2") -> "VPoly":
        return VPoly({(power, 0): 1}, basis)

    @staticmethod
    def y(power: int = 1, basis: str = "v2") -> "VPoly":
        return VPoly({(0, power): 1}, basis)

    @staticmethod
    def const(c, basis: str = "v2") -> "VPoly":
        return VPoly({(0, 0): c}, basis)

    def _check(self, other: "VPoly"):
        if self.basis != other.basis:
            raise ValueError("VPoly bases differ")

    def _lift(self, other) -> "VPoly":
        if isinstance(other, VPoly):
            self._check(other)
            return other
        return VPoly.const(other, self.basis)

    def __add__(self, other):
        other = self._lift(other)
        return VPoly(add_terms(self.terms, other.terms), self.basis)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        return VPoly(add_terms(self.terms, other.terms, -1), self.basis)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return VPoly(scale_terms(self.terms, -1), self.basis)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return VPoly(scale_terms(self.terms, other), self.basis)
        other = self._lift(other)
        return VPoly(mul_terms(self.terms, other.terms), self.basis)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not supported")
        return VPoly(pow_terms(self.terms, n), self.basis)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            other = VPoly.const(other, self.basis)
        if not isinstance(other, VPoly):
            return NotImplemented
        return self.basis == other.basis and self.terms == other.terms

    def __hash__(self):
        return hash((self.basis, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def weight_set(self) -> set[int]:
        step = 3
        return {p + step * q for p, q in self.terms}

    def min_v1_exponent(self) -> int:
        return min((p for p, _ in self.terms), default=0)

    def truncate_v1(self, j: int) -> "VPoly":
        """Drop monomials with v1-exponent >= j."""
        return VPoly({k: c for k, c in self.terms.items() if k[0] < j}, self.basis)

    def is_integral(self) -> bool:
        """All coefficients in Z[zeta3, 1/3]."""
        from .exact import scalar_is_integral

        return all(scalar_is_integral(c) for c in self.terms.values())

    # conversion to forms --------------------------------------------------
    def form_terms(self) -> dict:
        y_terms = V2_TERMS if self.basis == "v2" else E3_TERMS
        out: dict = {}
        v1_cache: dict[int, dict] = {}
        y_cache: dict[int, dict] = {}
        for (p, q), c in self.terms.items():
            if p not in v1_cache:
                # (delta/3)^p E1^p, valid for negative p as well
                v1_cache[p] = {(p, 0): (DELTA / 3) ** p if p >= 0 else (DELTA / 3).inverse() ** (-p)}
            if q not in y_cache:
                y_cache[q] = pow_terms(y_terms, q)
            mono = mul_terms(v1_cache[p], y_cache[q])
            out = add_terms(out, scale_terms(mono, c))
        return out

    def to_form(self):
        """ModForm / LaurentForm when homogeneous, InhomForm otherwise (holomorphic only)."""
        terms = self.form_terms()
        weights = self.weight_set()
        if len(weights) <= 1:
            w = weights.pop() if weights else 0
            f = LaurentForm(w, terms)
            return f.to_modform() if f.is_holomorphic() else f
        return InhomForm.from_terms(terms)

    def __repr__(self):
        y = "v2" if self.basis == "v2" else "E3"
        if not self.terms:
            return "VPoly(0)"
        parts = [f"({c})*v1^{p}*{y}^{q}" for (p, q), c in sorted(self.terms.items())]
        return "VPoly(" + " + ".join(parts) + ")"


def from_form(f) -> VPoly:
    """Rewrite a holomorphic form in (v1, v2) coordinates."""
    out = VPoly({}, "v2")
    e1 = VPoly(E1_IN_V)
    e3 = VPoly(E3_IN_V)
    for (a, b), c in f.items():
        if a < 0:
            raise ValueError("from_form expects a holomorphic form")
        out = out + (e1 ** a) * (e3 ** b) * c
    return out


V1 = VPoly.v1()
V2 = VPoly.y()
