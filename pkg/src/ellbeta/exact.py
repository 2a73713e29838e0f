"""Exact scalars over Q and Q(delta), delta^2 = -3, plus Bernoulli numbers.

The ring of integers we care about is Z[zeta3, 1/3] where zeta3 = (delta - 1)/2.
Elements are stored in the basis {1, delta}; integrality is tested in the
basis {1, zeta3}, because a + b*delta = (a + b) + 2b*zeta3.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Optional, Union

Number = Union[int, Fraction, "Scalar"]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational number")


def rational_to_str(x: Fraction) -> str:
    x = as_fraction(x)
    return f"{x.numerator}/{x.denominator}"


def rational_from_str(s: str) -> Fraction:
    return Fraction(s)


def _restore(cls, state):
    obj = object.__new__(cls)
    for k, v in state.items():
        object.__setattr__(obj, k, v)
    return obj


def frozen_reduce(self):
    """Pickle support for slot classes that forbid attribute assignment."""
    names = [n for c in type(self).__mro__ for n in getattr(c, "__slots__", ())]
    return _restore, (type(self), {n: getattr(self, n) for n in names if hasattr(self, n)})


class Scalar:
    """re + im*delta with exact rational components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", as_fraction(re))
        object.__setattr__(self, "im", as_fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    __reduce__ = frozen_reduce

    @staticmethod
    def coerce(x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        return Scalar(as_fraction(x), 0)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return Scalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return Scalar(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return Scalar(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Scalar(self.re * other, self.im * other)
        if not isinstance(other, Scalar):
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        return Scalar(a * c - 3 * b * d, a * d + b * c)

    __rmul__ = __mul__

    def conjugate(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + 3 * self.im * self.im

    def inverse(self) -> "Scalar":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero scalar")
        return Scalar(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return Scalar(self.re / other, self.im / other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # comparisons ----------------------------------------------------------
    def __eq__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_zero(self) -> bool:
        return not self

    def is_rational(self) -> bool:
        return self.im == 0

    # zeta3 coordinates ----------------------------------------------------
    def zeta_components(self) -> tuple[Fraction, Fraction]:
        """Coordinates (u, w) with self = u + w*zeta3."""
        return self.re + self.im, 2 * self.im

    @staticmethod
    def from_zeta_components(u, w) -> "Scalar":
        u, w = as_fraction(u), as_fraction(w)
        return Scalar(u - w / 2, w / 2)

    # serialization --------------------------------------------------------
    def to_json(self) -> dict:
        return {"re": rational_to_str(self.re), "im": rational_to_str(self.im)}

    @staticmethod
    def from_json(obj) -> "Scalar":
        if isinstance(obj, dict):
            return Scalar(Fraction(obj["re"]), Fraction(obj.get("im", "0")))
        return Scalar(Fraction(obj))

    def __repr__(self):
        if self.im == 0:
            return f"Scalar({self.re})"
        return f"Scalar({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*d"
        return f"({self.re} + {self.im}*d)"


def _coerce_or_none(x) -> Optional[Scalar]:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Fraction)):
        return Scalar(x, 0)
    return None


ZERO = Scalar(0, 0)
ONE = Scalar(1, 0)
DELTA = Scalar(0, 1)
ZETA3 = Scalar(Fraction(-1, 2), Fraction(1, 2))
I_OVER_SQRT3 = Scalar(0, Fraction(1, 3))  # i/sqrt(3) = delta/3


# ---------------------------------------------------------------------------
# Integrality in Z[zeta3, 1/3]

def strip_three(n: int) -> tuple[int, int]:
    """Return (n', e) with n = 3^e * n' and 3 not dividing n' (n != 0)."""
    e = 0
    while n % 3 == 0:
        n //= 3
        e += 1
    return n, e


def is_three_integral(x: Fraction) -> bool:
    """True if x lies in Z[1/3]."""
    d, _ = strip_three(as_fraction(x).denominator)
    return d == 1


def three_clearing_exponent(x: Fraction) -> int:
    _, e = strip_three(as_fraction(x).denominator)
    return e


@dataclass(frozen=True)
class IntegralityWitness:
    is_integral: bool
    offending_index: Optional[int]
    odd_denominator_cleared: int  # power of 3 multiplied through

    def __bool__(self):
        return self.is_integral


def scalar_is_integral(c: Scalar) -> bool:
    u, w = c.zeta_components()
    return is_three_integral(u) and is_three_integral(w)


def integrality(values: Iterable) -> IntegralityWitness:
    """Check that every value lies in Z[zeta3, 1/3].

    Values may be ints, Fractions or Scalars. The witness records the first
    offending index and the power of 3 needed to clear the 3-part of all
    denominators seen.
    """
    cleared = 0
    for idx, v in enumerate(values):
        s = Scalar.coerce(v)
        u, w = s.zeta_components()
        cleared = max(cleared, three_clearing_exponent(u), three_clearing_exponent(w))
        if not (is_three_integral(u) and is_three_integral(w)):
            return IntegralityWitness(False, idx, cleared)
    return IntegralityWitness(True, None, cleared)


# ---------------------------------------------------------------------------
# Characters and Bernoulli numbers

def legendre3(d: int) -> int:
    r = d % 3
    return 0 if r == 0 else (1 if r == 1 else -1)


@lru_cache(maxsize=None)
def _bernoulli_table(n: int) -> tuple[Fraction, ...]:
    B = [Fraction(1)]
    for m in range(1, n + 1):
        s = sum(comb(m + 1, k) * B[k] for k in range(m))
        B.append(-s / (m + 1))
    return tuple(B)


def bernoulli_number(n: int) -> Fraction:
    """B_n with the convention B_1 = -1/2."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    # grow the table in chunks so repeated calls stay cheap
    size = max(32, 1 << (n.bit_length()))
    return _bernoulli_table(size)[n]


def bernoulli_poly(w: int, x) -> Fraction:
    x = as_fraction(x)
    return sum((comb(w, k) * bernoulli_number(k) * x ** (w - k) for k in range(w + 1)), Fraction(0))


def bernoulli_poly_third(w: int) -> Fraction:
    """B_w(1/3)."""
    if w < 0:
        raise ValueError("w must be nonnegative")
    return bernoulli_poly(w, Fraction(1, 3))


def generalized_bernoulli_chi(w: int) -> Fraction:
    """B_{w,chi} for the nontrivial character mod 3 (odd w only)."""
    if w < 1 or w % 2 == 0:
        raise ValueError(f"generalized_bernoulli_chi needs odd positive weight, got {w}")
    return 2 * Fraction(3) ** (w - 1) * bernoulli_poly_third(w)
