"""Truncated power series in q over Q(delta), and series in x with q-series
coefficients.

Precision is explicit: a QSeries of precision P knows the coefficients of
q^0 .. q^{P-1} and nothing beyond. Binary operations return the smaller of
the two precisions.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial, lcm
from typing import Iterable, Sequence

import numpy as np

from .exact import ONE, ZERO, Scalar, frozen_reduce


def _common_numerators(values: Sequence[Fraction]) -> tuple[np.ndarray, int]:
    den = 1
    for v in values:
        if v.denominator != 1:
            den = lcm(den, v.denominator)
    nums = np.empty(len(values), dtype=object)
    for k, v in enumerate(values):
        nums[k] = v.numerator * (den // v.denominator)
    return nums, den


def _int_convolve(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    if len(a) == 0 or len(b) == 0:
        return np.zeros(n, dtype=object)
    full = np.convolve(a, b)
    out = np.zeros(n, dtype=object)
    m = min(n, len(full))
    out[:m] = full[:m]
    return out


def convolve_fractions(a: Sequence[Fraction], b: Sequence[Fraction], n: int) -> list[Fraction]:
    """First n coefficients of the product of two rational sequences."""
    na, da = _common_numerators(a[:n])
    nb, db = _common_numerators(b[:n])
    prod = _int_convolve(na, nb, n)
    den = da * db
    return [Fraction(int(c), den) for c in prod]


class QSeries:
    __slots__ = ("prec", "coeffs")

    def __init__(self, coeffs: Iterable, prec: int | None = None):
        cs = tuple(Scalar.coerce(c) for c in coeffs)
        if prec is None:
            prec = len(cs)
        if prec <= 0:
            raise ValueError("precision must be positive")
        if len(cs) < prec:
            cs = cs + (ZERO,) * (prec - len(cs))
        elif len(cs) > prec:
            cs = cs[:prec]
        object.__setattr__(self, "prec", prec)
        object.__setattr__(self, "coeffs", cs)

    def __setattr__(self, name, value):
        raise AttributeError("QSeries is immutable")

    __reduce__ = frozen_reduce

    # constructors ---------------------------------------------------------
    @staticmethod
    def constant(c, prec: int) -> "QSeries":
        return QSeries([c], prec)

    @staticmethod
    def zero(prec: int) -> "QSeries":
        return QSeries([], prec)

    @staticmethod
    def one(prec: int) -> "QSeries":
        return QSeries([ONE], prec)

    @staticmethod
    def from_ints(values: Iterable[int], prec: int | None = None) -> "QSeries":
        return QSeries([Scalar(v) for v in values], prec)

    # basic accessors ------------------------------------------------------
    def __len__(self):
        return self.prec

    def __getitem__(self, n):
        return self.coeffs[n]

    def truncate(self, prec: int) -> "QSeries":
        if prec > self.prec:
            raise ValueError(f"cannot raise precision from {self.prec} to {prec}")
        return QSeries(self.coeffs[:prec], prec)

    def is_rational(self) -> bool:
        return all(c.im == 0 for c in self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def valuation(self) -> int | None:
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return None

    # ring operations ------------------------------------------------------
    def _coerce(self, other) -> "QSeries":
        if isinstance(other, QSeries):
            return other
        return QSeries.constant(Scalar.coerce(other), self.prec)

    def __add__(self, other):
        o = self._coerce(other)
        p = min(self.prec, o.prec)
        return QSeries([self.coeffs[k] + o.coeffs[k] for k in range(p)], p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        p = min(self.prec, o.prec)
        return QSeries([self.coeffs[k] - o.coeffs[k] for k in range(p)], p)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return QSeries([-c for c in self.coeffs], self.prec)

    def scale(self, c) -> "QSeries":
        c = Scalar.coerce(c)
        return QSeries([c * x for x in self.coeffs], self.prec)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        p = min(self.prec, other.prec)
        a_re = [c.re for c in self.coeffs[:p]]
        b_re = [c.re for c in other.coeffs[:p]]
        a_rat = all(c.im == 0 for c in self.coeffs[:p])
        b_rat = all(c.im == 0 for c in other.coeffs[:p])
        rr = convolve_fractions(a_re, b_re, p)
        if a_rat and b_rat:
            return QSeries([Scalar(x) for x in rr], p)
        a_im = [c.im for c in self.coeffs[:p]]
        b_im = [c.im for c in other.coeffs[:p]]
        zeros = [Fraction(0)] * p
        ii = convolve_fractions(a_im, b_im, p) if not (a_rat or b_rat) else zeros
        ri = convolve_fractions(a_re, b_im, p) if not b_rat else zeros
        ir = convolve_fractions(a_im, b_re, p) if not a_rat else zeros
        return QSeries([Scalar(rr[k] - 3 * ii[k], ri[k] + ir[k]) for k in range(p)], p)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return invert_unit(self) ** (-n)
        result = QSeries.one(self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(Scalar.coerce(other).inverse())
        if isinstance(other, QSeries):
            return self * invert_unit(other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.prec == other.prec and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.prec, self.coeffs))

    def agrees_with(self, other: "QSeries") -> bool:
        """Coefficientwise equality up to the common precision."""
        p = min(self.prec, other.prec)
        return self.coeffs[:p] == other.coeffs[:p]

    # serialization --------------------------------------------------------
    def to_json(self) -> dict:
        return {"prec": self.prec, "coeffs": [c.to_json() for c in self.coeffs]}

    @staticmethod
    def from_json(obj) -> "QSeries":
        return QSeries([Scalar.from_json(c) for c in obj["coeffs"]], int(obj["prec"]))

    def __repr__(self):
        shown = ", ".join(str(c) for c in self.coeffs[:6])
        more = ", ..." if self.prec > 6 else ""
        return f"QSeries([{shown}{more}], prec={self.prec})"


def invert_unit(a: QSeries) -> QSeries:
    """Multiplicative inverse of a series with nonzero constant term."""
    c0 = a.coeffs[0]
    if not c0:
        raise ZeroDivisionError("not a unit: constant term is zero")
    inv0 = c0.inverse()
    out = [inv0]
    for n in range(1, a.prec):
        s = ZERO
        for k in range(1, n + 1):
            ak = a.coeffs[k]
            if ak:
                s = s + ak * out[n - k]
        out.append(-(s * inv0))
    return QSeries(out, a.prec)


class XSeries:
    """Polynomial in x truncated after x^xmax, with QSeries coefficients."""

    __slots__ = ("xmax", "coeffs")

    def __init__(self, coeffs: Sequence[QSeries], xmax: int | None = None):
        cs = list(coeffs)
        if not cs:
            raise ValueError("XSeries needs at least one coefficient")
        prec = cs[0].prec
        if any(c.prec != prec for c in cs):
            prec = min(c.prec for c in cs)
            cs = [c.truncate(prec) for c in cs]
        if xmax is None:
            xmax = len(cs) - 1
        if len(cs) < xmax + 1:
            cs += [QSeries.zero(prec)] * (xmax + 1 - len(cs))
        object.__setattr__(self, "xmax", xmax)
        object.__setattr__(self, "coeffs", tuple(cs[: xmax + 1]))

    def __setattr__(self, name, value):
        raise AttributeError("XSeries is immutable")

    __reduce__ = frozen_reduce

    @property
    def qprec(self) -> int:
        return self.coeffs[0].prec

    @staticmethod
    def monomial(c: QSeries, power: int, xmax: int) -> "XSeries":
        cs = [QSeries.zero(c.prec) for _ in range(xmax + 1)]
        if power <= xmax:
            cs[power] = c
        return XSeries(cs, xmax)

    def __getitem__(self, n):
        return self.coeffs[n]

    def _binary(self, other, op):
        xm = min(self.xmax, other.xmax)
        return XSeries([op(self.coeffs[k], other.coeffs[k]) for k in range(xm + 1)], xm)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __neg__(self):
        return XSeries([-c for c in self.coeffs], self.xmax)

    def scale(self, c) -> "XSeries":
        return XSeries([q.scale(c) for q in self.coeffs], self.xmax)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        if not isinstance(other, XSeries):
            return NotImplemented
        xm = min(self.xmax, other.xmax)
        prec = min(self.qprec, other.qprec)
        out = []
        for n in range(xm + 1):
            acc = QSeries.zero(prec)
            for k in range(n + 1):
                a, b = self.coeffs[k], other.coeffs[n - k]
                if a.is_zero() or b.is_zero():
                    continue
                acc = acc + a * b
            out.append(acc)
        return XSeries(out, xm)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not supported")
        result = XSeries([QSeries.one(self.qprec)], self.xmax)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        return isinstance(other, XSeries) and self.xmax == other.xmax and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)


def exp_series(a: XSeries) -> XSeries:
    """exp(a) for an XSeries without x^0 term, truncated at a.xmax."""
    if not a.coeffs[0].is_zero():
        raise ValueError("exp_series needs a vanishing x^0 coefficient")
    result = XSeries([QSeries.one(a.qprec)], a.xmax)
    power = XSeries([QSeries.one(a.qprec)], a.xmax)
    for k in range(1, a.xmax + 1):
        power = power * a
        result = result + power.scale(Fraction(1, factorial(k)))
    return result
