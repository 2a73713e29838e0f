"""Level-3 modular forms as polynomials in the Eisenstein generators E1, E3.

ModForm is homogeneous of a fixed weight, InhomForm is a sum of homogeneous
parts of weights 0..t, and LaurentForm allows negative powers of E1.
All three share one sparse representation: a dict from exponent pairs (a, b)
to Scalar coefficients, standing for sum c_{a,b} E1^a E3^b (weight a + 3b).
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping

import numpy as np

from .exact import ONE, Scalar, frozen_reduce, bernoulli_number, generalized_bernoulli_chi, legendre3
from .qseries import QSeries, invert_unit

DEFAULT_GUARD = 10


class PrecisionError(RuntimeError):
    """Raised when the available q-precision cannot certify an answer."""


class RecognitionError(ValueError):
    """Raised when a q-series is not the expansion of a form of the given weight."""


# ---------------------------------------------------------------------------
# Eisenstein series

def _chi_divisor_sums(w: int, prec: int) -> list[int]:
    """sum_{d | n} chi(d) d^(w-1) for n < prec (index 0 unused)."""
    s = [0] * prec
    for d in range(1, prec):
        c = legendre3(d)
        if c == 0:
            continue
        term = c * d ** (w - 1)
        for n in range(d, prec, d):
            s[n] += term
    return s


def eisenstein_odd_int(w: int, prec: int) -> list[int]:
    """Integer coefficients of E_w for w in {1, 3}; rational factor otherwise raises."""
    factor = -Fraction(2 * w) / generalized_bernoulli_chi(w)
    if factor.denominator != 1:
        raise ValueError(f"E_{w} does not have integral normalization")
    f = factor.numerator
    s = _chi_divisor_sums(w, prec)
    return [1] + [f * s[n] for n in range(1, prec)]


def eisenstein_odd(w: int, prec: int) -> QSeries:
    """1 - (2w / B_{w,chi}) sum_n (sum_{d|n} chi(d) d^(w-1)) q^n."""
    if w < 1 or w % 2 == 0:
        raise ValueError(f"odd Eisenstein series needs odd positive weight, got {w}")
    if prec <= 0:
        raise ValueError("precision must be positive")
    factor = -Fraction(2 * w) / generalized_bernoulli_chi(w)
    s = _chi_divisor_sums(w, prec)
    return QSeries([Scalar(1)] + [Scalar(factor * s[n]) for n in range(1, prec)], prec)


def _sigma(k: int, prec: int) -> list[int]:
    s = [0] * prec
    for d in range(1, prec):
        dk = d ** k
        for n in range(d, prec, d):
            s[n] += dk
    return s


def eisenstein_even_star(two_n: int, prec: int) -> QSeries:
    """G*_{2n}(tau) = G_{2n}(tau) - 3^(2n-1) G_{2n}(3 tau)."""
    if two_n < 2 or two_n % 2:
        raise ValueError(f"even weight >= 2 expected, got {two_n}")
    if prec <= 0:
        raise ValueError("precision must be positive")
    n = two_n // 2
    const = -bernoulli_number(two_n) / (4 * n)
    lift = Fraction(3) ** (two_n - 1)
    sig = _sigma(two_n - 1, prec)
    coeffs = [const * (1 - lift)]
    for m in range(1, prec):
        c = Fraction(sig[m])
        if m % 3 == 0:
            c -= lift * sig[m // 3]
        coeffs.append(c)
    return QSeries([Scalar(c) for c in coeffs], prec)


def monomial_basis(k: int) -> list[tuple[int, int]]:
    """Exponent pairs (a, b) with a + 3b = k, by decreasing a."""
    if k < 0:
        raise ValueError("weight must be nonnegative")
    return [(k - 3 * b, b) for b in range(k // 3 + 1)]


def dim_forms(k: int) -> int:
    return k // 3 + 1 if k >= 0 else 0


# ---------------------------------------------------------------------------
# Sparse polynomial core

Terms = dict[tuple[int, int], Scalar]


def _clean(terms: Mapping) -> Terms:
    out = {}
    for key, c in terms.items():
        c = Scalar.coerce(c)
        if c:
            out[(int(key[0]), int(key[1]))] = c
    return out


def add_terms(t1: Mapping, t2: Mapping, sign: int = 1) -> Terms:
    out = dict(t1)
    for key, c in t2.items():
        if sign < 0:
            c = -c
        v = out.get(key)
        nv = c if v is None else v + c
        if nv:
            out[key] = nv
        else:
            out.pop(key, None)
    return out


def mul_terms(t1: Mapping, t2: Mapping) -> Terms:
    out: Terms = {}
    for (a1, b1), c1 in t1.items():
        for (a2, b2), c2 in t2.items():
            key = (a1 + a2, b1 + b2)
            v = out.get(key)
            p = c1 * c2
            out[key] = p if v is None else v + p
    return {k: v for k, v in out.items() if v}


def scale_terms(t: Mapping, c) -> Terms:
    c = Scalar.coerce(c)
    if not c:
        return {}
    return {k: v * c for k, v in t.items()}


def pow_terms(t: Mapping, n: int) -> Terms:
    result: Terms = {(0, 0): ONE}
    base = dict(t)
    while n:
        if n & 1:
            result = mul_terms(result, base)
        n >>= 1
        if n:
            base = mul_terms(base, base)
    return result


def _term_weight(key) -> int:
    return key[0] + 3 * key[1]


class _EPoly:
    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping):
        object.__setattr__(self, "_terms", _clean(terms))

    def __setattr__(self, name, value):
        raise AttributeError("forms are immutable")

    __reduce__ = frozen_reduce

    @property
    def terms(self) -> Terms:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, a: int, b: int) -> Scalar:
        return self._terms.get((a, b), Scalar(0))

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(c.im == 0 for c in self._terms.values())

    def weights(self) -> set[int]:
        return {_term_weight(k) for k in self._terms}

    def min_e1_exponent(self) -> int:
        return min((a for a, _ in self._terms), default=0)

    def __eq__(self, other):
        if not isinstance(other, _EPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __neg__(self):
        return self._rewrap(scale_terms(self._terms, -1), self)

    def __add__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            other = ModForm(0, {(0, 0): other})
        if not isinstance(other, _EPoly):
            return NotImplemented
        return _combine(self, other, add_terms(self._terms, other._terms))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            other = ModForm(0, {(0, 0): other})
        if not isinstance(other, _EPoly):
            return NotImplemented
        return _combine(self, other, add_terms(self._terms, other._terms, -1))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self._rewrap(scale_terms(self._terms, other), self)
        if not isinstance(other, _EPoly):
            return NotImplemented
        return _product(self, other, mul_terms(self._terms, other._terms))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self * Scalar.coerce(other).inverse()
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        return self._power(n)

    # subclasses fill these in
    def _power(self, n):
        raise NotImplementedError

    @staticmethod
    def _rewrap(terms, like):
        raise NotImplementedError

    def _monomials_json(self):
        return [{"a": a, "b": b, "c": c.to_json()} for (a, b), c in sorted(self._terms.items(), key=lambda kv: (-kv[0][0], kv[0][1]))]


class ModForm(_EPoly):
    """Homogeneous form of weight k in E1, E3 (nonnegative exponents)."""

    __slots__ = ("weight",)

    def __init__(self, weight: int, coeffs: Mapping | None = None):
        super().__init__(coeffs or {})
        for (a, b) in self._terms:
            if a < 0 or b < 0 or a + 3 * b != weight:
                raise ValueError(f"monomial E1^{a} E3^{b} does not have weight {weight}")
        object.__setattr__(self, "weight", int(weight))

    @staticmethod
    def _rewrap(terms, like):
        return ModForm(like.weight, terms)

    def _power(self, n):
        return ModForm(self.weight * n, pow_terms(self._terms, n))

    def to_json(self) -> dict:
        return {"weight": self.weight, "monomials": self._monomials_json()}

    @staticmethod
    def from_json(obj) -> "ModForm":
        return ModForm(int(obj["weight"]), {(m["a"], m["b"]): Scalar.from_json(m["c"]) for m in obj["monomials"]})

    def as_inhom(self, top_weight: int | None = None) -> "InhomForm":
        return InhomForm.from_terms(self._terms, self.weight if top_weight is None else top_weight)

    def __repr__(self):
        return f"ModForm({self.weight}, {format_terms(self._terms)})"

    def __eq__(self, other):
        if isinstance(other, ModForm):
            return self.weight == other.weight and self._terms == other._terms
        return super().__eq__(other)

    __hash__ = _EPoly.__hash__


class LaurentForm(_EPoly):
    """Homogeneous form allowing negative powers of E1."""

    __slots__ = ("weight",)

    def __init__(self, weight: int, coeffs: Mapping | None = None):
        super().__init__(coeffs or {})
        for (a, b) in self._terms:
            if b < 0 or a + 3 * b != weight:
                raise ValueError(f"monomial E1^{a} E3^{b} does not have weight {weight}")
        object.__setattr__(self, "weight", int(weight))

    @staticmethod
    def _rewrap(terms, like):
        return LaurentForm(like.weight, terms)

    def _power(self, n):
        return LaurentForm(self.weight * n, pow_terms(self._terms, n))

    @property
    def pole_order(self) -> int:
        return max(0, -self.min_e1_exponent())

    def is_holomorphic(self) -> bool:
        return self.pole_order == 0

    def times_e1_power(self, p: int) -> "LaurentForm":
        return LaurentForm(self.weight + p, {(a + p, b): c for (a, b), c in self._terms.items()})

    def to_modform(self) -> ModForm:
        if not self.is_holomorphic():
            raise ValueError("form has a pole along E1 = 0")
        return ModForm(self.weight, self._terms)

    def cleared(self) -> tuple[ModForm, int]:
        """(E1^p * self, p) with p the pole order."""
        p = self.pole_order
        return self.times_e1_power(p).to_modform(), p

    def to_json(self) -> dict:
        return {"weight": self.weight, "laurent": True, "monomials": self._monomials_json()}

    @staticmethod
    def from_json(obj) -> "LaurentForm":
        return LaurentForm(int(obj["weight"]), {(m["a"], m["b"]): Scalar.from_json(m["c"]) for m in obj["monomials"]})

    def __repr__(self):
        return f"LaurentForm({self.weight}, {format_terms(self._terms)})"


class InhomForm(_EPoly):
    """Sum of homogeneous parts of weights 0..top_weight."""

    __slots__ = ("top_weight",)

    def __init__(self, top_weight: int, parts: Iterable[ModForm] | None = None):
        terms: Terms = {}
        for p in parts or ():
            if p.weight > top_weight:
                raise ValueError("part weight exceeds top weight")
            terms = add_terms(terms, p._terms)
        super().__init__(terms)
        object.__setattr__(self, "top_weight", int(top_weight))

    @staticmethod
    def from_terms(terms: Mapping, top_weight: int | None = None) -> "InhomForm":
        terms = _clean(terms)
        for (a, b) in terms:
            if a < 0 or b < 0:
                raise ValueError("InhomForm terms must be holomorphic")
        w = max((_term_weight(k) for k in terms), default=0)
        if top_weight is None:
            top_weight = w
        if w > top_weight:
            raise ValueError("term weight exceeds top weight")
        f = InhomForm(top_weight)
        object.__setattr__(f, "_terms", terms)
        return f

    @property
    def parts(self) -> tuple[ModForm, ...]:
        buckets: dict[int, Terms] = {k: {} for k in range(self.top_weight + 1)}
        for key, c in self._terms.items():
            buckets[_term_weight(key)][key] = c
        return tuple(ModForm(k, buckets[k]) for k in range(self.top_weight + 1))

    def part(self, k: int) -> ModForm:
        return ModForm(k, {key: c for key, c in self._terms.items() if _term_weight(key) == k})

    @staticmethod
    def _rewrap(terms, like):
        return InhomForm.from_terms(terms, like.top_weight)

    def _power(self, n):
        return InhomForm.from_terms(pow_terms(self._terms, n), self.top_weight * n)

    def with_top_weight(self, t: int) -> "InhomForm":
        return InhomForm.from_terms(self._terms, t)

    def to_json(self) -> dict:
        return {"top_weight": self.top_weight, "parts": [p.to_json() for p in self.parts if not p.is_zero()]}

    @staticmethod
    def from_json(obj) -> "InhomForm":
        return InhomForm(int(obj["top_weight"]), [ModForm.from_json(p) for p in obj["parts"]])

    def __repr__(self):
        return f"InhomForm({self.top_weight}, {format_terms(self._terms)})"


def _combine(f: _EPoly, g: _EPoly, terms: Terms) -> _EPoly:
    if isinstance(f, LaurentForm) or isinstance(g, LaurentForm):
        if f.weight != g.weight:  # type: ignore[attr-defined]
            raise ValueError("cannot add Laurent forms of different weights")
        return LaurentForm(f.weight, terms)  # type: ignore[attr-defined]
    if isinstance(f, ModForm) and isinstance(g, ModForm) and f.weight == g.weight:
        return ModForm(f.weight, terms)
    return InhomForm.from_terms(terms, max(_top(f), _top(g)))


def _product(f: _EPoly, g: _EPoly, terms: Terms) -> _EPoly:
    if isinstance(f, LaurentForm) or isinstance(g, LaurentForm):
        if isinstance(f, InhomForm) or isinstance(g, InhomForm):
            raise ValueError("Laurent times inhomogeneous forms is not supported")
        return LaurentForm(f.weight + g.weight, terms)  # type: ignore[attr-defined]
    if isinstance(f, ModForm) and isinstance(g, ModForm):
        return ModForm(f.weight + g.weight, terms)
    return InhomForm.from_terms(terms, _top(f) + _top(g))


def _top(f: _EPoly) -> int:
    return f.top_weight if isinstance(f, InhomForm) else f.weight  # type: ignore[attr-defined]


def format_terms(terms: Mapping) -> str:
    if not terms:
        return "0"
    parts = []
    for (a, b), c in sorted(terms.items(), key=lambda kv: (-kv[0][0] - 3 * kv[0][1], -kv[0][0])):
        e1 = "" if a == 0 else "E1" if a == 1 else f"E1^{a}"
        e3 = "" if b == 0 else "E3" if b == 1 else f"E3^{b}"
        mon = "*".join(s for s in (e1, e3) if s) or "1"
        parts.append(f"({c})*{mon}")
    return " + ".join(parts)


E1 = ModForm(1, {(1, 0): 1})
E3 = ModForm(3, {(0, 1): 1})
ONE_FORM = ModForm(0, {(0, 0): 1})


def constant_form(c) -> ModForm:
    return ModForm(0, {(0, 0): c})


def basic_h() -> "InhomForm":
    """(E1^2 - 1)/4 as an inhomogeneous combination (weights 2 and 0)."""
    return InhomForm.from_terms({(2, 0): Fraction(1, 4), (0, 0): Fraction(-1, 4)}, 2)


# ---------------------------------------------------------------------------
# Exact expansion

class _ExactBank:
    """Exact integer expansions of E1^a E3^b at one precision."""

    def __init__(self, prec: int):
        self.prec = prec
        e1 = np.array(eisenstein_odd_int(1, prec), dtype=object)
        e3 = np.array(eisenstein_odd_int(3, prec), dtype=object)
        self._e1 = {0: _one_obj(prec), 1: e1}
        self._e3 = {0: _one_obj(prec), 1: e3}
        self._e1inv: dict[int, np.ndarray] = {0: _one_obj(prec)}
        self._mono: dict[tuple[int, int], np.ndarray] = {}

    def _power(self, table, n):
        if n in table:
            return table[n]
        m = max(k for k in table if k <= n)
        cur = table[m]
        base = table[1]
        for k in range(m + 1, n + 1):
            cur = _obj_mul(cur, base, self.prec)
            table[k] = cur
        return cur

    def e1inv_power(self, n):
        if 1 not in self._e1inv:
            inv = invert_unit(QSeries.from_ints(self._e1[1]))
            self._e1inv[1] = np.array([int(c.re) for c in inv.coeffs], dtype=object)
        return self._power(self._e1inv, n)

    def monomial(self, a: int, b: int) -> np.ndarray:
        key = (a, b)
        if key not in self._mono:
            pa = self._power(self._e1, a) if a >= 0 else self.e1inv_power(-a)
            pb = self._power(self._e3, b)
            self._mono[key] = _obj_mul(pa, pb, self.prec)
        return self._mono[key]


def _one_obj(prec):
    v = np.zeros(prec, dtype=object)
    v[:] = 0
    v[0] = 1
    return v


def _obj_mul(a, b, n):
    full = np.convolve(a, b)
    out = np.zeros(n, dtype=object)
    out[:] = 0
    m = min(n, len(full))
    out[:m] = full[:m]
    return out


_EXACT_BANKS: dict[int, _ExactBank] = {}


def _exact_bank(prec: int) -> _ExactBank:
    bank = _EXACT_BANKS.get(prec)
    if bank is None:
        if len(_EXACT_BANKS) > 16:
            _EXACT_BANKS.clear()
        bank = _EXACT_BANKS[prec] = _ExactBank(prec)
    return bank


def expand(f: _EPoly, prec: int) -> QSeries:
    """q-expansion of a form (ModForm, InhomForm or LaurentForm) to precision prec."""
    if prec <= 0:
        raise ValueError("precision must be positive")
    bank = _exact_bank(prec)
    terms = f.terms if isinstance(f, _EPoly) else _clean(f)
    den = 1
    for c in terms.values():
        den = lcm(den, c.re.denominator, c.im.denominator)
    acc_re = np.zeros(prec, dtype=object)
    acc_re[:] = 0
    acc_im = acc_re.copy()
    for (a, b), c in terms.items():
        mono = bank.monomial(a, b)
        if c.re:
            acc_re = acc_re + mono * (c.re.numerator * (den // c.re.denominator))
        if c.im:
            acc_im = acc_im + mono * (c.im.numerator * (den // c.im.denominator))
    return QSeries([Scalar(Fraction(int(acc_re[n]), den), Fraction(int(acc_im[n]), den)) for n in range(prec)], prec)


# ---------------------------------------------------------------------------
# Recognition

def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction], n: int) -> list[Fraction] | None:
    """Unique solution of an overdetermined exact system, or None if inconsistent.

    Raises PrecisionError if the system does not determine all n unknowns.
    """
    A = [list(r) + [b] for r, b in zip(rows, rhs)]
    m = len(A)
    piv_cols = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(m):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        piv_cols.append(c)
        r += 1
    if len(piv_cols) < n:
        raise PrecisionError("expansion matrix is rank deficient at this precision")
    if any(A[i][n] != 0 for i in range(r, m)):
        return None
    sol = [Fraction(0)] * n
    for i, c in enumerate(piv_cols):
        sol[c] = A[i][n]
    return sol


def _recognize_terms(s: QSeries, keys: list[tuple[int, int]]) -> Terms:
    prec = s.prec
    bank = _exact_bank(prec)
    cols = [bank.monomial(a, b) for a, b in keys]
    rows = [[Fraction(int(col[q])) for col in cols] for q in range(prec)]
    out: Terms = {}
    comps = []
    for part in ("re", "im"):
        rhs = [getattr(c, part) for c in s.coeffs]
        if part == "im" and not any(rhs):
            comps.append([Fraction(0)] * len(keys))
            continue
        sol = _solve_exact(rows, rhs, len(keys))
        if sol is None:
            raise RecognitionError("series is not the expansion of a form of the requested weight")
        comps.append(sol)
    for key, re, im in zip(keys, comps[0], comps[1]):
        c = Scalar(re, im)
        if c:
            out[key] = c
    return out


def recognize(s: QSeries, k: int, guard: int = DEFAULT_GUARD) -> ModForm:
    """The weight-k form whose expansion matches s (checked on all of s)."""
    keys = monomial_basis(k)
    if s.prec < len(keys) + guard:
        raise PrecisionError(f"need precision >= {len(keys) + guard} to recognize weight {k}, got {s.prec}")
    return ModForm(k, _recognize_terms(s, keys))


def recognize_inhom(s: QSeries, t: int, guard: int = DEFAULT_GUARD) -> InhomForm:
    """Mixed-weight form of top weight <= t matching s."""
    keys = [key for k in range(t + 1) for key in monomial_basis(k)]
    if s.prec < len(keys) + guard:
        raise PrecisionError(f"need precision >= {len(keys) + guard} for top weight {t}, got {s.prec}")
    return InhomForm.from_terms(_recognize_terms(s, keys), t)


# ---------------------------------------------------------------------------
# Precision policy

RANK_RECORD: dict[tuple[int, int], bool] = {}


def coefficient_space_dim(t: int) -> int:
    return sum(dim_forms(i) for i in range(t + 1))


def precision_policy(t: int, guard: int = DEFAULT_GUARD, certify: bool = False) -> int:
    """Number of q-coefficients used for questions about weights <= t.

    The base value is the dimension of the coefficient space plus ``guard``.
    With ``certify=True`` the full-column-rank property of the expansion
    matrix is checked (and recorded in RANK_RECORD); the guard is doubled
    until it holds.
    """
    if t < 0:
        raise ValueError("weight must be nonnegative")
    prec = coefficient_space_dim(t) + guard
    if not certify:
        return prec
    from .lattice import expansion_rank_certified

    g = guard
    for _ in range(4):
        prec = coefficient_space_dim(t) + g
        ok = expansion_rank_certified(t, prec)
        RANK_RECORD[(t, prec)] = ok
        if ok:
            return prec
        g *= 2
    raise PrecisionError(f"could not certify full rank for weight {t}")
