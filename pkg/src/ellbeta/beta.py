"""Beta family at p = 2: admissible indices, predicted classes and the sweep driver.

A simple index (s, n, j, i) names x_n^s / (2^(i+1) v1^j); a higher one names
x_n^s / (2^(i+2) z_{i,m}) with m = j / 2^i. The f-invariant is the class
produced by the elliptic beta solver for the corresponding modulus.
"""
from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .congruence import (FInvariantClass, SubgroupSpec, elliptic_beta_solve, finv_equal, is_member,
                         make_class, quotient_reduce)
from .exact import ONE
from .forms import DEFAULT_GUARD, E1, E3, InhomForm, add_terms, basic_h, mul_terms
from .genus import V1, V2, hazewinkel_images, x_element, x_poly, x_relations_hold, z_element, z_poly
from .vpoly import VPoly

THEOREM_CEILING = 48
LEMMA_CEILING = 144
SUITES = ("lemmas", "theorem1", "theorem2", "relations", "identities")


def a_seq(k: int) -> int:
    if k < 0:
        raise ValueError("a_k is defined for k >= 0")
    return (1, 2)[k] if k < 2 else 3 * 2 ** (k - 1)


class NotCoveredError(ValueError):
    """No closed formula is known for this index."""


@dataclass(frozen=True, order=True)
class BetaIndex:
    s: int
    n: int
    j: int
    i: int
    kind: str = "simple"

    def __post_init__(self):
        if self.kind not in ("simple", "higher"):
            raise ValueError("kind must be 'simple' or 'higher'")

    @property
    def weight(self) -> int:
        return 3 * self.s * 2 ** self.n

    @property
    def index_weight(self) -> int:
        return self.weight - self.j

    @property
    def order(self) -> int:
        return self.i + (1 if self.kind == "simple" else 2)

    @property
    def m(self) -> Fraction:
        return Fraction(self.j, 2 ** self.i)

    def label(self) -> str:
        num = self.s * 2 ** self.n
        return f"beta_{{{num}/{self.j},{self.order}}}"

    def to_json(self) -> dict:
        return {"s": self.s, "n": self.n, "j": self.j, "i": self.i, "kind": self.kind}

    @staticmethod
    def from_json(obj) -> "BetaIndex":
        return BetaIndex(int(obj["s"]), int(obj["n"]), int(obj["j"]), int(obj["i"]), obj.get("kind", "simple"))


def admissible(b: BetaIndex) -> tuple[bool, str]:
    """(ok, diagnostic); the diagnostic names the first violated condition."""
    s, n, j, i = b.s, b.n, b.j, b.i
    if s < 1 or s % 2 == 0:
        return False, "s must be odd and positive"
    if n < 0 or i < 0 or j < 1:
        return False, "need n >= 0, i >= 0, j >= 1"
    if b.kind == "simple":
        if n < i:
            return False, "n >= i fails"
        if j % 2 ** i:
            return False, "2^i | j fails"
        if j > a_seq(n - i):
            return False, f"j <= a_(n-i) = {a_seq(n - i)} fails"
        if s == 1 and i == 0 and j > 2 ** n:
            return False, f"j <= 2^n = {2 ** n} fails for s = 1, i = 0"
        return True, "ok"
    if not n >= i + 1 >= 2:
        return False, "n >= i + 1 >= 2 fails"
    if j % 2 ** i:
        return False, "m = j / 2^i is not an integer"
    if n == 2 and (j != 2 or s < 3):
        return False, "n = 2 requires j = 2 and s >= 3"
    if n >= 3 and j > a_seq(n - i - 1):
        return False, f"j <= a_(n-i-1) = {a_seq(n - i - 1)} fails"
    # the simple conditions for the same (s, n, j, i) are part of the definition
    if j > a_seq(n - i):
        return False, f"j <= a_(n-i) = {a_seq(n - i)} fails"
    return True, "ok"


def _require(b: BetaIndex):
    ok, why = admissible(b)
    if not ok:
        raise ValueError(f"{b.label()} is not admissible: {why}")


def modulus(b: BetaIndex):
    """(a, mu, multiplicity) defining the invariant ideal (2^a, mu^multiplicity)."""
    if b.kind == "simple":
        return b.i + 1, V1.to_form(), b.j
    return b.i + 2, z_element(b.i, b.j // 2 ** b.i).value, 1


def formula_case(b: BetaIndex) -> str:
    _require(b)
    n, j, i = b.n, b.j, b.i
    if b.kind == "simple":
        if i == 0:
            return ("simple i=0 n=0", "simple i=0 n=1", "simple i=0 n>=2")[min(n, 2)]
        if n == i + 1:
            return "simple i>=1 n=i+1"
        return "simple i>=1 n>=i+2"
    if i == 1 and j == 2:
        return "higher z11"
    return "higher general"


def expected_terms(b: BetaIndex) -> dict:
    """Predicted representative as a term dictionary."""
    case = formula_case(b)
    H = basic_h()
    s, n, j, i = b.s, b.n, b.j, b.i
    if case == "simple i=0 n=0":
        rep = H ** s / 2
    elif case == "simple i=0 n=1":
        rep = H ** (2 * s) / 2
    elif case == "simple i=0 n>=2":
        l = n - 2
        rep = H ** (4 * s * 2 ** l) / 2
        if j > 3 * 2 ** l:
            rep = rep + H ** ((4 * s - 1) * 2 ** l) / 2
    elif case == "simple i>=1 n=i+1":
        rep = H ** (4 * s) / 4
    elif case == "simple i>=1 n>=i+2":
        l = n - i - 2
        rep = H ** (s * 2 ** (l + i + 2)) / 2 ** (i + 1)
        if j > 3 * 2 ** l:
            rep = rep + H ** ((s * 2 ** (i + 2) - 1) * 2 ** l) / 2
    elif case == "higher z11":
        k = s * 2 ** (n - 2)
        rep = H ** (4 * k) * Fraction(1 + 4 * k, 8)
    else:
        l = n - i - 3
        if l < 0:
            raise NotCoveredError(f"{b.label()} lies outside the closed formulas")
        rep = H ** (s * 2 ** (l + i + 3)) / 2 ** (i + 2)
        if j > 3 * 2 ** l:
            rep = rep + H ** ((s * 2 ** (i + 3) - 1) * 2 ** l) / 2
    return rep.terms


def expected_finv(b: BetaIndex) -> FInvariantClass:
    return make_class(expected_terms(b), b.index_weight)


def compute_finv(b: BetaIndex, guard: int = DEFAULT_GUARD) -> FInvariantClass:
    _require(b)
    a, mu, i1 = modulus(b)
    return elliptic_beta_solve(x_element(b.n).value ** b.s, a, mu, i1, guard)


# ---------------------------------------------------------------------------
# reports

@dataclass
class VerificationReport:
    suite: str
    label: str
    match: bool
    params: dict = field(default_factory=dict)
    instance: BetaIndex | None = None
    computed: FInvariantClass | None = None
    expected: FInvariantClass | None = None
    detail: str = ""
    seconds: float = 0.0

    def to_json(self, timings: bool = True, certificates: bool = True) -> dict:
        out = {"suite": self.suite, "label": self.label, "match": self.match, "params": self.params,
               "instance": None if self.instance is None else self.instance.to_json(),
               "computed": None if self.computed is None else self.computed.to_json(certificates),
               "expected": None if self.expected is None else self.expected.to_json(False),
               "detail": self.detail}
        if timings:
            out["seconds"] = round(self.seconds, 3)
        return out


CSV_FIELDS = ("suite", "label", "match", "index_weight", "computed", "expected", "detail", "seconds")


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in reports:
        k = r.computed.index_weight if r.computed is not None else ""
        w.writerow([r.suite, r.label, int(r.match), k, "" if r.computed is None else str(r.computed),
                    "" if r.expected is None else str(r.expected), r.detail, f"{r.seconds:.3f}"])
    return buf.getvalue()


def reports_to_json(reports, timings: bool = True) -> str:
    return json.dumps([r.to_json(timings) for r in reports], indent=1, sort_keys=True)


# ---------------------------------------------------------------------------
# individual checks (module level so that worker processes can run them)

def check_beta(b: BetaIndex, suite: str = "theorem") -> VerificationReport:
    t0 = time.perf_counter()
    got = compute_finv(b)
    want = expected_finv(b)
    ok = finv_equal(got, want)
    unit = "" if got.unit == ONE else f"unit {got.unit}"
    return VerificationReport(suite, f"{b.label()} [{formula_case(b)}]", ok, b.to_json(), b, got, want,
                              unit, time.perf_counter() - t0)


@lru_cache(maxsize=None)
def replay_z11(k: int) -> tuple[FInvariantClass, list[str]]:
    """Second path for x_2^k modulo (8, z_{1,1}) following the proof chain."""
    if k < 2:
        raise ValueError("the replay needs k >= 2")
    notes = []
    v1, v2 = VPoly.v1(), V2
    z = z_poly(1, 1)
    xk = x_poly(2) ** k
    # x_2^k = v2^4k + k v1^3 v2^(4k-1) + v1^6 B + 8 A
    main = v2 ** (4 * k) + k * v1 ** 3 * v2 ** (4 * k - 1)
    if not quotient_reduce(xk - main, 3, 6).is_zero():
        raise AssertionError("x_2^k is not v2^4k + k v1^3 v2^(4k-1) mod (8, v1^6)")
    notes.append("x_2^k reduced mod (8, v1^6)")
    rest = xk - main
    B = VPoly({(p - 6, q): c for (p, q), c in rest.terms.items() if p >= 6})
    A8 = rest - v1 ** 6 * B
    A = A8 * Fraction(1, 8)
    if not (A.is_integral() and B.is_integral()):
        raise AssertionError("remainder terms are not integral")
    if v1 ** 6 != z * (v1 ** 4 + 4 * v1 * v2) + 16 * v2 ** 2:
        raise AssertionError("v1^6 identity fails")
    hz = k * v1 * v2 ** (4 * k - 1) + (v1 ** 4 + 4 * v1 * v2) * B
    if xk - (1 + 4 * k) * v2 ** (4 * k) != z * hz + 8 * (A + 2 * v2 ** 2 * B):
        raise AssertionError("decomposition modulo (8, z_{1,1}) fails")
    if min(p for p, _ in hz.terms) < 0:
        raise AssertionError("cofactor of z_{1,1} is not holomorphic")
    notes.append("x_2^k = (1+4k) v2^4k + z hz + 8 A' exactly, hz holomorphic")
    t = 12 * k
    H = basic_h()
    zf = z.to_form()
    lhs = (1 + 4 * k) * v2 ** (4 * k)
    rep = H ** (4 * k) * (V1.to_form() ** 4) * (1 + 4 * k)
    target = add_terms(lhs.to_form().terms, mul_terms(rep.terms, zf.terms), -1)
    res = is_member(target, SubgroupSpec(3, t, zf))
    if not res.member:
        raise AssertionError("(1+4k) v2^4k is not (1+4k) H^4k v1^4 z mod 8D + zM")
    notes.append("(1+4k) v2^4k = (1+4k) H^4k v1^4 z_{1,1} mod 8 D + z_{1,1} M")
    return make_class((rep / 8).terms, t - 2), notes


def check_replay(k: int) -> VerificationReport:
    t0 = time.perf_counter()
    b = BetaIndex(k, 2, 2, 1, "higher") if k % 2 else BetaIndex(k // _two_part(k), 2 + _log2(_two_part(k)), 2, 1,
                                                                     "higher")
    replay, notes = replay_z11(k)
    direct = compute_finv(b)
    expected = expected_finv(b)
    ok = finv_equal(replay, direct) and finv_equal(replay, expected)
    return VerificationReport("theorem2", f"replay x_2^{k} mod (8, z_11)", ok, {"k": k}, b, replay, expected,
                              "; ".join(notes), time.perf_counter() - t0)


def _two_part(k: int) -> int:
    return k & -k


def _log2(p: int) -> int:
    return p.bit_length() - 1


def check_member(label: str, suite: str, x, spec: SubgroupSpec, want: bool, params: dict) -> VerificationReport:
    t0 = time.perf_counter()
    got = is_member(x, spec).member
    return VerificationReport(suite, label, got == want, params, detail=f"{spec}: {got}",
                              seconds=time.perf_counter() - t0)


def check_bool(label: str, suite: str, fn, params: dict) -> VerificationReport:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except AssertionError as exc:
        ok, detail = False, str(exc)
    return VerificationReport(suite, label, bool(ok), params, detail=detail, seconds=time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# lemma tasks

def _lemma_e3(l, i, s, j):
    N = s * 2 ** (l + i + 2)
    t = 12 * s * 2 ** (l + i)
    H = basic_h()
    x = InhomForm.from_terms((E3 ** N).terms, t) - H ** N
    return check_member(f"E3^{N} = H^{N} mod 2^{i + 1} D_{t} + v1^{j} M", "lemmas", x,
                        SubgroupSpec(i + 1, t, V1.to_form() ** j), True, {"l": l, "i": i, "s": s, "j": j})


def _lemma_removal(l, i, s, j, vanish):
    M = (s * 2 ** (i + 2) - 1) * 2 ** l
    t = 12 * s * 2 ** (l + i)
    H = basic_h()
    e = InhomForm.from_terms((E3 ** M).terms, t)
    x = e if vanish else e - H ** M
    what = "0" if vanish else f"H^{M}"
    return check_member(f"E3^{M} = {what} mod 2 D_{t} + v1^{j} M", "lemmas", x,
                        SubgroupSpec(1, t, V1.to_form() ** j), True,
                        {"l": l, "i": i, "s": s, "j": j, "vanishing": vanish})


def _even_power_split(l, i):
    def run():
        v1, y = VPoly.v1(basis="E3"), VPoly.y(basis="E3")
        e = 2 ** (l + i + 2)
        lhs = y ** e
        rhs = (y - v1 ** 3) ** e + 2 ** (i + 1) * (v1 ** 6 * y ** 2) ** (2 ** l) * y ** (2 ** (l + 2) * (2 ** i - 1))
        return quotient_reduce(lhs - rhs, i + 2, 12 * 2 ** l).is_zero(), f"mod (2^{i + 2}, v1^{12 * 2 ** l})"
    return check_bool(f"E3^{2 ** (l + i + 2)} binomial split", "lemmas", run, {"l": l, "i": i})


def _basic_power(k):
    H = basic_h()
    v1 = V1.to_form()
    t = 3 * 2 ** k
    x = InhomForm.from_terms(((E3 - v1 ** 3) ** (2 ** k)).terms, t) - H ** (2 ** k)
    return check_member(f"(E3 - v1^3)^{2 ** k} = H^{2 ** k} mod 2^{k + 1} D_{t}", "lemmas", x,
                        SubgroupSpec(k + 1, t), True, {"k": k})


def _reduction(label, poly, target, a, j, params):
    def run():
        nf = quotient_reduce(poly - target, a, j)
        return nf.is_zero(), f"mod (2^{a}, v1^{j})"
    return check_bool(label, "lemmas", run, params)


def _reduction_x(l, i):
    v1, v2 = VPoly.v1(), V2
    n = l + i + 3
    target = v2 ** (2 ** n) + 2 ** (i + 1) * v1 ** (3 * 2 ** l) * v2 ** ((2 ** (i + 3) - 1) * 2 ** l)
    return _reduction(f"x_{n} reduction", x_poly(n), target, i + 2, a_seq(l + 2), {"l": l, "i": i})


def _step_t1(l, s):
    v1, v2 = VPoly.v1(), V2
    target = v2 ** (4 * s * 2 ** l) + v1 ** (3 * 2 ** l) * v2 ** ((4 * s - 1) * 2 ** l)
    return _reduction(f"x_{2 + l}^{s} step for order two", x_poly(2 + l) ** s, target, 1, a_seq(l + 2),
                      {"l": l, "s": s})


def _step_t2ii(l, i, s):
    v1, v2 = VPoly.v1(), V2
    N = s * 2 ** (l + i + 2)
    target = v2 ** N + 2 ** i * v1 ** (3 * 2 ** l) * v2 ** (N - 2 ** l)
    return _reduction(f"x_{l + i + 2}^{s} step for order i+1", x_poly(l + i + 2) ** s, target, i + 1, a_seq(l + 2),
                      {"l": l, "i": i, "s": s})


def _step_t2iii(k):
    v1, v2 = VPoly.v1(), V2
    target = v2 ** (4 * k) + k * v1 ** 3 * v2 ** (4 * k - 1)
    return _reduction(f"x_2^{k} step mod (8, v1^6)", x_poly(2) ** k, target, 3, 6, {"k": k})


def _step_t2iv(l, i, s):
    v1, v2 = VPoly.v1(), V2
    n = l + i + 3
    L = 2 ** l
    target = (v2 ** (s * 2 ** n) + 2 ** (i + 1) * v1 ** (3 * L) * v2 ** ((s * 2 ** (i + 3) - 1) * L)
              + 3 * s * 2 ** i * v1 ** (6 * L) * v2 ** ((s * 2 ** (i + 3) - 2) * L))
    return _reduction(f"x_{n}^{s} step mod v1^{9 * L}", x_poly(n) ** s, target, i + 2, 9 * L,
                      {"l": l, "i": i, "s": s})


def _v1_identities(l, i, m):
    def run():
        j = m * 2 ** i
        v1, v2, z = VPoly.v1(), V2, z_poly(i, m)
        L = 2 ** l
        ok6 = v1 ** (6 * L) == z * v1 ** (6 * L - j) + 2 * j * v1 ** (6 * L - 3) * v2
        ok9 = v1 ** (9 * L) == (z * (v1 ** (9 * L - j) + 2 * j * v1 ** (9 * L - j - 3) * v2)
                                + 4 * j ** 2 * v1 ** (9 * L - 6) * v2 ** 2)
        return ok6 and ok9, f"six: {ok6}, nine: {ok9}"
    return check_bool(f"v1^{6 * 2 ** l}, v1^{9 * 2 ** l} via z_{i},{m}", "lemmas", run, {"l": l, "i": i, "m": m})


def _v1_shift(k, j, i):
    H = basic_h()
    x = H ** k - (V1.to_form() ** j) * H ** k
    t = 2 * k + j
    return check_member(f"H^{k} = v1^{j} H^{k} mod 2^{i + 1} D_{t}", "lemmas", x, SubgroupSpec(i + 1, t), True,
                        {"k": k, "j": j, "i": i})


def lemma_tasks(max_weight: int = LEMMA_CEILING) -> list[tuple]:
    tasks = []
    for l in (0, 1):
        for i in (0, 1):
            for s in (1, 3):
                t = 12 * s * 2 ** (l + i)
                if t > max_weight:
                    continue
                for j in range(2 ** i, 6 * 2 ** l + 1, 2 ** i):
                    tasks.append((_lemma_e3, (l, i, s, j)))
                for j in range(1, 6 * 2 ** l + 1):
                    tasks.append((_lemma_removal, (l, i, s, j, False)))
                    if j <= 3 * 2 ** l:
                        tasks.append((_lemma_removal, (l, i, s, j, True)))
            tasks.append((_even_power_split, (l, i)))
            tasks.append((_reduction_x, (l, i)))
    for k in range(5):
        if 3 * 2 ** k <= max_weight:
            tasks.append((_basic_power, (k,)))
    for l in (0, 1):
        for s in (1, 3):
            tasks.append((_step_t1, (l, s)))
            tasks.append((_step_t2ii, (l, 1, s)))
            tasks.append((_step_t2iv, (l, 1, s)))
    for k in (2, 3, 4):
        tasks.append((_step_t2iii, (k,)))
    for l in (0, 1):
        for i in (1, 2, 3):
            for m in range(1, a_seq(l + 2) // 2 ** i + 1):
                if m * 2 ** i >= 4:
                    tasks.append((_v1_identities, (l, i, m)))
    for k in range(9):
        for j in range(1, 9):
            for i in range(4):
                if j % 2 ** i == 0 and 2 * k + j <= max_weight:
                    tasks.append((_v1_shift, (k, j, i)))
    return tasks


# ---------------------------------------------------------------------------
# theorem tasks

def enumerate_indices(kind: str, max_weight: int, i_filter=None) -> list[BetaIndex]:
    out = []
    n = 0
    while 3 * 2 ** n <= max_weight:
        for s in range(1, max_weight // (3 * 2 ** n) + 1, 2):
            for i in range(n + 1):
                if i_filter is not None and not i_filter(i):
                    continue
                for j in range(1, a_seq(n) + 1):
                    b = BetaIndex(s, n, j, i, kind)
                    if admissible(b)[0]:
                        out.append(b)
        n += 1
    return sorted(out, key=lambda b: (b.weight, b.n, b.s, b.i, b.j))


def theorem1_tasks(max_weight: int) -> list[tuple]:
    return [(check_beta, (b, "theorem1")) for b in enumerate_indices("simple", max_weight, lambda i: i == 0)]


def theorem2_tasks(max_weight: int) -> list[tuple]:
    tasks = [(check_beta, (b, "theorem2")) for b in enumerate_indices("simple", max_weight, lambda i: i >= 1)]
    tasks += [(check_beta, (b, "theorem2")) for b in enumerate_indices("higher", max_weight)]
    for k in range(2, max_weight // 12 + 1):
        tasks.append((check_replay, (k,)))
    return tasks


def check_relation(kind: str, upper: BetaIndex, lower: BetaIndex) -> VerificationReport:
    """kind 'double': 2 f(upper) = f(lower); kind 'coincide': f(upper) = f(lower)."""
    t0 = time.perf_counter()
    fu, fl = compute_finv(upper), compute_finv(lower)
    lhs = fu.scaled(2) if kind == "double" else fu
    ok = finv_equal(lhs, fl)
    sign = "2 f" if kind == "double" else "f"
    label = f"{sign}({upper.label()} {upper.kind}) = f({lower.label()} {lower.kind})"
    return VerificationReport("relations", label, ok, {"upper": upper.to_json(), "lower": lower.to_json(),
                                                        "relation": kind}, None, lhs, fl, "",
                              time.perf_counter() - t0)


def relation_pairs(max_weight: int) -> list[tuple[str, BetaIndex, BetaIndex]]:
    pairs = []
    for b in enumerate_indices("simple", max_weight):
        if b.j % 2 ** (b.i + 1) == 0:
            up = BetaIndex(b.s, b.n, b.j, b.i + 1, "simple")
            if admissible(up)[0]:
                pairs.append(("double", up, b))
    for h in enumerate_indices("higher", max_weight):
        pairs.append(("double", h, BetaIndex(h.s, h.n, h.j, h.i, "simple")))
        if h.j % 2 ** (h.i + 1) == 0:
            same = BetaIndex(h.s, h.n, h.j, h.i + 1, "simple")
            if admissible(same)[0]:
                pairs.append(("coincide", h, same))
    return pairs


def relation_tasks(max_weight: int) -> list[tuple]:
    return [(check_relation, p) for p in relation_pairs(max_weight)]


# ---------------------------------------------------------------------------
# identity tasks

def _hazewinkel():
    hazewinkel_images()
    return True, "v1, v2, v3 closed forms and v3 = 3 v1 v2 (v2 + v1^3)"


def _x_pair():
    return x_relations_hold(), "both expressions for x1 and x2 agree"


def _v1_six():
    v1, v2, z = VPoly.v1(), V2, z_poly(1, 1)
    return v1 ** 6 == z * (v1 ** 4 + 4 * v1 * v2) + 16 * v2 ** 2, "v1^6 = z_11 (v1^4 + 4 v1 v2) + 16 v2^2"


def _z_congruences():
    bad = [(i, m) for i in (1, 2, 3) for m in (1, 2, 3) if not z_element(i, m).congruent_to_one(200)]
    return not bad, f"z_(i,m) = 1 mod 2^(i+2) except {bad}" if bad else "z_(i,m) = 1 mod 2^(i+2)"


def y_poly(i: int) -> VPoly:
    """y_0 = v1, y_1 = v1^2 - 4 v1^-1 v2, y_i = y_(i-1)^2."""
    if i == 0:
        return VPoly.v1()
    if i == 1:
        return VPoly.v1(2) - 4 * VPoly.v1(-1) * V2
    return y_poly(i - 1) ** 2


def _y_congruences():
    from .residues import two_adic

    bad = []
    for i in (1, 2, 3):
        for m in (1, 2, 3):
            diff = y_poly(i) ** m - z_poly(i, m)
            for c in diff.terms.values():
                if any(part and two_adic(part)[1] < i + 2 for part in c.zeta_components()):
                    bad.append((i, m))
                    break
    return not bad, f"y_i^m = z_(i,m) mod 2^(i+2) fails for {bad}" if bad else "y_i^m = z_(i,m) mod 2^(i+2)"


def _x_weights():
    ok = all(x_element(n).weight == 3 * 2 ** n for n in range(5))
    return ok, "x_n holomorphic of weight 3 * 2^n for n <= 4"


def _inverse_substitution():
    v1, v2 = V1.to_form(), V2.to_form()
    from .exact import DELTA
    ok = (E1 == v1 * (-DELTA)) and (E3 == (v1 ** 3 * 12 + v2 * 9) * DELTA)
    return ok, "E1 = -delta v1, E3 = delta (12 v1^3 + 9 v2)"


_IDENTITIES = {"Hazewinkel images": _hazewinkel, "x1, x2 expressions": _x_pair, "v1^6 identity": _v1_six,
               "z congruent to one": _z_congruences, "y against z": _y_congruences, "x_n weights": _x_weights,
               "inverse substitution": _inverse_substitution}


def identity_tasks(max_weight: int) -> list[tuple]:
    tasks = [(_identity, (name,)) for name in _IDENTITIES]
    for l in (0, 1):
        for i in (1, 2, 3):
            for m in range(1, a_seq(l + 2) // 2 ** i + 1):
                if m * 2 ** i >= 4:
                    tasks.append((_identity_v1, (l, i, m)))
    return tasks


def _identity(name):
    return check_bool(name, "identities", _IDENTITIES[name], {})


def _identity_v1(l, i, m):
    rep = _v1_identities(l, i, m)
    rep.suite = "identities"
    return rep


# ---------------------------------------------------------------------------
# driver

def suite_tasks(name: str, max_weight: int | None = None) -> list[tuple]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    ceiling = LEMMA_CEILING if name == "lemmas" else THEOREM_CEILING
    W = ceiling if max_weight is None else max_weight
    if W > ceiling:
        raise ValueError(f"max weight {W} exceeds the ceiling {ceiling} for suite {name}")
    return {"lemmas": lemma_tasks, "theorem1": theorem1_tasks, "theorem2": theorem2_tasks,
            "relations": relation_tasks, "identities": identity_tasks}[name](W)


def _run(task):
    fn, args = task
    return fn(*args)


def verify_suite(name: str, max_weight: int | None = None, jobs: int = 1) -> list[VerificationReport]:
    """Run every check of a suite; report order is independent of jobs."""
    tasks = suite_tasks(name, max_weight)
    if jobs <= 1 or len(tasks) <= 1:
        return [_run(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run, tasks, chunksize=1))
