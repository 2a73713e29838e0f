"""Divided congruences: membership, the elliptic beta solver and class equality.

Everything reduces to linear algebra over Z_(2) on truncated q-expansions,
done modulo 2^64. For a subgroup

    S = 2^a D_t + mu * M_{t-j}  (+ Q*1 + M_t (x) Q)

membership of x is the solvability of

    expansion(x - mu h - w) = 0  mod 2^a

with h an integral form of weight t - j and w in the rational edge space.
Inputs must have {2,3}-smooth denominators; 3 is a unit throughout, so the
answer is decided 2-locally. Laurent multipliers (poles along E1 = 0) are
handled by the same q-series condition; E1 is a unit power series, so a
pole of order p is cleared by working in weight t + p.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from . import kernels
from .coords import divided_index, divided_to_terms
from .exact import DELTA, ONE, Scalar, strip_three
from .forms import (DEFAULT_GUARD, InhomForm, LaurentForm, ModForm, PrecisionError, _EPoly, add_terms,
                    format_terms, monomial_basis, mul_terms, precision_policy, scale_terms)
from .lattice import d_lattice, saturate, solve_mod2k
from .qseries import QSeries
from .residues import bank, form_residues, residue_of, two_adic
from .vpoly import VPoly, from_form

# Weights up to this bound are additionally checked against the HNF lattice.
LATTICE_CEILING = 48
MAX_RETRIES = 3


class NotInvariantError(ValueError):
    """The form is not invariant modulo the requested ideal."""


# ---------------------------------------------------------------------------
# helpers on term dictionaries

def _terms(f) -> dict:
    if isinstance(f, _EPoly):
        return f.terms
    if isinstance(f, Mapping):
        return {k: Scalar.coerce(v) for k, v in f.items() if v}
    raise TypeError(f"expected a form, got {type(f).__name__}")


def pole_order(terms: Mapping) -> int:
    return max([0] + [-a for a, _ in terms])


def split_zeta(terms: Mapping) -> tuple[dict, dict]:
    """Rational coordinate forms (u, w) with f = u + zeta3 * w."""
    u, w = {}, {}
    for key, c in terms.items():
        cu, cw = Scalar.coerce(c).zeta_components()
        if cu:
            u[key] = cu
        if cw:
            w[key] = cw
    return u, w


def join_zeta(u: Mapping, w: Mapping) -> dict:
    out = {}
    for key in set(u) | set(w):
        c = Scalar.from_zeta_components(u.get(key, 0), w.get(key, 0))
        if c:
            out[key] = c
    return out


def delta_split(terms: Mapping) -> tuple[int, dict] | None:
    """(e, rational terms r) with terms = delta^e * r, or None for mixed parity."""
    re = any(Scalar.coerce(c).re for c in terms.values())
    im = any(Scalar.coerce(c).im for c in terms.values())
    if re and im:
        return None
    if not im:
        return 0, {k: Scalar.coerce(c).re for k, c in terms.items()}
    # delta^{-1} = -delta/3, and (-delta/3)(b delta) = b
    return 1, {k: Scalar.coerce(c).im for k, c in terms.items()}


def delta_power(e: int) -> Scalar:
    return DELTA ** e if e >= 0 else (-DELTA / 3) ** (-e)


def _check_smooth(terms: Mapping):
    for c in terms.values():
        for part in Scalar.coerce(c).zeta_components():
            den = Fraction(part).denominator
            while den % 2 == 0:
                den //= 2
            if strip_three(den)[0] != 1:
                raise ValueError("coefficients must have denominators supported at 2 and 3")


def series_residues(terms: Mapping, prec: int) -> tuple[np.ndarray, int]:
    """(2^s * expansion mod 2^64, s) for rational terms, poles along E1 allowed."""
    terms = {k: Fraction(v) for k, v in terms.items() if v}
    p = pole_order(terms)
    if not p:
        return form_residues(terms, prec)
    shifted = {(a + p, b): c for (a, b), c in terms.items()}
    vec, s = form_residues(shifted, prec)
    inv = bank(prec).monomial(-p, 0)
    return kernels.mul_trunc(vec, inv, prec), s


def qseries_residues(x: QSeries, prec: int) -> tuple[list[np.ndarray], int]:
    """Residues of the two zeta components of a q-series."""
    if x.prec < prec:
        raise PrecisionError(f"series known to precision {x.prec}, need {prec}")
    comps = [[c.zeta_components()[i] for c in x.coeffs[:prec]] for i in (0, 1)]
    s = 0
    for comp in comps:
        for c in comp:
            if c:
                s = max(s, -two_adic(c)[1])
    if s >= 48:
        raise PrecisionError("2-adic denominators too deep for 64-bit residues")
    return [np.array([residue_of(c, s) for c in comp], dtype=np.uint64) for comp in comps], s


def integral_at(terms: Mapping, prec: int) -> bool:
    """All zeta components of the expansion 2-integral to precision prec."""
    for comp in split_zeta(terms):
        if not comp:
            continue
        vec, s = series_residues(comp, prec)
        if s and np.any(vec & np.uint64((1 << s) - 1)):
            return False
    return True


def reduce_mod_power(c: Fraction, a: int) -> Fraction:
    """Representative of c modulo 2^a Z_(2) with only its 2-power denominator kept."""
    c = Fraction(c)
    if a < 0:
        raise ValueError("negative exponent")
    num, den = c.numerator, c.denominator
    e = 0
    while den % 2 == 0:
        den //= 2
        e += 1
    mod = 1 << (a + e)
    n = (num * pow(den, -1, mod)) % mod if mod > 1 else 0
    if n >= mod // 2 and mod > 1:
        n -= mod
    return Fraction(n, 1 << e)


# ---------------------------------------------------------------------------
# edge space Q*1 + M_t (x) Q

_EDGE_CACHE: dict[tuple[int, int, int], tuple] = {}
_EDGE_LOCK = threading.Lock()


def _edge_keys(t: int) -> list[tuple[int, int]]:
    keys = [(0, 0)]
    if t > 0:
        keys += monomial_basis(t)
    return keys


def _edge_basis(t: int, search: int, rows: int):
    """Saturated edge expansions (rows x n) and their exact coefficient vectors."""
    key = (t, search, rows)
    got = _EDGE_CACHE.get(key)
    if got is not None:
        return got
    keys = _edge_keys(t)
    bk = bank(rows)
    A = np.empty((rows, len(keys)), dtype=np.uint64)
    for k, (a, b) in enumerate(keys):
        A[:, k] = bk.monomial(a, b)[:rows]
    S, V, vals = saturate(A, search)
    vectors = []
    for k in range(len(keys)):
        v = int(vals[k])
        vectors.append([Fraction(int(V[i, k]), 1 << v) for i in range(len(keys))])
    out = (keys, S, vectors, vals)
    with _EDGE_LOCK:
        _EDGE_CACHE[key] = out
    return out


# ---------------------------------------------------------------------------
# subgroups and witnesses

@dataclass(frozen=True)
class SubgroupSpec:
    """2^a D_t + mu * M_{t-j} (+ Q*1 + M_t (x) Q when rational_edges)."""

    two_power: int  # the exponent a
    top_weight: int
    multiplier: ModForm | LaurentForm | None = None
    rational_edges: bool = False

    def __post_init__(self):
        if self.two_power < 0 or self.top_weight < 0:
            raise ValueError("two_power and top_weight must be nonnegative")
        if self.multiplier is not None and self.cofactor_weight < 0:
            raise ValueError("multiplier weight exceeds the top weight")

    @property
    def cofactor_weight(self) -> int | None:
        if self.multiplier is None:
            return None
        return self.top_weight - self.multiplier.weight

    def to_json(self) -> dict:
        return {
            "two_power": self.two_power,
            "top_weight": self.top_weight,
            "multiplier": None if self.multiplier is None else self.multiplier.to_json(),
            "cofactor_weight": self.cofactor_weight,
            "rational_edges": self.rational_edges,
        }

    @staticmethod
    def from_json(obj) -> "SubgroupSpec":
        mu = obj.get("multiplier")
        if mu is not None:
            mu = LaurentForm.from_json(mu) if mu.get("laurent") else ModForm.from_json(mu)
        return SubgroupSpec(int(obj["two_power"]), int(obj["top_weight"]), mu, bool(obj["rational_edges"]))

    def __str__(self):
        s = f"2^{self.two_power} D_{self.top_weight}"
        if self.multiplier is not None:
            s += f" + mu M_{self.cofactor_weight}"
        if self.rational_edges:
            s += " + Q + M_t(x)Q"
        return s


def _terms_json(terms: Mapping) -> list:
    return [{"a": a, "b": b, "c": Scalar.coerce(c).to_json()}
            for (a, b), c in sorted(terms.items(), key=lambda kv: (-(kv[0][0] + 3 * kv[0][1]), -kv[0][0], kv[0][1]))]


def _terms_from_json(items) -> dict:
    return {(int(m["a"]), int(m["b"])): Scalar.from_json(m["c"]) for m in items}


@dataclass
class Witness:
    """x = 2^a d + mu h + c0 + h_t, with d_cleared = E1^p d."""

    d_cleared: dict
    e1_power: int
    h: dict
    c0: Scalar
    h_t: dict

    def to_json(self) -> dict:
        return {"d_times_e1_power": _terms_json(self.d_cleared), "e1_power": self.e1_power,
                "h": _terms_json(self.h), "c0": self.c0.to_json(), "h_t": _terms_json(self.h_t)}


@dataclass
class MembershipResult:
    member: bool
    witness: Witness | None
    precision: int
    verified_at: int
    certificate: dict | None = None

    def __bool__(self):
        return self.member


# ---------------------------------------------------------------------------
# the block solver

def _solve_components(Ys, col_groups, bits, search, rows):
    """Solve sum_g z_g col_g = Y in each zeta component.

    Ys: [Y_u, Y_w] (None for a vanishing component). col_groups: list of
    (cols_u, cols_w) matrices per unknown group, where coupled groups have
    entries in both components. Returns the solution vector per group or
    None when unsolvable.
    """
    coupled = any(cu is not None and cw is not None for cu, cw in col_groups)
    if not coupled:
        sols = [None] * len(col_groups)
        for comp in (0, 1):
            Y = Ys[comp]
            idx = [g for g, cols in enumerate(col_groups) if cols[comp] is not None]
            if not idx:
                if Y is not None and np.any(Y[:rows] & np.uint64((1 << bits) - 1 if bits < 64 else MAX64)):
                    return None
                continue
            M = np.concatenate([col_groups[g][comp] for g in idx], axis=1) if idx else None
            if Y is None:
                Y = np.zeros(rows, dtype=np.uint64)
            z = solve_mod2k(np.ascontiguousarray(M), Y, bits, search)
            if z is None:
                return None
            pos = 0
            for g in idx:
                n = col_groups[g][comp].shape[1]
                sols[g] = z[pos:pos + n]
                pos += n
        return sols
    # coupled: stack rows as [u[:search], w[:search], u[search:], w[search:]]
    def stack(u, w):
        u = np.zeros_like(w) if u is None else u
        w = np.zeros_like(u) if w is None else w
        return np.concatenate([u[:search], w[:search], u[search:rows], w[search:rows]], axis=0)

    blocks = [stack(cu, cw) for cu, cw in col_groups]
    M = np.ascontiguousarray(np.concatenate(blocks, axis=1))
    zero = np.zeros(rows, dtype=np.uint64)
    Y = stack(Ys[0] if Ys[0] is not None else zero, Ys[1] if Ys[1] is not None else zero)
    z = solve_mod2k(M, Y, bits, 2 * search)
    if z is None:
        return None
    out, pos = [], 0
    for b in blocks:
        out.append(z[pos:pos + b.shape[1]])
        pos += b.shape[1]
    return out


MAX64 = (1 << 64) - 1


# ---------------------------------------------------------------------------
# membership

def is_member(x, g: SubgroupSpec, guard: int = DEFAULT_GUARD, certify: bool = True) -> MembershipResult:
    """Decide x in g; positive answers carry a witness re-verified at doubled precision."""
    last = None
    for _ in range(MAX_RETRIES + 1):
        try:
            return _is_member(x, g, guard, certify)
        except PrecisionError as exc:
            last = exc
            guard *= 2
    raise PrecisionError(f"membership undecided after raising the guard: {last}")


def _is_member(x, g: SubgroupSpec, guard: int, certify: bool) -> MembershipResult:
    series_input = isinstance(x, QSeries)
    xt = {} if series_input else _terms(x)
    mu_terms = _terms(g.multiplier) if g.multiplier is not None else None
    if not series_input:
        _check_smooth(xt)
        if any(a + 3 * b > g.top_weight for a, b in xt):
            raise ValueError("element has terms above the top weight")
    p = max(pole_order(xt), pole_order(mu_terms) if mu_terms else 0)
    T = g.top_weight + p
    Q = precision_policy(T, guard)
    R = 2 * Q
    a = g.two_power

    if series_input:
        Xs, sx = qseries_residues(x, R)
        Xs = [v if np.any(v) else None for v in Xs]
        xu = xw = None
    else:
        xu, xw = split_zeta(xt)
        Xs, sx = [None, None], 0
        res = []
        for comp in (xu, xw):
            res.append(series_residues(comp, R) if comp else (None, 0))
        sx = max(r[1] for r in res)
        Xs = [None if v is None else (v << np.uint64(sx - s)) for v, s in res]

    if all(v is None for v in Xs):
        zero_w = Witness({}, p, {}, Scalar(0), {})
        return _finish(x, g, True, zero_w, Q, R, certify)

    s = sx
    mu_info = None
    if mu_terms is not None:
        split = delta_split(mu_terms)
        mono = monomial_basis(g.cofactor_weight)
        if split is not None:
            e_mu, mu0 = split
            cols, shifts = [], []
            for m in mono:
                vec, sm = series_residues(_mul_rational(mu0, m), R)
                cols.append(vec)
                shifts.append(sm)
            smax = max(shifts, default=0)
            s = max(s, smax)
            mu_info = ("pure", e_mu, mono, cols, shifts)
        else:
            mu_u, mu_w = split_zeta(mu_terms)
            cols = {}
            shifts = []
            for name, comp in (("u", mu_u), ("w", mu_w), ("uw", _sub_rational(mu_u, mu_w))):
                lst = []
                for m in mono:
                    vec, sm = series_residues(_mul_rational(comp, m), R)
                    lst.append(vec)
                    shifts.append(sm)
                cols[name] = lst
            s = max(s, max(shifts, default=0))
            mu_info = ("coupled", mono, cols, shifts)

    bits = a + s
    Ys = [None if v is None else (v << np.uint64(s - sx)) for v in Xs]

    col_groups = []
    names = []
    if mu_info is not None and mu_info[0] == "pure":
        _, e_mu, mono, cols, shifts = mu_info
        Mc = _stack_cols(cols, shifts, s, R)
        col_groups.append((Mc, None))
        col_groups.append((None, Mc))
        names += ["h_u", "h_w"]
    elif mu_info is not None:
        _, mono, cols, shifts = mu_info
        n = len(mono)
        sh_u, sh_w, sh_uw = shifts[:n], shifts[n:2 * n], shifts[2 * n:]
        Cu = _stack_cols(cols["u"], sh_u, s, R)
        Cw = _stack_cols(cols["w"], sh_w, s, R)
        Cuw = _stack_cols(cols["uw"], sh_uw, s, R)
        col_groups.append((Cu, Cw))
        col_groups.append(((~Cw + np.uint64(1)), Cuw))
        names += ["h_u", "h_w"]
    edge = None
    if g.rational_edges:
        edge = _edge_basis(g.top_weight, Q, R)
        if bits + int(edge[3].max(initial=0)) > 64:
            raise PrecisionError(f"modulus 2^{bits} exceeds the precision of the saturated edges")
        S_edge = edge[1]
        col_groups.append((S_edge, None))
        col_groups.append((None, S_edge))
        names += ["w_u", "w_w"]

    sols = _solve_components(Ys, col_groups, bits, Q, R)
    if sols is None:
        return MembershipResult(False, None, Q, R, None)
    sol = dict(zip(names, sols))

    # assemble the exact witness
    h_terms: dict = {}
    h_ints: list = []
    if mu_info is not None:
        for nm in ("h_u", "h_w"):
            z = _zeros_if_none(sol.get(nm), len(mono))
            h_ints.append([int(reduce_mod_power(Fraction(int(v)), a)) for v in z])
        h_terms = join_zeta({m: Fraction(v) for m, v in zip(mono, h_ints[0]) if v},
                            {m: Fraction(v) for m, v in zip(mono, h_ints[1]) if v})
        if mu_info[0] == "pure":
            # mu0 = delta^{-e} mu, so mu0 h = mu (delta^{-e} h)
            h_terms = scale_terms(h_terms, delta_power(-mu_info[1]))
    w_terms: dict = {}
    if edge is not None:
        keys, _, vectors, _ = edge
        comps = []
        for nm in ("w_u", "w_w"):
            z = _zeros_if_none(sol.get(nm), len(keys))
            coords = [Fraction(0)] * len(keys)
            for k, zk in enumerate(z):
                zk = int(zk)
                if zk:
                    for i, v in enumerate(vectors[k]):
                        coords[i] += zk * v
            comps.append({key: reduce_mod_power(c / (1 << s), a) for key, c in zip(keys, coords)})
        w_terms = join_zeta(*comps)

    # recombine the exact witness against the expansions on all 2Q rows
    mask = np.uint64(MAX64 if bits >= 64 else (1 << bits) - 1)
    resid = [np.zeros(R, dtype=np.uint64) if v is None else v[:R].copy() for v in Ys]
    for (cu, cw), ints in zip(col_groups[:len(h_ints)], h_ints):
        vec = np.array([v & MAX64 for v in ints], dtype=np.uint64)
        if cu is not None:
            resid[0] -= cu @ vec
        if cw is not None:
            resid[1] -= cw @ vec
    for comp, part in enumerate(split_zeta(w_terms)):
        if part:
            vec, sw = series_residues(part, R)
            if sw > s:
                raise PrecisionError("edge witness has deeper denominators than the system")
            resid[comp] -= vec << np.uint64(s - sw)
    if any(np.any(r & mask) for r in resid):
        raise PrecisionError("witness recombination fails at doubled precision")

    c0 = w_terms.pop((0, 0), Scalar(0))
    h_t = w_terms
    if series_input:
        return MembershipResult(True, Witness({}, 0, h_terms, c0, h_t), Q, R, None)

    rest = add_terms(mul_terms(mu_terms, h_terms) if mu_terms else {}, h_t)
    if c0:
        rest = add_terms(rest, {(0, 0): c0})
    d = scale_terms(add_terms(xt, rest, -1), Fraction(1, 1 << a))
    d_cleared = {(i + p, j): c for (i, j), c in d.items()}
    wit = Witness(d_cleared, p, h_terms, c0, h_t)
    return _finish(x, g, True, wit, Q, R, certify)


def _finish(x, g, member, wit: Witness, Q: int, R: int, certify: bool) -> MembershipResult:
    if member and not isinstance(x, QSeries) and g.top_weight + wit.e1_power <= LATTICE_CEILING:
        if not integral_at(wit.d_cleared, R):
            raise PrecisionError("witness fails integrality at doubled precision")
        T = g.top_weight + wit.e1_power
        if certify and wit.d_cleared:
            lat = d_lattice(T)
            for comp in split_zeta(wit.d_cleared):
                if comp and not lat.contains(InhomForm.from_terms(comp, T)):
                    raise PrecisionError("witness is not in the certified lattice")
    cert = None
    if not isinstance(x, QSeries):
        cert = {
            "statement": {"element": _terms_json(_terms(x)), "subgroup": g.to_json()},
            "witness": wit.to_json(),
            "precision": Q,
            "verified_at": R,
        }
    return MembershipResult(member, wit, Q, R, cert)


def _zeros_if_none(z, n):
    return [0] * n if z is None else z


def _stack_cols(cols, shifts, s, rows):
    if not cols:
        return np.zeros((rows, 0), dtype=np.uint64)
    M = np.empty((rows, len(cols)), dtype=np.uint64)
    for k, (v, sm) in enumerate(zip(cols, shifts)):
        M[:, k] = v << np.uint64(s - sm)
    return M


def _mul_rational(terms: Mapping, mono: tuple[int, int]) -> dict:
    a, b = mono
    return {(i + a, j + b): c for (i, j), c in terms.items()}


def _sub_rational(u: Mapping, w: Mapping) -> dict:
    out = dict(u)
    for k, c in w.items():
        out[k] = out.get(k, 0) - c
    return {k: c for k, c in out.items() if c}


def verify_certificate(cert: Mapping) -> bool:
    """Re-check a membership certificate using expansion and exact arithmetic only."""
    g = SubgroupSpec.from_json(cert["statement"]["subgroup"])
    x = _terms_from_json(cert["statement"]["element"])
    w = cert["witness"]
    p = int(w["e1_power"])
    d_cleared = _terms_from_json(w["d_times_e1_power"])
    h = _terms_from_json(w["h"])
    c0 = Scalar.from_json(w["c0"])
    h_t = _terms_from_json(w["h_t"])
    a = g.two_power
    # h integral of the cofactor weight, edges rational of weights 0 and t
    from .exact import scalar_is_integral

    if g.multiplier is None and h:
        return False
    if g.multiplier is not None:
        cw = g.cofactor_weight
        if any(i + 3 * j != cw or i < 0 for i, j in h) or not all(scalar_is_integral(c) for c in h.values()):
            return False
    if h_t and (not g.rational_edges or any(i + 3 * j != g.top_weight for i, j in h_t)):
        return False
    if c0 and not g.rational_edges:
        return False
    if any(i < 0 or i + 3 * j > g.top_weight + p for i, j in d_cleared):
        return False
    # identity E1^p x = 2^a d_cleared + E1^p (mu h + c0 + h_t)
    rest = add_terms(mul_terms(_terms(g.multiplier), h) if g.multiplier is not None else {}, h_t)
    if c0:
        rest = add_terms(rest, {(0, 0): c0})
    lhs = {(i + p, j): c for (i, j), c in add_terms(x, rest, -1).items()}
    if lhs != scale_terms(d_cleared, 1 << a):
        return False
    return integral_at(d_cleared, int(cert["verified_at"]))


# ---------------------------------------------------------------------------
# f-invariant classes

@dataclass
class FInvariantClass:
    """Class of a representative in the double-underline quotient tensor Q/Z."""

    index_weight: int
    representative: InhomForm
    unit: Scalar = field(default_factory=lambda: ONE)
    certificate: dict | None = None

    def to_json(self, with_certificate: bool = True) -> dict:
        out = {"index_weight": self.index_weight, "representative": self.representative.to_json(),
               "unit": self.unit.to_json()}
        if with_certificate and self.certificate is not None:
            out["certificate"] = self.certificate
        return out

    def __str__(self):
        return f"[{format_terms(self.representative.terms)}] in D_{self.index_weight}"

    def scaled(self, c) -> "FInvariantClass":
        return FInvariantClass(self.index_weight, self.representative * c, self.unit)

    def __add__(self, other: "FInvariantClass") -> "FInvariantClass":
        if self.index_weight != other.index_weight:
            raise ValueError("index weights differ")
        return FInvariantClass(self.index_weight, InhomForm.from_terms(
            add_terms(self.representative.terms, other.representative.terms), self.index_weight))


def make_class(rep, k: int) -> FInvariantClass:
    return FInvariantClass(k, InhomForm.from_terms(_terms(rep), k))


def finv_equal(f: FInvariantClass, g: FInvariantClass, guard: int = DEFAULT_GUARD) -> bool:
    if f.index_weight != g.index_weight:
        raise ValueError("cannot compare classes of different index weights")
    diff = add_terms(f.representative.terms, g.representative.terms, -1)
    if not diff:
        return True
    return is_member(diff, SubgroupSpec(0, f.index_weight, None, True), guard).member


def finv_is_zero(f: FInvariantClass) -> bool:
    return finv_equal(f, FInvariantClass(f.index_weight, InhomForm(f.index_weight)))


# ---------------------------------------------------------------------------
# the elliptic beta solver

def elliptic_beta_solve(xform, a: int, mu, i1: int = 1, guard: int = DEFAULT_GUARD) -> FInvariantClass:
    """Class of phi / 2^a, where xform = mu^i1 phi mod 2^a D_t and phi in D_{t - i1|mu|}.

    xform is normally a form of weight t; an inhomogeneous form is read with
    its top weight as t.
    """
    if a < 0 or i1 < 1:
        raise ValueError("need a >= 0 and i1 >= 1")
    last = None
    for _ in range(MAX_RETRIES + 1):
        try:
            return _beta_solve(xform, a, mu, i1, guard)
        except PrecisionError as exc:
            last = exc
            guard *= 2
    raise PrecisionError(f"beta solve failed after raising the guard: {last}")


def _beta_solve(xform, a, mu, i1, guard) -> FInvariantClass:
    x_terms = _terms(xform)
    t = xform.top_weight if isinstance(xform, InhomForm) else xform.weight
    mu_tot = mu ** i1
    mu_terms = _terms(mu_tot)
    tp = t - mu_tot.weight
    if tp < 0:
        raise ValueError("multiplier weight exceeds the form weight")
    _check_smooth(x_terms)
    _check_smooth(mu_terms)
    p = pole_order(mu_terms)
    T = t + p
    Q = precision_policy(T, guard)
    R = 2 * Q
    lat = d_lattice(tp)
    S = lat.solution_basis(R)
    d = lat.dim

    xs = delta_split(x_terms)
    ms = delta_split(mu_terms)
    if xs is not None and ms is not None:
        ex, x_rat = xs
        em, mu_rat = ms
        x_comps = [x_rat, {}]
        mu_comps = [mu_rat, {}]
        unit = delta_power(ex - em)
    else:
        x_comps = list(split_zeta(x_terms))
        mu_comps = list(split_zeta(mu_terms))
        unit = ONE

    Xs, shifts = [], []
    for comp in x_comps:
        if comp:
            v, sv = series_residues(comp, R)
        else:
            v, sv = None, 0
        Xs.append(v)
        shifts.append(sv)
    mu_res = {}
    for name, comp in (("u", mu_comps[0]), ("w", mu_comps[1]), ("uw", _sub_rational(mu_comps[0], mu_comps[1]))):
        if comp:
            mu_res[name] = series_residues(comp, R)
    s = max(shifts + [sm for _, sm in mu_res.values()] + [0])
    bits = a + s
    vmax = int(lat.vals.max(initial=0))
    if bits + vmax > 64:
        raise PrecisionError(f"modulus 2^{bits} with basis depth {vmax} exceeds 64 bits")
    Ys = [None if v is None else v << np.uint64(s - sv) for v, sv in zip(Xs, shifts)]

    def prod(name):
        if name not in mu_res:
            return None
        vec, sm = mu_res[name]
        M = np.empty((R, d), dtype=np.uint64)
        for k in range(d):
            M[:, k] = kernels.mul_trunc(vec, S[:, k], R)
        return M << np.uint64(s - sm)

    Pu, Pw, Puw = prod("u"), prod("w"), prod("uw")
    if Pw is None:
        groups = [(Pu, None), (None, Pu)]
    else:
        neg_w = ~Pw + np.uint64(1)
        groups = [(Pu, Pw), (neg_w, Puw if Puw is not None else np.zeros_like(Pw))]
    if all(v is None for v in Ys):
        sols = [np.zeros(d, dtype=np.uint64), np.zeros(d, dtype=np.uint64)]
    else:
        if Pu is None and Pw is None:
            raise ValueError("multiplier vanishes")
        sols = _solve_components(Ys, groups, bits, Q, R)
    if sols is None:
        raise NotInvariantError(f"form of weight {t} is not invariant modulo (2^{a}, mu^{i1})")

    keys = divided_index(tp)
    phi_comps = []
    for z in sols:
        coords = [0] * d
        z = [0] * d if z is None else [int(v) & ((1 << a) - 1) for v in z]
        for k, zk in enumerate(z):
            if zk:
                vk = int(lat.vals[k])
                col = lat.V[:, k]
                for i in range(d):
                    ci = int(col[i])
                    if ci:
                        coords[i] += Fraction(zk * ci, 1 << vk)
        phi_comps.append({key: reduce_mod_power(Fraction(c), a) for key, c in zip(keys, coords) if c})
    phi_terms = join_zeta(divided_to_terms(phi_comps[0]), divided_to_terms(phi_comps[1]))
    phi_terms = scale_terms(phi_terms, unit)

    # exact residual check: E1^p (x - mu^i1 phi) / 2^a must expand integrally
    resid = add_terms(x_terms, mul_terms(mu_terms, phi_terms), -1)
    cleared = {(i + p, j): c * Fraction(1, 1 << a) for (i, j), c in resid.items()}
    if not integral_at(cleared, R):
        raise PrecisionError("beta solution fails at doubled precision")
    if cleared and T <= LATTICE_CEILING:
        latT = d_lattice(T)
        for comp in split_zeta(cleared):
            if comp and not latT.contains(InhomForm.from_terms(comp, T)):
                raise PrecisionError("beta residual not in the certified lattice")
    rep = InhomForm.from_terms(scale_terms(phi_terms, Fraction(1, 1 << a)), tp)
    cert = {
        "statement": {"form": _terms_json(x_terms), "two_power": a, "multiplier": mu.to_json(),
                      "multiplicity": i1, "top_weight": t},
        "witness": {"phi": _terms_json(phi_terms), "e1_power": p,
                    "residual_over_2a_times_e1_power": _terms_json(cleared)},
        "precision": Q,
        "verified_at": R,
    }
    return FInvariantClass(tp, rep, unit, cert)


# ---------------------------------------------------------------------------
# reduction modulo (2^a, v1^j)

@dataclass(frozen=True)
class QuotientNormalForm:
    two_power: int
    v1_order: int
    basis: str
    terms: tuple  # sorted ((p, q), (u, w)) with u + w*zeta3 the coefficient mod 2^a
    delta_power: int = 0
    unit_residue: tuple[int, int] = (1, 0)

    def is_zero(self) -> bool:
        return not self.terms

    def to_vpoly(self) -> VPoly:
        return VPoly({k: Scalar.from_zeta_components(u, w) for k, (u, w) in self.terms}, self.basis)

    def to_json(self) -> dict:
        return {"two_power": self.two_power, "v1_order": self.v1_order, "basis": self.basis,
                "terms": [{"v1": p, "y": q, "u": u, "w": w} for (p, q), (u, w) in self.terms],
                "delta_power": self.delta_power, "unit_residue": list(self.unit_residue)}


def _residue_mod(c: Fraction, a: int) -> int:
    c = Fraction(c)
    if two_adic(c)[1] < 0:
        raise ValueError("coefficient is not 2-integral")
    mod = 1 << a
    return (c.numerator * pow(c.denominator, -1, mod)) % mod if mod > 1 else 0


def quotient_reduce(poly, a: int, j: int) -> QuotientNormalForm:
    """Normal form in M_* / (2^a, v1^j) on the v1-monomial basis.

    A form is first rewritten in (v1, v2). If the coefficients are all
    rational or all delta-multiples, the delta power is factored out and its
    residue modulo 2^a recorded.
    """
    if a < 1 or j < 1:
        raise ValueError("need a >= 1 and j >= 1")
    if not isinstance(poly, VPoly):
        poly = from_form(poly)
    kept = {k: c for k, c in poly.terms.items() if k[0] < j}
    if any(p < 0 for p, _ in kept):
        raise ValueError("negative powers of v1 survive the truncation")
    e = 0
    split = delta_split(kept) if kept else (0, {})
    if split is not None and split[0] == 1:
        e = 1
        kept = {k: Scalar(v) for k, v in split[1].items()}
    out = []
    for k in sorted(kept):
        u, w = kept[k].zeta_components()
        ru, rw = _residue_mod(u, a), _residue_mod(w, a)
        if ru or rw:
            out.append((k, (ru, rw)))
    du, dw = delta_power(e).zeta_components()
    return QuotientNormalForm(a, j, poly.basis, tuple(out), e, (_residue_mod(du, a), _residue_mod(dw, a)))


def congruent(p1, p2, a: int, j: int) -> bool:
    return quotient_reduce(p1 - p2, a, j).is_zero()
