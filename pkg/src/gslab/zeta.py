"""Exact special values of cone zeta functions.

The eta-smoothed mass of a lattice-cone set is evaluated through finite
cyclotomic-twisted sums (the closed form for twisted cone zeta values at
non-positive integers), and independently through Bernoulli-polynomial
closed forms of the untwisted values at 0.  Both routes are exact rational
arithmetic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .cones import Cone, ShintaniSet, shintani_domain
from .quadfield import (
    FieldElem,
    Ideal,
    PrimeFactor,
    QuadField,
    RayClassGroup,
    congruent_to_one_mod,
    factor_ideal,
    rep_coprime_to,
    val_at_prime,
)

Rat = Fraction


# ---------------------------------------------------------------------------
# dense cyclotomic arithmetic over Q(zeta_q), q prime


class Cyclotomic:
    """Coefficients on the power basis zeta, zeta^2, ..., zeta^(q-1).

    The relation 1 = -(zeta + ... + zeta^(q-1)) makes rationality visible:
    an element is rational iff all coefficients agree, with value minus the
    common coefficient.  Coefficients may live in any commutative Q-algebra.
    """

    __slots__ = ("q", "co")

    def __init__(self, q: int, co):
        self.q = q
        self.co = tuple(co)
        assert len(self.co) == q - 1

    @classmethod
    def zero(cls, q: int) -> "Cyclotomic":
        return cls(q, (Rat(0),) * (q - 1))

    @classmethod
    def from_scalar(cls, q: int, c) -> "Cyclotomic":
        return cls(q, (-c,) * (q - 1))

    @classmethod
    def zeta_pow(cls, q: int, n: int) -> "Cyclotomic":
        n %= q
        if n == 0:
            return cls.from_scalar(q, Rat(1))
        co = [Rat(0)] * (q - 1)
        co[n - 1] = Rat(1)
        return cls(q, co)

    def __add__(self, other: "Cyclotomic") -> "Cyclotomic":
        return Cyclotomic(self.q, tuple(a + b for a, b in zip(self.co, other.co)))

    def __sub__(self, other: "Cyclotomic") -> "Cyclotomic":
        return Cyclotomic(self.q, tuple(a - b for a, b in zip(self.co, other.co)))

    def __neg__(self) -> "Cyclotomic":
        return Cyclotomic(self.q, tuple(-a for a in self.co))

    def scale(self, c) -> "Cyclotomic":
        return Cyclotomic(self.q, tuple(c * a for a in self.co))

    def __mul__(self, other: "Cyclotomic") -> "Cyclotomic":
        q = self.q
        co = [Rat(0)] * (q - 1)
        wrap = Rat(0)
        for i, a in enumerate(self.co):
            if a == 0:
                continue
            for j, b in enumerate(other.co):
                if b == 0:
                    continue
                e = (i + j + 2) % q
                if e == 0:
                    wrap = wrap + a * b
                else:
                    co[e - 1] = co[e - 1] + a * b
        if wrap != 0:
            co = [x - wrap for x in co]
        return Cyclotomic(q, co)

    def mul_zeta_pow(self, k: int) -> "Cyclotomic":
        q = self.q
        k %= q
        if k == 0:
            return self
        co = [Rat(0)] * (q - 1)
        wrap = Rat(0)
        for i, c in enumerate(self.co):
            e = (i + 1 + k) % q
            if e == 0:
                wrap = wrap + c
            else:
                co[e - 1] = co[e - 1] + c
        if wrap != 0:
            co = [x - wrap for x in co]
        return Cyclotomic(q, co)

    def __pow__(self, k: int) -> "Cyclotomic":
        result = Cyclotomic.from_scalar(self.q, Rat(1))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        return (
            isinstance(other, Cyclotomic)
            and self.q == other.q
            and all(a == b for a, b in zip(self.co, other.co))
        )

    def is_rational(self) -> bool:
        return all(a == self.co[0] for a in self.co)

    def rational_value(self):
        if not self.is_rational():
            raise ValueError("cyclotomic value is not rational")
        return -self.co[0]

    def __repr__(self):
        return f"Cyclotomic(q={self.q}, {self.co})"


def inv_one_minus_zeta_pow(q: int, a: int) -> Cyclotomic:
    """(1 - zeta^a)^(-1) = -(1/q) sum_j j zeta^(aj), for a != 0 mod q."""
    a %= q
    if a == 0:
        raise ZeroDivisionError("1 - zeta^0 = 0")
    co = [Rat(0)] * (q - 1)
    for j in range(1, q):
        e = (a * j) % q
        co[e - 1] = co[e - 1] - Rat(j, q)
    return Cyclotomic(q, co)


# ---------------------------------------------------------------------------
# twisted cone zeta values at non-positive integers (finite closed form)


def twisted_zeta_at_neg_k(q: int, k: int, gens, shift, xi_exps, with_norm: bool) -> Cyclotomic:
    """Value at s = -k of sum_{m >= 0} xi^m (z + m.v)^{-s} with z = shift.v
    (norm variant: N(z + m.v)^{-s}); all twists must be nontrivial.

    The inner alternating-binomial sum is an iterated finite difference of a
    polynomial of degree k (norm variant 2k), so exponent tuples are capped
    at deg + 1 in each entry.
    """
    r = len(gens)
    if any(e % q == 0 for e in xi_exps):
        raise ValueError("trivial twist: the closed form requires xi != 1")
    deg = (2 * k) if with_norm else k
    inv1m = [inv_one_minus_zeta_pow(q, e) for e in xi_exps]
    z = gens[0] * shift[0]
    for g, x in zip(gens[1:], shift[1:]):
        z = z + g * x
    total = Cyclotomic.zero(q)
    for m in itertools.product(range(1, deg + 2), repeat=r):
        inner = None
        for l in itertools.product(*(range(1, mi + 1) for mi in m)):
            coef = 1
            for mi, li in zip(m, l):
                coef *= (-1) ** (li - 1) * math.comb(mi - 1, li - 1)
            if coef == 0:
                continue
            if k == 0:
                pv = Rat(coef)
            else:
                val = z
                for g, li in zip(gens, l):
                    val = val - g * li
                pv = (coef * val.norm() ** k) if with_norm else (val ** k) * coef
            inner = pv if inner is None else inner + pv
        if inner is None or inner == 0:
            continue
        factor = inv1m[0] ** m[0]
        for i in range(1, r):
            factor = factor * inv1m[i] ** m[i]
        total = total + factor.scale(inner)
    return total


# ---------------------------------------------------------------------------
# Bernoulli route: untwisted values at non-positive integers

_BERN_AT_1 = [Rat(1), Rat(1, 2), Rat(1, 6), Rat(0), Rat(-1, 30), Rat(0), Rat(1, 42), Rat(0)]
_BERN_NUM = [Rat(1), Rat(-1, 2), Rat(1, 6), Rat(0), Rat(-1, 30), Rat(0), Rat(1, 42), Rat(0)]


def bernoulli_poly(n: int, x):
    acc = None
    for j in range(n + 1):
        term = math.comb(n, j) * _BERN_NUM[j] * (x ** (n - j) if n - j else 1)
        acc = term if acc is None else acc + term
    return acc


def _series_mul(A, B, K):
    out = [Rat(0)] * (K + 1)
    for i, a in enumerate(A):
        if i > K or a == 0:
            continue
        for j, b in enumerate(B):
            if i + j > K:
                break
            if b == 0:
                continue
            out[i + j] = out[i + j] + a * b
    return out


def barnes_zeta_neg_k(gens, z, k: int):
    """zeta(-k) of sum_{m >= 0} (z + m.v)^{-s}, r <= 2: the value is
    (-1)^k k! times the t^k Laurent coefficient of e^{-zt}/prod(1-e^{-vt})."""
    r = len(gens)
    if r > 2:
        raise ValueError("only one or two generators are supported")
    K = k + r
    fact = [math.factorial(j) for j in range(K + 1)]
    S = [((-1) ** j) * (z ** j if j else 1) * Rat(1, fact[j]) for j in range(K + 1)]
    denom = None
    for v in gens:
        P = [_BERN_AT_1[i] * (v ** i if i else 1) * Rat(1, fact[i]) for i in range(K + 1)]
        S = _series_mul(S, P, K)
        denom = v if denom is None else denom * v
    c = S[K]
    val = c * denom.inverse() if isinstance(denom, FieldElem) else c / denom
    return ((-1) ** k) * fact[k] * val


def norm_cone_zeta0(gens, shift) -> Rat:
    """Value at 0 of the norm-variant cone zeta over a degree-2 field."""
    if len(gens) == 1:
        return Rat(1, 2) - shift[0]
    v1, v2 = gens
    x1, x2 = shift
    return (
        bernoulli_poly(1, x1) * bernoulli_poly(1, x2)
        + Rat(1, 4) * (bernoulli_poly(2, x1) * (v1 / v2).trace()
                       + bernoulli_poly(2, x2) * (v2 / v1).trace())
    )


# ---------------------------------------------------------------------------
# lattice-cone sets


@dataclass(frozen=True)
class BallCondition:
    """Open-compact condition at the place above p, or eta-divisibility."""

    kind: str  # "all" | "additive" | "ord_at_least" | "unit_coset" | "eta_divisible"
    a: int = 0
    level: int = 0

    @classmethod
    def all(cls):
        return cls("all")

    @classmethod
    def additive(cls, a: int, level: int):
        if level < 0:
            raise ValueError("level must be >= 0")
        return cls("additive", a, level)

    @classmethod
    def ord_at_least(cls, e: int):
        return cls("ord_at_least", 0, e)

    @classmethod
    def unit_coset(cls, a: int, level: int):
        if a == 0:
            raise ValueError("unit coset needs a nonzero representative")
        return cls("unit_coset", a, level)

    @classmethod
    def eta_divisible(cls):
        return cls("eta_divisible")

    def normalized(self, p: int | None) -> "BallCondition":
        """Every kind except eta-divisibility is a single additive ball."""
        if self.kind == "all":
            return BallCondition("additive", 0, 0)
        if self.kind == "additive":
            if self.level and p is None:
                raise ValueError("additive balls need the prime above p")
            a = self.a % p ** self.level if self.level else 0
            return BallCondition("additive", a, self.level)
        if self.kind == "ord_at_least":
            return BallCondition("additive", 0, self.level)
        if self.kind == "unit_coset":
            if p is None:
                raise ValueError("unit cosets need the prime above p")
            j, a = 0, self.a
            while a % p == 0:
                a //= p
                j += 1
            lv = self.level + j
            return BallCondition("additive", self.a % p ** lv, lv)
        raise ValueError("eta-divisibility has no additive normal form")

    def to_json(self):
        return {"kind": self.kind, "a": self.a, "level": self.level}


@dataclass(frozen=True)
class LatticePiece:
    cell: tuple     # scaled cone generators (L v1[, L v2]); zeta generators
    basis: tuple    # enumeration basis: z = sum coords[i] * basis[i]
    coords: tuple   # integer coordinate tuples of the shift points
    shifts: tuple   # the same points as cell fractions in (0, 1]^r
    index: int      # lattice points per cell before any filtering

    def points(self):
        for c in self.coords:
            z = self.basis[0] * c[0]
            for b, ci in zip(self.basis[1:], c[1:]):
                z = z + b * ci
            yield c, z


@dataclass(frozen=True)
class LatticeConeSet:
    pieces: tuple
    provenance: dict

    def to_json(self):
        return {
            "pieces": [
                {
                    "gens": [g.to_json() for g in p.cell],
                    "shifts": [[str(x) for x in s] for s in p.shifts],
                    "index": p.index,
                }
                for p in self.pieces
            ],
            "provenance": self.provenance,
        }


@dataclass
class ZetaContext:
    """Field, conductor and prime data shared by the zeta evaluations."""

    field: QuadField
    f: Ideal
    eta: PrimeFactor
    p_pf: PrimeFactor | None = None
    f_factors: list = dc_field(default=None)

    def __post_init__(self):
        if self.f_factors is None:
            self.f_factors = factor_ideal(self.field, self.f) if self.f.norm() != 1 else []


def _min_positive_integer(I: Ideal) -> int:
    g = I.scale * I.a  # I meets Q exactly in (g) Z
    return g.numerator


def _residue_form(g: FieldElem, root: int, mod: int) -> int:
    den = math.lcm(g.a.denominator, g.b.denominator)
    if math.gcd(den, mod) != 1:
        raise ValueError("denominator shares a factor with the residue modulus")
    num = g.a * den + g.b * den * root
    return int(num) * pow(den, -1, mod) % mod


def _coords_in_basis(g1: FieldElem, g2: FieldElem, w: FieldElem) -> tuple[Rat, Rat]:
    det = g1.a * g2.b - g1.b * g2.a
    x = (w.a * g2.b - w.b * g2.a) / det
    y = (g1.a * w.b - g1.b * w.a) / det
    return x, y


def _f_congruence_conds(ctx: ZetaContext, basis) -> tuple[list, list]:
    """Residue conditions (mod, per-basis forms, target) for z = 1 (mod* f),
    plus exact post-filters for ramified conductor primes."""
    vec, post = [], []
    for pf, a in ctx.f_factors:
        mod = pf.ell ** a
        if pf.degree == 1 and pf.ramification == 1:
            root = pf.lifted_root(a)
            forms = [_residue_form(g, root, mod) for g in basis]
            vec.append((mod, forms, 1 % mod))
        elif pf.degree == 2:
            den = 1
            for g in basis:
                den = math.lcm(den, g.a.denominator, g.b.denominator)
            if math.gcd(den, pf.ell) != 1:
                raise ValueError("denominator shares a factor with the conductor")
            inv = pow(den, -1, mod)
            fa = [int(g.a * den) * inv % mod for g in basis]
            fb = [int(g.b * den) * inv % mod for g in basis]
            vec.append((mod, fa, 1 % mod))
            vec.append((mod, fb, 0))
        else:
            post.append(
                lambda z, _pf=pf, _a=a: val_at_prime(_pf.ideal, z) == 0
                and val_at_prime(_pf.ideal, z - 1) >= _a
            )
    return vec, post


def _enumerate_cell_r2(T, vec_conds, chunk: int = 1 << 21):
    """Integer points of the half-open cell spanned by the columns of T,
    filtered by the residue conditions; yields (C1, C2, U1, U2, |det|)."""
    (t11, t12), (t21, t22) = T
    det = t11 * t22 - t12 * t21
    assert det != 0
    sg = 1 if det > 0 else -1
    D = abs(det)
    corners = [(0, 0), (t11, t21), (t12, t22), (t11 + t12, t21 + t22)]
    c1_lo, c1_hi = min(c[0] for c in corners), max(c[0] for c in corners)
    c2_lo, c2_hi = min(c[1] for c in corners), max(c[1] for c in corners)
    width = c2_hi - c2_lo + 1
    rows_per_chunk = max(1, chunk // max(width, 1))
    c2s = np.arange(c2_lo, c2_hi + 1, dtype=np.int64)
    pre_count = 0
    for r0 in range(c1_lo, c1_hi + 1, rows_per_chunk):
        r1 = min(r0 + rows_per_chunk - 1, c1_hi)
        c1s = np.arange(r0, r1 + 1, dtype=np.int64)
        C1 = np.repeat(c1s, width)
        C2 = np.tile(c2s, len(c1s))
        U1 = sg * (t22 * C1 - t12 * C2)
        U2 = sg * (-t21 * C1 + t11 * C2)
        mask = (U1 >= 1) & (U1 <= D) & (U2 >= 1) & (U2 <= D)
        pre_count += int(mask.sum())
        for (mod, forms, target) in vec_conds:
            mask &= (C1 * forms[0] + C2 * forms[1]) % mod == target
        yield C1[mask], C2[mask], U1[mask], U2[mask], D
    assert pre_count == D, "cell enumeration must see one point per coset"


def _ray_unit_cell_count(q1: Rat, q2: Rat) -> int:
    """Number of lattice steps inside one generator span on a ray whose
    basis has ambient coordinates (q1, q2)."""
    t0_num, t0_den = None, None
    for q in (q1, q2):
        if q == 0:
            continue
        n, d = abs(q.numerator), q.denominator
        if t0_num is None:
            t0_num, t0_den = d, n
        else:
            t0_num = math.lcm(t0_num, d)
            t0_den = math.gcd(t0_den, n)
    K = Rat(t0_den, t0_num)  # reciprocal of the minimal positive step
    assert K.denominator == 1 and K >= 1
    return int(K)


def build_lattice_set(
    ctx: ZetaContext,
    b: Ideal,
    cone: Cone,
    cond: BallCondition,
    L_coprime_eta: bool = True,
) -> LatticeConeSet:
    """Points of the cone lying in b^{-1}, congruent to 1 mod* f, satisfying
    the ball condition, as shift points over the scaled generator lattice.

    The cell scale L is the least positive integer in f p^level b^{-1}
    (coprime to eta for the twisted route); all defining conditions are
    invariant under translations by the scaled generators.
    """
    field = ctx.field
    if cond.kind == "eta_divisible":
        inner = build_lattice_set(
            ctx, b * ctx.eta.ideal.inverse(), cone, BallCondition.all(), L_coprime_eta=False
        )
        prov = dict(inner.provenance)
        prov["condition"] = "eta_divisible"
        return LatticeConeSet(inner.pieces, prov)
    norm_cond = cond.normalized(ctx.p_pf.ell if ctx.p_pf else None)
    level = norm_cond.level
    if level > 0 and ctx.p_pf is None:
        raise ValueError("ball conditions need the prime above p in the context")
    ambient = b.inverse()
    Lid = ctx.f * ambient
    if level > 0:
        Lid = Lid * ctx.p_pf.ideal ** level
    L = _min_positive_integer(Lid)
    if L_coprime_eta and L % ctx.eta.ell == 0:
        raise RuntimeError("no cell scale coprime to the smoothing prime")
    w = tuple(g * L for g in cone.gens)
    g1, g2 = ambient.basis()
    vec_conds, post = _f_congruence_conds(ctx, (g1, g2))
    if level > 0:
        mod = ctx.p_pf.ell ** level
        root = ctx.p_pf.lifted_root(level)
        forms = [_residue_form(g, root, mod) for g in (g1, g2)]
        vec_conds = vec_conds + [(mod, forms, norm_cond.a % mod)]

    if cone.r == 2:
        x1, y1 = _coords_in_basis(g1, g2, w[0])
        x2, y2 = _coords_in_basis(g1, g2, w[1])
        assert all(v.denominator == 1 for v in (x1, y1, x2, y2)), "cell not inside the lattice"
        T = ((int(x1), int(x2)), (int(y1), int(y2)))
        coords, shifts = [], []
        det = abs(T[0][0] * T[1][1] - T[0][1] * T[1][0])
        for C1, C2, U1, U2, D in _enumerate_cell_r2(T, vec_conds):
            for c1, c2, u1, u2 in zip(C1.tolist(), C2.tolist(), U1.tolist(), U2.tolist()):
                if post:
                    z = g1 * c1 + g2 * c2
                    if any(not flt(z) for flt in post):
                        continue
                coords.append((c1, c2))
                shifts.append((Rat(u1, D), Rat(u2, D)))
        piece = LatticePiece(w, (g1, g2), tuple(coords), tuple(shifts), det)
    else:
        q1, q2 = _coords_in_basis(g1, g2, w[0])
        K = _ray_unit_cell_count(q1, q2)
        base = w[0] * Rat(1, K)
        rbase = []
        for (mod, forms, target) in vec_conds:
            cb1, cb2 = _coords_in_basis(g1, g2, base)
            assert cb1.denominator == cb2.denominator == 1
            rbase.append(((int(cb1) * forms[0] + int(cb2) * forms[1]) % mod, mod, target))
        coords, shifts = [], []
        for k in range(1, K + 1):
            if any((k * rb) % mod != target for (rb, mod, target) in rbase):
                continue
            if post:
                z = base * k
                if any(not flt(z) for flt in post):
                    continue
            coords.append((k,))
            shifts.append((Rat(k, K),))
        piece = LatticePiece(w, (base,), tuple(coords), tuple(shifts), K)
    prov = {
        "b": b.to_json(),
        "f": ctx.f.to_json(),
        "cone": [g.to_json() for g in cone.gens],
        "condition": cond.to_json(),
        "L": L,
    }
    return LatticeConeSet((piece,), prov)


def barnes_zeta0(rset: LatticeConeSet, k: int = 0):
    """Untwisted value at -k of the set's zeta sum (Bernoulli route)."""
    total = None
    for piece in rset.pieces:
        for shift in piece.shifts:
            z = piece.cell[0] * shift[0]
            for g, x in zip(piece.cell[1:], shift[1:]):
                z = z + g * x
            val = barnes_zeta_neg_k(piece.cell, z, k)
            total = val if total is None else total + val
    return Rat(0) if total is None else total


# ---------------------------------------------------------------------------
# smoothed masses


def _goodness_check(ctx: ZetaContext, gens):
    for g in gens:
        if ctx.eta.residue(g) == 0:
            raise ValueError("smoothing prime divides a cone generator (not good)")


def _twist_table(ctx: ZetaContext, w, with_norm: bool) -> list[Cyclotomic]:
    """T[n] = sum over nontrivial lambda of zeta^(lambda n) times the
    twisted cone zeta value at 0 with twists xi^lambda."""
    q = ctx.eta.ell
    xi_exps = [ctx.eta.residue(g) for g in w]
    if any(e == 0 for e in xi_exps):
        raise ValueError("smoothing prime divides a scaled generator")
    Wlam = {}
    for lam in range(1, q):
        Wlam[lam] = twisted_zeta_at_neg_k(
            q, 0, w, (Rat(1),) * len(w), [e * lam % q for e in xi_exps], with_norm
        )
    table = []
    for n in range(q):
        acc = Cyclotomic.zero(q)
        for lam in range(1, q):
            acc = acc + Wlam[lam].mul_zeta_pow(lam * n % q)
        table.append(acc)
    return table


def smoothed_mass(ctx: ZetaContext, b: Ideal, target, cond: BallCondition,
                  with_norm: bool = True) -> Rat:
    """Eta-smoothed zeta mass of F_f^x cap b^{-1} cap target cap {condition}.

    Computed as minus the sum over shifts and nontrivial twist powers of
    twisted cone zeta values at 0.  The result is asserted rational with
    denominator a power of N(eta), hence integral since N(eta) >= 4.
    """
    cones = target.cones if isinstance(target, ShintaniSet) else (
        (target,) if isinstance(target, Cone) else tuple(target))
    q = ctx.eta.ell
    total = Rat(0)
    for cone in cones:
        _goodness_check(ctx, cone.gens)
        rset = build_lattice_set(ctx, b, cone, cond)
        piece = rset.pieces[0]
        table = _twist_table(ctx, piece.cell, with_norm)
        eforms = [ctx.eta.residue(g) for g in piece.basis]
        counts = [0] * q
        for c in piece.coords:
            counts[sum(ci * ei for ci, ei in zip(c, eforms)) % q] += 1
        acc = Cyclotomic.zero(q)
        for n, cnt in enumerate(counts):
            if cnt:
                acc = acc + table[n].scale(Rat(cnt))
        total += -acc.rational_value()
    den = total.denominator
    while den % q == 0:
        den //= q
    assert den == 1, "smoothed mass must lie in Z[1/N(eta)]"
    if q >= 4:
        assert total.denominator == 1, "smoothed mass must be integral for N(eta) >= 4"
    return total


def smoothed_mass_units_part(ctx: ZetaContext, b: Ideal, target, e: int) -> Rat:
    """Mass over the complement of the pi-divisible part (0 <= ord < e)."""
    return smoothed_mass(ctx, b, target, BallCondition.all()) - smoothed_mass(
        ctx, b, target, BallCondition.ord_at_least(e)
    )


def smoothed_mass_bernoulli(ctx: ZetaContext, b: Ideal, target, cond: BallCondition) -> Rat:
    """Independent route: the smoothed mass as a difference of untwisted
    Bernoulli values at 0 on the set and on its eta-divisible subset."""
    cones = target.cones if isinstance(target, ShintaniSet) else (
        (target,) if isinstance(target, Cone) else tuple(target))
    total = None
    for cone in cones:
        r_b = build_lattice_set(ctx, b, cone, cond, L_coprime_eta=False)
        r_e = build_lattice_set(ctx, b * ctx.eta.ideal.inverse(), cone, cond,
                                L_coprime_eta=False)
        val = barnes_zeta0(r_b) - ctx.eta.ell * barnes_zeta0(r_e)
        total = val if total is None else total + val
    if total is None:
        return Rat(0)
    if isinstance(total, FieldElem):
        assert total.is_rational(), "smoothed mass must be rational"
        return total.a
    return total


def smoothed_moment_exact(ctx: ZetaContext, b: Ideal, target, k: int, e: int):
    """Exact smoothed value at -k over the ord < e part, Bernoulli route.

    This is the field element whose image under the p-adic embedding the
    level-m Riemann moment approximates.
    """
    cones = target.cones if isinstance(target, ShintaniSet) else tuple(target)
    total = Rat(0)
    for cone in cones:
        for ideal, sign in ((b, 1), (b * ctx.eta.ideal.inverse(), -ctx.eta.ell)):
            r_all = build_lattice_set(ctx, ideal, cone, BallCondition.all(),
                                      L_coprime_eta=False)
            r_div = build_lattice_set(ctx, ideal, cone, BallCondition.ord_at_least(e),
                                      L_coprime_eta=False)
            total = total + sign * (barnes_zeta0(r_all, k) - barnes_zeta0(r_div, k))
    return total


def smoothed_class_zeta0(ctx: ZetaContext, b: Ideal, D_f: ShintaniSet) -> int:
    """Eta-smoothed partial zeta value at 0 of the class of b (full mass of
    the fundamental domain)."""
    v = smoothed_mass(ctx, b, D_f, BallCondition.all())
    assert v.denominator == 1
    return int(v)


# ---------------------------------------------------------------------------
# per-ball tabulation (shared by the measure construction)


def smoothed_masses_by_ball(ctx: ZetaContext, b: Ideal, D_f: ShintaniSet,
                            m: int, e: int) -> dict:
    """Masses of all level-m multiplicative cosets in one enumeration pass.

    Cosets of ord j < e are keyed by their minimal non-negative additive
    representative modulo p^(m+j); the pi-divisible remainder is the single
    key "piO".  Entries are asserted integral.
    """
    if ctx.p_pf is None:
        raise ValueError("measure tabulation needs the prime above p")
    p = ctx.p_pf.ell
    q = ctx.eta.ell
    lev = m + e - 1
    pK = p ** lev
    root = ctx.p_pf.lifted_root(lev)
    ambient = b.inverse()
    L = _min_positive_integer(ctx.f * ambient * ctx.p_pf.ideal ** lev)
    if L % q == 0:
        raise RuntimeError("no cell scale coprime to the smoothing prime")
    g1, g2 = ambient.basis()
    vec_conds, post = _f_congruence_conds(ctx, (g1, g2))
    if post:
        raise NotImplementedError("ramified conductor primes are not supported here")
    rp = [_residue_form(g, root, pK) for g in (g1, g2)]
    re_ = [ctx.eta.residue(g) for g in (g1, g2)]
    p_pows = [p ** j for j in range(e + 1)]

    entries: dict = {}

    def _bucket(resp, neta, counts):
        piO = resp % p_pows[e] == 0
        if piO.any():
            vec = counts.setdefault("piO", np.zeros(q, dtype=np.int64))
            np.add.at(vec, neta[piO], 1)
        rest = ~piO
        for j in range(e):
            mj = rest & (resp % p_pows[j + 1] != 0)
            if j:
                mj &= resp % p_pows[j] == 0
            if not mj.any():
                continue
            lab = resp[mj] % (p ** (m + j))
            key = lab * q + neta[mj]
            uniq, cnts = np.unique(key, return_counts=True)
            for kk, cc in zip(uniq.tolist(), cnts.tolist()):
                vec = counts.setdefault(int(kk // q), np.zeros(q, dtype=np.int64))
                vec[kk % q] += cc

    for cone in D_f.cones:
        _goodness_check(ctx, cone.gens)
        w = tuple(g * L for g in cone.gens)
        counts: dict = {}
        if cone.r == 2:
            x1, y1 = _coords_in_basis(g1, g2, w[0])
            x2, y2 = _coords_in_basis(g1, g2, w[1])
            T = ((int(x1), int(x2)), (int(y1), int(y2)))
            for C1, C2, _, _, _ in _enumerate_cell_r2(T, vec_conds):
                if len(C1) == 0:
                    continue
                resp = (C1 * rp[0] + C2 * rp[1]) % pK
                neta = (C1 * re_[0] + C2 * re_[1]) % q
                _bucket(resp, neta, counts)
        else:
            q1, q2 = _coords_in_basis(g1, g2, w[0])
            K = _ray_unit_cell_count(q1, q2)
            base = w[0] * Rat(1, K)
            cb1, cb2 = _coords_in_basis(g1, g2, base)
            rb = (int(cb1) * rp[0] + int(cb2) * rp[1]) % pK
            eb = (int(cb1) * re_[0] + int(cb2) * re_[1]) % q
            rconds = [(((int(cb1) * forms[0] + int(cb2) * forms[1]) % mod), mod, target)
                      for (mod, forms, target) in vec_conds]
            ks = np.arange(1, K + 1, dtype=np.int64)
            mask = np.ones(K, dtype=bool)
            for (rc, mod, target) in rconds:
                mask &= (ks * rc) % mod == target
            ks = ks[mask]
            _bucket((ks * rb) % pK, (ks * eb) % q, counts)
        table = _twist_table(ctx, w, True)
        for label, cnt in counts.items():
            acc = Cyclotomic.zero(q)
            for n in range(q):
                if cnt[n]:
                    acc = acc + table[n].scale(Rat(int(cnt[n])))
            val = -acc.rational_value()
            entries[label] = entries.get(label, Rat(0)) + val

    out = {}
    for label, val in entries.items():
        assert val.denominator == 1, "per-ball mass must be integral"
        if val != 0:
            out[label] = int(val)
    return out


# ---------------------------------------------------------------------------
# partial zeta values by class (norm-variant Bernoulli route)


def class_partial_zeta0(field: QuadField, group: RayClassGroup, label: int,
                        narrow_one: RayClassGroup | None = None) -> Rat:
    """zeta_f(0, class) through a fundamental domain modulo the totally
    positive units and the norm-variant Bernoulli closed form."""
    units = group.units
    D = shintani_domain(field, units, narrow_level=False)
    f = group.modulus
    if f.norm() == 1:
        a_c = rep_coprime_to(group, label, 1)
    else:
        if narrow_one is None:
            raise ValueError("pass the narrow class group of modulus (1)")
        proj = narrow_one.class_of(rep_coprime_to(group, label, 1))
        a_c = _small_rep_in_wide_class(field, narrow_one, proj, f)
    ambient = (a_c * f).inverse()
    g1, g2 = ambient.basis()
    total = Rat(0)

    def _keep(z) -> bool:
        J = field.ideal(z) * a_c * f
        if f.norm() != 1 and not J.is_coprime(f):
            return False
        return group.class_of(J) == label

    for cone in D.cones:
        if cone.r == 2:
            x1, y1 = _coords_in_basis(g1, g2, cone.gens[0])
            x2, y2 = _coords_in_basis(g1, g2, cone.gens[1])
            assert all(v.denominator == 1 for v in (x1, y1, x2, y2))
            T = ((int(x1), int(x2)), (int(y1), int(y2)))
            for C1, C2, U1, U2, Dd in _enumerate_cell_r2(T, []):
                for c1, c2, u1, u2 in zip(C1.tolist(), C2.tolist(),
                                          U1.tolist(), U2.tolist()):
                    z = g1 * c1 + g2 * c2
                    if _keep(z):
                        total += norm_cone_zeta0(cone.gens, (Rat(u1, Dd), Rat(u2, Dd)))
        else:
            q1, q2 = _coords_in_basis(g1, g2, cone.gens[0])
            K = _ray_unit_cell_count(q1, q2)
            base = cone.gens[0] * Rat(1, K)
            for k in range(1, K + 1):
                if _keep(base * k):
                    total += norm_cone_zeta0(cone.gens, (Rat(k, K),))
    return total


def _small_rep_in_wide_class(field: QuadField, narrow_one: RayClassGroup,
                             proj_label: int, f: Ideal) -> Ideal:
    """Small integral a, coprime to f, with [a*f] the given narrow class."""
    from sympy import primerange

    from .quadfield import primes_above

    if narrow_one.class_of(f) == proj_label:
        return field.unit_ideal()
    nf = int(f.norm())
    for ell in primerange(2, 500):
        if nf % ell == 0:
            continue
        for pf in primes_above(field, ell):
            if narrow_one.class_of(pf.ideal * f) == proj_label:
                return pf.ideal
    raise RuntimeError("no small representative found")
