"""Capped-precision p-adic arithmetic and the measure-theoretic integrals.

PadicNum tracks relative precision through every operation.  The embedding
of the field into Q_p is fixed by a Hensel-lifted residue of omega.  A
ResidueMeasure tabulates the smoothed masses over the level-m cosets; the
moment, additive-log and multiplicative integrals are finite sums and
products over its entries with a certified-precision ledger.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .cones import ShintaniSet
from .quadfield import FieldElem, Ideal, PrimeFactor, QuadField, primes_above
from .zeta import ZetaContext, smoothed_masses_by_ball

Rat = Fraction

_BIG = 10 ** 9


class PadicNum:
    """p^val * unit with the unit known modulo p^prec (relative precision).

    Zero is represented with unit == 0; then val is an absolute precision
    bound: the value is O(p^val).
    """

    __slots__ = ("p", "val", "unit", "prec")

    def __init__(self, p: int, val: int, unit: int, prec: int):
        # semantics of the arguments: value = p^val * unit + O(p^(val+prec))
        self.p = p
        u = unit % (p ** prec) if prec > 0 else 0
        if u == 0:
            self.val = val + max(prec, 0)
            self.unit = 0
            self.prec = 0
            return
        v = 0
        while u % p == 0:
            u //= p
            v += 1
        self.val = val + v
        self.prec = prec - v
        self.unit = u % p ** self.prec

    @classmethod
    def zero(cls, p: int, abs_prec: int = _BIG) -> "PadicNum":
        return cls(p, abs_prec, 0, 0)

    @classmethod
    def from_rational(cls, p: int, x, prec: int) -> "PadicNum":
        x = Rat(x)
        if x == 0:
            return cls.zero(p)
        num, den = x.numerator, x.denominator
        v = 0
        while num % p == 0:
            num //= p
            v += 1
        while den % p == 0:
            den //= p
            v -= 1
        unit = num * pow(den, -1, p ** prec) % p ** prec
        return cls(p, v, unit, prec)

    def is_zero(self) -> bool:
        return self.unit == 0

    def valuation(self) -> int:
        """Valuation, or for (apparent) zero the absolute precision bound."""
        return self.val

    def abs_prec(self) -> int:
        return self.val if self.is_zero() else self.val + self.prec

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            # |xy| <= p^{-(a1+a2)} with a = val (abs bound) or valuation
            return PadicNum.zero(self.p, min(self.val + o.val, _BIG))
        prec = min(self.prec, o.prec)
        return PadicNum(self.p, self.val + o.val,
                        self.unit * o.unit % self.p ** prec, prec)

    __rmul__ = __mul__

    def _coerce(self, other):
        if isinstance(other, PadicNum):
            if other.p != self.p:
                raise ValueError("mixed primes")
            return other
        if isinstance(other, (int, Fraction)):
            prec = self.prec if not self.is_zero() else 40
            return PadicNum.from_rational(self.p, other, max(prec, 1))
        return None

    def inverse(self) -> "PadicNum":
        if self.is_zero():
            raise ZeroDivisionError("inverse of (apparent) zero")
        return PadicNum(self.p, -self.val,
                        pow(self.unit, -1, self.p ** self.prec), self.prec)

    def __truediv__(self, other):
        o = self._coerce(other)
        return self * o.inverse()

    def __pow__(self, k: int) -> "PadicNum":
        if self.is_zero():
            if k <= 0:
                raise ZeroDivisionError
            return PadicNum.zero(self.p, min(k * self.val, _BIG))
        if k < 0:
            return self.inverse() ** (-k)
        mod = self.p ** self.prec
        return PadicNum(self.p, self.val * k, pow(self.unit, k, mod), self.prec)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = self.p
        if self.is_zero() and o.is_zero():
            return PadicNum.zero(p, min(self.val, o.val))
        if self.is_zero():
            n = min(self.val, o.abs_prec())
            if n <= o.val:
                return PadicNum.zero(p, n)
            return PadicNum(p, o.val, o.unit, n - o.val)
        if o.is_zero():
            return o + self
        v = min(self.val, o.val)
        n = min(self.abs_prec(), o.abs_prec())
        if n <= v:
            return PadicNum.zero(p, n)
        mod = p ** (n - v)
        u = (self.unit * p ** (self.val - v) + o.unit * p ** (o.val - v)) % mod
        if u == 0:
            return PadicNum.zero(p, n)
        return PadicNum(p, v, u, n - v)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        return PadicNum(self.p, self.val, (-self.unit) % self.p ** self.prec, self.prec)

    def __sub__(self, other):
        o = self._coerce(other)
        return self + (-o)

    def __rsub__(self, other):
        return -(self - other)

    def residue(self, k: int) -> int:
        """The value modulo p^k as an integer in [0, p^k); needs val >= 0."""
        if self.is_zero():
            if self.val < k:
                raise ValueError("not enough precision for the residue")
            return 0
        if self.val < 0:
            raise ValueError("negative valuation")
        if self.abs_prec() < k:
            raise ValueError("not enough precision for the residue")
        return self.unit * self.p ** self.val % self.p ** k

    def eq_to_prec(self, other: "PadicNum", k: int) -> bool:
        d = self - other
        return d.is_zero() and d.val >= k or (not d.is_zero() and d.val >= k)

    def __repr__(self):
        if self.is_zero():
            return f"O({self.p}^{self.val})"
        return f"{self.unit}*{self.p}^{self.val} + O({self.p}^{self.abs_prec()})"

    def digits(self, count: int | None = None) -> list[int]:
        n = self.prec if count is None else min(count, self.prec)
        out = []
        u = self.unit
        for _ in range(max(n, 0)):
            u, r = divmod(u, self.p)
            out.append(r)
        return out

    def to_json(self):
        return {
            "p": self.p,
            "val": self.val if not self.is_zero() else None,
            "digits": self.digits(),
            "precision": self.abs_prec(),
        }


def teichmuller(x: PadicNum) -> PadicNum:
    """The (p-1)-st root of unity congruent to x mod p, by p-power iteration."""
    if x.is_zero() or x.val != 0:
        raise ValueError("Teichmuller lift needs a unit")
    p, prec = x.p, x.prec
    mod = p ** prec
    w = x.unit % mod
    for _ in range(prec + 2):
        w2 = pow(w, p, mod)
        if w2 == w:
            break
        w = w2
    assert pow(w, p, mod) == w
    return PadicNum(p, 0, w, prec)


def principal_unit_part(x: PadicNum) -> PadicNum:
    """<x> = p^(-ord) * teichmuller(x)^(-1) * x, congruent to 1 mod p."""
    if x.is_zero():
        raise ValueError("zero has no principal unit part")
    u = PadicNum(x.p, 0, x.unit, x.prec)
    return u * teichmuller(u).inverse()


def iwasawa_log(x: PadicNum) -> PadicNum:
    """The branch of log_p with log_p(p) = 0, vanishing on roots of unity.

    Computed by the log series on the principal-unit part with an exact
    rational partial sum; the truncation tail and the lift error are both
    below the working precision.
    """
    if x.is_zero():
        raise ValueError("log of zero")
    p = x.p
    if p == 2:
        raise NotImplementedError("p = 2 is not supported")
    M = x.prec
    u = principal_unit_part(x)
    K = M + 4
    guard = 1
    while p ** guard <= K:
        guard += 1
    Mp = M + guard + 1
    u1 = (u.unit % p ** min(u.prec, Mp)) - 1
    if u1 % p ** min(u.prec, Mp) == 0:
        return PadicNum.zero(p, M)
    S = Rat(0)
    term = 1
    for k in range(1, K + 1):
        term *= u1
        S += Rat((-1) ** (k + 1) * term, k)
    out = PadicNum.from_rational(p, S, M + guard)
    # report at most absolute precision M
    if out.is_zero() or out.val >= M:
        return PadicNum.zero(p, M)
    return PadicNum(p, out.val, out.unit, min(out.prec, M - out.val))


class PadicEmbedding:
    """The field embedding into Q_p fixed by a residue of omega mod p."""

    def __init__(self, field: QuadField, p: int, root: int | None = None,
                 prec: int = 24):
        self.field = field
        self.p = p
        t, n = field.omega_t, field.omega_n
        roots = sorted(x for x in range(p) if (x * x - t * x - n) % p == 0)
        if len(roots) != 2:
            raise ValueError("p must split: the completion must be Q_p")
        if root is None:
            root = roots[0]
        if root not in roots:
            raise ValueError(f"{root} is not a residue of omega mod {p}")
        self.root = root
        self.prec = prec
        self.prime = next(pf for pf in primes_above(field, p) if pf.root == root)
        self._lift_cache: dict[int, int] = {}

    def omega_mod(self, k: int) -> int:
        got = self._lift_cache.get(k)
        if got is None:
            got = self.prime.lifted_root(k)
            self._lift_cache[k] = got
        return got

    def embed(self, x: FieldElem, prec: int | None = None) -> PadicNum:
        """Ring homomorphism to the stated relative precision."""
        if x.is_zero():
            return PadicNum.zero(self.p)
        prec = prec or self.prec
        den = math.lcm(x.a.denominator, x.b.denominator)
        w = 0
        d = den
        while d % self.p == 0:
            d //= self.p
            w += 1
        # the numerator may carry p-powers: lift far enough to resolve them
        k = prec + w + 4
        while True:
            r = self.omega_mod(k)
            num = (int(x.a * den) + int(x.b * den) * r) % self.p ** k
            if num == 0:
                k += prec + 4
                continue
            v = 0
            while num % self.p == 0:
                num //= self.p
                v += 1
            if k - v >= prec:
                break
            k = prec + v + w + 4
        unit = num * pow(d, -1, self.p ** prec) % self.p ** prec
        return PadicNum(self.p, v - w, unit, prec)


@dataclass(frozen=True)
class AlgLogCombo:
    """Formal rational combination sum q_i log(alpha_i) (+ rational * pi)."""

    terms: tuple          # ((Fraction, FieldElem), ...)
    pi_part: Rat = Rat(0)

    def __add__(self, other: "AlgLogCombo") -> "AlgLogCombo":
        return AlgLogCombo(self.terms + other.terms, self.pi_part + other.pi_part)

    def scaled(self, c) -> "AlgLogCombo":
        return AlgLogCombo(tuple((q * c, al) for q, al in self.terms), self.pi_part * c)

    def to_json(self):
        return {
            "terms": [{"coeff": str(q), "alpha": al.to_json()} for q, al in self.terms],
            "pi_part": str(self.pi_part),
        }


def bracket_p(combo: AlgLogCombo, emb: PadicEmbedding, prec: int | None = None) -> PadicNum:
    """a log b -> a log_p b termwise; the archimedean pi component is dropped."""
    prec = prec or emb.prec
    total = PadicNum.zero(emb.p, prec)
    for q, alpha in combo.terms:
        if q == 0:
            continue
        lg = iwasawa_log(emb.embed(alpha, prec))
        total = total + PadicNum.from_rational(emb.p, q, prec) * lg
    return total


# ---------------------------------------------------------------------------
# measures


@dataclass
class ResidueMeasure:
    """Level-m tabulation of the smoothed measure on the level cosets.

    Unit-height cosets (ord j < e) are keyed by their minimal non-negative
    additive representative mod p^(m+j); the pi-divisible remainder keeps
    the single key "piO".  Entry sums over everything give the smoothed
    class zeta value.
    """

    p: int
    m: int
    e: int
    entries: dict

    @property
    def total_variation(self) -> int:
        return sum(abs(v) for v in self.entries.values())

    @property
    def delta(self) -> int:
        """Digits the certified precision concedes to mass accumulation."""
        tv = self.total_variation
        d = 0
        while self.p ** d < tv:
            d += 1
        return d

    def certified(self) -> int:
        return self.m - self.delta

    def total_mass(self) -> int:
        return sum(self.entries.values())

    def unit_labels(self):
        return sorted(k for k in self.entries if k != "piO")

    def ord_of(self, label: int) -> int:
        j = 0
        while label % self.p ** (j + 1) == 0 and j < self.e:
            j += 1
        return j

    def to_json(self):
        ent = {str(k): v for k, v in sorted(self.entries.items(), key=lambda kv: str(kv[0]))}
        return {"p": self.p, "m": self.m, "e": self.e, "entries": ent,
                "total_variation": self.total_variation,
                "certified_precision": self.certified()}


def build_measure(ctx: ZetaContext, b: Ideal, D_f: ShintaniSet, e: int, m: int) -> ResidueMeasure:
    """Tabulate the smoothed measure at level m over the domain D_f."""
    entries = smoothed_masses_by_ball(ctx, b, D_f, m, e)
    return ResidueMeasure(ctx.p_pf.ell, m, e, entries)


def working_precision(mu: ResidueMeasure, guard: int = 4) -> int:
    return mu.m + mu.delta + guard


def integrate_moment(mu: ResidueMeasure, k: int, prec: int | None = None) -> PadicNum:
    """sum nu(ball) * a^k over the unit-height cosets (the ord < e part)."""
    if not 0 <= k <= 3:
        raise ValueError("moments are supported for k = 0..3")
    prec = prec or working_precision(mu)
    total = 0
    for a in mu.unit_labels():
        total += mu.entries[a] * a ** k
    return PadicNum.from_rational(mu.p, total, prec)


def integrate_log(mu: ResidueMeasure, prec: int | None = None) -> PadicNum:
    """sum nu(ball) * log_p(a) over the unit-height cosets."""
    prec = prec or working_precision(mu)
    total = PadicNum.zero(mu.p, prec)
    for a in mu.unit_labels():
        nu = mu.entries[a]
        if nu == 0:
            continue
        lg = iwasawa_log(PadicNum.from_rational(mu.p, a, prec))
        total = total + PadicNum.from_rational(mu.p, nu, prec) * lg
    return total


def integrate_mult(mu: ResidueMeasure, prec: int | None = None) -> PadicNum:
    """prod a^{nu(ball)} over the unit-height cosets."""
    prec = prec or working_precision(mu)
    total = PadicNum.from_rational(mu.p, 1, prec)
    for a in mu.unit_labels():
        nu = mu.entries[a]
        if nu == 0:
            continue
        total = total * PadicNum.from_rational(mu.p, a, prec) ** nu
    return total
