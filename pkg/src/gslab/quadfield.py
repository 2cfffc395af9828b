"""Exact arithmetic for real quadratic fields.

Elements and fractional ideals (2x2 Hermite normal form over the integral
basis), fundamental units via continued fractions, narrow ray class groups
computed from an exact principality test, and the selection rules for the
smoothing prime eta and the generator pi used by the unit pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from sympy import factorint, primerange

Rat = Fraction


def _sign(q) -> int:
    return (q > 0) - (q < 0)


def _sign_u_v(D: int, u: Rat, v: Rat) -> int:
    """Exact sign of u + v*sqrt(D) for rational u, v."""
    if v == 0:
        return _sign(u)
    if u == 0:
        return _sign(v)
    su, sv = _sign(u), _sign(v)
    if su == sv:
        return su
    # opposite signs: the larger of u^2 and D v^2 decides
    return _sign(u * u - D * v * v) * su


def _sqrt_bounds(D: int, digits: int = 25) -> tuple[Rat, Rat]:
    scale = 10 ** digits
    s = math.isqrt(D * scale * scale)
    return Rat(s, scale), Rat(s + 1, scale)


def make_field(D: int) -> "QuadField":
    return QuadField(D)


class QuadField:
    """The real quadratic field Q(sqrt(D)), D squarefree and > 1.

    O_F = Z[omega] with omega = sqrt(D) for D = 2,3 (mod 4) and
    omega = (1+sqrt(D))/2 for D = 1 (mod 4); omega^2 = t*omega + n.
    """

    def __init__(self, D: int):
        if not isinstance(D, int) or D < 2:
            raise ValueError("D must be an integer >= 2")
        if any(e > 1 for e in factorint(D).values()):
            raise ValueError(f"D = {D} is not squarefree")
        self.D = D
        if D % 4 == 1:
            self.disc = D
            self.omega_t, self.omega_n = 1, (D - 1) // 4
            self.omega_desc = f"(1+sqrt({D}))/2"
        else:
            self.disc = 4 * D
            self.omega_t, self.omega_n = 0, D
            self.omega_desc = f"sqrt({D})"
        self.sqrtD_lo, self.sqrtD_hi = _sqrt_bounds(D)

    def __repr__(self):
        return f"QuadField({self.D})"

    def __eq__(self, other):
        return isinstance(other, QuadField) and other.D == self.D

    def __hash__(self):
        return hash(("QuadField", self.D))

    def element(self, a, b=0) -> "FieldElem":
        return FieldElem(self, a, b)

    def zero(self) -> "FieldElem":
        return self.element(0)

    def one(self) -> "FieldElem":
        return self.element(1)

    def omega(self) -> "FieldElem":
        return self.element(0, 1)

    def sqrtD(self) -> "FieldElem":
        # sqrt(D) = 2*omega - 1 when D = 1 (mod 4), omega itself otherwise
        if self.omega_t == 0:
            return self.omega()
        return self.element(-1, 2)

    def unit_ideal(self) -> "Ideal":
        return Ideal(self, Rat(1), 1, 0, 1)

    def ideal(self, *gens) -> "Ideal":
        elems = [g if isinstance(g, FieldElem) else self.element(g) for g in gens]
        return Ideal.from_generators(self, elems)


class FieldElem:
    """a + b*omega with exact rational coordinates."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field: QuadField, a, b=0):
        self.field = field
        self.a = Rat(a)
        self.b = Rat(b)

    def _coerce(self, other):
        if isinstance(other, FieldElem):
            if other.field.D != self.field.D:
                raise ValueError("mixed fields")
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElem(self.field, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElem(self.field, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return FieldElem(self.field, -self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElem(self.field, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        t, n = self.field.omega_t, self.field.omega_n
        a1, b1, a2, b2 = self.a, self.b, o.a, o.b
        return FieldElem(
            self.field,
            a1 * a2 + b1 * b2 * n,
            a1 * b2 + a2 * b1 + b1 * b2 * t,
        )

    __rmul__ = __mul__

    def inverse(self) -> "FieldElem":
        nm = self.norm()
        if nm == 0:
            raise ZeroDivisionError("zero element")
        c = self.conj()
        return FieldElem(self.field, c.a / nm, c.b / nm)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = FieldElem(self.field, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> "FieldElem":
        t = self.field.omega_t
        return FieldElem(self.field, self.a + self.b * t, -self.b)

    def norm(self) -> Rat:
        t, n = self.field.omega_t, self.field.omega_n
        return self.a * self.a + self.a * self.b * t - self.b * self.b * n

    def trace(self) -> Rat:
        return 2 * self.a + self.b * self.field.omega_t

    def sqrtD_pair(self) -> tuple[Rat, Rat]:
        """(u, v) with self = u + v*sqrt(D)."""
        if self.field.omega_t == 0:
            return self.a, self.b
        return self.a + self.b / 2, self.b / 2

    def embedding_signs(self) -> tuple[int, int]:
        u, v = self.sqrtD_pair()
        D = self.field.D
        return _sign_u_v(D, u, v), _sign_u_v(D, u, -v)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.field.D, self.a, self.b))

    def __repr__(self):
        if self.b == 0:
            return f"({self.a})"
        return f"({self.a} + {self.b}*w)"

    def to_json(self):
        return {"a": str(self.a), "b": str(self.b)}


def is_totally_positive(x: FieldElem) -> bool:
    if x.is_zero():
        raise ValueError("sign of zero is undefined")
    s1, s2 = x.embedding_signs()
    return s1 > 0 and s2 > 0


def slope_det(z: FieldElem, w: FieldElem) -> Rat:
    """Determinant whose sign orders totally positive rays by sigma2/sigma1."""
    uz, vz = z.sqrtD_pair()
    uw, vw = w.sqrtD_pair()
    return uz * vw - vz * uw


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def _hnf_rows(rows: list[tuple[int, int]]) -> tuple[int, int, int]:
    """HNF basis ((a,0),(b,d)) of the lattice spanned by integer rows (x, y)."""
    xs = []
    carrier = None
    for (x, y) in rows:
        if x == 0 and y == 0:
            continue
        if y == 0:
            xs.append(x)
            continue
        if carrier is None:
            carrier = (x, y)
            continue
        xc, yc = carrier
        g, s, t = _ext_gcd(yc, y)
        carrier = (s * xc + t * x, g)
        xs.append((y // g) * xc - (yc // g) * x)
    if carrier is None:
        raise ValueError("lattice is not of full rank")
    xc, d = carrier
    if d < 0:
        xc, d = -xc, -d
    a = 0
    for x in xs:
        a = math.gcd(a, x)
    if a == 0:
        raise ValueError("lattice is not of full rank")
    b = xc % a
    return a, b, d


class Ideal:
    """Fractional ideal scale * (Z*a + Z*(b + d*omega)) in reduced HNF."""

    __slots__ = ("field", "scale", "a", "b", "d")

    def __init__(self, field: QuadField, scale: Rat, a: int, b: int, d: int):
        g = math.gcd(math.gcd(a, b), d)
        if g == 0:
            raise ValueError("zero ideal")
        self.field = field
        self.scale = Rat(scale) * g
        self.a = a // g
        self.b = (b // g) % (a // g)
        self.d = d // g
        if self.scale <= 0 or self.a <= 0 or self.d <= 0:
            raise ValueError("invalid HNF data")

    @classmethod
    def from_generators(cls, field: QuadField, gens: list[FieldElem]) -> "Ideal":
        t, n = field.omega_t, field.omega_n
        coords = []
        for g in gens:
            if g.is_zero():
                continue
            # g and g*omega span the O_F-module generated by g
            coords.append((g.a, g.b))
            gw = g * field.omega()
            coords.append((gw.a, gw.b))
        if not coords:
            raise ValueError("zero ideal")
        den = 1
        for (x, y) in coords:
            den = math.lcm(den, x.denominator, y.denominator)
        rows = [(int(x * den), int(y * den)) for (x, y) in coords]
        a, b, d = _hnf_rows(rows)
        return cls(field, Rat(1, den), a, b, d)

    def key(self):
        return (self.scale, self.a, self.b, self.d)

    def __eq__(self, other):
        return isinstance(other, Ideal) and self.field.D == other.field.D and self.key() == other.key()

    def __hash__(self):
        return hash((self.field.D,) + self.key())

    def __repr__(self):
        return f"Ideal({self.scale} * <{self.a}, {self.b}+{self.d}w>)"

    def basis(self) -> tuple[FieldElem, FieldElem]:
        s = self.scale
        return (
            FieldElem(self.field, s * self.a),
            FieldElem(self.field, s * self.b, s * self.d),
        )

    def norm(self) -> Rat:
        return self.scale * self.scale * self.a * self.d

    def contains(self, x: FieldElem) -> bool:
        ca = x.a / self.scale
        cb = x.b / self.scale
        if cb.denominator != 1 or ca.denominator != 1:
            return False
        if int(cb) % self.d:
            return False
        k = int(cb) // self.d
        return (int(ca) - k * self.b) % self.a == 0

    def __mul__(self, other):
        if isinstance(other, FieldElem):
            g1, g2 = self.basis()
            return Ideal.from_generators(self.field, [g1 * other, g2 * other])
        if not isinstance(other, Ideal):
            return NotImplemented
        g1, g2 = self.basis()
        h1, h2 = other.basis()
        return Ideal.from_generators(self.field, [g1 * h1, g1 * h2, g2 * h1, g2 * h2])

    def __add__(self, other: "Ideal"):
        g1, g2 = self.basis()
        h1, h2 = other.basis()
        return Ideal.from_generators(self.field, [g1, g2, h1, h2])

    def conj(self) -> "Ideal":
        g1, g2 = self.basis()
        return Ideal.from_generators(self.field, [g1.conj(), g2.conj()])

    def inverse(self) -> "Ideal":
        # in a quadratic field, A * conj(A) = (N A)
        c = self.conj()
        return Ideal(c.field, c.scale / self.norm(), c.a, c.b, c.d)

    def __pow__(self, k: int):
        if k == 0:
            return self.field.unit_ideal()
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.unit_ideal()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_integral(self) -> bool:
        sa = self.scale * self.a
        sb = self.scale * self.b
        sd = self.scale * self.d
        return sa.denominator == 1 and sb.denominator == 1 and sd.denominator == 1

    def int_hnf(self) -> tuple[int, int, int]:
        if not self.is_integral():
            raise ValueError("not an integral ideal")
        return int(self.scale * self.a), int(self.scale * self.b), int(self.scale * self.d)

    def is_coprime(self, other: "Ideal") -> bool:
        s = self + other
        return s.norm() == 1 and s.contains(self.field.one())

    def reduce_element(self, x: FieldElem) -> FieldElem:
        """Canonical representative of x modulo this integral ideal."""
        A, B, Dd = self.int_hnf()
        if not x.is_integral():
            raise ValueError("element must be integral")
        xb = int(x.b) % Dd
        k = (int(x.b) - xb) // Dd
        xa = (int(x.a) - k * B) % A
        return FieldElem(self.field, xa, xb)

    def residues(self):
        """Coset representatives of O_F modulo this integral ideal."""
        A, B, Dd = self.int_hnf()
        for y in range(Dd):
            for x in range(A):
                yield FieldElem(self.field, x, y)

    def to_json(self):
        return {"scale": str(self.scale), "hnf": [[self.a, self.b], [0, self.d]]}


@dataclass(frozen=True)
class PrimeFactor:
    """A prime ideal over the rational prime ell, with its residue data."""

    ideal: Ideal
    ell: int
    degree: int          # residue degree
    ramification: int
    root: int | None     # omega = root (mod ideal) when degree == 1

    def nrm(self) -> int:
        return self.ell ** self.degree

    def lifted_root(self, k: int) -> int:
        """Root of x^2 - t x - n modulo ell^k lifting self.root (degree 1 only)."""
        if self.root is None:
            raise ValueError("no residue root: prime of degree 2")
        field = self.ideal.field
        t, n = field.omega_t, field.omega_n
        r = self.root
        mod = self.ell
        target = self.ell ** k
        while mod < target:
            mod = min(mod * mod, target)
            fp = (2 * r - t) % mod
            if math.gcd(fp, mod) != 1:
                # ramified: fall back to brute search at this precision
                r = next(
                    x for x in range(mod)
                    if (x * x - t * x - n) % mod == 0 and x % self.ell == self.root % self.ell
                )
                continue
            fr = (r * r - t * r - n) % mod
            r = (r - fr * pow(fp, -1, mod)) % mod
        return r % target

    def residue(self, x: FieldElem, k: int = 1) -> int:
        """x modulo ideal^k as an integer in [0, ell^k); degree-1 primes only.

        Requires x to have non-negative valuation at the prime and an
        ell-free rational denominator.
        """
        mod = self.ell ** k
        den = math.lcm(x.a.denominator, x.b.denominator)
        if den % self.ell == 0:
            raise ValueError("denominator not coprime to the residue prime")
        r = self.lifted_root(k)
        num = (x.a * den + x.b * den * r)
        assert num.denominator == 1
        return int(num) * pow(den, -1, mod) % mod


def primes_above(field: QuadField, ell: int) -> list[PrimeFactor]:
    t, n = field.omega_t, field.omega_n
    roots = [x for x in range(ell) if (x * x - t * x - n) % ell == 0]
    w = field.omega()
    if not roots:
        return [PrimeFactor(field.ideal(ell), ell, 2, 1, None)]
    if len(roots) == 1 or roots[0] == roots[1]:
        r = roots[0]
        P = field.ideal(field.element(ell), w - r)
        return [PrimeFactor(P, ell, 1, 2, r)]
    out = []
    for r in sorted(roots):
        P = field.ideal(field.element(ell), w - r)
        out.append(PrimeFactor(P, ell, 1, 1, r))
    return out


_POWER_CACHE: dict = {}


def _ideal_power(P: Ideal, k: int) -> Ideal:
    key = (P.field.D, P.key(), k)
    got = _POWER_CACHE.get(key)
    if got is None:
        got = P ** k
        _POWER_CACHE[key] = got
    return got


def val_at_prime(P: Ideal, x: FieldElem, infinity: int = 10 ** 9) -> int:
    """Valuation of x at the prime ideal P (exact, via membership)."""
    if x.is_zero():
        return infinity
    den = math.lcm(x.a.denominator, x.b.denominator)
    num = FieldElem(x.field, x.a * den, x.b * den)
    dele = FieldElem(x.field, den)

    def _int_val(y):
        v = 0
        while _ideal_power(P, v + 1).contains(y):
            v += 1
        return v

    return _int_val(num) - _int_val(dele)


def ideal_val(P: Ideal, A: Ideal) -> int:
    """Largest k with A contained in P^k (A integral)."""
    v = 0
    g1, g2 = A.basis()
    while True:
        Q = _ideal_power(P, v + 1)
        if Q.contains(g1) and Q.contains(g2):
            v += 1
        else:
            return v


def factor_ideal(field: QuadField, A: Ideal) -> list[tuple[PrimeFactor, int]]:
    if not A.is_integral():
        raise ValueError("factor_ideal expects an integral ideal")
    out = []
    nm = A.norm()
    assert nm.denominator == 1
    for ell in sorted(factorint(int(nm))):
        for pf in primes_above(field, ell):
            e = ideal_val(pf.ideal, A)
            if e:
                out.append((pf, e))
    return out


def congruent_to_one_mod(x: FieldElem, f_factors: list[tuple[PrimeFactor, int]]) -> bool:
    """The multiplicative congruence x = 1 (mod* f), f given by its factorization."""
    for pf, a in f_factors:
        if val_at_prime(pf.ideal, x) != 0:
            return False
        if val_at_prime(pf.ideal, x - 1) < a:
            return False
    return True


# ---------------------------------------------------------------------------
# units


def _fundamental_unit_cf(field: QuadField) -> FieldElem:
    """Fundamental unit from the continued fraction of (s + sqrt(disc))/2.

    The expansion of a quadratic irrational (P + sqrt(d))/Q is eventually
    periodic; one period's convergent matrix fixes the periodic point and
    q'*alpha + q'' is a fundamental unit of the maximal order.
    """
    d = field.disc
    s = d % 2
    P, Q = s, 2
    isq = math.isqrt(d)
    seen: dict[tuple[int, int], int] = {}
    states = []
    while (P, Q) not in seen:
        seen[(P, Q)] = len(states)
        a = (P + isq) // Q
        states.append((P, Q, a))
        P2 = a * Q - P
        Q2 = (d - P2 * P2) // Q
        assert Q2 > 0, "expansion left the reduced regime"
        P, Q = P2, Q2
    j = seen[(P, Q)]
    # product of step matrices [[a,1],[1,0]] over one period
    m11, m12, m21, m22 = 1, 0, 0, 1
    for (_, _, a) in states[j:]:
        m11, m12, m21, m22 = m11 * a + m12, m11, m21 * a + m22, m21
    Pj, Qj, _ = states[j]
    # alpha_j = (Pj + sqrt(d))/Qj with sqrt(d) = 2*omega - t
    sqrt_d = field.element(-field.omega_t, 2)
    alpha = (field.element(Pj) + sqrt_d) * Rat(1, Qj)
    eps = alpha * m21 + m22
    assert abs(eps.norm()) == 1
    return eps


def _normalize_unit(eps: FieldElem) -> FieldElem:
    """Make the unit > 1 under the first embedding."""
    u, v = eps.sqrtD_pair()
    if _sign_u_v(eps.field.D, u, v) < 0:
        eps = -eps
    u, v = eps.sqrtD_pair()
    if _sign_u_v(eps.field.D, u - 1, v) < 0:
        eps = eps.inverse()
        if _sign_u_v(eps.field.D, *eps.sqrtD_pair()) < 0:
            eps = -eps
    return eps


@dataclass(frozen=True)
class UnitData:
    eps: FieldElem        # fundamental unit, > 1
    eps_plus: FieldElem   # generator of the totally positive units
    eps_f: FieldElem      # generator of the units = 1 mod f
    k_f: int              # eps_f = eps_plus ** k_f


def unit_data(field: QuadField, f: Ideal | None = None) -> UnitData:
    eps = _normalize_unit(_fundamental_unit_cf(field))
    eps_plus = eps if eps.norm() == 1 else eps * eps
    assert is_totally_positive(eps_plus)
    if f is None or f.norm() == 1:
        return UnitData(eps, eps_plus, eps_plus, 1)
    if not f.is_integral():
        raise ValueError("modulus must be integral")
    cap = int(f.norm()) ** 2 + 2
    acc = field.one()
    for k in range(1, cap):
        acc = f.reduce_element(acc * eps_plus)
        if f.contains(acc - 1):
            return UnitData(eps, eps_plus, eps_plus ** k, k)
    raise RuntimeError("unit congruence search exhausted")


# ---------------------------------------------------------------------------
# principality and class groups


def _sqrt_upper(q: Rat) -> Rat:
    n, d = q.numerator, q.denominator
    return Rat(math.isqrt(n * d) + 1, d)


def _box_candidates(c_ideal: Ideal, units: UnitData, both_signs: bool):
    """Lattice points of the ideal inside a slope-normalized search box.

    Any generator can be moved by powers of eps_plus into the box, so a
    principal ideal always has a generator among the candidates.
    """
    field = c_ideal.field
    D = field.D
    nm = abs(c_ideal.norm())
    u, v = units.eps_plus.sqrtD_pair()
    lam_up = (u + v * field.sqrtD_hi) ** 2
    margin = Rat(9, 8)
    S1 = _sqrt_upper(lam_up * nm) * margin
    S2 = _sqrt_upper(nm) * margin
    g1, g2 = c_ideal.basis()
    g1v = g1.a * 1  # rational
    u2, v2 = g2.sqrtD_pair()
    # sigma1(g2) in [w1lo, w1hi], sigma2(g2) in [w2lo, w2hi]
    w1lo, w1hi = u2 + v2 * field.sqrtD_lo, u2 + v2 * field.sqrtD_hi
    if v2 < 0:
        w1lo, w1hi = w1hi, w1lo
    w2lo, w2hi = u2 - v2 * field.sqrtD_hi, u2 - v2 * field.sqrtD_lo
    if w2lo > w2hi:
        w2lo, w2hi = w2hi, w2lo
    # |y| <= (S1+S2) / (2 v2 sqrt(D)) ; v2 != 0 since d > 0
    denom = 2 * abs(v2) * field.sqrtD_lo
    ybound = (S1 + S2) / denom
    y_lo, y_hi = math.floor(-ybound) - 1, math.ceil(ybound) + 1
    s2_lo = -S2 if both_signs else Rat(0)
    for y in range(y_lo, y_hi + 1):
        # sigma1 in (0, S1], sigma2 in [s2_lo, S2]
        lo1 = (Rat(0) - (y * w1hi if y >= 0 else y * w1lo)) / g1v
        hi1 = (S1 - (y * w1lo if y >= 0 else y * w1hi)) / g1v
        lo2 = (s2_lo - (y * w2hi if y >= 0 else y * w2lo)) / g1v
        hi2 = (S2 - (y * w2lo if y >= 0 else y * w2hi)) / g1v
        x_lo = math.ceil(max(lo1, lo2)) - 1
        x_hi = math.floor(min(hi1, hi2)) + 1
        for x in range(x_lo, x_hi + 1):
            if x == 0 and y == 0:
                continue
            yield g1 * x + g2 * y


def principal_gen_plain(c_ideal: Ideal, units: UnitData) -> FieldElem | None:
    """Some generator of the ideal, or None if it is not principal."""
    nm = abs(c_ideal.norm())
    for cand in _box_candidates(c_ideal, units, both_signs=True):
        if abs(cand.norm()) == nm and c_ideal.contains(cand):
            return cand
    return None


def principal_gen_with_conditions(
    c_ideal: Ideal,
    f_factors: list[tuple[PrimeFactor, int]],
    units: UnitData,
) -> FieldElem | None:
    """A totally positive generator congruent to 1 mod* f, or None.

    The congruence class of a totally positive generator under eps_plus
    multiplication has period k_f, so testing k_f twists of each boxed
    candidate is exhaustive.
    """
    nm = c_ideal.norm()
    for cand in _box_candidates(c_ideal, units, both_signs=False):
        if cand.norm() != nm or not c_ideal.contains(cand):
            continue
        s1, s2 = cand.embedding_signs()
        if s1 <= 0 or s2 <= 0:
            continue
        twisted = cand
        for _ in range(units.k_f):
            if congruent_to_one_mod(twisted, f_factors):
                return twisted
            twisted = twisted * units.eps_plus
    return None


def _wide_class_count(field: QuadField, units: UnitData) -> int:
    mink = _sqrt_upper(Rat(field.disc)) / 2
    gens = []
    for ell in primerange(2, math.floor(mink) + 2):
        for pf in primes_above(field, ell):
            if Rat(pf.nrm()) <= mink + 1:
                gens.append(pf.ideal)
    reps = [field.unit_ideal()]

    def find(I):
        for k, r in enumerate(reps):
            if principal_gen_plain(I * r.inverse(), units) is not None:
                return k
        return None

    frontier = [field.unit_ideal()]
    while frontier:
        nxt = []
        for r in frontier:
            for g in gens:
                I = r * g
                if find(I) is None:
                    reps.append(I)
                    nxt.append(I)
        frontier = nxt
    return len(reps)


def _unit_image_order(field: QuadField, f: Ideal, units: UnitData) -> int:
    """Order of the image of the unit group in (O/f)^x x {signs}."""
    def key(x: FieldElem, signs):
        if f.norm() == 1:
            return signs
        return (f.reduce_element(x).a, f.reduce_element(x).b, signs)

    def img(x: FieldElem):
        return (x if f.norm() == 1 else f.reduce_element(x), x.embedding_signs())

    gens = [img(field.element(-1)), img(units.eps)]
    seen = {key(*img(field.one()))}
    elems = [img(field.one())]
    frontier = list(elems)
    while frontier:
        nxt = []
        for (x, s) in frontier:
            for (gx, gs) in gens:
                y = x * gx
                ys = (s[0] * gs[0], s[1] * gs[1])
                if f.norm() != 1:
                    y = f.reduce_element(y)
                k = key(y, ys)
                if k not in seen:
                    seen.add(k)
                    nxt.append((y, ys))
        frontier = nxt
    return len(seen)


def _euler_phi_ideal(field: QuadField, f_factors) -> int:
    phi = 1
    for pf, a in f_factors:
        q = pf.nrm()
        phi *= q ** a - q ** (a - 1)
    return phi


class RayClassGroup:
    """The narrow ray class group modulo f (both infinite places included)."""

    def __init__(self, field: QuadField, modulus: Ideal, units: UnitData):
        self.field = field
        self.modulus = modulus
        self.units = units
        self.f_factors = factor_ideal(field, modulus) if modulus.norm() != 1 else []
        h = _wide_class_count(field, units)
        phi = _euler_phi_ideal(field, self.f_factors)
        im = _unit_image_order(field, modulus, units)
        order4 = h * phi * 4
        assert order4 % im == 0
        self.order = order4 // im
        self.reps: list[Ideal] = [field.unit_ideal()]
        self._class_cache: dict = {}
        self._build()
        self.table = tuple(
            tuple(self.class_of(self.reps[i] * self.reps[j]) for j in range(self.order))
            for i in range(self.order)
        )
        self.inv = tuple(next(j for j in range(self.order) if self.table[i][j] == 0)
                         for i in range(self.order))

    def _is_trivial_class(self, I: Ideal) -> bool:
        return principal_gen_with_conditions(I, self.f_factors, self.units) is not None

    def _find(self, I: Ideal) -> int | None:
        for k, r in enumerate(self.reps):
            if self._is_trivial_class(I * r.inverse()):
                return k
        return None

    def _build(self):
        if self.order == 1:
            return
        nf = int(self.modulus.norm())
        gens: list[Ideal] = []
        for ell in primerange(2, 300):
            if nf % ell == 0:
                continue
            gens.extend(pf.ideal for pf in primes_above(self.field, ell)
                        if pf.ideal.is_coprime(self.modulus))
            changed = True
            while changed and len(self.reps) < self.order:
                changed = False
                for r in list(self.reps):
                    for g in gens:
                        I = r * g
                        if self._find(I) is None:
                            self.reps.append(I)
                            changed = True
            if len(self.reps) >= self.order:
                return
        raise RuntimeError("ray class group generation exhausted the prime search")

    def class_of(self, I: Ideal) -> int:
        key = I.key()
        got = self._class_cache.get(key)
        if got is not None:
            return got
        if not I.is_coprime(self.modulus) and self.modulus.norm() != 1:
            raise ValueError("ideal not coprime to the modulus")
        k = self._find(I)
        if k is None:
            raise RuntimeError("class not found (group construction incomplete)")
        self._class_cache[key] = k
        return k

    def mul(self, i: int, j: int) -> int:
        return self.table[i][j]

    def inverse(self, i: int) -> int:
        return self.inv[i]

    def power(self, i: int, k: int) -> int:
        k %= self.order_of(i)
        out = 0
        for _ in range(k):
            out = self.mul(out, i)
        return out

    def order_of(self, i: int) -> int:
        out, k = i, 1
        while out != 0:
            out = self.mul(out, i)
            k += 1
        return k

    def labels(self):
        return range(self.order)

    def coset_labels(self, sub_gen: int) -> list[int]:
        """Label -> coset index for the quotient by the cyclic subgroup <sub_gen>."""
        sub = {0}
        x = sub_gen
        while x != 0:
            sub.add(x)
            x = self.mul(x, sub_gen)
        coset_of = [-1] * self.order
        n_cosets = 0
        for i in range(self.order):
            if coset_of[i] >= 0:
                continue
            for s in sub:
                coset_of[self.mul(i, s)] = n_cosets
            n_cosets += 1
        return coset_of


def ray_class_group(field: QuadField, f: Ideal, units: UnitData | None = None) -> RayClassGroup:
    if units is None:
        units = unit_data(field, f)
    return RayClassGroup(field, f, units)


def rep_coprime_to(group: RayClassGroup, label: int, avoid: int) -> Ideal:
    """An integral representative of the class, coprime to `avoid` and the modulus."""
    rep = group.reps[label]
    nm = rep.norm()
    if nm.denominator == 1 and math.gcd(int(nm), avoid) == 1 and rep.is_integral():
        return rep
    nf = int(group.modulus.norm())
    for ell in primerange(2, 500):
        if avoid % ell == 0 or nf % ell == 0:
            continue
        for pf in primes_above(group.field, ell):
            if group.class_of(pf.ideal) == label:
                return pf.ideal
    raise RuntimeError("no coprime representative found")


# ---------------------------------------------------------------------------
# selection rules


def find_good_eta(
    field: QuadField,
    f: Ideal,
    p_id: Ideal,
    generators: list[FieldElem],
    skip: set[int] | None = None,
    cap: int = 500,
) -> PrimeFactor:
    """A degree-1 prime of prime norm >= 4, coprime to f*p, avoiding the generators."""
    nf = int(f.norm())
    np_ = int(p_id.norm())
    n_plus_2 = 4
    for ell in primerange(n_plus_2, cap):
        if skip and ell in skip:
            continue
        if nf % ell == 0 or np_ % ell == 0:
            continue
        for pf in primes_above(field, ell):
            if pf.degree != 1:
                continue
            if pf.ramification > ell - 2:
                continue
            if any(pf.ideal.contains(g) for g in generators):
                continue
            return pf
    raise RuntimeError("no good smoothing prime below the search cap")


def choose_pi(
    p_id: Ideal,
    f: Ideal,
    group: RayClassGroup,
) -> tuple[FieldElem, int]:
    """Totally positive generator of p^e congruent to 1 mod* f, e = order of [p]."""
    if f.norm() != 1 and not p_id.is_coprime(f):
        raise ValueError("p divides the modulus")
    e = group.order_of(group.class_of(p_id))
    pi = principal_gen_with_conditions(p_id ** e, group.f_factors, group.units)
    if pi is None:
        raise RuntimeError("no admissible generator found for p^e")
    return pi, e
