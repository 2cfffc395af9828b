"""Open simplicial cones and Shintani sets in the totally positive quadrant.

In degree 2 a cone is determined by the slopes sigma2/sigma1 of its
generators, so every set operation reduces to exact interval arithmetic on
the slope line ("sector normal form").  Fundamental domains modulo a group
of totally positive units and the simultaneous refinement against a
translate are built on top of that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .quadfield import FieldElem, Ideal, QuadField, UnitData, is_totally_positive, slope_det

Rat = Fraction


def primitive(x: FieldElem) -> FieldElem:
    """The primitive integral point on the ray through x."""
    den = math.lcm(x.a.denominator, x.b.denominator)
    na, nb = int(x.a * den), int(x.b * den)
    g = math.gcd(na, nb)
    return FieldElem(x.field, Rat(na, g), Rat(nb, g))


def _slope_lt(z: FieldElem, w: FieldElem) -> bool:
    return slope_det(z, w) > 0  # sigma2/sigma1 increasing <=> positive determinant


def _slope_eq(z: FieldElem, w: FieldElem) -> bool:
    return slope_det(z, w) == 0


class Cone:
    """C(v) or C(v1, v2): positive spans with totally positive, primitive
    integral generators; two-generator cones are open."""

    __slots__ = ("gens",)

    def __init__(self, *gens: FieldElem):
        if not 1 <= len(gens) <= 2:
            raise ValueError("a cone has one or two generators")
        prims = [primitive(g) for g in gens]
        for g in prims:
            if not (g.is_integral() and is_totally_positive(g)):
                raise ValueError("generators must be totally positive integers of the field")
        if len(prims) == 2:
            if _slope_eq(prims[0], prims[1]):
                raise ValueError("generators must be linearly independent")
            if _slope_lt(prims[1], prims[0]):
                prims.reverse()
        self.gens = tuple(prims)

    @property
    def r(self) -> int:
        return len(self.gens)

    def __eq__(self, other):
        return isinstance(other, Cone) and self.gens == other.gens

    def __hash__(self):
        return hash(self.gens)

    def __repr__(self):
        return f"Cone{self.gens}"

    def contains(self, z: FieldElem) -> bool:
        return cone_contains(self, z)

    def scaled(self, alpha: FieldElem) -> "Cone":
        return Cone(*(alpha * g for g in self.gens))

    def to_json(self):
        return [g.to_json() for g in self.gens]


def cone_contains(cone: Cone, z: FieldElem) -> bool:
    if z.is_zero() or not is_totally_positive(z):
        return False
    if cone.r == 1:
        return _slope_eq(z, cone.gens[0])
    v1, v2 = cone.gens
    # z = t1 v1 + t2 v2, solved exactly in the coordinates (a, b)
    det = v1.a * v2.b - v1.b * v2.a
    t1 = (z.a * v2.b - z.b * v2.a) / det
    t2 = (v1.a * z.b - v1.b * z.a) / det
    return t1 > 0 and t2 > 0


def cone_coordinates(cone: Cone, z: FieldElem) -> tuple[Rat, ...]:
    """Exact coordinates of z in the generator basis (cone membership not required)."""
    if cone.r == 1:
        v = cone.gens[0]
        if v.a != 0:
            t = z.a / v.a
        else:
            t = z.b / v.b
        if v * t != z:
            raise ValueError("not on the ray")
        return (t,)
    v1, v2 = cone.gens
    det = v1.a * v2.b - v1.b * v2.a
    return ((z.a * v2.b - z.b * v2.a) / det, (v1.a * z.b - v1.b * z.a) / det)


class ShintaniSet:
    """A finite disjoint union of cones."""

    def __init__(self, cones, validate: bool = True):
        self.cones = tuple(cones)
        if validate and self.cones:
            sf = SectorForm.from_cones(self.cones, check_disjoint=True)
            del sf

    def __iter__(self):
        return iter(self.cones)

    def __len__(self):
        return len(self.cones)

    def contains(self, z: FieldElem) -> bool:
        return any(cone_contains(c, z) for c in self.cones)

    def scaled(self, alpha: FieldElem) -> "ShintaniSet":
        return ShintaniSet([c.scaled(alpha) for c in self.cones], validate=False)

    def generators(self) -> list[FieldElem]:
        out = []
        for c in self.cones:
            out.extend(c.gens)
        return out

    def __eq__(self, other):
        if not isinstance(other, ShintaniSet):
            return NotImplemented
        return SectorForm.from_cones(self.cones) == SectorForm.from_cones(other.cones)

    def __repr__(self):
        return f"ShintaniSet({list(self.cones)})"

    def to_json(self):
        return [c.to_json() for c in self.cones]


@dataclass(frozen=True)
class SectorForm:
    """Canonical form of a degree-2 Shintani set: the sorted slope endpoints
    with membership flags for each endpoint ray and each open gap between
    consecutive endpoints."""

    slopes: tuple[FieldElem, ...]
    point_in: tuple[bool, ...]
    gap_in: tuple[bool, ...]  # gap_in[i] for the open gap (slopes[i], slopes[i+1])

    @classmethod
    def from_cones(cls, cones, check_disjoint: bool = False) -> "SectorForm":
        endpoints: list[FieldElem] = []
        for c in cones:
            for g in c.gens:
                if not any(_slope_eq(g, s) for s in endpoints):
                    endpoints.append(g)
        endpoints.sort(key=_SlopeKey)
        point_in = []
        for s in endpoints:
            hits = sum(1 for c in cones if cone_contains(c, s))
            if check_disjoint and hits > 1:
                raise ValueError("cones are not pairwise disjoint")
            point_in.append(hits > 0)
        gap_in = []
        for s, t in zip(endpoints, endpoints[1:]):
            witness = s + t  # slope strictly between the two endpoints
            hits = sum(1 for c in cones if cone_contains(c, witness))
            if check_disjoint and hits > 1:
                raise ValueError("cones are not pairwise disjoint")
            gap_in.append(hits > 0)
        return cls._reduced(endpoints, point_in, gap_in)

    @classmethod
    def _reduced(cls, slopes, point_in, gap_in) -> "SectorForm":
        # drop endpoints whose removal does not change the set
        changed = True
        while changed:
            changed = False
            for i in range(len(slopes)):
                left = gap_in[i - 1] if i > 0 else False
                right = gap_in[i] if i < len(gap_in) else False
                if point_in[i] == left == right:
                    slopes.pop(i)
                    point_in.pop(i)
                    if i < len(gap_in):
                        gap_in.pop(i)
                    elif gap_in:
                        gap_in.pop()
                    changed = True
                    break
        return cls(tuple(slopes), tuple(point_in), tuple(gap_in))

    def _key(self):
        return (
            tuple((s.a, s.b) for s in self.slopes),
            self.point_in,
            self.gap_in,
        )

    def __eq__(self, other):
        return isinstance(other, SectorForm) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def to_set(self) -> ShintaniSet:
        cones = []
        for i, flag in enumerate(self.gap_in):
            if flag:
                cones.append(Cone(self.slopes[i], self.slopes[i + 1]))
        for s, flag in zip(self.slopes, self.point_in):
            if flag:
                cones.append(Cone(s))
        return ShintaniSet(cones, validate=False)


class _SlopeKey:
    __slots__ = ("elem",)

    def __init__(self, elem: FieldElem):
        self.elem = elem

    def __lt__(self, other):
        return _slope_lt(self.elem, other.elem)

    def __eq__(self, other):
        return _slope_eq(self.elem, other.elem)


def set_ops(A: ShintaniSet, B: ShintaniSet, kind: str) -> ShintaniSet:
    """Exact intersection, difference, or union in sector normal form."""
    if kind not in ("intersection", "difference", "union"):
        raise ValueError(f"unknown set operation {kind!r}")
    endpoints: list[FieldElem] = []
    for S in (A, B):
        for c in S.cones:
            for g in c.gens:
                if not any(_slope_eq(g, s) for s in endpoints):
                    endpoints.append(g)
    endpoints.sort(key=_SlopeKey)

    def combine(a: bool, b: bool) -> bool:
        if kind == "intersection":
            return a and b
        if kind == "difference":
            return a and not b
        return a or b

    point_in = [combine(A.contains(s), B.contains(s)) for s in endpoints]
    gap_in = []
    for s, t in zip(endpoints, endpoints[1:]):
        w = s + t
        gap_in.append(combine(A.contains(w), B.contains(w)))
    return SectorForm._reduced(endpoints, point_in, gap_in).to_set()


def sets_equal(A: ShintaniSet, B: ShintaniSet) -> bool:
    return SectorForm.from_cones(A.cones) == SectorForm.from_cones(B.cones)


def shintani_domain(field: QuadField, units: UnitData, narrow_level: bool = True) -> ShintaniSet:
    """Fundamental domain of the totally positive quadrant.

    Base pair C(1) u C(1, eps_plus) is fundamental modulo the totally
    positive units; with narrow_level the k_f translates by eps_plus make it
    fundamental modulo the units congruent to 1 mod f.
    """
    one = field.one()
    base = [Cone(one), Cone(one, units.eps_plus)]
    k = units.k_f if narrow_level else 1
    cones = []
    for i in range(k):
        scale = units.eps_plus ** i
        cones.extend(c.scaled(scale) for c in base)
    return ShintaniSet(cones)


@dataclass(frozen=True)
class DecompositionPiece:
    cone: Cone
    unit: FieldElem      # a power of eps_f
    exponent: int        # the power


@dataclass(frozen=True)
class GoodDecomposition:
    """Cones C_j and units e_j with  |_| C_j = D  and  |_| e_j C_j = target."""

    pieces: tuple[DecompositionPiece, ...]

    def generators(self) -> list[FieldElem]:
        out = []
        for p in self.pieces:
            out.extend(p.cone.gens)
            out.extend(p.cone.scaled(p.unit).gens)
        return out

    def domain(self) -> ShintaniSet:
        return ShintaniSet([p.cone for p in self.pieces], validate=False)

    def translated(self) -> ShintaniSet:
        return ShintaniSet([p.cone.scaled(p.unit) for p in self.pieces], validate=False)


def simultaneous_decomposition(
    D_f: ShintaniSet,
    pi: FieldElem,
    units: UnitData,
    max_window: int = 64,
) -> GoodDecomposition:
    """Refine D_f so that unit translates of the pieces tile pi^{-1} D_f.

    pi^{-1} D_f is represented by conj(pi) D_f (a positive rational multiple
    of the same rays).  The unit for each piece is searched in a window of
    powers of eps_f, which doubles on exhaustion.
    """
    target = D_f.scaled(pi.conj())
    window = 2 * units.k_f
    while window <= max_window * units.k_f:
        pieces = []
        for w in range(-window, window + 1):
            shift = units.eps_f ** (-w)
            T = set_ops(D_f, target.scaled(shift), "intersection")
            for cone in T.cones:
                pieces.append(DecompositionPiece(cone, units.eps_f ** w, w))
        got = ShintaniSet([p.cone for p in pieces], validate=False)
        if sets_equal(got, D_f):
            translated = ShintaniSet([p.cone.scaled(p.unit) for p in pieces], validate=False)
            assert sets_equal(translated, target), "translate tiling failed"
            return GoodDecomposition(tuple(pieces))
        window *= 2
    raise RuntimeError("unit window exhausted in the simultaneous decomposition")


def is_good_for(eta: Ideal, S: ShintaniSet) -> bool:
    """Prime norm and no cone generator inside eta."""
    nm = eta.norm()
    if nm.denominator != 1:
        return False
    n = int(nm)
    if n < 2 or any((n % k) == 0 for k in range(2, math.isqrt(n) + 1)):
        return False
    return all(not eta.contains(g) for g in S.generators())


def fundamental_domain_check(
    S: ShintaniSet,
    unit: FieldElem,
    n_samples: int,
    rng,
    window: int = 14,
    coord_bound: int = 30,
) -> dict:
    """Sampling check that S contains exactly one unit-translate of each ray."""
    field = S.cones[0].gens[0].field
    unit_powers = [unit ** i for i in range(-window, window + 1)]
    violations = []
    produced = 0
    while produced < n_samples:
        a = Rat(rng.randrange(-coord_bound, coord_bound + 1), rng.randrange(1, 8))
        b = Rat(rng.randrange(-coord_bound, coord_bound + 1), rng.randrange(1, 8))
        z = field.element(a, b)
        if z.is_zero() or not all(s > 0 for s in z.embedding_signs()):
            continue
        produced += 1
        hits = [i - window for i, u in enumerate(unit_powers) if S.contains(u * z)]
        if len(hits) != 1:
            violations.append({"z": z.to_json(), "hits": hits})
    return {"samples": n_samples, "violations": violations, "ok": not violations}
