import random

import pytest

from gslab.cones import (
    Cone,
    SectorForm,
    ShintaniSet,
    cone_contains,
    fundamental_domain_check,
    is_good_for,
    primitive,
    set_ops,
    sets_equal,
    shintani_domain,
    simultaneous_decomposition,
)
from gslab.quadfield import make_field, primes_above, ray_class_group, unit_data, choose_pi


def test_cone_contains_examples():
    F = make_field(2)
    one = F.one()
    u = F.element(3, 2)
    assert cone_contains(Cone(one), one)
    assert not cone_contains(Cone(one), u)
    assert cone_contains(Cone(one, u), one + u)
    # boundary rays are excluded from two-generator cones
    assert not cone_contains(Cone(one, u), u)
    assert not cone_contains(Cone(one, u), 3 * one)


def test_scaling_invariance():
    F = make_field(3)
    v = F.element(2, 1)
    c1 = Cone(v)
    c2 = Cone(v * 6)
    assert c1 == c2
    w = F.element(5, 2)
    assert Cone(v, w) == Cone(w * 3, v * 2)
    rng = random.Random(3)
    for _ in range(25):
        z = F.element(rng.randrange(1, 30), rng.randrange(0, 9))
        try:
            tp = all(s > 0 for s in z.embedding_signs())
        except ValueError:
            continue
        if not tp:
            continue
        assert cone_contains(Cone(v, w), z) == cone_contains(Cone(v * 7, w * 2), z)


def test_primitive():
    F = make_field(2)
    from fractions import Fraction

    x = F.element(Fraction(4, 6), Fraction(8, 6))
    p = primitive(x)
    assert p == F.element(1, 2)


def test_shintani_domain_mod_eplus():
    for D in (2, 3):
        F = make_field(D)
        ud = unit_data(F)
        dom = shintani_domain(F, ud, narrow_level=False)
        assert len(dom) == 2
        rng = random.Random(41)
        report = fundamental_domain_check(dom, ud.eps_plus, 200, rng)
        assert report["ok"], report["violations"][:3]


def test_shintani_domain_narrow_levels():
    F = make_field(2)
    ud7 = unit_data(F, F.ideal(7))
    assert ud7.k_f == 3
    dom = shintani_domain(F, ud7)
    assert len(dom) == 6
    rng = random.Random(42)
    report = fundamental_domain_check(dom, ud7.eps_f, 200, rng)
    assert report["ok"]


def test_corrupted_domain_reports_violations():
    F = make_field(2)
    ud = unit_data(F)
    dom = shintani_domain(F, ud, narrow_level=False)
    bad = ShintaniSet(list(dom.cones) + [dom.cones[0].scaled(ud.eps_plus)], validate=False)
    rng = random.Random(43)
    report = fundamental_domain_check(bad, ud.eps_plus, 100, rng)
    assert not report["ok"]


def test_set_ops_identities():
    F = make_field(2)
    ud = unit_data(F)
    one, u = F.one(), ud.eps_plus
    A = shintani_domain(F, ud, narrow_level=False)
    assert sets_equal(set_ops(A, A, "intersection"), A)
    # open cone does not meet its boundary ray
    big = ShintaniSet([Cone(one, u)])
    ray = ShintaniSet([Cone(u)])
    assert len(set_ops(big, ray, "intersection")) == 0
    # difference and intersection partition A
    B = ShintaniSet([Cone(one, u * u)])
    left = set_ops(A, B, "difference")
    mid = set_ops(A, B, "intersection")
    assert sets_equal(set_ops(left, mid, "union"), A)


def test_sector_form_canonical():
    F = make_field(2)
    one, u = F.one(), F.element(3, 2)
    mid = one + u
    # (1, u) split at the interior ray mid, plus the ray itself, equals (1, u)
    split = ShintaniSet([Cone(one, mid), Cone(mid), Cone(mid, u)])
    whole = ShintaniSet([Cone(one, u)])
    assert sets_equal(split, whole)
    assert SectorForm.from_cones(split.cones) == SectorForm.from_cones(whole.cones)


def test_disjointness_validation():
    F = make_field(2)
    one, u = F.one(), F.element(3, 2)
    with pytest.raises(ValueError):
        ShintaniSet([Cone(one, u), Cone(one, u)])
    with pytest.raises(ValueError):
        ShintaniSet([Cone(one, u), Cone(one + u)])


def test_simultaneous_decomposition():
    F = make_field(2)
    f = F.unit_ideal()
    ud = unit_data(F, f)
    G = ray_class_group(F, f, ud)
    p7 = primes_above(F, 7)[0]
    pi, e = choose_pi(p7.ideal, f, G)
    D_f = shintani_domain(F, ud)
    dec = simultaneous_decomposition(D_f, pi, ud)
    # exact tilings
    assert sets_equal(dec.domain(), D_f)
    target = D_f.scaled(pi.conj())
    assert sets_equal(dec.translated(), target)
    # every piece unit is a power of eps_f
    for p in dec.pieces:
        assert p.unit == ud.eps_f ** p.exponent
    # membership sampling oracle: z in D_f lands in exactly one piece, and
    # its piece translate lies in pi^{-1} D_f
    rng = random.Random(44)
    produced = 0
    while produced < 200:
        from fractions import Fraction

        z = F.element(Fraction(rng.randrange(-40, 41), rng.randrange(1, 6)),
                      Fraction(rng.randrange(-40, 41), rng.randrange(1, 6)))
        if z.is_zero():
            continue
        try:
            if not all(s > 0 for s in z.embedding_signs()):
                continue
        except ValueError:
            continue
        if not D_f.contains(z):
            continue
        produced += 1
        owners = [p for p in dec.pieces if cone_contains(p.cone, z)]
        assert len(owners) == 1
        assert target.contains(owners[0].unit * z)


def test_is_good_for():
    F = make_field(2)
    ud = unit_data(F)
    D = shintani_domain(F, ud, narrow_level=False)
    eta17 = primes_above(F, 17)[0].ideal
    assert is_good_for(eta17, D)
    # inert prime: norm 25 is not prime
    eta5 = primes_above(F, 5)[0].ideal
    assert not is_good_for(eta5, D)
    # a generator inside the prime
    w = F.element(4, 1)  # norm 14, inside a prime above 7
    p7 = primes_above(F, 7)
    bad = next(pf.ideal for pf in p7 if pf.ideal.contains(w))
    assert not is_good_for(bad, ShintaniSet([Cone(w)]))
