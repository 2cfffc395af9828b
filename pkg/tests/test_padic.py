import random
from fractions import Fraction as Rat

import pytest

from gslab.cones import shintani_domain
from gslab.padic import (
    AlgLogCombo,
    PadicEmbedding,
    PadicNum,
    ResidueMeasure,
    bracket_p,
    build_measure,
    integrate_log,
    integrate_moment,
    integrate_mult,
    iwasawa_log,
    principal_unit_part,
    teichmuller,
    working_precision,
)
from gslab.quadfield import make_field, primes_above, unit_data, val_at_prime
from gslab.zeta import BallCondition, ZetaContext, smoothed_mass, smoothed_moment_exact


def test_padic_num_basic():
    x = PadicNum.from_rational(7, Rat(22, 7), 5)
    assert x.val == -1
    y = x * PadicNum.from_rational(7, 7, 5)
    assert y.val == 0 and y.residue(3) == 22 % 343
    z = x - x
    assert z.is_zero()
    assert (x * x.inverse()).residue(4) == 1
    s = PadicNum.from_rational(7, 3, 6) + PadicNum.from_rational(7, 4, 6)
    assert s.val == 1 and s.residue(2) == 7


def test_padic_precision_tracking():
    p = 7
    a = PadicNum(p, 0, 1 + p ** 3, 6)
    b = PadicNum(p, 0, 1, 6)
    d = a - b
    assert d.val == 3 and d.prec == 3  # cancellation eats absolute precision
    assert (a * b).prec == 6


def test_teichmuller_golden_value():
    # oracle first: the unique 4th root of unity = 2 mod 5 inside Z/125
    oracle = next(x for x in range(125) if x % 5 == 2 and pow(x, 4, 125) == 1)
    assert oracle == 57
    got = teichmuller(PadicNum.from_rational(5, 2, 3))
    assert got.residue(3) == 57
    assert (got ** 4).residue(3) == 1


def test_teichmuller_properties():
    for p in (5, 7, 13):
        for u in (2, 3, p - 1):
            t = teichmuller(PadicNum.from_rational(p, u, 8))
            assert teichmuller(t).residue(8) == t.residue(8)
            assert (t ** (p - 1)).residue(8) == 1
            lg = iwasawa_log(t)
            assert lg.is_zero() and lg.val >= 8


def test_iwasawa_log_golden_value():
    # oracle first: log(6) = log(1+5) = 5 - 25/2 + 125/3 - ... mod 125
    series = sum(Rat((-1) ** (k + 1) * 5 ** k, k) for k in range(1, 10))
    den_inv = pow(series.denominator, -1, 125)
    assert series.numerator * den_inv % 125 == 55
    got = iwasawa_log(PadicNum.from_rational(5, 6, 3))
    assert got.residue(3) == 55


def test_iwasawa_log_branch_and_homomorphism():
    p = 7
    lg_p = iwasawa_log(PadicNum.from_rational(p, p, 10))
    assert lg_p.is_zero()
    rng = random.Random(2)
    for _ in range(10):
        a = rng.randrange(1, 7 ** 5)
        b = rng.randrange(1, 7 ** 5)
        if a % p == 0 or b % p == 0:
            continue
        x = PadicNum.from_rational(p, a, 10)
        y = PadicNum.from_rational(p, b, 10)
        lhs = iwasawa_log(x * y)
        rhs = iwasawa_log(x) + iwasawa_log(y)
        assert lhs.eq_to_prec(rhs, 9)


def test_principal_unit_part():
    p = 5
    x = PadicNum.from_rational(p, Rat(14, 25), 6)
    u = principal_unit_part(x)
    assert u.val == 0 and u.residue(1) == 1


def test_embedding_golden_value():
    # oracle first: the square root of 2 in Z/343 congruent to 3 mod 7
    oracle = next(x for x in range(343) if x * x % 343 == 2 and x % 7 == 3)
    assert oracle == 108
    F = make_field(2)
    emb = PadicEmbedding(F, 7, root=3, prec=3)
    got = emb.embed(F.omega())
    assert got.residue(3) == 108


def test_embedding_homomorphism_and_valuation():
    F = make_field(2)
    emb = PadicEmbedding(F, 7, root=3, prec=8)
    rng = random.Random(9)
    for _ in range(15):
        x = F.element(Rat(rng.randrange(-20, 21), rng.randrange(1, 5)),
                      Rat(rng.randrange(-20, 21), rng.randrange(1, 5)))
        y = F.element(rng.randrange(-9, 10), rng.randrange(-9, 10))
        if x.is_zero() or y.is_zero():
            continue
        assert emb.embed(x * y).eq_to_prec(emb.embed(x) * emb.embed(y), 6)
        assert emb.embed(x + y).eq_to_prec(emb.embed(x) + emb.embed(y), 6)
        assert emb.embed(x).valuation() == val_at_prime(emb.prime.ideal, x)
    with pytest.raises(ValueError):
        PadicEmbedding(make_field(5), 7)  # 5 is not a square mod 7: inert


def test_embedding_rational_and_denominators():
    F = make_field(2)
    emb = PadicEmbedding(F, 7, root=3, prec=6)
    x = emb.embed(F.element(Rat(3, 14)))
    assert x.val == -1
    assert (x * PadicNum.from_rational(7, 14, 6)).residue(4) == 3


def test_bracket_examples():
    F = make_field(2)
    emb = PadicEmbedding(F, 7, root=3, prec=10)
    two = F.element(2)
    assert bracket_p(AlgLogCombo(((Rat(1), two),)), emb).eq_to_prec(
        iwasawa_log(emb.embed(two)), 9
    )
    # the archimedean pi component is dropped
    assert bracket_p(AlgLogCombo((), Rat(3)), emb).is_zero()
    # linearity + log homomorphism
    a, b = F.element(3, 1), F.element(5, 2)
    lhs = bracket_p(AlgLogCombo(((Rat(1), a), (Rat(1), b))), emb)
    rhs = bracket_p(AlgLogCombo(((Rat(1), a * b),)), emb)
    assert lhs.eq_to_prec(rhs, 9)


def _measure_setup(m=2):
    F = make_field(2)
    f = F.unit_ideal()
    eta = primes_above(F, 17)[0]
    p_pf = primes_above(F, 7)[0]
    ctx = ZetaContext(F, f, eta, p_pf)
    ud = unit_data(F)
    D_f = shintani_domain(F, ud)
    b = F.unit_ideal()
    mu = build_measure(ctx, b, D_f, e=1, m=m)
    return F, ctx, D_f, b, mu


def test_measure_mass_and_integrality():
    F, ctx, D_f, b, mu = _measure_setup()
    from gslab.zeta import smoothed_class_zeta0

    assert mu.total_mass() == smoothed_class_zeta0(ctx, b, D_f)
    assert all(isinstance(v, int) for v in mu.entries.values())


def test_measure_refinement():
    F, ctx, D_f, b, mu2 = _measure_setup(m=2)
    mu3 = build_measure(ctx, b, D_f, e=1, m=3)
    for a in mu2.unit_labels():
        children = sum(v for k, v in mu3.entries.items()
                       if k != "piO" and k % 7 ** 2 == a)
        assert children == mu2.entries[a]


def test_integrate_moment_k0_exact():
    F, ctx, D_f, b, mu = _measure_setup()
    got = integrate_moment(mu, 0)
    want = smoothed_mass(ctx, b, D_f, BallCondition.all()) - smoothed_mass(
        ctx, b, D_f, BallCondition.ord_at_least(1)
    )
    assert got.eq_to_prec(PadicNum.from_rational(7, want, 10), 8)


def test_integrate_moment_interpolation():
    F, ctx, D_f, b, mu = _measure_setup(m=3)
    emb = PadicEmbedding(F, 7, root=ctx.p_pf.root, prec=working_precision(mu))
    cert = mu.certified()
    for k in (1, 2):
        got = integrate_moment(mu, k)
        exact = smoothed_moment_exact(ctx, b, D_f, k, e=1)
        want = emb.embed(exact) if not isinstance(exact, Rat) else PadicNum.from_rational(7, exact, 10)
        diff = got - want
        assert diff.valuation() >= mu.m - mu.delta, (k, diff, cert)


def test_integrate_log_vs_mult():
    F, ctx, D_f, b, mu = _measure_setup(m=3)
    lhs = iwasawa_log(integrate_mult(mu))
    rhs = integrate_log(mu)
    assert (lhs - rhs).valuation() >= working_precision(mu) - 1


def test_synthetic_measures_log_vs_mult():
    rng = random.Random(31)
    p, m = 7, 3
    for _ in range(20):
        entries = {}
        for _ in range(rng.randrange(3, 9)):
            a = rng.randrange(1, p ** m)
            if a % p == 0:
                continue
            entries[a] = rng.choice([-1, 1])
        mu = ResidueMeasure(p, m, 1, entries)
        lhs = iwasawa_log(integrate_mult(mu, prec=12))
        rhs = integrate_log(mu, prec=12)
        assert (lhs - rhs).valuation() >= 10


def test_fault_injection_breaks_consistency():
    F, ctx, D_f, b, mu = _measure_setup(m=3)
    # corrupt one entry whose log is visibly nonzero
    label = next(a for a in mu.unit_labels() if a % 7 not in (0, 1))
    bad_entries = dict(mu.entries)
    bad_entries[label] = bad_entries[label] + 1
    bad = ResidueMeasure(mu.p, mu.m, mu.e, bad_entries)
    lhs = iwasawa_log(integrate_mult(bad))
    rhs = integrate_log(mu)
    diff = lhs - rhs
    # the defect is log_p(label) up to Teichmuller parts: nonzero
    assert not diff.is_zero() or diff.val < mu.certified()
    assert diff.valuation() < working_precision(mu) - 1


def test_translation_shift():
    # pushing the measure forward by a global unit shifts the log integral
    # by (total mass) * log_p(u)
    F, ctx, D_f, b, mu = _measure_setup(m=3)
    p, m = mu.p, mu.m
    u = 1 + 7  # unit of every ball at level 1; use exact coset scaling
    moved = {}
    for a, v in mu.entries.items():
        if a == "piO":
            moved[a] = v
            continue
        moved[(a * u) % p ** (m + mu.ord_of(a))] = v
    mu2 = ResidueMeasure(p, m, mu.e, moved)
    lhs = integrate_log(mu2, prec=12)
    rhs = integrate_log(mu, prec=12) + PadicNum.from_rational(p, mu.total_mass() - mu.entries.get("piO", 0), 12) * iwasawa_log(
        PadicNum.from_rational(p, u, 12)
    )
    assert (lhs - rhs).valuation() >= m  # representatives move within coset radius


def test_precision_ledger_metamorphic():
    F, ctx, D_f, b, mu = _measure_setup(m=3)
    lo = integrate_log(mu, prec=8)
    hi = integrate_log(mu, prec=12)
    assert (lo - hi).valuation() >= 8 - 1


def test_padic_serialization():
    x = PadicNum.from_rational(7, Rat(10, 3), 4)
    js = x.to_json()
    assert js["p"] == 7 and js["val"] == 0
    assert js["digits"][0] == (10 * pow(3, -1, 7)) % 7
    assert js["precision"] == 4
