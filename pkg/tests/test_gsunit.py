from fractions import Fraction as Rat

import pytest

from gslab.gsunit import (
    GSConfig,
    epsilon_eta,
    make_config,
    probe_conjecture,
    rational_reconstruct,
    recognize,
    u_eta,
    verify_theorem,
)
from gslab.padic import PadicNum, ResidueMeasure, build_measure
from gslab.quadfield import congruent_to_one_mod, is_totally_positive
from gslab.zeta import BallCondition, smoothed_mass


import functools


@functools.lru_cache(maxsize=None)
def _cfg_small():
    return make_config(D=2, f_gen=1, p=7, m=2)


def test_make_config_discovery():
    cfg = _cfg_small()
    assert cfg.eta.ell == 17
    assert cfg.e == 1
    assert abs(cfg.pi.norm()) == 7
    assert is_totally_positive(cfg.pi)


def test_epsilon_eta_properties():
    cfg = _cfg_small()
    eps, exps = epsilon_eta(cfg)
    # the correction factor is a unit congruent to 1 mod* f and totally positive
    assert abs(eps.norm()) == 1
    assert is_totally_positive(eps)
    assert congruent_to_one_mod(eps, cfg.group.f_factors)
    assert all(isinstance(v, int) for v in exps.values())
    # telescoping: total mass of the translate pieces
    target = cfg.D_f.scaled(cfg.pi.conj())
    assert sum(exps.values()) == smoothed_mass(cfg.ctx, cfg.b, target, BallCondition.all())


def test_u_eta_valuation():
    cfg = _cfg_small()
    u = u_eta(cfg)
    assert u.valuation == u.ledger["zeta0_smoothed"] * cfg.e
    assert u.unit.val == 0


def test_verify_theorem_passes():
    cfg = _cfg_small()
    report = verify_theorem(cfg)
    assert report.passed, report.to_json()
    for c in report.checks:
        assert c.residual_valuation >= report.certified


def test_fault_injection_fails_check():
    cfg = _cfg_small()
    mu = build_measure(cfg.ctx, cfg.b, cfg.D_f, cfg.e, cfg.m)
    label = next(a for a in mu.unit_labels() if a % 7 not in (0, 1))
    bad_entries = dict(mu.entries)
    bad_entries[label] += 1
    bad = ResidueMeasure(mu.p, mu.m, mu.e, bad_entries)
    report = verify_theorem(cfg, mu=bad)
    assert not report.passed


def test_probe_conjecture():
    cfg = _cfg_small()
    report = probe_conjecture(cfg)
    names = {p["name"] for p in report.probes}
    assert {"domain-translate", "pi-representative", "b-representative",
            "ord-p-of-u", "u-eta-congruent-1-mod-eta"} <= names
    for p in report.probes:
        if p["name"] in ("domain-translate", "pi-representative", "b-representative"):
            assert p["finding"] == "agree", p
        if p["name"] == "ord-p-of-u":
            assert p["finding"] == "match"


def test_rational_reconstruction_planted():
    p = 11
    mod = p ** 10
    x = 22 * pow(7, -1, mod) % mod
    assert rational_reconstruct(x, mod, 100) == Rat(22, 7)
    # too-small height: no false positive
    assert rational_reconstruct(x, mod, 3) is None


def test_rational_reconstruction_no_false_positives():
    import random

    rng = random.Random(17)
    p = 11
    mod = p ** 12
    hits = 0
    for _ in range(100):
        x = rng.randrange(1, mod)
        got = rational_reconstruct(x, mod, 50)
        if got is not None:
            # a hit must be a genuine congruence
            assert (got.numerator - x * got.denominator) % mod == 0
            hits += 1
    assert hits <= 2  # random residues essentially never reconstruct


def test_recognize_planted_rational():
    p = 11
    vals = [PadicNum.from_rational(p, Rat(22, 7), 10)]
    got = recognize(vals, 100)
    assert got is not None and got["degree"] == 1
    # X - 22/7
    assert got["coefficients"] == ["1", "-22/7"]


def test_recognize_failure_is_none():
    p = 11
    vals = [PadicNum(p, 0, 123456789, 10)]
    assert recognize(vals, 3) is None
