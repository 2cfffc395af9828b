import pytest

from gslab.gsunit import make_config
from gslab.padic import build_measure


@pytest.fixture(scope="session")
def theorem_configs():
    """The verification configurations: both test fields, a nontrivial
    conductor, and conductor-one cases; all with a split p and level 3."""
    cfgs = [
        make_config(D=2, f_gen=1, p=7, m=3),
        make_config(D=2, f_gen=3, p=7, m=3),
        make_config(D=3, f_gen=1, p=13, m=3),
    ]
    return cfgs


@pytest.fixture(scope="session")
def moment_configs(theorem_configs):
    """Configurations pinned to p = 7 for the moment interpolation battery."""
    return [theorem_configs[0], theorem_configs[1], make_config(D=37, f_gen=1, p=7, m=3)]


@pytest.fixture(scope="session")
def measures(theorem_configs, moment_configs):
    out = {}
    for cfg in {id(c): c for c in theorem_configs + moment_configs}.values():
        key = (cfg.field.D, int(cfg.f.norm()), cfg.p)
        out[key] = build_measure(cfg.ctx, cfg.b, cfg.D_f, cfg.e, cfg.m)
    return out
