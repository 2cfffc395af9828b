"""Batch driver: configuration parsing, pipeline execution, JSON reports.

Exit codes: 0 on success, 1 when a verification check fails, 2 on
configuration errors.  Output is canonical JSON on stdout (sorted keys, no
timestamps), byte-identical across runs for the same configuration and
seed.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

SCHEMA = "gslab/1"

_KEYS = ("D", "f", "p", "eta", "b", "m", "M", "seed", "jobs", "root")


@dataclass
class RunConfig:
    D: int = 2
    f: int = 1
    p: int = 7
    eta: str = "auto"
    b: str = "identity"
    m: int = 3
    M: int | None = None
    seed: int = 0
    jobs: int = 1
    root: int | None = None


class ConfigError(Exception):
    pass


def load_config_file(path: str) -> dict:
    """key=value lines, # comments; unknown keys are errors, last value wins."""
    out: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, val = (part.strip() for part in line.split("=", 1))
            if key not in _KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            if key in out:
                print(f"warning: duplicate key {key!r}, last value wins", file=sys.stderr)
            out[key] = val
    return out


def _merge_config(args) -> RunConfig:
    cfg = RunConfig()
    file_vals = load_config_file(args.config) if getattr(args, "config", None) else {}
    for key, val in file_vals.items():
        if key in ("eta", "b"):
            setattr(cfg, key, val)
        elif key in ("M", "root"):
            setattr(cfg, key, int(val))
        else:
            setattr(cfg, key, int(val))
    for key in _KEYS:
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    env_seed = os.environ.get("GSLAB_SEED")
    if env_seed is not None and getattr(args, "seed", None) is None:
        cfg.seed = int(env_seed)
    return cfg


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _build(cfg: RunConfig, need_eta: bool = True):
    from .gsunit import make_config

    eta_norm = None if cfg.eta == "auto" else int(cfg.eta)
    return make_config(cfg.D, cfg.f, cfg.p, cfg.m, eta_norm=eta_norm, p_root=cfg.root)


def _class_reps(gs, cfg: RunConfig):
    from .quadfield import rep_coprime_to

    avoid = cfg.p * gs.eta.ell * max(int(gs.f.norm()), 1)
    if cfg.b == "all-classes":
        labels = list(gs.group.labels())
    elif cfg.b == "identity":
        labels = [0]
    else:
        labels = [int(cfg.b)]
    return [(lab, rep_coprime_to(gs.group, lab, avoid)) for lab in labels]


def _measure_for_class(payload):
    gs, lab, rep, m = payload
    from .padic import build_measure

    mu = build_measure(gs.ctx, rep, gs.D_f, gs.e, m)
    return lab, rep, mu


def _measures(gs, cfg: RunConfig):
    reps = _class_reps(gs, cfg)
    jobs = max(1, cfg.jobs)
    work = [(gs, lab, rep, cfg.m) for lab, rep in reps]
    if jobs == 1 or len(work) == 1:
        results = [_measure_for_class(w) for w in work]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_measure_for_class, work))
    return sorted(results, key=lambda t: t[0])


def cmd_field_info(cfg: RunConfig) -> int:
    from .quadfield import make_field, ray_class_group, unit_data

    field = make_field(cfg.D)
    f = field.ideal(cfg.f)
    units = unit_data(field, f)
    group = ray_class_group(field, f, units)
    _emit({
        "schema": SCHEMA,
        "command": "field-info",
        "D": field.D,
        "disc": field.disc,
        "omega": field.omega_desc,
        "eps": units.eps.to_json(),
        "eps_plus": units.eps_plus.to_json(),
        "eps_f": units.eps_f.to_json(),
        "k_f": units.k_f,
        "f": f.to_json(),
        "ray_class_order": group.order,
        "class_reps": [r.to_json() for r in group.reps],
    })
    return 0


def cmd_shintani(cfg: RunConfig) -> int:
    from .cones import fundamental_domain_check, shintani_domain
    from .quadfield import make_field, unit_data

    field = make_field(cfg.D)
    f = field.ideal(cfg.f)
    units = unit_data(field, f)
    dom = shintani_domain(field, units)
    rng = random.Random(cfg.seed)
    report = fundamental_domain_check(dom, units.eps_f, 500, rng)
    _emit({
        "schema": SCHEMA,
        "command": "shintani",
        "D": cfg.D,
        "f": f.to_json(),
        "cones": dom.to_json(),
        "domain_check": {"samples": report["samples"],
                         "violations": len(report["violations"]),
                         "ok": report["ok"]},
        "seed": cfg.seed,
    })
    return 0 if report["ok"] else 1


def cmd_zeta(cfg: RunConfig) -> int:
    from .zeta import class_partial_zeta0, smoothed_class_zeta0

    gs = _build(cfg)
    narrow_one = gs.group if int(gs.f.norm()) == 1 else None
    classes = []
    total_plain = 0
    total_smoothed = 0
    for lab, rep in _class_reps(gs, RunConfig(**{**cfg.__dict__, "b": "all-classes"})):
        sm = smoothed_class_zeta0(gs.ctx, rep, gs.D_f)
        row = {"label": lab, "smoothed_zeta0": sm}
        if narrow_one is not None:
            val = class_partial_zeta0(gs.field, gs.group, lab)
            row["plain_zeta0"] = str(val)
            total_plain += val
        classes.append(row)
        total_smoothed += sm
    _emit({
        "schema": SCHEMA,
        "command": "zeta",
        "config": gs.to_json(),
        "classes": classes,
        "sum_smoothed": total_smoothed,
        "sum_plain": str(total_plain) if narrow_one is not None else None,
    })
    return 0


def cmd_measure(cfg: RunConfig) -> int:
    gs = _build(cfg)
    tables = []
    for lab, rep, mu in _measures(gs, cfg):
        tables.append({
            "label": lab,
            "b": rep.to_json(),
            "measure": mu.to_json(),
            "total_mass": mu.total_mass(),
        })
    _emit({
        "schema": SCHEMA,
        "command": "measure",
        "config": gs.to_json(),
        "tables": tables,
        "seed": cfg.seed,
    })
    return 0


def cmd_u_unit(cfg: RunConfig) -> int:
    from .gsunit import GSConfig, u_eta

    gs = _build(cfg)
    rows = []
    for lab, rep, mu in _measures(gs, cfg):
        gs_b = GSConfig(gs.field, gs.f, gs.p, gs.p_pf, gs.eta, gs.pi, gs.e,
                        gs.units, gs.group, gs.D_f, gs.decomposition, rep, gs.m, gs.emb)
        prec = max(cfg.M, mu.m + mu.delta) if cfg.M else None
        u = u_eta(gs_b, mu, prec)
        rows.append({"label": lab, "b": rep.to_json(), "u_eta": u.to_json()})
    _emit({
        "schema": SCHEMA,
        "command": "u-unit",
        "config": gs.to_json(),
        "units": rows,
        "seed": cfg.seed,
    })
    return 0


def cmd_verify_theorem(cfg: RunConfig) -> int:
    from .gsunit import GSConfig, verify_theorem

    gs = _build(cfg)
    reports = []
    ok = True
    for lab, rep, mu in _measures(gs, cfg):
        gs_b = GSConfig(gs.field, gs.f, gs.p, gs.p_pf, gs.eta, gs.pi, gs.e,
                        gs.units, gs.group, gs.D_f, gs.decomposition, rep, gs.m, gs.emb)
        prec = max(cfg.M, mu.m + mu.delta) if cfg.M else None
        report = verify_theorem(gs_b, mu, prec=prec)
        ok = ok and report.passed
        reports.append(report.to_json())
    _emit({
        "schema": SCHEMA,
        "command": "verify-theorem",
        "reports": reports,
        "pass": ok,
        "seed": cfg.seed,
    })
    return 0 if ok else 1


def cmd_probe(cfg: RunConfig) -> int:
    from .gsunit import GSConfig, probe_conjecture

    gs = _build(cfg)
    reports = []
    for lab, rep, mu in _measures(gs, cfg):
        gs_b = GSConfig(gs.field, gs.f, gs.p, gs.p_pf, gs.eta, gs.pi, gs.e,
                        gs.units, gs.group, gs.D_f, gs.decomposition, rep, gs.m, gs.emb)
        reports.append(probe_conjecture(gs_b, mu).to_json())
    _emit({
        "schema": SCHEMA,
        "command": "probe",
        "reports": reports,
        "seed": cfg.seed,
    })
    return 0


_COMMANDS = {
    "field-info": cmd_field_info,
    "shintani": cmd_shintani,
    "zeta": cmd_zeta,
    "measure": cmd_measure,
    "u-unit": cmd_u_unit,
    "verify-theorem": cmd_verify_theorem,
    "probe": cmd_probe,
}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gslab",
                                 description="Gross-Stark unit construction and verification")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--D", type=int, default=None)
        sp.add_argument("--f", type=int, default=None, help="generator of the conductor (f)")
        sp.add_argument("--p", type=int, default=None)
        sp.add_argument("--eta", type=str, default=None, help='norm of the smoothing prime or "auto"')
        sp.add_argument("--b", type=str, default=None, help='"identity", "all-classes" or a class label')
        sp.add_argument("--m", type=int, default=None, help="measure level")
        sp.add_argument("--M", type=int, default=None, help="working precision override")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--jobs", type=int, default=None)
        sp.add_argument("--root", type=int, default=None, help="residue of omega mod p")
        sp.add_argument("--config", type=str, default=None, help="key=value configuration file")
    return ap


def command_dispatch(argv) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = _merge_config(args)
        return _COMMANDS[args.command](cfg)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(command_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
