import json
import subprocess
import sys

import pytest

from gslab.cli import ConfigError, command_dispatch, load_config_file


def _run(argv):
    proc = subprocess.run(
        [sys.executable, "-m", "gslab.cli", *argv],
        capture_output=True, text=True, timeout=600,
    )
    return proc


def test_field_info_ok():
    proc = _run(["field-info", "--D", "2"])
    assert proc.returncode == 0
    out = json.loads(proc.stdout)
    assert out["schema"] == "gslab/1"
    assert out["disc"] == 8
    assert out["eps"] == {"a": "1", "b": "1"}


def test_field_info_not_squarefree():
    proc = _run(["field-info", "--D", "4"])
    assert proc.returncode == 2
    assert "squarefree" in proc.stderr


def test_malformed_flags():
    proc = _run(["field-info", "--D", "two"])
    assert proc.returncode == 2
    proc = _run(["no-such-command"])
    assert proc.returncode == 2


def test_shintani_deterministic():
    a = _run(["shintani", "--D", "3", "--seed", "5"])
    b = _run(["shintani", "--D", "3", "--seed", "5"])
    assert a.returncode == 0
    assert a.stdout == b.stdout  # byte-identical for identical config and seed
    out = json.loads(a.stdout)
    assert out["domain_check"]["ok"]


def test_zeta_command_vanishing_sum():
    proc = _run(["zeta", "--D", "3", "--f", "1", "--p", "13", "--eta", "11", "--m", "2"])
    assert proc.returncode == 0
    out = json.loads(proc.stdout)
    assert out["sum_smoothed"] == 0
    assert out["sum_plain"] == "0"


def test_measure_command():
    proc = _run(["measure", "--D", "2", "--f", "1", "--p", "7", "--eta", "17",
                 "--m", "2", "--b", "all-classes"])
    assert proc.returncode == 0
    out = json.loads(proc.stdout)
    assert len(out["tables"]) == 1  # trivial narrow class group
    table = out["tables"][0]
    assert isinstance(table["total_mass"], int)
    assert all(isinstance(v, int) for v in table["measure"]["entries"].values())


def test_verify_theorem_end_to_end():
    proc = _run(["verify-theorem", "--D", "2", "--f", "1", "--p", "7",
                 "--eta", "auto", "--m", "2"])
    assert proc.returncode == 0
    out = json.loads(proc.stdout)
    assert out["pass"] is True
    report = out["reports"][0]
    assert {c["name"] for c in report["checks"]} == {
        "mult-log-consistency", "unit-pi-log-identity", "end-to-end-log-identity"
    }


def test_config_file_merge(tmp_path):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("# comment\nD=2\np=7\nm=9\n")
    proc = _run(["shintani", "--config", str(cfgfile), "--m", "2", "--seed", "1"])
    assert proc.returncode == 0  # flag overrides the file value of m


def test_config_file_unknown_key(tmp_path):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("Dd=2\n")
    proc = _run(["field-info", "--config", str(cfgfile)])
    assert proc.returncode == 2


def test_config_file_duplicate_warns(tmp_path):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("D=2\nD=3\n")
    proc = _run(["field-info", "--config", str(cfgfile)])
    assert proc.returncode == 0
    assert "duplicate" in proc.stderr
    assert json.loads(proc.stdout)["D"] == 3


def test_env_seed(tmp_path):
    import os

    env = dict(os.environ) | {"GSLAB_SEED": "11"}
    proc = subprocess.run(
        [sys.executable, "-m", "gslab.cli", "shintani", "--D", "2"],
        capture_output=True, text=True, env=env, timeout=600,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["seed"] == 11


def test_dispatch_in_process():
    assert command_dispatch(["field-info", "--D", "5"]) == 0


def test_load_config_file_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("novalue\n")
    with pytest.raises(ConfigError):
        load_config_file(str(bad))
