import hashlib
import json
import subprocess
import sys

import pytest

from almostred import __version__
from almostred.cli import main
from almostred.config import config_hash, parse_config
from almostred.errors import InvalidConfig

AMO05 = {"schema_version": 1, "frequency": {"kind": "golden"},
         "potential": {"coupling": 0.5, "cos": [1.0]},
         "energies": {"start": -3.2, "stop": 3.2, "num": 17}, "energy": 0.0,
         "heights": [0.0, 0.025, 0.05],
         "classification": {"grid": 256, "N_max": 4096, "uh_n_max": 4096, "rotation_N": 5000},
         "ids": {"method": "both", "size": 500}}


def write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def run(tmp_path, command, cfg, capsys, out="out"):
    code = main([command, write(tmp_path, cfg), "--out", str(tmp_path / out)])
    return code, capsys.readouterr()


@pytest.mark.parametrize("command", ["cf", "lyap", "accel", "uh", "ids", "classify"])
def test_commands_emit(tmp_path, capsys, command):
    code, cap = run(tmp_path, command, AMO05, capsys)
    assert code == 0, cap.err
    doc = json.loads((tmp_path / "out" / f"{command}.json").read_text())
    assert doc["meta"]["version"] == __version__
    assert doc["meta"]["config_sha256"] == config_hash(AMO05)
    assert doc["config"] == AMO05
    raw = (tmp_path / "out" / f"{command}.csv").read_bytes()
    assert b"\r\n" not in raw
    first = raw.decode().splitlines()[0]
    assert config_hash(AMO05) in first and __version__ in first


def test_report_partition(tmp_path, capsys):
    code, _ = run(tmp_path, "report", AMO05, capsys)
    assert code == 0
    doc = json.loads((tmp_path / "out" / "report.json").read_text())
    assert doc["result"]["partition_ok"]
    assert doc["result"]["summary"]["counts"]["sigma_plus"] == 0
    rows = (tmp_path / "out" / "report.csv").read_text().splitlines()
    assert rows[1] == "E,class,L0,accel,rho,ids,err" and len(rows) == 2 + 17


def test_rerun_byte_identical(tmp_path, capsys):
    for out in ("a", "b"):
        for command in ("lyap", "classify", "ids"):
            assert run(tmp_path, command, AMO05, capsys, out)[0] == 0
    for name in ("lyap", "classify", "ids"):
        for ext in ("json", "csv"):
            a = (tmp_path / "a" / f"{name}.{ext}").read_bytes()
            b = (tmp_path / "b" / f"{name}.{ext}").read_bytes()
            assert hashlib.sha256(a).digest() == hashlib.sha256(b).digest()


def test_rational_conjugate_exit_1(tmp_path, capsys):
    cfg = dict(AMO05, frequency={"kind": "decimal", "value": "0.5"}, theta=0.05, eps=0.02)
    code, cap = run(tmp_path, "conjugate", cfg, capsys)
    assert code == 1 and "irrational" in cap.err


def test_schema_mismatch_exit_1(tmp_path, capsys):
    code, cap = run(tmp_path, "cf", dict(AMO05, schema_version=2), capsys)
    assert code == 1 and "schema_version" in cap.err


def test_unknown_command_exit_1(tmp_path, capsys):
    code, cap = run(tmp_path, "plot", AMO05, capsys)
    assert code == 1 and "unknown command" in cap.err


def test_domain_verdict_exit_2(tmp_path, capsys):
    cfg = dict(AMO05, theta=1e-6, eps=0.02)
    code, cap = run(tmp_path, "conjugate", cfg, capsys)
    assert code == 2
    verdict = json.loads(cap.out)
    assert verdict["verdict"] == "WeakHyperbolicity"


@pytest.mark.parametrize("patch, msg", [
    ({"grid": 1000}, "power of two"),
    ({"tol": -1.0}, "positive"),
    ({"classification": {"grid": 300}}, "power of two"),
    ({"conjugacy": {"tol_residual": 0}}, "positive"),
    ({"bogus": 1}, "unknown config keys"),
    ({"potential": {"coupling": 1, "tan": [1]}}, "unknown keys"),
    ({"energies": "all"}, "energies"),
])
def test_config_validation(patch, msg):
    with pytest.raises(InvalidConfig, match=msg):
        parse_config(dict(AMO05, **patch))


def test_potential_scaling():
    cfg = parse_config(dict(AMO05, potential={"coupling": 0.5, "cos": [1.0], "constant": 0.25}))
    assert cfg.potential(0.0).real == pytest.approx(1.25)


def test_hash_is_canonical():
    a = {"schema_version": 1, "frequency": {"kind": "golden"}}
    b = {"frequency": {"kind": "golden"}, "schema_version": 1}
    assert config_hash(a) == config_hash(b)


def test_module_entry_point(tmp_path):
    p = write(tmp_path, AMO05)
    r = subprocess.run([sys.executable, "-m", "almostred.cli", "cf", p, "--out", str(tmp_path / "m")],
                       capture_output=True, text=True)
    assert r.returncode == 0 and (tmp_path / "m" / "cf.csv").exists()
