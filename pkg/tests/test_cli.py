import json

import pytest

from monoloc.cli import ConfigError, main, validate_config

SAW = {"kind": "sawtooth", "lambda": 20}


def run(tmp_path, cfg, command, *extra, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    out = tmp_path / f"out_{command}_{name}"
    code = main([command, "--config", str(p), "--out", str(out), *extra])
    return code, out


def test_cf_golden(tmp_path):
    code, out = run(tmp_path, {"frequency": {"kind": "golden"}}, "cf")
    assert code == 0
    rep = json.loads((out / "cf_report.json").read_text())
    assert rep["convergents"][5] == [5, 8]
    assert all(c["anchor"] for c in rep["checks"])
    assert (out / "beta.csv").exists() and (out / "three_distance.csv").exists()


def test_config_pointer():
    with pytest.raises(ConfigError) as e:
        validate_config({"frequency": {"coefficients": [0, 1, -3]}})
    assert e.value.pointer == "/frequency/coefficients/2"
    with pytest.raises(ConfigError) as e:
        validate_config({"verify": {"tolerances": {"nonsense": 1.0}}})
    assert e.value.pointer == "/verify/tolerances/nonsense"


def test_exit_config(tmp_path, capsys):
    code, _ = run(tmp_path, {"frequency": {"coefficients": [0, 1, -3]}}, "cf")
    assert code == 2
    assert "/frequency/coefficients/2" in capsys.readouterr().err
    # unbounded potential without an explicit energy window
    code, _ = run(tmp_path, {"potential": {"kind": "log_singular", "lambda": 5, "mu": 1}}, "ids")
    assert code == 2
    code, _ = run(tmp_path, {}, "cf", "--precision-bits", "32")
    assert code == 2


def test_exit_precision(tmp_path):
    cfg = {"frequency": {"kind": "liouville", "prefix": [0, 1, 1, 1, 1, 1, 1],
                         "beta_target": 30, "precision_bits": 64}}
    code, _ = run(tmp_path, cfg, "cf")
    assert code == 3


def test_ids_and_ldt(tmp_path):
    cfg = {"frequency": {"kind": "golden"}, "potential": SAW,
           "energies": {"values": [-0.5, 3.3, 12.0]}, "scales": {"n": [55, 89]}}
    assert run(tmp_path, cfg, "ids")[0] == 0
    code, out = run(tmp_path, cfg, "ldt")
    assert code == 0
    rep = json.loads((out / "ldt_report.json").read_text())
    assert rep["checks"] and all("slack" in c for c in rep["checks"])


def test_localize_and_inconclusive(tmp_path):
    cfg = {"frequency": {"kind": "golden"}, "potential": SAW,
           "energies": {"values": [3.3]}, "localize": {"n": 987, "x": 0.1}}
    assert run(tmp_path, cfg, "localize")[0] == 0
    weak = dict(cfg, potential={"kind": "sawtooth", "lambda": 0.5}, energies={"values": [0.3]})
    assert run(tmp_path, weak, "localize", name="weak.json")[0] == 4


def test_verify_tightened_fails(tmp_path):
    cfg = {"verify": {"criteria": [5], "tolerances": {"thouless_transfer_rel": 1e-9}}}
    code, out = run(tmp_path, cfg, "verify")
    assert code == 1
    assert (out / "timings.csv").exists()
    cfg = {"verify": {"criteria": [5]}}
    assert run(tmp_path, cfg, "verify", name="ok.json")[0] == 0


def test_deterministic_across_threads(tmp_path, monkeypatch):
    cfg = {"frequency": {"kind": "golden"}, "potential": SAW,
           "energies": {"values": [-0.5, 3.3, 12.0, 19.0]}, "scales": {"n": [55, 89, 144]}}
    outs = []
    for threads in ("1", "4", "4"):
        monkeypatch.setenv("MONOLOC_THREADS", threads)
        code, out = run(tmp_path, cfg, "ldt", name=f"t{threads}_{len(outs)}.json")
        assert code == 0
        outs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    assert outs[0] == outs[1] == outs[2]
