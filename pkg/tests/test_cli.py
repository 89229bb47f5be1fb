import hashlib
import json
from pathlib import Path

import pytest

from worldfield import cli
from worldfield.config import DEFAULTS, load_config
from worldfield.errors import ConfigError, ValidationError

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

LINE = {"order": 0, "worldline_id": "inertial",
        "terms": [{"alpha": [0, 0, 0],
                   "coeff": {"family": "gaussian-bump", "params": {"center": 0.0, "width": 0.5}}}]}


def write_json(path, data):
    path.write_text(json.dumps(data))
    return path


def run(command, config, out, *extra):
    code = cli.main([command, "--config", str(config), "--out", str(out), *extra])
    summary = json.loads((out / "summary.json").read_text()) if code == 0 else None
    return code, summary


def test_defaults_and_overrides(tmp_path):
    cfg = load_config(None, {"seed": 5, "out": None})
    assert cfg["seed"] == 5 and cfg["out"] == DEFAULTS["out"]
    with pytest.raises(ConfigError):
        load_config(write_json(tmp_path / "c.json", {"nonsense": 1}))
    with pytest.raises(ConfigError):
        load_config(write_json(tmp_path / "c.json", {"grid": {"l_max": -1}}))
    with pytest.raises(ConfigError):
        load_config(write_json(tmp_path / "c.json", {"eps": {"start": 1e-4, "stop": 1e-2}}))


def test_dump_config(capsys):
    assert cli.main(["hadamard", "--dump-config", "--seed", "9"]) == 0
    assert json.loads(capsys.readouterr().out)["seed"] == 9


def test_hadamard_command_and_manifest(tmp_path):
    code, summary = run("hadamard", CONFIGS / "hadamard.toml", tmp_path)
    assert code == 0
    assert summary["V"][:2] == ["1/4", "1/32"] and summary["bessel_max_deviation"] == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())["artifacts"]
    assert set(manifest) == {"config.json", "recursion.csv", "short_distance.csv", "summary.json"}
    for name, meta in manifest.items():
        data = (tmp_path / name).read_bytes()
        assert hashlib.sha256(data).hexdigest() == meta["sha256"] and len(data) == meta["bytes"]


def test_inertial_detector(tmp_path):
    code, summary = run("detector", CONFIGS / "inertial_detector.toml", tmp_path)
    assert code == 0
    assert all(r is not None and r < 1e-4 for r in summary["ratios"].values())
    assert "rejected" in summary["kms"]


def test_commutator_command(tmp_path):
    code, summary = run("commutator", CONFIGS / "commutator.toml", tmp_path)
    assert code == 0
    near, far = summary["pairs"]
    assert abs(near["G"] - near["oracle"]) <= 1e-4 * abs(near["oracle"])
    assert abs(far["G"]) <= 1e-6 * far["norms"][0] * far["norms"][1]


def test_threads_do_not_change_results(tmp_path):
    run("commutator", CONFIGS / "commutator.toml", tmp_path / "a")
    run("commutator", CONFIGS / "commutator.toml", tmp_path / "b", "--threads", "2")
    a = json.loads((tmp_path / "a" / "summary.json").read_text())
    b = json.loads((tmp_path / "b" / "summary.json").read_text())
    assert a == b


def test_angular_command(tmp_path):
    code, summary = run("angular", CONFIGS / "angular.toml", tmp_path)
    assert code == 0
    spec = summary["spectrum"]
    assert spec[0] > 0 and spec[2] > 0 and max(spec[1], spec[3]) <= 1e-14 * spec[0]


def test_translate_inertial(tmp_path):
    code, summary = run("translate", CONFIGS / "translate_inertial.toml", tmp_path)
    assert code == 0
    assert summary["automorphism"] and summary["dropped"] == 2
    assert summary["composed_state_min_eig"] >= -1e-12
    assert (tmp_path / "channel.json").exists()


def test_translate_beyond_lattice_reports_drops(tmp_path):
    cfg = {"worldlines": [{"id": "inertial", "kind": "inertial"}], "distributions": [LINE],
           "grid": {"radial_panels": 6, "l_max": 0},
           "translate": {"step": 0.5, "count": 3, "shift": 5}}
    code, summary = run("translate", write_json(tmp_path / "c.json", cfg), tmp_path / "o")
    assert code == 0 and summary["dropped"] == 3 and summary["composed_state_min_eig"] is None


def test_exit_code_config_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    assert cli.main(["detector", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    empty = write_json(tmp_path / "e.json", {"omegas": []})
    assert cli.main(["detector", "--config", str(empty), "--out", str(tmp_path / "o")]) == 2
    assert cli.main(["commutator", "--out", str(tmp_path / "o")]) == 2
    missing = write_json(tmp_path / "m.json", {"distributions": [dict(LINE, worldline_id="x")]})
    assert cli.main(["angular", "--config", str(missing), "--out", str(tmp_path / "o")]) == 2
    assert not (tmp_path / "o").exists()


def test_exit_code_numerical(tmp_path):
    cfg = {"distributions": [LINE], "wavefront": {"floor": 2.0, "spatial": 2, "tilted": 2}}
    code, _ = run("wavefront", write_json(tmp_path / "c.json", cfg), tmp_path / "o")
    assert code == 3


def test_exit_code_validation(tmp_path, monkeypatch):
    def fail(*args, **kwargs):
        raise ValidationError("forced")
    monkeypatch.setattr(cli, "translation_map_build", fail)
    code, _ = run("translate", CONFIGS / "translate_inertial.toml", tmp_path)
    assert code == 4
