import json

import pytest

from aangait.cli import main

SMALL = {
    "name": "cli-test",
    "seed": 9,
    "protocol": {
        "sessions": [
            {"name": "BSLN", "mode": "transparent", "strides": 30},
            {"name": "T-1", "mode": "aan", "strides": 25},
            {"name": "PT-1", "mode": "transparent", "strides": 10},
        ],
        "baseline_window": 15,
    },
}


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(SMALL))
    return path


def test_validate_defaults_ok(capsys):
    assert main(["validate"]) == 0
    assert "valid" in capsys.readouterr().out


def test_validate_reports_every_violation(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({
        "supervisor": {"lower_bound": 9.0},
        "force_field": {"tau_max": -1.0},
    }))
    assert main(["validate", "--config", str(path)]) == 1
    err = capsys.readouterr().err
    assert "lower_bound" in err
    assert "tau_max" in err


def test_validate_rejects_unparseable_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["validate", "--config", str(path)]) == 1


def test_usage_errors_exit_two(capsys):
    assert main(["frobnicate"]) == 2
    assert main(["run", "--no-such-flag"]) == 2
    assert main([]) == 2
    capsys.readouterr()


def test_run_twice_is_byte_identical(tmp_path, small_config):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert main(["run", "--config", str(small_config), "--seed", "7",
                 "--out", str(out1), "--quiet"]) == 0
    assert main(["run", "--config", str(small_config), "--seed", "7",
                 "--out", str(out2), "--quiet"]) == 0
    for name in ("strides.csv", "summary.json", "config.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    summary = json.loads((out1 / "summary.json").read_text())
    assert summary["seed"] == 7
    assert summary["run_id"] == "cli-test-s7"


def test_metrics_reproduces_summary(tmp_path, small_config):
    out = tmp_path / "run"
    assert main(["run", "--config", str(small_config), "--out", str(out),
                 "--quiet"]) == 0
    before = (out / "summary.json").read_bytes()
    assert main(["metrics", "--out", str(out), "--quiet"]) == 0
    assert (out / "summary.json").read_bytes() == before


def test_metrics_flags_divergent_summary(tmp_path, small_config):
    out = tmp_path / "run"
    main(["run", "--config", str(small_config), "--out", str(out), "--quiet"])
    summary = json.loads((out / "summary.json").read_text())
    summary["seed"] = 999
    (out / "summary.json").write_text(json.dumps(summary))
    assert main(["metrics", "--out", str(out), "--quiet"]) == 1
    # and it restores the recomputed version
    assert main(["metrics", "--out", str(out), "--quiet"]) == 0


def test_metrics_requires_run_directory(tmp_path):
    assert main(["metrics", "--out", str(tmp_path / "nope")]) == 1


def test_sweep_runs_every_cell(tmp_path):
    config = dict(SMALL)
    config["sweep"] = {"seed": [1, 2], "subject.learn_gain": [0.0, 0.1]}
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps(config))
    out = tmp_path / "cells"
    assert main(["sweep", "--config", str(path), "--out", str(out),
                 "--quiet"]) == 0
    index = json.loads((out / "sweep.json").read_text())
    assert len(index["cells"]) == 4
    for cell in index["cells"]:
        cell_dir = out / cell["cell"]
        assert (cell_dir / "summary.json").exists()
        summary = json.loads((cell_dir / "summary.json").read_text())
        assert summary["seed"] == cell["overrides"]["seed"]
        assert summary["config"]["subject"]["learn_gain"] == \
            cell["overrides"]["subject.learn_gain"]


def test_sweep_requires_sweep_section(tmp_path, small_config):
    assert main(["sweep", "--config", str(small_config),
                 "--out", str(tmp_path / "x")]) == 1


def test_run_rejects_invalid_config(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"pi2": {"exploration_strides": 0}}))
    assert main(["run", "--config", str(path),
                 "--out", str(tmp_path / "o")]) == 1


def test_run_unwritable_output_fails_cleanly(tmp_path, small_config):
    blocker = tmp_path / "blocker"
    blocker.write_text("a file, not a directory")
    assert main(["run", "--config", str(small_config),
                 "--out", str(blocker / "nested"), "--quiet"]) == 1


def test_run_honors_config_out_dir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    config = dict(SMALL, out_dir="from-config")
    path = tmp_path / "c.json"
    path.write_text(json.dumps(config))
    assert main(["run", "--config", str(path), "--quiet"]) == 0
    assert (tmp_path / "from-config" / "summary.json").exists()


def test_shipped_default_config_matches_builtin_defaults():
    from pathlib import Path

    from aangait.config import DEFAULTS
    shipped = Path(__file__).resolve().parent.parent / "configs/default.json"
    assert json.loads(shipped.read_text()) == DEFAULTS
    assert main(["validate", "--config", str(shipped), "--quiet"]) == 0
