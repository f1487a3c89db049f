import json
from pathlib import Path

import pytest

from gifpsi.cli import main
from gifpsi.config import load_config, validate_config
from gifpsi.errors import ConfigError
from gifpsi.runner import canonical, run

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _base(**over):
    raw = json.loads((CONFIGS / "standard.json").read_text())
    raw["sampler"]["samples"] = 500
    raw.update(over)
    return raw


def test_bad_config_lists_all_diagnostics():
    with pytest.raises(ConfigError) as info:
        load_config(CONFIGS / "bad.json")
    diags = info.value.diagnostics
    assert "norm.k: must be > 0" in diags
    assert "sampler.seed: required" in diags
    assert "tasks[0].alpha: must lie in open (0,1)" in diags
    assert "tasks[1].sequence: unknown sequence 'nope'" in diags


def test_missing_sampler_block():
    raw = _base()
    del raw["sampler"]
    with pytest.raises(ConfigError, match="sampler.seed: required"):
        validate_config(raw)


def test_seed_override():
    raw = _base()
    del raw["sampler"]["seed"]
    assert validate_config(raw, seed_override=5).sampler.seed == 5
    assert validate_config(_base(), seed_override=9).sampler.seed == 9


def test_exit_codes(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["run", str(CONFIGS / "standard.json"), "-o", str(out)]) == 0
    assert json.loads(out.read_text())["payload"]["summary"]["ok"] == 1
    assert main(["run", str(CONFIGS / "circle_max.json"), "-o", str(out)]) == 1
    tasks = json.loads(out.read_text())["payload"]["tasks"]
    axioms = {v["axiom"] for t in tasks for v in t["violations"]}
    assert {"v", "x"} <= axioms
    assert main(["run", str(CONFIGS / "bad.json")]) == 2
    assert "config error" in capsys.readouterr().err


def test_empty_tasks(tmp_path):
    out = tmp_path / "e.json"
    assert main(["run", str(CONFIGS / "empty.json"), "-o", str(out)]) == 0
    assert json.loads(out.read_text())["payload"]["tasks"] == []


def test_payload_determinism_and_parallel():
    cfg = load_config(CONFIGS / "full.json")
    a, b = run(cfg), run(cfg, parallel=True)
    assert canonical(a.payload) == canonical(b.payload)
    assert a.timing["payload_sha256"] == b.timing["payload_sha256"]
    assert a.exit_code == 0


def test_subcommand_filters_tasks(tmp_path):
    out = tmp_path / "s.json"
    assert main(["analyze-sequence", str(CONFIGS / "full.json"), "-o", str(out),
                 "--payload-only"]) == 0
    kinds = {t["kind"] for t in json.loads(out.read_text())["tasks"]}
    assert kinds == {"analyze-sequence"}
    assert main(["alpha-norm", str(CONFIGS / "standard.json"), "-o", str(out),
                 "--payload-only"]) == 0
    assert json.loads(out.read_text())["tasks"][0]["result"]["alpha"] == 0.5


def test_validate_subcommand(capsys):
    assert main(["validate", str(CONFIGS / "standard.json")]) == 0
    assert json.loads(capsys.readouterr().out)["sampler"]["seed"] == 42
