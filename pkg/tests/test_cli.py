import json

import pytest

from scholarlink.cli import main
from scholarlink.matcher import read_matches
from scholarlink.reporter import read_table


@pytest.fixture
def tiny_cfg(tiny_dir):
    return str(tiny_dir / "pipeline.cfg")


def run(*args):
    return main([str(a) for a in args])


def test_all_on_tiny(tiny_cfg, tmp_path, capsys):
    assert run("all", "--config", tiny_cfg, "--out", tmp_path) == 0
    rows = read_matches(tmp_path / "matches.csv")
    assert [(r["author_id"], r["tweeter_id"], r["step_id"]) for r in rows] == [
        ("A2", "T2", "1"), ("A5", "T4", "1"), ("A1", "T1", "3"), ("A6", "T5", "3"),
        ("A3", "T3", "5"), ("A7", "T6", "7"),
    ]
    combined = read_table(tmp_path / "table_new_pairs.csv")[-1]
    assert (combined["precision"], combined["recall"], combined["f_score"]) == ("0.833", "0.833", "0.833")
    countries = read_table(tmp_path / "table_countries.csv")
    assert len(countries) <= 3  # top_countries = 2 plus the collapsed row
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["status"] == "ok"
    assert set(manifest["stage_seconds"]) >= {"ingest", "match", "evaluate", "report"}
    assert len(manifest["inputs"]["authors"]["sha256"]) == 64
    assert "precision 0.833" in capsys.readouterr().out


def test_disable_step_keeps_earlier_steps(tiny_cfg, tmp_path):
    assert run("match", "--config", tiny_cfg, "--out", tmp_path / "full") == 0
    assert run("match", "--config", tiny_cfg, "--out", tmp_path / "cut", "--disable-step", "3") == 0
    full = read_matches(tmp_path / "full" / "matches.csv")
    cut = read_matches(tmp_path / "cut" / "matches.csv")
    assert [r for r in full if r["step_id"] in ("1", "2")] == [r for r in cut if r["step_id"] in ("1", "2")]
    assert not [r for r in cut if r["step_id"] == "3"]


def test_env_and_cli_precedence(tiny_cfg, tmp_path, monkeypatch):
    monkeypatch.setenv("SCHOLARLINK_TOP_COUNTRIES", "1")
    assert run("report", "--config", tiny_cfg, "--out", tmp_path / "env") == 0
    assert json.loads((tmp_path / "env" / "manifest.json").read_text())["config"]["top_countries"] == 1
    assert run("report", "--config", tiny_cfg, "--out", tmp_path / "cli", "--top-countries", "5") == 0
    assert json.loads((tmp_path / "cli" / "manifest.json").read_text())["config"]["top_countries"] == 5


def test_config_error_exit_code(tiny_cfg, tmp_path, monkeypatch):
    assert run("match", "--config", tiny_cfg, "--out", tmp_path, "--workers", "0") == 2
    monkeypatch.setenv("SCHOLARLINK_NOPE", "1")
    assert run("match", "--config", tiny_cfg, "--out", tmp_path) == 2


def test_missing_input_exit_code(tmp_path):
    code = run("ingest", "--out", tmp_path, "--authors", tmp_path / "a.csv", "--works", tmp_path / "w.jsonl",
               "--events", tmp_path / "e.csv", "--tweeters", tmp_path / "t.csv")
    assert code == 3
    assert json.loads((tmp_path / "manifest.json").read_text())["status"] == "input error"


def test_variants_export(tiny_cfg, tmp_path):
    assert run("match", "--config", tiny_cfg, "--out", tmp_path, "--export-variants") == 0
    rows = read_table(tmp_path / "variants.csv")
    assert {"owner_id": "A1", "kind": "author", "first_name": "john william", "last_name": "smith",
            "initials": "jw", "first_initial": "j", "first_token": "john"} in rows


def test_synth_then_oracle_check(tmp_path, capsys):
    assert run("synth", "--out", tmp_path / "s", "--seed", "4", "--n-authors", "60", "--n-planted", "15") == 0
    assert (tmp_path / "s" / "truth.csv").exists()
    assert run("all", "--config", tmp_path / "s" / "pipeline.cfg", "--out", tmp_path / "r") == 0
    capsys.readouterr()
    assert run("oracle-check", "--out", tmp_path / "o", "--seed", "4", "--n-authors", "60") == 0
    assert "EQUAL" in capsys.readouterr().out
