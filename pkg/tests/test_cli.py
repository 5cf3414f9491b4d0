"""
Tests for the command line interface.
"""
import json
import sys

import pytest

from crvec.cli import main


def _run(monkeypatch, *args):
    monkeypatch.setattr(sys, "argv", ["crvec"] + list(args))
    with pytest.raises(SystemExit) as excinfo:
        main()
    return excinfo.value.code


def test_no_command(monkeypatch, capsys):
    assert _run(monkeypatch) == 2
    assert "gen-tables" in capsys.readouterr().out


def test_verify_strided_range(monkeypatch, capsys, tables, tmp_path):
    report_path = str(tmp_path / "verify.json")
    code = _run(monkeypatch, "verify", "--fn", "exp2f", "--range", "1:2", "--stride", "2^16", "--report", report_path)
    assert code == 0
    assert "exp2f" in capsys.readouterr().out
    with open(report_path, "r", encoding="utf-8") as fin:
        data = json.load(fin)
    assert data["function"] == "exp2f"
    assert data["mismatch_count"] == 0


def test_verify_report_is_reproducible(monkeypatch, capsys, tables, tmp_path):
    texts = []
    for name, jobs in (("a.json", "0"), ("b.json", "0"), ("c.json", "2")):
        path = tmp_path / name
        args = ["verify", "--fn", "log2f", "--mode", "rd", "--stride", "2^18", "--boundaries", "--radius", "4",
                "--random", "300", "--seed", "5"]
        assert _run(monkeypatch, *(args + ["--jobs", jobs, "--report", str(path)])) == 0
        texts.append(path.read_bytes())
    assert texts[0] == texts[1] == texts[2]
    assert b"wall_time" not in texts[0]


def test_callouts_report_is_reproducible(monkeypatch, tables, tmp_path):
    texts = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        assert _run(monkeypatch, "callouts", "--fn", "log", "--n", "400", "--seed", "9", "--json", str(path)) == 0
        texts.append(path.read_bytes())
    assert texts[0] == texts[1]


def test_corpus(monkeypatch, tables, tmp_path):
    report_path = str(tmp_path / "corpus.json")
    assert _run(monkeypatch, "corpus", "--fn", "log", "--report", report_path) == 0
    with open(report_path, "r", encoding="utf-8") as fin:
        assert json.load(fin)["inputs_tested"] > 0


def test_corpus_disagreement_fails(monkeypatch, tables, tmp_path):
    path = tmp_path / "exp2.txt"
    path.write_text("0x1p+0,0x1.8p+1\n", encoding="utf-8")
    assert _run(monkeypatch, "corpus", "--fn", "exp2", "--file", str(path)) == 1


def test_callouts(monkeypatch, tables, tmp_path):
    json_path = str(tmp_path / "callouts.json")
    code = _run(monkeypatch, "callouts", "--fn", "exp2", "--uniform", "-1:1", "--n", "800", "--json", json_path)
    assert code == 0
    with open(json_path, "r", encoding="utf-8") as fin:
        assert json.load(fin)["n"] == 800


def test_consistency(monkeypatch, capsys, tables):
    code = _run(monkeypatch, "consistency", "--fn", "log2f", "--n", "512", "--scalar-lanes", "32", "--mode", "all")
    assert code == 0
    assert "log2f" in capsys.readouterr().out


def test_hardcases(monkeypatch, capsys, tmp_path):
    json_path = str(tmp_path / "hard.json")
    code = _run(monkeypatch, "hardcases", "--fn", "log2f", "--range", "1:1.0001", "--top", "3", "--json", json_path)
    assert code == 0
    assert "Hardest cases of log2f" in capsys.readouterr().out
    with open(json_path, "r", encoding="utf-8") as fin:
        data = json.load(fin)
    assert len(data["ranked"]) == 3
    assert [case["bits"] for case in data["exact"]] == ["0x3f800000"]


def test_bench_needs_two_variants(monkeypatch, capsys):
    assert _run(monkeypatch, "bench", "--fn", "exp2f", "--variants", "batch16") == 2
    assert "two variants" in capsys.readouterr().err


def test_bench_rejects_small_measurements(monkeypatch, capsys):
    assert _run(monkeypatch, "bench", "--fn", "exp2f", "--variants", "batch16,batch8", "--n", "1000") == 2
    assert "Error" in capsys.readouterr().err


def test_bench_rejects_small_slow_measurements(monkeypatch, capsys):
    assert _run(monkeypatch, "bench", "--fn", "exp2f", "--variants", "scalar,batch16", "--slow-n", "1000") == 2
    assert "slow_elements" in capsys.readouterr().err


def test_bench_rejects_invalid_variant(monkeypatch):
    assert _run(monkeypatch, "bench", "--fn", "exp2f", "--variants", "batch16,main8") == 2


@pytest.mark.slow
def test_gen_tables_check_missing_artifact(monkeypatch, tmp_path):
    missing = str(tmp_path / "missing.txt")
    assert _run(monkeypatch, "gen-tables", "--check", "--no-certify", "--out", missing) == 1


@pytest.mark.slow
def test_gen_tables_writes_and_checks(monkeypatch, tmp_path):
    path = str(tmp_path / "tables.txt")
    assert _run(monkeypatch, "gen-tables", "--no-certify", "--out", path) == 0
    assert _run(monkeypatch, "gen-tables", "--check", "--no-certify", "--out", path) == 0
