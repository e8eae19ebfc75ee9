from __future__ import annotations

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from pnkunits.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from pnkunits.constructions import make_enriques
from pnkunits.scenario_io import dumps, scenario_to_dict

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "scenarios"
GOLDEN = Path(__file__).resolve().parent / "golden"
REGEN = os.environ.get("PNKUNITS_REGEN_GOLDEN") == "1"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _golden(name: str, text: str):
    path = GOLDEN / name
    if REGEN:
        path.write_text(text, encoding="utf-8")
    assert text == path.read_text(encoding="utf-8")


VALID = sorted(CORPUS.glob("*.json"))
INVALID = sorted((CORPUS / "invalid").glob("*.json"))


@pytest.mark.parametrize("path", VALID, ids=lambda p: p.stem)
def test_check_matches_golden(capsys, path):
    code, out, _ = run(capsys, "check", str(path))
    assert code == EXIT_OK
    _golden(path.stem + ".txt", out)
    # byte-stable across runs
    assert run(capsys, "check", str(path))[1] == out


@pytest.mark.parametrize("path", INVALID, ids=lambda p: p.stem)
def test_invalid_corpus_fails_check(capsys, path):
    code, out, _ = run(capsys, "check", str(path))
    assert code == EXIT_FAIL
    _golden(path.stem + ".txt", out)


def test_enumerate_matches_golden(capsys):
    code, out, _ = run(capsys, "enumerate", "--n", "3", "--k", "4")
    assert code == EXIT_OK
    _golden("enumerate-n3-k4.txt", out)


def test_check_enriques_summary(capsys, tmp_path):
    p = tmp_path / "e.json"
    p.write_text(dumps(make_enriques(2)), encoding="utf-8")
    code, out, _ = run(capsys, "check", str(p))
    assert code == EXIT_OK
    assert out.splitlines()[-1] == "exceptional; ω order 3"


def test_nonexample_summary_uses_superscript(capsys):
    code, out, _ = run(capsys, "check", str(CORPUS / "nonexample-cy8-cy4.json"))
    assert out.splitlines()[-1] == "classification: none (generation fails at x²); ω order 1"


def test_json_format(capsys):
    code, out, _ = run(capsys, "check", str(CORPUS / "wreath-n2-k1.json"), "--format", "json")
    data = json.loads(out)
    assert data["schema"] == 1
    assert data["report"]["group_order"] == 27
    assert data["mismatches"] == []
    # common flags also work before the subcommand
    code2, out2, _ = run(capsys, "--format", "json", "check", str(CORPUS / "wreath-n2-k1.json"))
    assert out2 == out


def test_quiet(capsys):
    code, out, _ = run(capsys, "check", "--quiet", str(CORPUS / "enriques-n2.json"))
    assert code == EXIT_OK and out == ""


def test_expected_mismatch_exits_one(capsys, tmp_path):
    d = scenario_to_dict(make_enriques(2))
    d["expected"]["omega_order"] = 2
    p = tmp_path / "m.json"
    p.write_text(json.dumps(d), encoding="utf-8")
    code, out, err = run(capsys, "check", str(p))
    assert code == EXIT_FAIL
    assert "expected omega order 2, got 3" in err


def test_malformed_file_exits_two(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json", encoding="utf-8")
    code, _, err = run(capsys, "check", str(p))
    assert code == EXIT_USAGE
    assert "line 1 column" in err
    code, _, err = run(capsys, "check", str(tmp_path / "missing.json"))
    assert code == EXIT_USAGE


def test_missing_field_is_reported_by_path(capsys, tmp_path):
    d = scenario_to_dict(make_enriques(2))
    del d["factors"][0]["kind"]
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(d), encoding="utf-8")
    code, _, err = run(capsys, "check", str(p))
    assert code == EXIT_USAGE
    assert "factors[0].kind" in err


def test_group_cap_overflow_exits_two(capsys):
    code, _, err = run(capsys, "check", "--cap", "5", str(CORPUS / "wreath-n2-k1.json"))
    assert code == EXIT_USAGE and "cap" in err
    assert run(capsys, "--cap", "0", "check", str(CORPUS / "wreath-n2-k1.json"))[0] == EXIT_USAGE


def test_enumerate_bad_parameters(capsys):
    code, _, err = run(capsys, "enumerate", "--n", "3", "--k", "3")
    assert code == EXIT_USAGE
    assert "even k" in err


def test_enumerate_json(capsys):
    code, out, _ = run(capsys, "enumerate", "--n", "2", "--k", "4", "--format", "json")
    data = json.loads(out)
    assert {"HK(2)×HK(2)", "K3×K3×HK(2)"} <= set(data["survivors"])


def test_construct_round_trips_through_check(capsys, tmp_path):
    code, out, _ = run(capsys, "construct", "wreath", "--n", "2", "--k", "1")
    assert code == EXIT_OK
    p = tmp_path / "w.json"
    p.write_text(out, encoding="utf-8")
    code, out, _ = run(capsys, "check", str(p))
    assert code == EXIT_OK
    assert out.splitlines()[-1] == "P^2[8]-unit; ω order 1"


def test_construct_errors_print_usage(capsys):
    code, _, err = run(capsys, "construct", "wreath", "--n", "2")
    assert code == EXIT_USAGE
    assert "usage:" in err and "--k" in err
    code, _, err = run(capsys, "construct", "mixed-n2", "--e", "3")
    assert code == EXIT_USAGE
    assert run(capsys, "construct", "unknown-recipe")[0] == EXIT_USAGE


def test_invariants_subcommand(capsys):
    code, out, _ = run(capsys, "invariants", str(CORPUS / "mixed-n2-e2.json"), "--degree", "4")
    assert code == EXIT_OK
    assert out.strip() == "y·z₁ + ζ4·y·z₂"
    code, out, _ = run(capsys, "invariants", str(CORPUS / "enriques-n2.json"))
    assert out.strip() == "degree 0:\n  1"
    code, out, _ = run(capsys, "invariants", str(CORPUS / "enriques-n2.json"), "--format", "json")
    assert json.loads(out)["basis"]["2"] == []
    assert run(capsys, "invariants", str(CORPUS / "enriques-n2.json"), "--degree", "-1")[0] == EXIT_USAGE


def test_stdin_and_module_entry_point():
    text = (CORPUS / "enriques-n2.json").read_text(encoding="utf-8")
    proc = subprocess.run([sys.executable, "-m", "pnkunits", "check", "-"], input=text,
                          capture_output=True, text=True, check=False)
    assert proc.returncode == EXIT_OK
    assert proc.stdout.splitlines()[-1] == "exceptional; ω order 3"
