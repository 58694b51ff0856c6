from __future__ import annotations

import json
import os

import pytest

from concentric.cli import (
    RunConfig,
    cmd_graph_demo,
    cmd_lemma_suite,
    cmd_validate,
    cmd_verify,
    main,
    strip_timing,
)
from concentric.core import ConcentricPresentation, dump_presentation
from concentric.instances import c2m


def run_main(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr()


def test_run_config_rejects_bad_budgets():
    with pytest.raises(ValueError):
        RunConfig("search", workers=0)
    with pytest.raises(ValueError):
        RunConfig("search", max_exhaustive_m=0)


def test_validate_all_zero_abelian_instance_exits_zero():
    code, doc = cmd_validate(c2m())
    assert code == 0 and doc["ok"] and not doc["tightly_concentric"]


def test_validate_structural_error_exits_one(tmp_path, capsys):
    path = tmp_path / "bad.json"
    dump_presentation(ConcentricPresentation(7, 7, ((1,),)), str(path))
    code, out = run_main(["validate", "--input", str(path)], capsys)
    assert code == 1
    assert json.loads(out.out)["structural_ok"] is False


def test_validate_non_maximal_diameter_exits_two():
    code, _ = cmd_validate(ConcentricPresentation(7, 5, ((0, 0), (0, 0, 0))))
    assert code == 2


def test_missing_input_exits_one(tmp_path, capsys):
    code, out = run_main(["validate", "--input", str(tmp_path / "nope.json")], capsys)
    assert code == 1 and "cannot read" in out.err


@pytest.mark.parametrize("name", ["c2m", "d8"])
def test_search_writes_rejection_documents(name, tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _ = run_main(["search", "--instance", name, "--out", str(out)], capsys)
    doc = json.loads(out.read_text())
    assert code == 1 and doc["status"] == "rejected"
    vcode, _ = cmd_verify(doc)
    assert vcode == 0


def test_search_and_verify_round_trip(tmp_path, capsys):
    out = tmp_path / "cert.json"
    code, _ = run_main(["search", "--instance", "tc7", "--seed", "3", "--out", str(out)], capsys)
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["regime"] == "exploratory" and doc["status"] == "certified"
    code, res = run_main(["verify", str(out)], capsys)
    assert code == 0 and json.loads(res.out)["ok"]

    doc["tau"] = doc["tau"][:2] + ("0" if doc["tau"][2] == "1" else "1") + doc["tau"][3:]
    tampered = tmp_path / "tampered.json"
    tampered.write_text(json.dumps(doc))
    code, _ = run_main(["verify", str(tampered)], capsys)
    assert code == 2


def test_output_is_sorted_json(h7m9_certificate):
    text = json.dumps(h7m9_certificate, sort_keys=True, indent=2)
    assert list(json.loads(text)) == sorted(h7m9_certificate)
    assert "timing" not in strip_timing(h7m9_certificate)


def test_verify_malformed_certificate(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text("[1, 2]")
    code, _ = run_main(["verify", str(path)], capsys)
    assert code == 1
    code, _ = cmd_verify({"format": "concentric-certificate/1", "presentation": {"m": 7}})
    assert code == 1


def test_resource_cap_exit_code(capsys):
    code, out = run_main(["search", "--instance", "tc7", "--max-memory-mb", "1"], capsys)
    assert code == 3 and "resource cap" in out.err


def test_lemma_suite_table(capsys):
    code, out = run_main(["lemma-suite", "wreath"], capsys)
    assert code == 0
    assert out.out.count("PASS") == 2


def test_lemma_suite_reports_the_known_false_bound():
    code, doc = cmd_lemma_suite("tau")
    row = next(r for r in doc["checks"] if r["name"] == "tau.solution_count_quarter_bound")
    assert not row["ok"] and row["as_expected"]
    assert code == 0


def test_lemma_suite_unknown_selector(capsys):
    code, out = run_main(["lemma-suite", "nosuch"], capsys)
    assert code == 1


@pytest.mark.parametrize("name", ["holt", "orbital-demo", "coset-demo"])
def test_graph_demos(name):
    code, doc, data = cmd_graph_demo(name, "dot")
    assert code == 0 and doc["verdict"] == "HAT" and doc["vertices"] == 27
    assert data.startswith(b"graph G {")


def test_graph_demo_writes_file(tmp_path, capsys):
    out = tmp_path / "holt.graphml"
    code, res = run_main(["graph-demo", "holt", "--format", "graphml", "--out", str(out)], capsys)
    assert code == 0 and out.read_bytes().startswith(b"<?xml")
    assert json.loads(res.out)["transitivity"]["arc_transitive"] is False


def test_memory_cap_does_not_leak(capsys, monkeypatch):
    monkeypatch.delenv("CONCENTRIC_MAX_MEMORY_MB", raising=False)
    run_main(["search", "--instance", "tc7", "--max-memory-mb", "1"], capsys)
    assert "CONCENTRIC_MAX_MEMORY_MB" not in os.environ
