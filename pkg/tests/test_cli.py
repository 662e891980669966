import json

import pytest

from contextuality import parse_system
from contextuality.cli import main
from contextuality.lp import witness_residuals, build_constraints, system_couplings
from conftest import fixture_path, load_fixture


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_noncontextual(capsys):
    code, out, _ = run(capsys, "analyze", str(fixture_path("staircase-deterministic")))
    assert code == 0
    assert "degree: 0.000000000000" in out
    assert "contextual: no" in out


def test_analyze_pr_box(capsys, golden):
    code, out, _ = run(capsys, "analyze", str(fixture_path("pr-box")))
    assert code == 0
    assert "contextual: yes" in out
    assert f"degree: {float(golden['pr-box']):.12f}" in out
    assert "consistently connected: yes" in out


def test_analyze_assert_noncontextual(capsys):
    code, _, _ = run(capsys, "analyze", str(fixture_path("pr-box")),
                     "--assert-noncontextual")
    assert code == 3
    code, _, _ = run(capsys, "analyze", str(fixture_path("staircase-coins")),
                     "--assert-noncontextual")
    assert code == 0


def test_analyze_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    code, _, err = run(capsys, "analyze", str(bad))
    assert code == 1
    assert "parse error" in err


def test_analyze_capacity_error(capsys):
    code, _, err = run(capsys, "analyze", str(fixture_path("pr-box")),
                       "--max-cells", "4")
    assert code == 2
    assert "limit" in err


def test_analyze_json_format(capsys, golden):
    code, out, _ = run(capsys, "analyze", str(fixture_path("tsirelson")),
                       "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["contextual"] is True
    assert doc["degree"] == pytest.approx(float(golden["tsirelson"]), abs=1e-7)
    assert doc["measured_cells"] == 8


def test_witness_dump_reverifies(tmp_path, capsys):
    out_path = tmp_path / "witness.json"
    code, _, _ = run(capsys, "analyze", str(fixture_path("pr-box")),
                     "--witness", str(out_path))
    assert code == 0
    doc = json.loads(out_path.read_text())
    system = load_fixture("pr-box")
    space, cons = build_constraints(system, system_couplings(system))
    cells = [(e["context"], e["content"]) for e in doc["cells"]]
    assert tuple(cells) == space.cells

    from contextuality import QuasiDistribution
    witness = QuasiDistribution(masses={
        tuple(e["outcome"]): e["q"] for e in doc["masses"]})
    assert max(abs(x) for x in witness_residuals(witness, cons, space)) <= 1e-9


def test_augment_writes_valid_file(tmp_path, capsys):
    out_path = tmp_path / "augmented.json"
    code, out, _ = run(capsys, "augment", str(fixture_path("staircase-coins")),
                       "--fill", "+1", "--out", str(out_path))
    assert code == 0
    assert "cells filled: 4" in out
    augmented = parse_system(out_path.read_text())
    assert augmented.empty_cells() == []


def test_augment_full_system_identity(tmp_path, capsys):
    out_path = tmp_path / "same.json"
    code, out, _ = run(capsys, "augment", str(fixture_path("two-cycle")),
                       "--fill", "-1", "--out", str(out_path))
    assert code == 0
    assert "cells filled: 0" in out
    assert out_path.read_text() == fixture_path("two-cycle").read_text()


def test_augment_bad_map(tmp_path, capsys):
    map_path = tmp_path / "fills.json"
    map_path.write_text(json.dumps({"fills": [
        {"content": "q1", "context": "c1", "value": 1}]}))
    code, _, err = run(capsys, "augment", str(fixture_path("staircase-coins")),
                       "--per-cell", str(map_path))
    assert code == 1
    assert "empty cells" in err


def test_couple_table(capsys):
    code, out, _ = run(capsys, "couple", str(fixture_path("staircase-coins")),
                       "--content", "q1")
    assert code == 0
    assert "marginals" in out
    assert "achieved 1.000000000000 bound 1.000000000000" in out


def test_couple_unknown_content(capsys):
    code, _, err = run(capsys, "couple", str(fixture_path("pr-box")),
                       "--content", "zz")
    assert code == 1
    assert "unknown content" in err


def test_invariance_passes(capsys):
    code, out, _ = run(capsys, "invariance",
                       str(fixture_path("cyclic3-contextual")),
                       "--trials", "5", "--seed", "7")
    assert code == 0
    assert "FAIL" not in out


def test_generate_deterministic_bytes(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        code, _, _ = run(capsys, "generate", "cyclic", "--preset", "pr-box",
                         "--out", str(path))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes() == fixture_path("pr-box").read_bytes()


def test_generate_random_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        code, _, _ = run(capsys, "generate", "random", "--seed", "5",
                         "--contents", "3", "--contexts", "4",
                         "--empty", "2", "--out", str(path))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_generate_rejects_rank_one(capsys):
    code, _, err = run(capsys, "generate", "cyclic", "--n", "1",
                       "--correlations", "1")
    assert code == 1
    assert "rank" in err


def test_generate_custom_cyclic(tmp_path, capsys):
    out_path = tmp_path / "c.json"
    code, _, _ = run(capsys, "generate", "cyclic",
                     "--correlations", "1/2,-1/2,1/2",
                     "--out", str(out_path))
    assert code == 0
    system = parse_system(out_path.read_text())
    assert len(system.contexts) == 3
