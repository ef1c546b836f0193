import json

import pytest

from strathom.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, (json.loads(out) if out.strip().startswith("{") else None)


POSET_A2 = {
    "strata": [{"name": "P1", "dim": 0}, {"name": "P2", "dim": 0},
               {"name": "E1", "dim": 1}, {"name": "E2", "dim": 1},
               {"name": "H1", "dim": 2}, {"name": "H2", "dim": 2}],
    "covers": [["P1", "E1"], ["P1", "E2"], ["P2", "E1"], ["P2", "E2"],
               ["E1", "H1"], ["E1", "H2"], ["E2", "H1"], ["E2", "H2"]],
    "acyclicity_asserted": True,
}

REPS_C = {
    "reps": [{
        "name": "C",
        "stalks": {"P1": 1, "P2": 1, "E1": 1, "E2": 1, "H1": 1, "H2": 1},
        "arrows": {f"({a},{b})": [[1]]
                   for a, b in POSET_A2["covers"]},
    }]
}


@pytest.fixture()
def files(tmp_path):
    poset = tmp_path / "poset.json"
    reps = tmp_path / "reps.json"
    poset.write_text(json.dumps(POSET_A2))
    reps.write_text(json.dumps(REPS_C))
    return str(poset), str(reps)


def test_formality_trivial_passes(capsys):
    code, rep = run_json(capsys, "formality", "trivial", "--ring", "Z")
    assert code == 0
    assert rep["expected"]["pass"]
    assert rep["results"]["h_betti"] == {"0": 1, "2": 1}


def test_formality_npoints_ranks(capsys):
    code, rep = run_json(capsys, "formality", "n-points", "--n", "5")
    assert code == 0
    assert rep["results"]["end_ranks"] == {"-1": 5, "0": 27, "1": 35, "2": 10}
    assert rep["results"]["chain_ok"]


def test_formality_rejects_small_n(capsys):
    code, _ = run(capsys, "formality", "n-points", "--n", "1")
    assert code == 2


def test_formality_rejects_bad_flags(capsys):
    assert main(["formality", "nonsense"]) == 2
    assert main(["no-such-command"]) == 2


def test_formality_rational_ring(capsys):
    code, rep = run_json(capsys, "formality", "one-point", "--ring", "Q")
    assert code == 0
    assert "h_torsion" not in rep["results"]
    assert rep["results"]["h_betti"] == {"0": 2, "1": 2, "2": 1}


def test_report_is_byte_stable(capsys):
    _, out1 = run(capsys, "formality", "trivial")
    _, out2 = run(capsys, "formality", "trivial")
    assert out1 == out2


def test_timing_flag_adds_field(capsys):
    code, rep = run_json(capsys, "formality", "trivial", "--timing")
    assert code == 0
    assert "timing_ms" in rep


def test_out_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out = run(capsys, "formality", "trivial",
                    "--out-file", str(target))
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["expected"]["pass"]


def test_de_rham_scenario(capsys):
    code, rep = run_json(capsys, "formality", "de-rham", "--n", "6")
    assert code == 0
    res = rep["results"]
    assert res["dimension"] == 9
    assert res["h_entry_dims"] == {"(1,1)": 2, "(1,2)": 1,
                                   "(2,1)": 1, "(2,2)": 1}


def test_ext_table_all_vanishing(capsys):
    code, rep = run_json(capsys, "ext-table", "--n", "2", "--qmax", "3")
    assert code == 0
    pairs = rep["pairs"]
    assert len(pairs) == 36
    for cell in pairs.values():
        for q in (1, 2, 3):
            assert cell[f"q{q}"] == [0, []]


def test_ext_table_bad_n(capsys):
    assert main(["ext-table", "--n", "0"]) == 2


def test_ext_table_parallel_is_deterministic(capsys, monkeypatch):
    _, serial = run(capsys, "ext-table", "--n", "2", "--qmax", "1")
    monkeypatch.setenv("STRATHOM_JOBS", "3")
    _, threaded = run(capsys, "ext-table", "--n", "2", "--qmax", "1")
    assert serial == threaded


def test_compute_end_cross_checks_trivial_scenario(files, capsys):
    poset, reps = files
    code, rep = run_json(capsys, "compute", "--poset", poset, "--reps", reps,
                         "--action", "end-with-resolution")
    assert code == 0
    assert rep["results"]["resolution_exact"]
    # same cohomology as the built-in trivial scenario, through a different
    # (coevaluation) resolution
    assert rep["results"]["h_betti"] == {"0": 1, "2": 1}


def test_compute_hom_action(files, capsys):
    poset, reps = files
    code, rep = run_json(capsys, "compute", "--poset", poset, "--reps", reps,
                         "--action", "hom")
    assert code == 0
    assert rep["results"]["hom_ranks"] == {"C->C": 1}


def test_compute_cohomology_action_is_sphere_cohomology(files, capsys):
    poset, reps = files
    code, rep = run_json(capsys, "compute", "--poset", poset, "--reps", reps,
                         "--action", "cohomology", "--qmax", "3")
    assert code == 0
    cell = rep["results"]["cohomology"]["C"]
    assert cell["q0"] == [1, []]
    assert cell["q1"] == [0, []]
    assert cell["q2"] == [1, []]
    assert cell["q3"] == [0, []]


def test_compute_ext_action(files, capsys):
    poset, reps = files
    code, rep = run_json(capsys, "compute", "--poset", poset, "--reps", reps,
                         "--action", "ext", "--qmax", "2")
    assert code == 0
    assert rep["results"]["ext"]["C->C"]["q0"] == [1, []]


def test_compute_empty_poset_rejected(tmp_path, capsys):
    poset = tmp_path / "poset.json"
    reps = tmp_path / "reps.json"
    poset.write_text(json.dumps({"strata": [], "covers": []}))
    reps.write_text(json.dumps(REPS_C))
    assert main(["compute", "--poset", str(poset), "--reps", str(reps),
                 "--action", "hom"]) == 2


def test_compute_schema_violation_diagnostics(tmp_path, capsys):
    poset = tmp_path / "poset.json"
    poset.write_text(json.dumps({"strata": [{"name": 3, "dim": 0}],
                                 "covers": []}))
    reps = tmp_path / "reps.json"
    reps.write_text(json.dumps(REPS_C))
    code = main(["compute", "--poset", str(poset), "--reps", str(reps),
                 "--action", "hom"])
    err = capsys.readouterr().err
    assert code == 2
    assert "strata[0]" in err


def test_compute_bad_matrix_shape(tmp_path, capsys):
    poset = tmp_path / "poset.json"
    poset.write_text(json.dumps(POSET_A2))
    bad = {"reps": [{"name": "V", "stalks": {"P1": 1, "E1": 1},
                     "arrows": {"(P1,E1)": [[1, 2]]}}]}
    reps = tmp_path / "reps.json"
    reps.write_text(json.dumps(bad))
    code = main(["compute", "--poset", str(poset), "--reps", str(reps),
                 "--action", "hom"])
    err = capsys.readouterr().err
    assert code == 2
    assert "shape" in err


def test_compute_malformed_json_line_diagnostics(tmp_path, capsys):
    poset = tmp_path / "poset.json"
    poset.write_text("{\n  broken\n}")
    reps = tmp_path / "reps.json"
    reps.write_text(json.dumps(REPS_C))
    code = main(["compute", "--poset", str(poset), "--reps", str(reps),
                 "--action", "hom"])
    err = capsys.readouterr().err
    assert code == 2
    assert "line 2" in err


def test_tsv_output_contains_table(capsys):
    code, out = run(capsys, "formality", "trivial", "--out", "tsv")
    assert code == 0
    lines = [l for l in out.splitlines() if l]
    assert any(l.startswith("0\th1\t") for l in lines)
    assert len(lines) == 18
