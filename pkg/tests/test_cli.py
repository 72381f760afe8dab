import json

import pytest

from morse_novikov.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, (json.loads(out) if out.strip() else None), err


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return _write


# documented examples ---------------------------------------------------------------


def test_homology_of_bundled_circle(capsys):
    code, rep, _ = run_json(capsys, "homology", "circle.cplx")
    assert code == 0
    assert rep["betti_novikov"] == [0, 0]
    assert rep["seed"] == 0 and rep["command"] == "homology"


def test_homology_of_untwisted_torus(capsys):
    code, rep, _ = run_json(capsys, "homology", "torus.cplx")
    assert code == 0 and rep["betti_novikov"] == [1, 2, 1]


@pytest.mark.parametrize("argv", [
    ("verify", "thm31", "circle_f.fn", "circle.cplx"),
    ("verify", "thm1", "genfun_p1.fn", "circle.cplx"),
    ("verify", "prop26", "genus2.cplx"),
    ("verify", "window", "genus2.cplx", "--radius", "1"),
])
def test_verify_examples_pass(capsys, argv):
    code, rep, _ = run_json(capsys, *argv)
    assert code == 0 and rep["ok"]


def test_verify_chords_reports_two(capsys):
    code, rep, _ = run_json(capsys, "verify", "chords", "pair.fn", "--t", "0")
    assert code == 0
    assert rep["count"] == 2 and len(rep["chords"]["chords"]) == 2


def test_chords_and_sweep_commands(capsys):
    code, rep, _ = run_json(capsys, "chords", "pair.fn", "--t", "0")
    assert code == 0 and rep["count"] == 2
    code, rep, _ = run_json(capsys, "sweep", "pair.fn", "--samples", "5")
    assert code == 0 and rep["paths_agree"] and len(rep["counts"]) == 5


def test_critical_points_command(capsys):
    code, rep, _ = run_json(capsys, "critical-points", "circle_f.fn")
    assert code == 0 and len(rep["points"]) == 2


def test_window_command(capsys):
    code, rep, _ = run_json(capsys, "window", "circle.cplx", "--radius", "1")
    assert code == 0 and rep["ok"]


# exit codes ---------------------------------------------------------------------


def test_malformed_file_is_a_single_line_diagnostic(capsys, write):
    path = write("bad.cplx", "simplicial\ndim one\n")
    code, out, err = run(capsys, "homology", path)
    assert code == 2 and out == ""
    assert len(err.strip().splitlines()) == 1


def test_square_zero_failure_lists_violations(capsys, write):
    path = write("bad.cplx", "explicit\ncells: 1 1 1\nvars 1\nboundary 1: 0 0 t1 - 1\nboundary 2: 0 0 1\n")
    code, _, err = run(capsys, "homology", path)
    assert code == 3 and "violations" in err


def test_cocycle_failure_is_a_validation_error(capsys, write):
    text = ("simplicial\ndim 2\nsimplex 2: 0 1 2\ncocycle 1: 0 1 -> 1\ncocycle 1: 1 2 -> 1\n"
            "cocycle 1: 0 2 -> 0\n")
    code, _, err = run(capsys, "homology", write("bad.cplx", text))
    assert code == 3 and "violations" in err


def test_resource_cap(capsys):
    code, _, err = run(capsys, "window", "genus2.cplx", "--radius", "2", "--cap-cells", "10")
    assert code == 4 and "cap" in err


def test_missed_points_exit_five(capsys):
    # a 2x2 seed grid misses the minimum of the bundled torus function
    code, rep, _ = run_json(capsys, "verify", "thm31", "torus_f.fn", "--grid", "2")
    assert code == 5 and not rep["ok"]
    assert rep["counts"][0] < rep["bound"][0]


def test_class_mismatch_is_usage(capsys):
    code, _, err = run(capsys, "verify", "thm31", "circle_f.fn", "circle_zero.cplx")
    assert code == 2 and "class mismatch" in err


@pytest.mark.parametrize("argv", [
    ("homology", "no_such_file.cplx"),
    ("homology", "circle.cplx", "--primes", "4"),
    ("frobnicate",),
    (),
    ("homology", "circle.cplx", "--trials", "0"),
])
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


# output ---------------------------------------------------------------------------


def test_json_is_deterministic(capsys):
    argv = ("homology", "genus2.cplx", "--mode", "specialized", "--seed", "11")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    assert json.loads(first)["seed"] == 11


def test_report_records_tolerances(capsys):
    _, rep, _ = run_json(capsys, "chords", "pair.fn", "--t", "0.1", "--tol", "1e-11")
    assert rep["tolerances"]["newton"] == 1e-11
    assert rep["params"]["tol"] == 1e-11
    assert rep["clause"]


def test_text_format(capsys):
    code, out, _ = run(capsys, "homology", "circle.cplx", "--format", "text")
    assert code == 0
    assert any(line.startswith("betti_novikov:") for line in out.splitlines())


def test_list_data(capsys):
    code, out, _ = run(capsys, "--list-data")
    names = out.split()
    assert code == 0
    for name in ("circle.cplx", "torus.cplx", "torus_cw.cplx", "genus2.cplx", "rp3_sigma2.cplx", "pair.fn"):
        assert name in names


def test_explicit_path_beats_bundled_name(capsys, write, tmp_path, monkeypatch):
    write("circle.cplx", "simplicial\ndim 1\nsimplex 1: 0 1\nsimplex 1: 1 2\nsimplex 1: 0 2\n")
    monkeypatch.chdir(tmp_path)
    _, rep, _ = run_json(capsys, "homology", "circle.cplx")
    assert rep["betti_novikov"] == [1, 1]
