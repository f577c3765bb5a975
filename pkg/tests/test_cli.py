import io

import pytest

from metriclike.cli import run
from metriclike.seqspec import EXAMPLE_3_TEXT


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_stat_limit_example3(tmp_path):
    path = tmp_path / "report.csv"
    code, out, _ = call("stat-limit", "--builtin", "example-3", "--candidate", "2", "--out", str(path))
    assert code == 0
    assert out.startswith("stat-limit: pass")
    text = path.read_text()
    assert "# source: example-3" in text
    assert "2,1/1,1000000,999,0.000999000000,999/1000000,pass" in text


def test_stat_limit_example4_fails():
    assert call("stat-limit", "--builtin", "example-4", "--candidate", "2", "--horizon", "100000")[0] == 1


def test_multiple_candidates_pass_when_one_passes():
    code, out, _ = call("stat-limit", "--builtin", "example-3", "--candidate", "2", "--candidate", "5", "--horizon", "100000")
    assert code == 0
    assert "5: fail" in out


def test_density_squares():
    code, out, _ = call("density", "--set", "squares", "--horizon", "1000000")
    assert code == 0
    assert "final density 0.001000000000" in out


def test_spec_file_and_reports_are_byte_identical(tmp_path):
    spec = tmp_path / "ex3.seq"
    spec.write_text(EXAMPLE_3_TEXT)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for target in (a, b):
        code, _, _ = call("stat-limit", "--spec", str(spec), "--candidate", "2", "--horizon", "10000", "--out", str(target))
    assert a.read_bytes() == b.read_bytes()


def test_stat_cauchy_example4(tmp_path):
    path = tmp_path / "c.csv"
    code, out, _ = call(
        "stat-cauchy", "--builtin", "example-4", "--l", "0", "--eps", "1/2",
        "--grid", "1000,10000", "--tol", "0.03", "--out", str(path),
    )
    assert code == 0
    assert "1/2,10000,2009804,0.020098040000,502451/25000000,pass" in path.read_text()


def test_stat_cauchy_suggests_l():
    code, out, _ = call("stat-cauchy", "--builtin", "example-3", "--eps", "1/2", "--grid", "100,1000")
    assert "l = 0" in out


def test_bounded():
    code, out, _ = call("bounded", "--builtin", "example-3", "--bound", "10", "--horizon", "101")
    assert code == 1
    assert "delta(x_100, x_1) = 11 > 10" in out


def test_extract_and_verify_plan(tmp_path):
    plan = tmp_path / "plan.txt"
    code, out, _ = call("extract-k", "--builtin", "example-3", "--candidate", "2", "--horizon", "100000", "--plan", str(plan))
    assert code == 0
    assert "v = [2, 3, 4, 5, 11]" in out
    code, out, _ = call("verify-k", "--builtin", "example-3", "--plan", str(plan))
    assert code == 0
    plan.write_text(plan.read_text().replace("level 2 v=3", "level 2 v=9"))
    assert call("verify-k", "--builtin", "example-3", "--plan", str(plan))[0] == 1


def test_extract_without_threshold_fails():
    code, out, _ = call("extract-k", "--builtin", "example-3", "--candidate", "5", "--horizon", "10000")
    assert code == 1
    assert "no threshold" in out


def test_verify_k_with_a_set():
    assert call("verify-k", "--builtin", "example-3", "--set", "complement(squares)", "--candidate", "2", "--horizon", "100000")[0] == 0
    assert call("verify-k", "--builtin", "example-3", "--set", "squares", "--candidate", "2", "--horizon", "100000")[0] == 2


def test_theorem4():
    code, out, _ = call("theorem4", "--builtin", "example-3", "--candidate", "2", "--y", "1", "--y", "7/2", "--horizon", "100000")
    assert code == 0
    assert "pointwise bound breaches 0" in out


def test_axioms():
    assert call("axioms", "--space", "max", "--random", "15", "--seed", "3")[0] == 0
    assert call("axioms", "--point", "1", "--point", "irr:pi")[0] == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["frobnicate"],
        [],
        ["stat-limit", "--builtin", "example-3"],
        ["stat-limit", "--builtin", "example-9", "--candidate", "2"],
        ["stat-limit", "--builtin", "example-3", "--spec", "x", "--candidate", "2"],
        ["stat-limit", "--builtin", "example-3", "--candidate", "2", "--eps", "1/2,1"],
        ["stat-limit", "--builtin", "example-3", "--candidate", "2", "--horizon", "-5"],
        ["stat-limit", "--builtin", "example-3", "--candidate", "2", "--tol", "zero"],
        ["stat-limit", "--builtin", "example-4", "--candidate", "0"],
        ["stat-limit", "--spec", "/nonexistent/file.seq", "--candidate", "2"],
        ["stat-cauchy", "--builtin", "example-4", "--grid", "100,10"],
        ["density", "--set", "primes"],
        ["axioms", "--space", "euclid", "--random", "3"],
        ["axioms"],
        ["verify-k", "--builtin", "example-3", "--set", "squares"],
    ],
)
def test_input_errors_exit_3(argv):
    code, out, err = call(*argv)
    assert code == 3
    assert err.startswith("metriclike: error:")
    assert out == ""


def test_malformed_spec_file(tmp_path):
    spec = tmp_path / "bad.seq"
    spec.write_text("space sum\npiece square -> k\n")
    code, _, err = call("stat-limit", "--spec", str(spec), "--candidate", "2")
    assert code == 3
    assert "coverage" in err


def test_runtime_division_by_zero_is_an_input_error(tmp_path):
    spec = tmp_path / "div.seq"
    spec.write_text("space sum\npiece otherwise -> 1 / (n - 7)\n")
    code, _, err = call("stat-limit", "--spec", str(spec), "--candidate", "0", "--horizon", "100")
    assert code == 3
    assert "x_7" in err


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run(
        [sys.executable, "-m", "metriclike", "density", "--set", "arith:2,2", "--horizon", "1000"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "exact density 1/2" in proc.stdout
