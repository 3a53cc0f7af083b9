import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from fermbezzle import cli
from fermbezzle.covariance import Covariance
from fermbezzle.serialization import load_covariance, save_covariance


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_report(text):
    return dict(line.split(": ", 1) for line in text.strip().splitlines())


@pytest.fixture
def inputs(tmp_path):
    def write(name, cov):
        path = tmp_path / f"{name}.json"
        save_covariance(path, cov)
        return str(path)
    return write


def test_spectrum_gen_ladder(tmp_path, capsys):
    out = tmp_path / "k.json"
    code, _, _ = run(capsys, "spectrum", "gen", "--model", "ladder", "--n", "16", "--out", str(out))
    assert code == 0
    K = load_covariance(out)
    assert K.dim == 16
    np.testing.assert_allclose(K.eigenvalues, 1 - np.arange(1, 17) / 16)


def test_spectrum_gen_xx_and_stdout(capsys):
    code, out, _ = run(capsys, "spectrum", "gen", "--model", "xx", "--L", "64")
    assert code == 0 and json.loads(out)["dim"] == 32


def test_spectrum_gen_random_is_seeded(capsys):
    a = run(capsys, "spectrum", "gen", "--model", "random", "--n", "3", "--seed", "4")[1]
    b = run(capsys, "spectrum", "gen", "--model", "random", "--n", "3", "--seed", "4")[1]
    assert a == b


@pytest.mark.parametrize("argv", [["--model", "bogus"], ["--model", "xx", "--L", "63"]])
def test_spectrum_gen_bad_input(argv, capsys):
    code, _, err = run(capsys, "spectrum", "gen", *argv)
    assert code == 2 and err.startswith("error:")


def test_bounds_verify(tmp_path, capsys):
    out = tmp_path / "b.csv"
    code, _, _ = run(capsys, "bounds", "verify", "--trials", "20", "--max-modes", "4", "--seed", "1",
                     "--out", str(out))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 20 and all(r["pass"] == "true" for r in rows)
    for r in rows:
        assert float(r["lower"]) <= float(r["exact"]) + 1e-9 <= float(r["upper"]) + 2e-9
    again = tmp_path / "c.csv"
    run(capsys, "bounds", "verify", "--trials", "20", "--max-modes", "4", "--seed", "1", "--out", str(again))
    assert again.read_bytes() == out.read_bytes()


def test_bounds_verify_zero_trials(capsys):
    code, out, _ = run(capsys, "bounds", "verify", "--trials", "0")
    assert code == 0 and out == "eta,lower,exact,upper,pass\n"


def test_bounds_verify_cap(capsys, monkeypatch):
    monkeypatch.delenv("FERMBEZZLE_FOCK_CAP", raising=False)
    code, _, err = run(capsys, "bounds", "verify", "--trials", "1", "--max-modes", "40")
    assert code == 2 and "cap" in err


def test_embezzle_identity(inputs, capsys):
    F = inputs("f", Covariance.diagonal([0.7]))
    code, out, _ = run(capsys, "embezzle", "--K", inputs("k", Covariance.diagonal([0.6, 0.3])),
                       "--F", F, "--G", F)
    rep = parse_report(out)
    assert code == 0 and float(rep["certified_bound"]) == 0.0 and float(rep["bittel_bound"]) == 0.0


def test_embezzle_verify_and_plan(inputs, tmp_path, capsys):
    from fermbezzle.spectra import ladder
    plan = tmp_path / "plan.json"
    code, out, _ = run(capsys, "embezzle", "--K", inputs("k", ladder(8)),
                       "--F", inputs("f", Covariance.diagonal([1.0])),
                       "--G", inputs("g", Covariance.diagonal([0.0])), "--verify", "--out", str(plan))
    rep = parse_report(out)
    assert code == 0
    assert float(rep["exact_distance"]) <= float(rep["certified_bound"]) + 1e-9
    assert rep["theorem_status"].startswith("vacuous")
    assert float(rep["theorem_bound"]) == pytest.approx(11 * float(rep["eps"]) ** 0.25)
    assert json.loads(plan.read_text())["exact_distance"] == float(rep["exact_distance"])

    code, out, _ = run(capsys, "number-dist", "--plan", str(plan))
    rep = parse_report(out)
    assert code == 0 and 0 < float(rep["total_variation"]) <= 1
    assert float(rep["total_system_variation"]) < 1e-12


def test_embezzle_bad_inputs(inputs, tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    one = inputs("one", Covariance.diagonal([0.5]))
    assert run(capsys, "embezzle", "--K", str(bad), "--F", one, "--G", one)[0] == 2
    assert run(capsys, "embezzle", "--K", str(tmp_path / "missing.json"), "--F", one, "--G", one)[0] == 2
    two = inputs("two", Covariance.diagonal([0.5, 0.5]))
    assert run(capsys, "embezzle", "--K", one, "--F", one, "--G", two)[0] == 2


def test_number_dist_malformed(tmp_path, capsys):
    bad = tmp_path / "plan.json"
    bad.write_text(json.dumps({"eps": 0.1}))
    code, _, err = run(capsys, "number-dist", "--plan", str(bad))
    assert code == 2 and "malformed" in err


def sweep_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_sweep_single_row(capsys):
    code, out, _ = run(capsys, "sweep", "--model", "ladder", "--n", "8", "--d", "1")
    rows = sweep_rows(out)
    assert code == 0 and len(rows) == 1
    row = rows[0]
    assert list(row) == cli.SWEEP_HEADER
    assert float(row["exact_distance"]) <= float(row["certified_bound"]) + 1e-9
    assert row["runtime_ms"] == "0"


def test_sweep_grid_and_theorem_column(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, "sweep", "--n", "16,64,256", "--d", "1,2", "--out", str(out))
    rows = sweep_rows(out.read_text())
    assert code == 0 and len(rows) == 6
    for r in rows:
        assert float(r["theorem_bound"]) == pytest.approx(
            11 * int(r["d"]) * float(r["eps_measured"]) ** 0.25, rel=1e-12)
        assert r["exact_distance"] == ""
    assert b"\r" not in out.read_bytes()
    # certified bound shrinks with n at fixed d
    for d in ("1", "2"):
        cert = [float(r["certified_bound"]) for r in rows if r["d"] == d]
        assert cert == sorted(cert, reverse=True)


def test_sweep_deterministic(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        run(capsys, "sweep", "--model", "random", "--n", "5,12", "--seed", "3", "--out", str(p))
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_sweep_timing(capsys):
    _, out, _ = run(capsys, "sweep", "--n", "128", "--timing")
    assert int(sweep_rows(out)[0]["runtime_ms"]) >= 0


@pytest.mark.parametrize("which", ["list-sort", "no-go", "ps-trick", "eta-props"])
def test_lemma_fuzz(which, capsys):
    code, out, _ = run(capsys, "lemma-fuzz", "--which", which, "--iterations", "200", "--seed", "2")
    rep = parse_report(out)
    assert code == 0 and rep["failed"] == "0" and rep["passed"] == "200"


def test_argparse_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["lemma-fuzz", "--which", "nope"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        cli.main(["sweep", "--n", "a,b"])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fermbezzle", "spectrum", "gen", "--model", "ladder",
                           "--n", "2"], capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["dim"] == 2
