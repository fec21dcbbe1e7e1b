import csv
import io
import json
from importlib.resources import files

import jsonschema
import pytest

from metrobounds.cli import EXIT_OK, EXIT_SCALE, EXIT_SOLVER, EXIT_USAGE, main, parse_grid, to_json

SCHEMA = json.loads(files("metrobounds").joinpath("report.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    assert code == EXIT_OK
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    return doc


def run_csv(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    assert code == EXIT_OK
    return list(csv.DictReader(io.StringIO(out)))


def test_bounds_json(capsys):
    doc = run_json(capsys, "bounds", "--model", "dephasing", "--eta", "0.9")
    assert doc["bounds"]["ce"]["value"] == pytest.approx(4.26315789472, rel=1e-9)
    doc = run_json(capsys, "bounds", "--model", "loss", "--eta", "0.5")
    assert doc["bounds"]["rld"]["applicability"] == "phi_extremal"


def test_output_is_deterministic(capsys):
    argv = ("bounds", "--model", "depolarization", "--eta", "0.7")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_out_file(tmp_path, capsys):
    target = tmp_path / "b.json"
    code, out, _ = run(capsys, "ghz", "--eta", "0.5", "--out", str(target))
    assert code == EXIT_OK and out == ""
    doc = json.loads(target.read_text())
    jsonschema.validate(doc, SCHEMA)
    assert doc["chi"] == pytest.approx(6 * 0.25 / 1.75, rel=1e-10)


def test_table_sql_csv(capsys):
    rows = run_csv(capsys, "table", "sql", "--eta", "0.5")
    dep = next(r for r in rows if r["model"] == "depolarization")
    assert float(dep["ce"]) == pytest.approx(0.5, rel=1e-8)


def test_table_freq(capsys):
    rows = run_csv(capsys, "table", "freq", "--eta", "0.5")
    deph = next(r for r in rows if r["model"] == "dephasing")
    assert float(deph["plain"]) == pytest.approx(1 / (2 * 2.718281828459045), rel=1e-9)


def test_table_grid_json(capsys):
    doc = run_json(capsys, "table", "chqfi", "--eta-grid", "0.2:0.4:0.1", "--json")
    assert sorted({r["eta"] for r in doc["rows"]}) == pytest.approx([0.2, 0.3, 0.4])


def test_finite_n(capsys):
    rows = run_csv(capsys, "finite-n", "--model", "dephasing", "--eta", "0.5", "--n", "1,10")
    assert [float(r["value"]) for r in rows] == pytest.approx([0.25, 10 / 31], rel=1e-8)


def test_mz_bayes_alpha_out(tmp_path, capsys):
    alpha = tmp_path / "alpha.csv"
    doc = run_json(capsys, "mz", "bayes", "--eta-a", "1", "--eta-b", "1", "--n", "2", "--json", "--alpha-out", str(alpha))
    assert doc["rows"][0]["minimal_cost"] == pytest.approx(2 - 2**0.5, rel=1e-10)
    assert alpha.exists()


def test_binomial(capsys):
    doc = run_json(capsys, "binomial", "--n", "4", "--k", "2")
    assert doc["record"]["fi"] == 4.0


def test_exit_codes(capsys):
    assert run(capsys, "bounds", "--model", "dephasing", "--eta", "2")[0] == EXIT_USAGE
    assert run(capsys, "table", "chqfi", "--eta-grid", "0.5:0.4:0.1")[0] == EXIT_USAGE
    assert run(capsys, "mz", "freq", "--eta-a", "0.9", "--eta-b", "0.9", "--n", "300")[0] == EXIT_SCALE
    with pytest.raises(SystemExit) as info:
        main(["bounds"])
    assert info.value.code == EXIT_USAGE


def test_solver_failure_exit(monkeypatch, capsys):
    from metrobounds import interferometer
    from metrobounds.errors import ConvergenceFailure

    def boom(*args, **kwargs):
        raise ConvergenceFailure("stalled")

    monkeypatch.setattr(interferometer, "optimize_frequentist_input", boom)
    code, _, err = run(capsys, "mz", "freq", "--eta-a", "0.9", "--eta-b", "0.9", "--n", "3")
    assert code == EXIT_SOLVER
    assert "stalled" in err


def test_parse_grid_and_negative_zero():
    assert parse_grid("0:1:0.5") == pytest.approx([0.0, 0.5, 1.0])
    assert '"x": 0.0' in to_json({"x": -0.0})
