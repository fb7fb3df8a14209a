"""End-to-end and unit tests for the command-line interface."""

import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from asymloss import Gaussian, Laplace
from asymloss.cli import (
    _CSV_COLUMNS,
    FIXED_CLOCK,
    SCHEMA_VERSION,
    AnalysisReport,
    CliInputError,
    main,
    parse_dist_spec,
    parse_grid_spec,
    read_error_csv,
)

LN2 = math.log(2.0)
GAUSS_C_1TO2 = 0.4307272992954576  # Phi^-1(2/3)


def write_errors(path, values, header="error"):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([header] if header == "error" else ["y", "yhat"])
        for v in values:
            w.writerow([float(v)] if header == "error" else [0.0, float(v)])
    return str(path)


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out else None), out.err


# ----------------------------------------------------------------------
# analyze
# ----------------------------------------------------------------------


class TestAnalyzeParametric:
    ARGS = ["analyze", "--dist", "laplace:b=1", "--k1", "1", "--k2", "3",
            "--seed", "7", "--fixed-clock", "--mc-n", "50000"]

    def test_report_contents(self, capsys):
        code, payload, err = run_json(capsys, self.ARGS)
        assert code == 0
        assert payload["schema_version"] == SCHEMA_VERSION
        assert payload["command"] == "analyze"
        assert payload["generated_at"] == FIXED_CLOCK
        assert payload["verdict"] == "ok"
        assert payload["solution"]["C"] == pytest.approx(LN2, abs=1e-9)
        assert payload["solution"]["variance_at_C"] < payload["solution"]["variance_at_zero"]
        assert payload["distribution"] == {"kind": "laplace", "b": 1.0}
        assert payload["inputs"]["k1"] == 1.0 and payload["inputs"]["k2"] == 3.0
        assert payload["diagnostics"] is None
        assert len(payload["mc_checks"]) == 2
        for check in payload["mc_checks"]:
            assert check["mean_ok"] and check["variance_ok"]
        assert payload["inequality_summary"]["all_passed"] is True
        assert payload["inequality_summary"]["min_margin"] >= -1e-9
        assert "verdict=ok" in err

    def test_deterministic_bytes(self, tmp_path):
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        assert main([*self.ARGS, "--out", str(out1)]) == 0
        assert main([*self.ARGS, "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_report_round_trip(self, capsys):
        _, payload, _ = run_json(capsys, self.ARGS)
        assert AnalysisReport.from_dict(payload).to_dict() == payload


class TestAnalyzeEmpirical:
    def test_gaussian_csv(self, capsys, tmp_path):
        errors = Gaussian(1.0).sample(8_000, seed=21)
        path = write_errors(tmp_path / "e.csv", errors)
        code, payload, _ = run_json(
            capsys,
            ["analyze", "--input", path, "--k1", "1", "--k2", "2",
             "--mc-n", "50000", "--fixed-clock"],
        )
        assert code == 0
        assert payload["verdict"] == "ok"
        assert payload["solution"]["C"] == pytest.approx(GAUSS_C_1TO2, abs=0.05)
        diag = payload["diagnostics"]
        assert diag["n"] == 8_000
        assert diag["sign_warning"] is False
        assert diag["monotonicity_violation_mass"] < 0.6
        assert payload["distribution"]["kind"] == "empirical_symmetric"

    def test_pair_header_equivalent_to_error_header(self, capsys, tmp_path):
        errors = Laplace(1.0).sample(2_000, seed=3)
        # baseline y = 0 keeps yhat - y bit-identical to the raw errors
        p_err = write_errors(tmp_path / "e.csv", errors, header="error")
        p_pair = write_errors(tmp_path / "p.csv", errors, header="pair")
        args = ["--k1", "1", "--k2", "3", "--mc-n", "50000", "--fixed-clock"]
        _, payload_e, _ = run_json(capsys, ["analyze", "--input", p_err, *args])
        _, payload_p, _ = run_json(capsys, ["analyze", "--input", p_pair, *args])
        assert payload_p["solution"] == payload_e["solution"]

    def test_lopsided_errors_refused(self, capsys, tmp_path):
        errors = np.abs(Laplace(1.0).sample(300, seed=5)) + 1e-9
        path = write_errors(tmp_path / "e.csv", errors)
        code = main(["analyze", "--input", path, "--k1", "1", "--k2", "2"])
        assert code == 2
        assert "sign test" in capsys.readouterr().err


class TestAnalyzeInputErrors:
    def test_needs_exactly_one_source(self, tmp_path, capsys):
        assert main(["analyze", "--k1", "1", "--k2", "2"]) == 1
        path = write_errors(tmp_path / "e.csv", [1.0, -1.0] * 20)
        assert main(["analyze", "--dist", "laplace:b=1", "--input", path,
                     "--k1", "1", "--k2", "2"]) == 1
        capsys.readouterr()

    def test_bad_costs(self, capsys):
        assert main(["analyze", "--dist", "laplace:b=1", "--k1", "0", "--k2", "2"]) == 1
        assert main(["analyze", "--dist", "laplace:b=1", "--k1", "1", "--k2", "-3"]) == 1
        capsys.readouterr()

    def test_missing_file(self, capsys):
        assert main(["analyze", "--input", "/nonexistent/e.csv",
                     "--k1", "1", "--k2", "2"]) == 1
        capsys.readouterr()

    @pytest.mark.parametrize("spec", [
        "gamma:sigma=1",          # unknown family
        "gauss",                  # no parameters
        "gauss:sigma=abc",        # unparsable number
        "gg:a=1",                 # missing b
        "gauss:sigma=1,junk=2",   # unknown key
        "laplace:b=0",            # domain violation
    ])
    def test_bad_dist_specs(self, spec, capsys):
        assert main(["analyze", "--dist", spec, "--k1", "1", "--k2", "2"]) == 1
        capsys.readouterr()

    def test_unknown_flag_is_input_error(self, capsys):
        assert main(["analyze", "--dist", "laplace:b=1", "--k1", "1",
                     "--k2", "2", "--frobnicate"]) == 1
        capsys.readouterr()


class TestCsvReader:
    def test_error_and_pair_modes(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("error\n1.5\n-0.5\n\n2.0\n", encoding="utf-8")
        np.testing.assert_array_equal(read_error_csv(str(p)), [1.5, -0.5, 2.0])
        q = tmp_path / "b.csv"
        q.write_text("y,yhat\n10.0,11.5\n3.0,2.0\n", encoding="utf-8")
        np.testing.assert_array_equal(read_error_csv(str(q)), [1.5, -1.0])

    def test_header_required(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("z\n1.0\n", encoding="utf-8")
        with pytest.raises(CliInputError, match="header"):
            read_error_csv(str(p))

    def test_bad_cell_reports_line_number(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("error\n1.0\nnot-a-number\n", encoding="utf-8")
        with pytest.raises(CliInputError, match="line 3"):
            read_error_csv(str(p))

    def test_wrong_field_count_reports_line_number(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("y,yhat\n1.0\n", encoding="utf-8")
        with pytest.raises(CliInputError, match="line 2"):
            read_error_csv(str(p))

    def test_empty_inputs(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("", encoding="utf-8")
        with pytest.raises(CliInputError, match="empty"):
            read_error_csv(str(p))
        p.write_text("error\n", encoding="utf-8")
        with pytest.raises(CliInputError, match="no data"):
            read_error_csv(str(p))


class TestDistSpecParsing:
    def test_families(self):
        d = parse_dist_spec("gg:a=0.5,b=1.5")
        assert d.params() == {"a": 0.5, "b": 1.5}
        assert parse_dist_spec("gauss:sigma=2").params() == {"sigma": 2.0}
        assert parse_dist_spec("laplace:b=0.25").params() == {"b": 0.25}
        assert parse_dist_spec("uniform:w=3").params() == {"w": 3.0}

    def test_whitespace_tolerated(self):
        assert parse_dist_spec("gauss: sigma = 2").params() == {"sigma": 2.0}


# ----------------------------------------------------------------------
# verify
# ----------------------------------------------------------------------


def parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


class TestVerify:
    def test_uniform_family_grid(self, capsys):
        code = main(["verify", "--grid", "uniform:w=1,5;points=60"])
        out = capsys.readouterr()
        assert code == 0
        header, rows = parse_csv(out.out)
        assert tuple(header) == _CSV_COLUMNS
        assert len(rows) == 120
        assert all(r[-1] == "True" for r in rows)
        assert all(r[7] == "" for r in rows)  # no kernel column for uniform
        assert min(float(r[8]) for r in rows) >= -1e-9
        assert "all_passed=True" in out.err

    def test_gg_family_grid_carries_kernel(self, capsys):
        code = main(["verify", "--grid", "gg:a=0.5,1;b=1;points=40;span=6"])
        out = capsys.readouterr()
        assert code == 0
        header, rows = parse_csv(out.out)
        assert len(rows) == 80
        assert rows[0][7] == ""             # x = 0 row
        assert float(rows[1][7]) > 0.0      # interior rows carry eq1
        assert all(r[-1] == "True" for r in rows)

    def test_eq1_grid(self, capsys):
        code = main(["verify", "--grid", "eq1:a=0.5,1;x=1e-3,20,40"])
        out = capsys.readouterr()
        assert code == 0
        header, rows = parse_csv(out.out)
        assert len(rows) == 80
        assert all(r[2] == "" for r in rows)       # alpha is NaN on kernel rows
        assert all(float(r[7]) > 0.0 for r in rows)

    def test_out_file(self, tmp_path, capsys):
        out = tmp_path / "grid.csv"
        code = main(["verify", "--grid", "laplace:b=1;points=30", "--out", str(out)])
        capsys.readouterr()
        assert code == 0
        header, rows = parse_csv(out.read_text(encoding="utf-8"))
        assert tuple(header) == _CSV_COLUMNS and len(rows) == 30

    @pytest.mark.parametrize("grid", [
        "eq1:a=0.5",                 # missing x
        "eq1:a=0.5;x=1,2",           # x needs lo,hi,count
        "eq1:a=0.5;x=1e-3,20,50.5",  # non-integer count
        "eq1:a=0.5;x=5,2,10",        # hi <= lo
        "uniform:w=1;points=1",      # too few points
        "nope:a=1",                  # unknown family
        "uniform:q=1",               # wrong key
        "gg:a=0.5;b=1;span=-1",      # bad span
        "uniform:",                  # empty body
    ])
    def test_bad_grids(self, grid, capsys):
        assert main(["verify", "--grid", grid]) == 1
        capsys.readouterr()

    def test_parse_grid_spec_returns_reports(self):
        reports = parse_grid_spec("laplace:b=1,2;points=10;span=4")
        assert len(reports) == 20
        assert {r.dist_id for r in reports} == {"laplace(b=1)", "laplace(b=2)"}


# ----------------------------------------------------------------------
# simulate
# ----------------------------------------------------------------------


class TestSimulate:
    def test_synthetic_backtest(self, capsys):
        code, payload, err = run_json(
            capsys,
            ["simulate", "--dist", "laplace:b=1", "--n", "6000",
             "--k1", "1", "--k2", "3", "--seed", "2", "--fixed-clock"],
        )
        assert code == 0
        assert payload["schema_version"] == SCHEMA_VERSION
        assert payload["n_train"] == 3000 and payload["n_test"] == 3000
        assert 0.5 < payload["offset"] < 0.9
        pol = payload["policies"]
        assert pol["corrected"]["variance"] < pol["uncorrected"]["variance"]
        assert pol["corrected"]["mean"] < pol["uncorrected"]["mean"]
        assert payload["deltas"]["variance"] == pytest.approx(
            pol["uncorrected"]["variance"] - pol["corrected"]["variance"], rel=1e-12
        )
        assert payload["degenerate_train"] is False
        assert payload["fitted_solution"]["C"] == payload["offset"]
        assert "offset=" in err

    def test_symmetric_costs_are_a_no_op(self, capsys):
        code, payload, _ = run_json(
            capsys,
            ["simulate", "--dist", "gauss:sigma=1", "--n", "2000",
             "--k1", "2", "--k2", "2", "--seed", "1", "--fixed-clock"],
        )
        assert code == 0
        assert payload["offset"] == 0.0
        assert payload["policies"]["corrected"] == payload["policies"]["uncorrected"]

    def test_degenerate_training_split(self, capsys, tmp_path):
        path = write_errors(tmp_path / "z.csv", [0.0] * 100)
        code, payload, _ = run_json(
            capsys,
            ["simulate", "--input", path, "--k1", "1", "--k2", "3", "--fixed-clock"],
        )
        assert code == 0
        assert payload["degenerate_train"] is True
        assert payload["offset"] == 0.0
        assert payload["fitted_solution"] is None

    def test_insufficient_training_data(self, capsys):
        code = main(["simulate", "--dist", "laplace:b=1", "--n", "40",
                     "--k1", "1", "--k2", "3"])
        assert code == 2
        capsys.readouterr()

    def test_lopsided_training_errors(self, capsys, tmp_path):
        values = list(np.abs(Laplace(1.0).sample(400, seed=9)) + 1e-9)
        path = write_errors(tmp_path / "pos.csv", values)
        code = main(["simulate", "--input", path, "--k1", "1", "--k2", "3"])
        assert code == 2
        assert "sign test" in capsys.readouterr().err

    def test_input_validation(self, capsys):
        # --dist without --n, both sources, bad train fraction
        assert main(["simulate", "--dist", "laplace:b=1",
                     "--k1", "1", "--k2", "2"]) == 1
        assert main(["simulate", "--k1", "1", "--k2", "2"]) == 1
        assert main(["simulate", "--dist", "laplace:b=1", "--n", "100",
                     "--k1", "1", "--k2", "2", "--train-frac", "1.5"]) == 1
        capsys.readouterr()


# ----------------------------------------------------------------------
# module entry point
# ----------------------------------------------------------------------


class TestEntryPoint:
    def test_runs_as_module(self):
        proc = subprocess.run(
            [sys.executable, "-m", "asymloss", "verify",
             "--grid", "uniform:w=1;points=20"],
            capture_output=True, text=True, timeout=120,
        )
        assert proc.returncode == 0
        assert proc.stdout.startswith(",".join(_CSV_COLUMNS))

    def test_no_arguments_is_input_error(self):
        proc = subprocess.run(
            [sys.executable, "-m", "asymloss"],
            capture_output=True, text=True, timeout=60,
        )
        assert proc.returncode == 1
