import math
import subprocess
import sys

import numpy as np
import pytest

from covbridge import __version__
from covbridge.cli import main, parse_csv, parse_real
from covbridge.convergence import EvalGrid, mae
from covbridge.covmodels import CauchyParams, MaternParams, cauchy_eval, matern_eval, reparam_cauchy
from covbridge.spectral import cauchy_sdf


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def body(text):
    return "\n".join(line for line in text.splitlines() if not line.startswith("#"))


@pytest.mark.parametrize("text, value", [("0.2/3", 0.2 / 3), ("20/3", 20 / 3), ("1e-3", 1e-3), (" 2 ", 2.0)])
def test_parse_real(text, value):
    assert parse_real(text) == value


@pytest.mark.parametrize("text", ["abc", "1/0", "1/2/3", "inf"])
def test_parse_real_rejects(text):
    with pytest.raises(Exception):
        parse_real(text)


def test_eval_matern_is_exponential(capsys):
    code, out, _ = run(["eval", "--model", "matern", "--nu", "0.5", "--alpha", "0.3", "--grid", "0:3:100"], capsys)
    assert code == 0
    header, columns, rows = parse_csv(out)
    assert columns == ["r", "value"] and len(rows) == 100
    r = np.array([float(row[0]) for row in rows])
    v = np.array([float(row[1]) for row in rows])
    assert np.max(np.abs(v - np.exp(-r / 0.3))) < 1e-13
    assert header[0] == f"covbridge {__version__}"
    assert any(line.startswith("model: MaternParams(nu=0.5, alpha=0.3") for line in header)


def test_eval_round_trip_full_precision(capsys):
    argv = ["eval", "--model", "cauchy", "--delta", "1.3", "--lambda", "0.7", "--gamma", "2/3", "--grid", "0.1:5:17"]
    _, out, _ = run(argv, capsys)
    _, _, rows = parse_csv(out)
    p = CauchyParams(1.3, 0.7, 2 / 3)
    r = np.linspace(0.1, 5, 17)
    assert [float(row[0]) for row in rows] == list(r)
    assert [float(row[1]) for row in rows] == list(cauchy_eval(p, r))


def test_eval_log_spacing_and_gamma_from_alpha(capsys):
    argv = [
        "eval", "--model", "cauchy", "--delta", "1", "--lambda", "50",
        "--gamma-from-alpha", "0.3", "--grid", "0.01:10:5", "--spacing", "log",
    ]
    _, out, _ = run(argv, capsys)
    _, _, rows = parse_csv(out)
    r = np.geomspace(0.01, 10, 5)
    assert [float(row[1]) for row in rows] == list(cauchy_eval(reparam_cauchy(1, 50, 0.3), r))


def test_sdf_round_trip_and_routes(capsys):
    argv = ["sdf", "--model", "cauchy", "--delta", "1.5", "--lambda", "2", "--gamma", "1", "--d", "1", "--grid", "0.1:3:4"]
    code, out, _ = run(argv, capsys)
    assert code == 0
    header, columns, rows = parse_csv(out)
    assert columns == ["z", "value", "route", "abs_err_estimate"]
    p = CauchyParams(1.5, 2.0, 1.0)
    for row in rows:
        res = cauchy_sdf(p, 1, float(row[0]))
        assert float(row[1]) == res.value and row[2] == res.route.value
    routes = next(line for line in header if line.startswith("routes:"))
    assert set(routes[len("routes: "):].split(",")) == {row[2] for row in rows}


def test_sdf_cauchy_close_to_matern_at_large_lambda(capsys):
    grid = "0.1:10:50"
    _, cauchy_out, _ = run(
        ["sdf", "--model", "cauchy", "--delta", "1", "--lambda", "50", "--gamma-from-alpha", "0.3", "--d", "1", "--grid", grid],
        capsys,
    )
    _, matern_out, _ = run(["sdf", "--model", "matern", "--nu", "0.5", "--alpha", "0.3", "--d", "1", "--grid", grid], capsys)
    _, scan_out, _ = run(["limit-scan", "--alpha", "0.3", "--lambdas", "50", "--d", "1", "--grid", grid], capsys)
    c = np.array([float(r[1]) for r in parse_csv(cauchy_out)[2]])
    m = np.array([float(r[1]) for r in parse_csv(matern_out)[2]])
    scan = np.array([float(r[2]) for r in parse_csv(scan_out)[2]])
    assert np.array_equal(np.abs(c - m), scan)
    # the gap is of order 1/lambda relative to the density at the origin
    assert np.max(scan) < 2 * (0.3 / math.pi) / 50


def test_mae_table_layout(capsys):
    argv = ["mae-table", "--alphas", "0.2/3,20/3", "--lambdas", "1,2000", "--grid", "0:1:10000"]
    code, out, _ = run(argv, capsys)
    assert code == 0
    header, columns, rows = parse_csv(out)
    assert columns == ["alpha", "lambda=1", "lambda=2000"]
    assert float(rows[0][0]) == 0.2 / 3
    assert round(float(rows[0][1]), 5) == 0.20363
    assert round(float(rows[1][2]), 5) == 0.0
    assert "grid: uniform on (0.0, 1.0], 10000 points" in header


def test_error_curve_columns(capsys):
    code, out, _ = run(["error-curve", "--alpha", "0.2/3", "--lambdas", "1,2", "--grid", "0:1:100"], capsys)
    assert code == 0
    header, columns, rows = parse_csv(out)
    assert columns == ["lambda", "r", "cauchy", "matern", "abs_error"]
    assert len(rows) == 200
    grid = EvalGrid.span(0, 1, 100)
    maxima = next(line for line in header if line.startswith("maxima:"))
    assert float(maxima.split(": ")[1].split(",")[0]) == mae(1.0, 0.2 / 3, grid)
    for row in rows[:5]:
        lam, r = float(row[0]), float(row[1])
        assert float(row[2]) == cauchy_eval(reparam_cauchy(1, lam, 0.2 / 3), r)
        assert float(row[3]) == matern_eval(MaternParams(0.5, 0.2 / 3), r)

    _, out, _ = run(["error-curve", "--alpha", "0.3", "--lambdas", "5", "--grid", "0:1:10"], capsys)
    assert parse_csv(out)[1] == ["r", "cauchy", "matern", "abs_error"]


def test_limit_scan_orders(capsys):
    base = ["limit-scan", "--alpha", "1", "--lambdas", "10,100", "--deltas", "1,2", "--grid", "1:2:2"]
    _, out_a, _ = run(base + ["--order", "lambda-inner"], capsys)
    _, out_b, _ = run(base + ["--order", "delta-inner"], capsys)
    _, cols, rows_a = parse_csv(out_a)
    _, _, rows_b = parse_csv(out_b)
    assert cols == ["delta", "lambda", "z", "error"]
    assert [r[0] for r in rows_a] == ["1", "1", "1", "1", "2", "2", "2", "2"]
    assert [r[1] for r in rows_b] == ["10", "10", "10", "10", "100", "100", "100", "100"]
    assert sorted(rows_a) == sorted(rows_b)


def test_limit_scan_single_delta_and_covariance(capsys):
    _, out, _ = run(["limit-scan", "--alpha", "1", "--lambdas", "10,100", "--grid", "0.5:1:2"], capsys)
    assert parse_csv(out)[1] == ["lambda", "z", "error"]
    _, out, _ = run(["limit-scan", "--kind", "covariance", "--alpha", "0.2/3", "--lambdas", "1,2", "--grid", "0:1:10000"], capsys)
    _, cols, rows = parse_csv(out)
    assert cols == ["lambda", "mae"]
    assert round(float(rows[1][1]), 5) == 0.11608


def test_gamma_ratio_command(capsys):
    _, out, _ = run(["gamma-ratio", "--lambdas", "100,1e4", "--cs", "1,2"], capsys)
    _, cols, rows = parse_csv(out)
    assert cols == ["lambda", "c", "ratio"]
    assert len(rows) == 4 and rows[0][:2] == ["100", "1"]


def test_output_file_and_determinism(tmp_path, capsys):
    argv = ["sdf", "--model", "cauchy", "--delta", "0.8", "--lambda", "0.75", "--gamma", "2", "--d", "2", "--grid", "0.05:3:6"]
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        assert main(argv + ["--output", str(path)]) == 0
    a, b = (path.read_text() for path in paths)
    assert body(a) == body(b)
    assert capsys.readouterr().out == ""


@pytest.mark.parametrize(
    "argv",
    [
        ["sdf", "--model", "cauchy", "--delta", "3", "--lambda", "1", "--gamma", "1", "--grid", "1:2:2"],
        ["eval", "--model", "cauchy", "--delta", "1", "--grid", "1:2:2"],
        ["eval", "--model", "cauchy", "--delta", "1", "--lambda", "1", "--gamma", "1", "--gamma-from-alpha", "1", "--grid", "1:2:2"],
        ["eval", "--model", "matern", "--nu", "1", "--alpha", "1", "--grid", "2:1:5"],
        ["eval", "--model", "matern", "--nu", "1", "--alpha", "1", "--grid", "0:1:1"],
        ["eval", "--model", "matern", "--nu", "1", "--alpha", "1", "--grid", "0:1"],
        ["eval", "--model", "matern", "--nu", "1", "--alpha", "1", "--grid", "0:1:5", "--spacing", "log"],
        ["gamma-ratio", "--lambdas", "2", "--cs", "3"],
        ["gamma-ratio", "--lambdas", "x", "--cs", "1"],
        ["sdf", "--model", "cauchy", "--delta", "1", "--lambda", "1", "--gamma", "1", "--grid", "0:1:3"],
        ["sdf", "--model", "matern", "--nu", "1", "--alpha", "1", "--grid", "1:2:2", "--tol", "0"],
        ["limit-scan", "--alpha", "1", "--lambdas", "10", "--d", "2", "--deltas", "0.8", "--grid", "1:2:2"],
        ["frobnicate"],
    ],
)
def test_validation_errors_exit_2(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 2
    assert out == "" and err


def test_numerical_failure_exit_3(monkeypatch, capsys):
    from covbridge import cli
    from covbridge.errors import ConvergenceError

    def broken(p, d, z, tol):
        raise ConvergenceError("forced")

    monkeypatch.setattr(cli, "cauchy_sdf", broken)
    argv = ["sdf", "--model", "cauchy", "--delta", "1", "--lambda", "2", "--gamma", "1", "--grid", "0.5:1:2"]
    code, out, err = run(argv, capsys)
    assert code == 3 and out == ""
    assert "z=0.5" in err and "CauchyParams(delta=1.0, lam=2.0" in err


def test_io_error_exit_4(tmp_path, capsys):
    target = tmp_path / "missing" / "out.csv"
    code, _, err = run(["gamma-ratio", "--lambdas", "100", "--cs", "1", "--output", str(target)], capsys)
    assert code == 4 and "cannot write" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "covbridge", "gamma-ratio", "--lambdas", "100", "--cs", "0"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert parse_csv(proc.stdout)[2] == [["100", "0", "1"]]
