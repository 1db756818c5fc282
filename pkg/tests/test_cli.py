import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from seqdiscrim import cli


def run(argv, capsys):
    status = cli.main(argv)
    return status, capsys.readouterr().out


def run_json(argv, capsys):
    status, out = run(argv, capsys)
    assert status == 0
    assert "NaN" not in out and "Infinity" not in out
    return json.loads(out)


def read_curve(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], [[float(v) if v else None for v in row] for row in rows[1:]]


class TestOptimize:
    @pytest.mark.parametrize(
        "s,pbc,regime", [(0.5, 0.125, "symmetry-broken"), (0.0, 1.0, "symmetric"), (0.04, 0.64, "symmetric")]
    )
    def test_values(self, s, pbc, regime, capsys):
        rep = run_json(["optimize", "--s", str(s)], capsys)
        assert rep["pbc_max"] == pytest.approx(pbc, abs=1e-12)
        assert rep["pbc_numeric"] == pytest.approx(pbc, abs=1e-5)
        assert rep["regime"] == regime
        assert list(rep) == ["s", "regime", "pbc_max", "pbc_numeric", "abs_difference", "argmax",
                             "numeric_argmax", "numeric_regime"]

    def test_invalid_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["optimize", "--s", "1.5"])
        assert exc.value.code == 2


class TestCurve:
    def test_figure_2a(self, capsys):
        status, out = run(["curve", "--figure", "2a", "--pc", "0.5", "--points", "50"], capsys)
        assert status == 0
        header, rows = read_curve(out)
        assert header == ["p_b", "d_delta"]
        assert len(rows) == 50
        d = [r[1] for r in rows]
        assert all(b >= a for a, b in zip(d, d[1:]))
        assert d[-1] > 0.99
        assert rows[0][0] == pytest.approx(0.01) and rows[-1][0] == pytest.approx(0.99)

    def test_figure_2b(self, capsys):
        _, out = run(["curve", "--figure", "2b", "--pb", "0.5", "--points", "20"], capsys)
        header, rows = read_curve(out)
        assert header == ["p_c", "d_delta"]
        d = [r[1] for r in rows]
        assert all(b <= a for a, b in zip(d, d[1:]))

    def test_figure_3_endpoints(self, capsys):
        _, out = run(["curve", "--figure", "3", "--exponent", "0.5", "--points", "50"], capsys)
        header, rows = read_curve(out)
        assert header == ["s", "d_symm"]
        assert rows[0] == [0.0, 0.0] and rows[-1] == [1.0, 0.0]
        assert all(r[1] > 0 for r in rows[1:-1])

    def test_number_format(self, capsys):
        _, out = run(["curve", "--figure", "3", "--exponent", "0.25", "--points", "3"], capsys)
        assert "\r" not in out
        line = out.splitlines()[2]
        s, d = line.split(",")
        assert s == "0.500000000000"
        assert len(d.lstrip("-0.").replace(".", "")) == 12
        assert "e" not in out.lower()

    def test_undefined_points_are_empty(self, capsys):
        # P_c = 0 means t = 1: both discords vanish and D_delta is undefined everywhere
        _, out = run(["curve", "--figure", "2a", "--pc", "0", "--points", "4"], capsys)
        lines = out.splitlines()[1:]
        assert len(lines) == 4 and all(line.endswith(",") for line in lines)

    def test_json_format(self, capsys):
        rep = run_json(["curve", "--figure", "2a", "--pc", "0.1", "--points", "3", "--format", "json"], capsys)
        assert rep["columns"] == ["p_b", "d_delta"] and len(rep["rows"]) == 3

    @pytest.mark.parametrize(
        "argv",
        [
            ["curve", "--figure", "4"],
            ["curve", "--figure", "2a"],
            ["curve", "--figure", "3", "--exponent", "1.5"],
            ["curve", "--figure", "2a", "--pc", "0.5", "--points", "1"],
        ],
    )
    def test_usage_errors(self, argv, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(argv)
        assert exc.value.code == 2


class TestDiscord:
    def test_reference_point(self, capsys):
        rep = run_json(["discord", "--r", "0.5", "--t", "0.6"], capsys)
        assert rep["d_right"] == pytest.approx(0.1274, abs=1e-4)
        assert rep["d_left"] == pytest.approx(0.1641, abs=1e-4)
        assert rep["gap_right"] < 1e-3 and rep["gap_left"] < 1e-3
        assert rep["tangles"]["tau_d"] == pytest.approx(0.91)

    def test_all_zero_point(self, capsys):
        rep = run_json(["discord", "--r", "1", "--t", "1"], capsys)
        assert rep["d_right"] == rep["d_left"] == rep["d_symm"] == 0
        assert rep["d_delta"] is None and rep["d_delta_status"] == "undefined"

    def test_swap_symmetric_point(self, capsys):
        rep = run_json(["discord", "--r", "0.7", "--t", "0.7"], capsys)
        assert rep["d_delta"] == 0

    def test_out_of_range(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["discord", "--r", "-0.2", "--t", "0.5"])
        assert exc.value.code == 2

    def test_tolerance_breach_exit_code(self, capsys, monkeypatch):
        monkeypatch.setattr(cli, "ORACLE_GAP_TOL", -1.0)
        status, out = run(["discord", "--r", "0.5", "--t", "0.6"], capsys)
        assert status == 3
        assert json.loads(out)["gap_right"] >= 0


class TestSimulate:
    def test_orthogonal(self, capsys):
        rep = run_json(["simulate", "--s", "0", "--t", "0", "--trials", "1000"], capsys)
        for key in ("p_b", "p_c", "p_bc"):
            assert rep[key]["empirical"] == 1.0
        assert rep["unambiguous"] is True

    def test_statistics(self, capsys):
        rep = run_json(["simulate", "--s", "0.25", "--t", "0.5", "--trials", "200000", "--seed", "42"], capsys)
        assert rep["p_b"]["analytic"] == 0.5 and rep["p_bc"]["analytic"] == 0.25
        assert all(abs(rep[k]["z"]) < 4 for k in ("p_b", "p_c", "p_bc"))

    def test_s_above_t(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["simulate", "--s", "0.6", "--t", "0.5"])
        assert exc.value.code == 2

    def test_same_seed_same_bytes(self, tmp_path):
        outs = []
        for i, workers in enumerate(("1", "1", "4")):
            path = tmp_path / f"sim{i}.json"
            cli.main(["simulate", "--s", "0.25", "--t", "0.5", "--trials", "150000", "--seed", "9",
                      "--workers", workers, "--out", str(path)])
            outs.append(path.read_bytes())
        assert outs[0] == outs[1] == outs[2]

    def test_csv(self, capsys):
        _, out = run(["simulate", "--s", "0.2", "--t", "0.4", "--trials", "100", "--format", "csv"], capsys)
        assert out.startswith("key,value\n")
        assert "p_bc.empirical," in out


class TestPovm:
    def test_unambiguity(self, capsys):
        rep = run_json(["povm", "--s", "0.25", "--t", "0.5"], capsys)
        assert rep["completeness_defect"] < 1e-10
        assert abs(rep["residual_psi2_pi1"]) < 1e-10 and abs(rep["residual_psi1_pi2"]) < 1e-10
        assert len(rep["povm"]) == 3

    def test_von_neumann_limit(self, capsys):
        rep = run_json(["povm", "--s", "0", "--t", "0"], capsys)
        pi0, pi1, pi2 = (np.array(e["real"]) + 1j * np.array(e["imag"]) for e in rep["povm"])
        np.testing.assert_allclose(pi0, 0, atol=1e-12)
        np.testing.assert_allclose(pi1 @ pi1, pi1, atol=1e-12)
        np.testing.assert_allclose(pi1 @ pi2, 0, atol=1e-12)


class TestConfig:
    def test_config_presets_and_override(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# experiment\ns = 0.25\nt = 0.5\ntrials = 1000\nseed = 3\n")
        rep = run_json(["simulate", "--config", str(cfg)], capsys)
        assert (rep["s"], rep["t"], rep["trials"], rep["seed"]) == (0.25, 0.5, 1000, 3)
        rep = run_json(["simulate", "--config", str(cfg), "--seed", "5"], capsys)
        assert rep["seed"] == 5

    def test_bad_config(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("nonsense = 1\n")
        with pytest.raises(SystemExit) as exc:
            cli.main(["povm", "--config", str(cfg)])
        assert exc.value.code == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "seqdiscrim", "optimize", "--s", "0.25"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["pbc_max"] == pytest.approx(0.5 * 0.75**2)
