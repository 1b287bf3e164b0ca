import csv
import io
import json
import math
import subprocess
import sys

import pytest

from nesreg import cli, loop
from nesreg.io import format_number, render_csv, render_json


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestFormatNumber:
    @pytest.mark.parametrize(
        "value, text",
        [
            (0.0, "0"),
            (1.0, "1"),
            (0.6, "0.6"),
            (1 / 3, "0.333333333333"),
            (-2.5, "-2.5"),
            (123456.789, "123456.789"),
            (999999.0, "999999"),
            (1e6, "1e+06"),
            (9.375e16, "9.375e+16"),
            (1e-5, "0.00001"),
            (1.5e-6, "1.5e-06"),
            (2.0 / 3 * 1e-7, "6.66666666667e-08"),
            (7, "7"),
            (True, "1"),
            (float("nan"), "nan"),
            (float("-inf"), "-inf"),
        ],
    )
    def test_cases(self, value, text):
        assert format_number(value) == text

    def test_twelve_significant_digits(self):
        assert float(format_number(math.pi)) == pytest.approx(math.pi, rel=1e-12)
        assert len(format_number(math.pi).replace(".", "")) == 12

    def test_render_csv(self):
        assert render_csv(("a", "b"), [("x", None), (1, 0.5)]) == "a,b\nx,\n1,0.5\n"
        with pytest.raises(ValueError):
            render_csv(("a",), [(1, 2)])

    def test_render_json_lossless(self):
        v = [0.1, 1 / 3, 9.375e16, -0.0198943678864869]
        assert json.loads(render_json(v)) == v
        assert json.loads(render_json({"x": float("nan")})) == {"x": None}


class TestFigures:
    def test_figure2(self, capsys, tmp_path):
        out = tmp_path / "fig2.csv"
        code, stdout, _ = run(capsys, "figure2", "--points", "200", "--sigma-max", "5", "--out", str(out))
        assert code == 0 and stdout == ""
        rows = parse_csv(out.read_text())
        assert list(rows[0]) == ["panel", "sigma", "rho", "lambda"]
        assert {"panel": "left", "sigma": "0.333333333333", "rho": "0.6", "lambda": "0.8"} in rows
        assert all(r[k] != "" for r in rows for k in r)

    def test_figure2_json(self, capsys):
        code, out, _ = run(capsys, "figure2", "--points", "3", "--format", "json")
        recs = json.loads(out)
        assert code == 0 and set(recs[0]) == {"panel", "sigma", "rho", "lambda"}

    def test_figure3_round_trip(self, capsys):
        code, out, _ = run(capsys, "figure3", "--points", "13", "--ratio-min", "1e-10", "--ratio-max", "100")
        rows = parse_csv(out)
        assert code == 0
        assert len(rows) == 3 * 13
        masses = {float(r["m0c2_gev"]) for r in rows}
        assert masses == {128.0, 190.0, 1.2e19}
        for r in rows:
            assert 1.0 - 1e-12 <= float(r["q"]) <= 4.0 + 1e-12
            assert r["below_rest"] in ("0", "1")

    def test_figure3_custom_mass(self, capsys):
        code, out, _ = run(capsys, "figure3", "--mass-gev", "1", "--points", "2")
        assert code == 0 and len(parse_csv(out)) == 2

    @pytest.mark.parametrize("cmd", [["figure2", "--points", "50"], ["figure3", "--points", "20"], ["theta-table"]])
    def test_byte_identical(self, capsys, cmd):
        _, a, _ = run(capsys, *cmd)
        _, b, _ = run(capsys, *cmd)
        assert a == b and a


class TestLoopCommands:
    def test_dzero_json(self, capsys):
        code, out, _ = run(capsys, "dzero", "--mass-gev", "128", "--mode", "paper", "--format", "json")
        rec = json.loads(out)
        assert code == 0 and rec["mode"] == "paper"
        # k* = 9.375e16 gives k*^2 / (16 pi^2) = 5.566e31
        assert rec["re"] == pytest.approx(5.566e31, rel=1e-3)
        assert rec["re"] == pytest.approx(5.596e31, rel=0.01)
        assert rec["im"] == pytest.approx(0.48, abs=1e-3)
        assert rec["kstar"] == pytest.approx(9.375e16)

    def test_dzero_kstar_modes(self, capsys):
        _, out, _ = run(capsys, "dzero", "--kstar", "2", "--mode", "plemelj", "--format", "json")
        rec = json.loads(out)
        assert rec["mode"] == "plemelj"
        assert complex(rec["re"], rec["im"]) == pytest.approx(complex(0.207137, -0.0198944), abs=1e-6)

    def test_mass_correction(self, capsys):
        code, out, _ = run(capsys, "mass-correction", "--mass-gev", "128", "--coupling", "1.0", "--mode", "paper")
        (row,) = parse_csv(out)
        theta = float(row["theta_js"])
        assert code == 0 and theta == pytest.approx(2.94e-3, rel=0.01)
        assert float(row["mu_star"]) == pytest.approx(math.sqrt(1 + theta), rel=1e-11)

    def test_zero_coupling_lifetime_absent(self, capsys):
        _, out, _ = run(capsys, "mass-correction", "--format", "json")
        assert json.loads(out)["tau_l_s"] is None
        _, out, _ = run(capsys, "mass-correction")
        assert parse_csv(out)[0]["tau_l_s"] == ""

    def test_theta_table(self, capsys):
        _, out, _ = run(capsys, "theta-table", "--mass-gev", "0.94", "--format", "json")
        (rec,) = json.loads(out)
        assert rec["theta_js"] == pytest.approx(55, rel=0.05)


class TestBlurEstimate:
    def test_json_report(self, capsys):
        code, out, _ = run(capsys, "blur-estimate", "--samples", "100000", "--seed", "42", "--dim", "3")
        rep = json.loads(out)
        assert code == 0 and rep["dim"] == 3 and rep["seed"] == 42
        assert rep["inverse_max_abs_error"] < 0.05
        assert len(rep["n_hat_adjugate"]) == 3

    def test_rho_prime(self, capsys):
        code, out, _ = run(capsys, "blur-estimate", "--rho", "0.2", "--rho-prime", "0.6", "--samples", "20000")
        assert code == 0 and json.loads(out)["rho_prime"] == pytest.approx(0.6)

    def test_csv_deterministic(self, capsys):
        args = ("blur-estimate", "--samples", "30000", "--format", "csv", "--seed", "3")
        _, a, _ = run(capsys, *args)
        _, b, _ = run(capsys, *args)
        assert a == b and len(parse_csv(a)) == 16

    def test_conflicting_velocity_options(self, capsys):
        code, _, err = run(capsys, "blur-estimate", "--sigma", "0.5", "--rho-prime", "0.5")
        assert code == 2 and json.loads(err)["error"]["kind"] == "domain"


class TestVerify:
    def test_filter(self, capsys):
        code, out, _ = run(capsys, "verify", "--filter", "effective_dimension", "--format", "csv")
        rows = parse_csv(out)
        assert code == 0
        assert {r["group"] for r in rows} == {"effective_dimension"}
        assert all(r["status"] == "pass" for r in rows)

    def test_injected_fault(self, capsys):
        code, out, _ = run(capsys, "verify", "--filter", "kinematics", "--rho", "1.0")
        assert code == 1
        assert "ERROR:DOMAIN" in out

    def test_text_output_to_file(self, capsys, tmp_path):
        path = tmp_path / "v.txt"
        code, out, _ = run(capsys, "verify", "--filter", "loop", "--out", str(path))
        assert code == 0 and out == ""
        assert path.read_text().count("PASS") == 3

    @pytest.mark.slow
    def test_full_suite(self, capsys):
        code, out, _ = run(capsys, "verify", "--format", "json")
        recs = json.loads(out)
        assert code == 0 and len(recs) == 16
        assert all(r["status"] == "pass" for r in recs)


class TestErrors:
    def test_unknown_command(self, capsys):
        with pytest.raises(SystemExit) as info:
            cli.main(["bogus"])
        assert info.value.code == 2
        assert json.loads(capsys.readouterr().err)["error"]["kind"] == "usage"

    def test_malformed_flag(self, capsys):
        with pytest.raises(SystemExit) as info:
            cli.main(["figure2", "--points", "many"])
        assert info.value.code == 2

    def test_domain_error(self, capsys):
        code, _, err = run(capsys, "dzero", "--kstar", "0.5")
        assert code == 2 and json.loads(err)["error"]["kind"] == "domain"

    def test_numeric_error(self, capsys):
        code, _, err = run(capsys, "mass-correction", "--mass-gev", "128", "--coupling", "1000")
        assert code == 3 and json.loads(err)["error"]["kind"] == "weak_coupling"

    def test_quadrature_error(self, capsys):
        code, _, err = run(capsys, "dzero", "--kstar", "1000", "--mode", "plemelj", "--tolerance", repr(loop.MIN_TOLERANCE))
        assert code == 3 and json.loads(err)["error"]["kind"] == "quadrature"

    def test_unwritable_output(self, capsys, tmp_path):
        code, _, err = run(capsys, "theta-table", "--out", str(tmp_path / "missing" / "x.csv"))
        assert code == 2 and "error" in json.loads(err)

    def test_figure_validation(self, capsys):
        code, _, _ = run(capsys, "figure2", "--points", "1")
        assert code == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "nesreg", "dzero", "--kstar", "2", "--format", "json"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["re"] == pytest.approx(0.3847037218508931)
