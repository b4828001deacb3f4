"""End-to-end command-line checks: reports, formats, and error objects.

Every assertion goes through ``main(argv)`` in process so stdout/stderr and
exit codes are exercised exactly as a shell user would see them.
"""

import csv
import io
import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from depscale import dependence_scale, make_joint, singular_spectrum
from depscale.cli import main

FIXTURE_CSV = "0.4,0.1\n0.1,0.4\n"
INDEPENDENT_CSV = "0.25,0.25\n0.25,0.25\n"


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def write_samples(tmp_path, seed=33, n=3000):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    y = x + rng.standard_normal(n)
    z = rng.standard_normal(n)
    lines = ["x,y,z"]
    lines += [f"{float(a)!r},{float(b)!r},{float(c)!r}" for a, b, c in zip(x, y, z)]
    return write(tmp_path, "samples.csv", "\n".join(lines) + "\n")


class TestCompute:
    def test_full_report_matches_library_bit_for_bit(self, capsys, tmp_path):
        path = write(tmp_path, "j.csv", FIXTURE_CSV)
        code, out, err = run_cli(capsys, "compute", path)
        assert code == 0 and err == ""
        report = json.loads(out)
        j = make_joint([[0.4, 0.1], [0.1, 0.4]])
        spectrum = singular_spectrum(j)
        profile = dependence_scale(j, 1)
        assert report["schema"] == "v1"
        assert report["sigma0"] == spectrum.sigma0
        assert report["sigma"] == [float(s) for s in spectrum.sigma]
        assert report["R"] == profile.r == 0.6
        assert report["D"] == [float(v) for v in profile.d] == [0.36, 0.0]
        assert report["order"] == 1
        assert report["complete"] is True

    def test_independent_table(self, capsys, tmp_path):
        path = write(tmp_path, "j.csv", INDEPENDENT_CSV)
        code, out, _ = run_cli(capsys, "compute", path)
        assert code == 0
        report = json.loads(out)
        assert report["R"] <= 1e-12
        assert report["order"] == 0
        assert report["complete"] is False

    def test_csv_format_flattens_fields(self, capsys, tmp_path):
        path = write(tmp_path, "j.csv", FIXTURE_CSV)
        code, out, _ = run_cli(capsys, "compute", path, "--format", "csv")
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["field", "index", "value"]
        table = {(r[0], r[1]): r[2] for r in rows[1:]}
        assert table[("schema", "")] == "v1"
        assert table[("R", "")] == "0.6"
        assert table[("sigma", "0")] == "0.6"
        assert table[("D", "0")] == "0.36"
        assert table[("D", "1")] == "0.0"
        assert table[("order", "")] == "1"
        assert table[("complete", "")] == "true"

    def test_unnormalized_table_is_a_structured_error(self, capsys, tmp_path):
        path = write(tmp_path, "j.csv", "0.3,0.1\n0.1,0.3\n")
        code, out, err = run_cli(capsys, "compute", path)
        assert code == 2 and out == ""
        error = json.loads(err)
        assert error["schema"] == "v1"
        assert error["error"] == "NotNormalized"
        assert "0.8" in error["message"]

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "compute", str(tmp_path / "absent.csv"))
        assert code == 2
        assert json.loads(err)["error"] == "Format"

    def test_negative_max_order(self, capsys, tmp_path):
        path = write(tmp_path, "j.csv", FIXTURE_CSV)
        code, _, err = run_cli(capsys, "compute", path, "--max-order", "-1")
        assert code == 2
        assert json.loads(err)["error"] == "InvalidArgument"


class TestEstimate:
    def test_single_column_report(self, capsys, tmp_path):
        path = write_samples(tmp_path)
        code, out, _ = run_cli(
            capsys, "estimate", path, "--x", "x", "--y", "y", "--bins", "4"
        )
        assert code == 0
        report = json.loads(out)
        assert report["n"] == 3000
        assert report["bins"] == [4, 4]
        assert report["bias_warning"] is False
        assert 0.4 <= report["R"] <= 0.9

    def test_adjoining_a_noise_column_keeps_dependence(self, capsys, tmp_path):
        path = write_samples(tmp_path)
        _, out, _ = run_cli(
            capsys, "estimate", path, "--x", "x", "--y", "y", "--bins", "4"
        )
        single = json.loads(out)
        code, out, _ = run_cli(
            capsys, "estimate", path, "--x", "x", "--y", "y", "z", "--bins", "4"
        )
        assert code == 0
        grouped = json.loads(out)
        assert grouped["bins"] == [4, 16]
        # the plug-in estimate on the product alphabet dominates the marginal
        # one up to resampling noise in which cells are occupied
        assert grouped["R"] >= single["R"] - 0.02

    def test_columns_by_position_on_headerless_file(self, capsys, tmp_path):
        u = np.linspace(0.0, 1.0, 64)
        text = "\n".join(f"{float(v)!r},{float(v)!r}" for v in u) + "\n"
        path = write(tmp_path, "id.csv", text)
        code, out, _ = run_cli(
            capsys, "estimate", path, "--x", "0", "--y", "1", "--bins", "4"
        )
        assert code == 0
        report = json.loads(out)
        assert report["n"] == 64
        assert_allclose(report["R"], 1.0)

    def test_unknown_column_lists_the_header(self, capsys, tmp_path):
        path = write_samples(tmp_path)
        code, _, err = run_cli(capsys, "estimate", path, "--x", "x", "--y", "nope")
        assert code == 2
        error = json.loads(err)
        assert error["error"] == "Format"
        assert "'x', 'y', 'z'" in error["message"]


class TestGaussian:
    def test_scalar_closed_form(self, capsys, tmp_path):
        path = write(tmp_path, "c.csv", "1,0.5\n0.5,1\n")
        code, out, _ = run_cli(capsys, "gaussian", path, "--dim-x", "1")
        assert code == 0
        report = json.loads(out)
        assert report["R"] == 0.5
        assert report["D"] == 0.25
        assert report["lambda_max"] == 0.25

    def test_block_diagonal_is_independent(self, capsys, tmp_path):
        path = write(tmp_path, "c.csv", "1,0\n0,1\n")
        _, out, _ = run_cli(capsys, "gaussian", path, "--dim-x", "1")
        report = json.loads(out)
        assert report["R"] == 0.0 and report["D"] == 0.0

    def test_noise_curve_is_sorted_and_even(self, capsys, tmp_path):
        path = write(tmp_path, "c.csv", "1,0.5\n0.5,1\n")
        code, out, _ = run_cli(
            capsys, "gaussian", path, "--dim-x", "1", "--lambdas", "1", "0", "-1"
        )
        assert code == 0
        curve = json.loads(out)["noise_curve"]
        assert curve["lambda"] == [-1.0, 0.0, 1.0]
        assert curve["R"][0] == curve["R"][2]
        assert curve["R"][1] == 0.5
        assert_allclose(curve["R"][0], 0.5 / np.sqrt(2.0), atol=1e-15)

    def test_noise_curve_needs_scalar_blocks(self, capsys, tmp_path):
        path = write(tmp_path, "c.csv", "1,0.3,0.1\n0.3,1,0.2\n0.1,0.2,1\n")
        code, _, err = run_cli(
            capsys, "gaussian", path, "--dim-x", "2", "--lambdas", "1"
        )
        assert code == 2
        assert json.loads(err)["error"] == "NotScalar"

    def test_indefinite_block_is_rejected(self, capsys, tmp_path):
        path = write(tmp_path, "c.csv", "1,0\n0,-1\n")
        code, _, err = run_cli(capsys, "gaussian", path, "--dim-x", "1")
        assert code == 2
        assert json.loads(err)["error"] == "NotPositiveDefinite"

    def test_dim_x_out_of_range(self, capsys, tmp_path):
        path = write(tmp_path, "c.csv", "1,0.5\n0.5,1\n")
        code, _, err = run_cli(capsys, "gaussian", path, "--dim-x", "5")
        assert code == 2
        assert json.loads(err)["error"] == "InvalidBlock"


class TestTransforms:
    def test_leading_pair_of_the_fixture(self, capsys, tmp_path):
        path = write(tmp_path, "j.csv", FIXTURE_CSV)
        code, out, _ = run_cli(capsys, "transforms", path)
        assert code == 0
        pairs = json.loads(out)["pairs"]
        assert len(pairs) == 1
        pair = pairs[0]
        assert_allclose(pair["rho"], 0.6, atol=1e-9)
        phi = np.array(pair["phi"])
        psi = np.array(pair["psi"])
        assert_allclose(phi * np.sign(phi[0]), [1.0, -1.0], atol=1e-8)
        assert_allclose(psi * np.sign(psi[0]), [1.0, -1.0], atol=1e-8)
        assert pair["converged"] is True
        assert pair["degenerate"] is False
        assert pair["sweeps"] >= 1

    def test_second_pair_of_a_two_atom_joint_is_degenerate(self, capsys, tmp_path):
        path = write(tmp_path, "j.csv", FIXTURE_CSV)
        _, out, _ = run_cli(capsys, "transforms", path, "-k", "2")
        pairs = json.loads(out)["pairs"]
        assert len(pairs) == 2
        assert pairs[1]["degenerate"] is True
        assert pairs[1]["rho"] == 0.0

    def test_independent_joint_reports_degenerate_pair(self, capsys, tmp_path):
        path = write(tmp_path, "j.csv", INDEPENDENT_CSV)
        code, out, _ = run_cli(capsys, "transforms", path)
        assert code == 0
        pair = json.loads(out)["pairs"][0]
        assert pair["degenerate"] is True
        assert pair["rho"] == 0.0

    def test_exhausted_sweep_budget_is_a_numerical_failure(self, capsys, tmp_path):
        path = write(tmp_path, "j.csv", FIXTURE_CSV)
        code, out, err = run_cli(capsys, "transforms", path, "--max-iter", "1")
        assert code == 3 and out == ""
        assert json.loads(err)["error"] == "NonConvergence"


class TestOracle:
    def test_oracle_and_spectral_agree_on_the_fixture(self, capsys, tmp_path):
        path = write(tmp_path, "j.csv", FIXTURE_CSV)
        code, out, _ = run_cli(capsys, "oracle", path)
        assert code == 0
        report = json.loads(out)
        assert report["m"] == 0
        assert_allclose(report["oracle"], 0.36, atol=1e-6)
        assert report["spectral"] == 0.36
        assert abs(report["oracle"] - report["spectral"]) <= 1e-6

    def test_order_beyond_the_alphabet_is_zero(self, capsys, tmp_path):
        path = write(tmp_path, "j.csv", FIXTURE_CSV)
        _, out, _ = run_cli(capsys, "oracle", path, "-m", "1")
        report = json.loads(out)
        assert report["oracle"] == 0.0
        assert report["spectral"] == 0.0
