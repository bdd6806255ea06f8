import json
import math
import os

import pytest
from click.testing import CliRunner

from ellgrad.cli import main

SCHEMA_KEYS = {"command", "config", "inputs", "hypotheses", "bound",
               "statistic", "margin", "verdict"}


@pytest.fixture
def runner():
    return CliRunner()


def run_json(runner, args, env=None):
    result = runner.invoke(main, args, env=env, catch_exceptions=False)
    payload = json.loads(result.output)
    assert SCHEMA_KEYS <= payload.keys()
    return result.exit_code, payload


class TestCheck:
    def test_reference_pass(self, runner):
        code, rep = run_json(runner, [
            "check", "--h", "-exp(2*s)", "--system", "1.9",
            "--lambda", "0", "--n", "3", "--K", "0"])
        assert code == 0
        assert rep["verdict"] == "pass"
        assert rep["hypotheses"]["system"] == "1.9"

    def test_reference_fail(self, runner):
        code, rep = run_json(runner, ["check", "--h", "exp(s)",
                                      "--system", "cor1.3"])
        assert code == 1
        assert rep["verdict"] == "fail"
        assert rep["hypotheses"]["violations"]

    def test_domain_error_exits_2(self, runner):
        code, rep = run_json(runner, ["check", "--h", "ln(s)",
                                      "--s-range", "-1:1"])
        assert code == 2
        assert rep["verdict"] == "error"
        assert "error" in rep

    def test_parse_error_exits_2(self, runner):
        code, rep = run_json(runner, ["check", "--h", "s ^ s"])
        assert code == 2

    def test_params_flow_through(self, runner):
        code, rep = run_json(runner, [
            "check", "--h", "c*exp(d*s)", "--system", "cor1.3",
            "--param", "c=1.0", "--param", "d=-2"])
        assert code == 0


class TestFindLambda:
    def test_feasible_set(self, runner):
        code, rep = run_json(runner, [
            "find-lambda", "--h", "-exp(2*s)", "--n", "3", "--K", "0",
            "--lambda-grid", "0,0.5,1"])
        assert code == 0
        assert rep["statistic"]["feasible"] == [0.0]

    def test_empty_set_fails(self, runner):
        code, rep = run_json(runner, [
            "find-lambda", "--h", "s*exp(s)", "--s-range", "-2:2",
            "--lambda-grid", "0,0.5,1"])
        assert code == 1
        assert rep["statistic"]["feasible"] == []


class TestBound:
    def test_general_closed_form(self, runner):
        code, rep = run_json(runner, [
            "bound", "--case", "general", "--n", "2", "--K", "0", "--R", "1",
            "--c1", "1", "--c2", "0"])
        assert code == 0
        assert rep["bound"]["value"] == pytest.approx(9.0, rel=1e-9)
        assert rep["bound"]["minimizer"] == pytest.approx(1 / 3, rel=1e-6)

    def test_case2_closed_form(self, runner):
        code, rep = run_json(runner, [
            "bound", "--case", "case2", "--n", "2", "--K", "0", "--R", "1",
            "--p", "1.5", "--lambda1", "0", "--lambda2", "1", "--b", "-1",
            "--c1", "1", "--c2", "0"])
        assert code == 0
        assert rep["bound"]["value"] == pytest.approx(27 + 18 * math.sqrt(2),
                                                      rel=1e-9)
        assert "solution_range" in rep

    def test_p_out_of_range_exits_2(self, runner):
        code, rep = run_json(runner, [
            "bound", "--case", "case1", "--n", "2", "--p", "2.5",
            "--lambda1", "1", "--lambda2", "1", "--b", "-1"])
        assert code == 2

    def test_default_cutoff_constants(self, runner):
        code, rep = run_json(runner, ["bound", "--case", "general", "--n", "3"])
        assert rep["config"]["c1"] == 2.0
        assert rep["config"]["c2"] == 2.0
        assert rep["bound"]["variant"] == "proof"


class TestSolve:
    def test_gaussian_csv(self, runner, tmp_path):
        out = tmp_path / "gauss.csv"
        code, rep = run_json(runner, [
            "solve", "--h", "4*s+6", "--geometry", "euclidean", "--n", "3",
            "--u0", "1", "--rmax", "3", "--tol", "1e-10", "--out", str(out)])
        assert code == 0
        assert rep["statistic"]["termination"] == "reached"
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "r,u,du,log_grad"
        worst = 0.0
        for line in lines[1:]:
            r, u, du, lg = map(float, line.split(","))
            worst = max(worst, abs(u - math.exp(-r * r)))
        assert worst <= 1e-6

    def test_constant_profile(self, runner, tmp_path):
        out = tmp_path / "const.csv"
        code, rep = run_json(runner, [
            "solve", "--h", "s", "--n", "2", "--u0", "1", "--rmax", "2",
            "--out", str(out)])
        assert code == 0
        for line in out.read_text().strip().split("\n")[1:]:
            assert float(line.split(",")[1]) == 1.0

    def test_floor_termination_reported(self, runner, tmp_path):
        out = tmp_path / "floor.csv"
        code, rep = run_json(runner, [
            "solve", "--h", "exp(-s)", "--geometry", "hyperbolic",
            "--kappa", "-1", "--n", "3", "--u0", "1", "--rmax", "4",
            "--out", str(out)])
        assert code == 0
        assert rep["statistic"]["termination"] == "floor"
        assert rep["statistic"]["r_last"] == pytest.approx(2.9847, abs=1e-3)

    def test_unwritable_out_exits_2(self, runner):
        code, rep = run_json(runner, [
            "solve", "--h", "s", "--n", "2", "--u0", "1", "--rmax", "1",
            "--out", "/nonexistent-dir/x.csv"])
        assert code == 2

    def test_hyperbolic_needs_negative_kappa(self, runner, tmp_path):
        code, rep = run_json(runner, [
            "solve", "--h", "s", "--geometry", "hyperbolic", "--n", "2",
            "--u0", "1", "--rmax", "1", "--out", str(tmp_path / "x.csv")])
        assert code == 2


class TestVerify:
    def test_reference_pipeline_passes(self, runner):
        code, rep = run_json(runner, [
            "verify", "--theorem", "thm1.2", "--h", "exp(-s)",
            "--lambda", "0.5", "--geometry", "hyperbolic", "--kappa", "-1",
            "--n", "3", "--u0", "1", "--R", "1"])
        assert code == 0
        assert rep["verdict"] == "pass"
        assert rep["hypotheses"]["verdict"] == "pass"
        assert rep["margin"] > 0

    def test_harnack_reports_ratio_and_factor(self, runner):
        code, rep = run_json(runner, [
            "verify", "--theorem", "harnack", "--h", "exp(-s)",
            "--lambda", "0.5", "--geometry", "hyperbolic", "--kappa", "-1",
            "--n", "3", "--u0", "1", "--R", "1"])
        assert code == 0
        assert rep["statistic"] > 1.0
        assert rep["bound"] is not None
        assert rep["gradient_constant"] > 0

    def test_failed_hypotheses_exit_3(self, runner):
        code, rep = run_json(runner, [
            "verify", "--theorem", "thm1.2", "--h", "exp(s)",
            "--lambda", "1", "--n", "3", "--u0", "1", "--R", "1"])
        assert code == 3
        assert rep["verdict"] == "not_applicable"

    def test_early_floor_exit_3(self, runner):
        code, rep = run_json(runner, [
            "verify", "--theorem", "thm1.2", "--h", "2*exp(-2*s)",
            "--lambda", "1", "--n", "2", "--u0", "0.5", "--R", "1"])
        assert code == 3
        assert rep["verdict"] == "no_verdict"

    def test_case_route(self, runner):
        code, rep = run_json(runner, [
            "verify", "--theorem", "thm1.1", "--lambda1", "-0.25",
            "--lambda2", "1", "--b", "-1", "--p", "1.5", "--n", "3",
            "--u0", "2", "--R", "1"])
        assert code in (0, 3)
        if code == 0:
            assert rep["theorem"] == "thm1.1-case2"
            assert rep["hypotheses"] is None

    def test_missing_h_exits_2(self, runner):
        code, rep = run_json(runner, [
            "verify", "--theorem", "thm1.2", "--lambda", "0", "--R", "1"])
        assert code == 2


class TestLiouville:
    def test_closed_form_decay(self, runner, tmp_path):
        csv = tmp_path / "decay.csv"
        code, rep = run_json(runner, [
            "liouville", "--n", "2", "--c1", "1", "--c2", "0",
            "--variant", "stated", "--R-list", "1,10,100",
            "--csv", str(csv)])
        assert code == 0
        cs = [row["C"] for row in rep["statistic"]["rows"]]
        assert cs == pytest.approx([9.0, 0.09, 0.0009], rel=1e-9)
        lines = csv.read_text().strip().split("\n")
        assert lines[0] == "R,C,C_R2"
        assert len(lines) == 4

    def test_single_radius_trivially_passes(self, runner):
        code, rep = run_json(runner, ["liouville", "--n", "3", "--R-list", "7"])
        assert code == 0

    def test_proof_variant_constant(self, runner):
        code, rep = run_json(runner, [
            "liouville", "--n", "2", "--c1", "1", "--c2", "1",
            "--variant", "proof", "--R-list", "1,10,100"])
        want = 6 + 2 * math.sqrt(5)
        for row in rep["statistic"]["rows"]:
            assert row["C_R2"] == pytest.approx(want, rel=1e-9)


class TestSweep:
    def test_merge_preserves_input_order(self, runner):
        code, rep = run_json(runner, [
            "sweep", "--theorem", "thm1.2", "--h", "c*exp(d*s)",
            "--lambda", "0.5", "--n", "2", "--u0", "1", "--R", "1",
            "--vary", "c=0.5,1", "--vary", "d=-1,-0.5"])
        pts = [r["point"] for r in rep["statistic"]["runs"]]
        assert pts == [
            {"c": 0.5, "d": -1.0}, {"c": 0.5, "d": -0.5},
            {"c": 1.0, "d": -1.0}, {"c": 1.0, "d": -0.5}]

    def test_threaded_matches_serial(self, runner):
        args = ["sweep", "--theorem", "thm1.2", "--h", "c*exp(d*s)",
                "--lambda", "0.5", "--n", "2", "--u0", "1", "--R", "1",
                "--vary", "c=0.5,1,2", "--vary", "d=-2,-1"]
        _, serial = run_json(runner, args)
        _, threaded = run_json(runner, args + ["--workers", "4"])
        assert serial["statistic"]["runs"] == threaded["statistic"]["runs"]

    def test_scalar_axes(self, runner):
        code, rep = run_json(runner, [
            "sweep", "--theorem", "thm1.2", "--h", "exp(-s)", "--lambda", "0",
            "--geometry", "hyperbolic", "--kappa", "-1",
            "--n", "3", "--R", "1", "--vary", "u0=1,2",
            "--vary", "lambda=0,0.5"])
        assert code == 0
        assert rep["statistic"]["counts"]["pass"] == 4


class TestConfig:
    def test_config_file_supplies_defaults(self, runner, tmp_path):
        cfg = tmp_path / "ellgrad.cfg"
        cfg.write_text("c1=1.0\nc2=0.0  # cutoff constants\nvariant=stated\n")
        code, rep = run_json(runner, [
            "--config", str(cfg), "bound", "--case", "general", "--n", "2"])
        assert rep["config"]["c1"] == 1.0
        assert rep["bound"]["value"] == pytest.approx(9.0, rel=1e-9)

    def test_flags_override_config(self, runner, tmp_path):
        cfg = tmp_path / "ellgrad.cfg"
        cfg.write_text("c1=1.0\nc2=0.0\n")
        code, rep = run_json(runner, [
            "--config", str(cfg), "bound", "--case", "general", "--n", "2",
            "--c2", "1", "--variant", "proof"])
        assert rep["config"]["c2"] == 1.0
        assert rep["bound"]["value"] == pytest.approx(6 + 2 * math.sqrt(5),
                                                      rel=1e-9)

    def test_env_var_names_default_config(self, runner, tmp_path):
        cfg = tmp_path / "from_env.cfg"
        cfg.write_text("samples=11\n")
        code, rep = run_json(runner, ["check", "--h", "exp(-s)",
                                      "--system", "cor1.3"],
                             env={"ELLGRAD_CONFIG": str(cfg)})
        assert rep["config"]["samples"] == 11

    def test_missing_config_errors(self, runner):
        result = runner.invoke(main, ["--config", "/no/such/file", "check",
                                      "--h", "s"])
        assert result.exit_code != 0


class TestOutputPrecision:
    def test_floats_round_trip(self, runner):
        code, rep = run_json(runner, [
            "bound", "--case", "general", "--n", "3", "--K", "0.3",
            "--R", "1.7"])
        # re-serialize from parsed floats and compare: 17 digits round-trip
        value = rep["bound"]["value"]
        assert isinstance(value, float)
        assert 0 < value < 1e6
