"""Tests for cli.py — CLI interface."""

from __future__ import annotations

import json
from unittest.mock import patch

from typer.testing import CliRunner

from resolvent_krylov.cli import app
from resolvent_krylov.store import RunLedger, manifest_sidecar, read_csv, read_json
from resolvent_krylov.verify import PropertyResult
from tests.conftest import make_manifest

cli = CliRunner()


class TestSchrodingerCommand:
    def test_full_dimension_is_exact(self, tmp_store):
        out = tmp_store / "s.csv"
        result = cli.invoke(
            app, ["schrodinger", "--grid-size", "64", "--n-max", "64", "--q", "2", "-o", str(out)]
        )
        assert result.exit_code == 0, result.output
        records = read_csv(out)
        assert len(records) == 64
        assert records[-1].n == 64
        assert records[-1].error <= 1e-10

    def test_records_run_in_ledger(self, tmp_store):
        out = tmp_store / "s.csv"
        cli.invoke(app, ["schrodinger", "-N", "32", "--n-max", "5", "--q", "2", "-o", str(out)])
        runs = list(RunLedger.load().runs.values())
        assert len(runs) == 1
        assert runs[0].subcommand == "schrodinger"
        assert runs[0].parameters["grid_size"] == 32
        assert runs[0].output == str(out)

    def test_no_record(self, tmp_store):
        out = tmp_store / "s.csv"
        cli.invoke(
            app,
            ["schrodinger", "-N", "32", "--n-max", "5", "--q", "2", "-o", str(out), "--no-record"],
        )
        assert RunLedger.load().runs == {}

    def test_csv_and_json_agree(self, tmp_store):
        base = ["schrodinger", "-N", "64", "--n-max", "20", "--q", "2", "--q", "4", "--method", "both"]
        csv_path, json_path = tmp_store / "r.csv", tmp_store / "r.json"
        assert cli.invoke(app, base + ["-o", str(csv_path)]).exit_code == 0
        assert cli.invoke(app, base + ["-o", str(json_path), "--format", "json"]).exit_code == 0
        manifest, from_json = read_json(json_path)
        assert read_csv(csv_path) == from_json
        assert len(from_json) == 2 * 2 * 20
        assert manifest.parameters["method"] == "both"
        assert manifest_sidecar(csv_path).exists()

    def test_csv_to_stdout(self, tmp_store):
        result = cli.invoke(
            app, ["schrodinger", "-N", "16", "--n-max", "3", "--q", "2", "--no-record"]
        )
        assert result.exit_code == 0
        assert "method,problem,dim,tau,gamma,q,n,error" in result.output
        assert "krylov,schrodinger,16," in result.output

    def test_invalid_grid_exits_2(self, tmp_store):
        result = cli.invoke(app, ["schrodinger", "-N", "63", "--q", "2"])
        assert result.exit_code == 2
        assert "Invalid input" in result.output

    def test_unknown_method_exits_2(self, tmp_store):
        result = cli.invoke(app, ["schrodinger", "--method", "magic"])
        assert result.exit_code == 2


class TestWaveFdCommand:
    ARGS = ["wave-fd", "-d", "8", "-d", "12", "--q", "2", "--n-max", "12"]

    def test_writes_records_and_grid_ratio(self, tmp_store):
        out = tmp_store / "w.csv"
        result = cli.invoke(app, self.ARGS + ["--ratio-from", "2", "-o", str(out)])
        assert result.exit_code == 0, result.output
        records = read_csv(out)
        assert len(records) == 2 * 12
        assert {r.dim for r in records} == {128, 288}
        extras = json.loads(manifest_sidecar(out).read_text())["extras"]
        assert "2" in extras["grid_ratio"]
        assert "Grid ratio q=2" in result.output

    def test_ratio_window_is_recorded(self, tmp_store):
        out = tmp_store / "w.csv"
        result = cli.invoke(
            app, self.ARGS + ["--ratio-from", "2", "--ratio-to", "6", "-o", str(out)]
        )
        assert result.exit_code == 0, result.output
        run = next(iter(RunLedger.load().runs.values()))
        assert run.parameters["ratio_from"] == 2
        assert run.parameters["ratio_to"] == 6
        assert "2 <= n <= 6" in result.output

    def test_inverted_ratio_window_exits_2(self, tmp_store):
        result = cli.invoke(
            app, self.ARGS + ["--ratio-from", "10", "--ratio-to", "5", "--no-record"]
        )
        assert result.exit_code == 2

    def test_reruns_are_bit_identical(self, tmp_store):
        a, b = tmp_store / "a.csv", tmp_store / "b.csv"
        cli.invoke(app, self.ARGS + ["-o", str(a), "--no-record"])
        cli.invoke(app, self.ARGS + ["-o", str(b), "--no-record"])
        assert a.read_bytes() == b.read_bytes()

    def test_cg_failure_exits_3(self, tmp_store):
        result = cli.invoke(
            app, self.ARGS + ["--solver", "cg", "--cg-maxiter", "1", "--no-record"]
        )
        assert result.exit_code == 3
        assert "Solver failed" in result.output

    def test_euler_with_phi_index_exits_2(self, tmp_store):
        result = cli.invoke(
            app, self.ARGS + ["--method", "euler", "--phi-index", "1", "--no-record"]
        )
        assert result.exit_code == 2


class TestSmoothingCommand:
    def test_prints_table(self):
        result = cli.invoke(app, ["smoothing", "--grid", "63", "--q", "1", "--n", "4", "--n", "16"])
        assert result.exit_code == 0, result.output
        assert "16" in result.output

    def test_writes_csv(self, tmp_path):
        out = tmp_path / "smooth.csv"
        result = cli.invoke(app, ["smoothing", "--grid", "63", "-o", str(out)])
        assert result.exit_code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "q,n,scaled_error"
        assert len(lines) == 1 + 2 * 5


class TestVerifyCommand:
    def test_phi_suite_passes(self):
        result = cli.invoke(app, ["verify", "--suite", "phi"])
        assert result.exit_code == 0, result.output
        assert "PASS" in result.output
        assert "FAIL" not in result.output

    def test_exactness_with_seed(self):
        result = cli.invoke(app, ["verify", "--suite", "exactness", "--seed", "7"])
        assert result.exit_code == 0, result.output

    def test_failure_exits_1(self):
        failing = [PropertyResult("broken", False, "1.0e+00")]
        with patch("resolvent_krylov.cli.run_suite", return_value=failing):
            result = cli.invoke(app, ["verify", "--suite", "phi"])
        assert result.exit_code == 1
        assert "FAIL" in result.output

    def test_unknown_suite_exits_2(self):
        result = cli.invoke(app, ["verify", "--suite", "nope"])
        assert result.exit_code == 2

    def test_verbose_flag(self):
        result = cli.invoke(app, ["-v", "verify", "--suite", "smoothing"])
        assert result.exit_code == 0, result.output


class TestRunsAndShow:
    def test_runs_empty(self, tmp_store):
        result = cli.invoke(app, ["runs"])
        assert result.exit_code == 0
        assert "No recorded runs" in result.output

    def test_runs_lists_manifest(self, tmp_store):
        ledger = RunLedger()
        m = make_manifest()
        ledger.add_run(m)
        ledger.save()
        result = cli.invoke(app, ["runs"])
        assert m.id in result.output
        assert "schrodinger" in result.output

    def test_show(self, tmp_store):
        ledger = RunLedger()
        m = make_manifest("wave-fd", tau=0.5)
        ledger.add_run(m)
        ledger.save()
        result = cli.invoke(app, ["show", m.id])
        assert result.exit_code == 0
        assert json.loads(result.output)["parameters"]["tau"] == 0.5

    def test_show_missing(self, tmp_store):
        result = cli.invoke(app, ["show", "run-00000000"])
        assert result.exit_code == 1
        assert "Not found" in result.output

    def test_rm(self, tmp_store):
        ledger = RunLedger()
        keep, drop = make_manifest(), make_manifest("wave-fd")
        ledger.add_run(keep)
        ledger.add_run(drop)
        ledger.save()
        result = cli.invoke(app, ["rm", drop.id])
        assert result.exit_code == 0
        assert "Removed" in result.output
        assert set(RunLedger.load().runs) == {keep.id}

    def test_rm_missing(self, tmp_store):
        result = cli.invoke(app, ["rm", "run-00000000"])
        assert result.exit_code == 1
        assert "Not found" in result.output
