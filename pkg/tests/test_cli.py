"""Command-line contract: exit codes, record schema, config, determinism."""

import csv
import io
import json
import subprocess
import sys

import pytest

from designgap import cli


def run_cli(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def records(out):
    return [json.loads(line) for line in out.strip().splitlines()]


class TestExitCodes:
    def test_version(self, capsys):
        code, out, _ = run_cli(capsys, ["--version"])
        assert code == 0
        assert "0.1.0" in out

    def test_no_subcommand_is_usage_error(self, capsys):
        code, _, err = run_cli(capsys, [])
        assert code == 1
        assert "usage" in err

    def test_unknown_flag_is_named(self, capsys):
        code, _, err = run_cli(
            capsys, ["bounds", "--formula", "matchgate-depth", "--n", "4", "--frobnicate"]
        )
        assert code == 1
        assert "--frobnicate" in err

    def test_budget_overrun_is_exit_two(self, capsys):
        code, _, err = run_cli(capsys, ["graph", "--group", "matchgate", "--n", "14", "--census"])
        assert code == 2
        assert "budget" in err

    def test_validation_failure_is_exit_one(self, capsys):
        code, _, err = run_cli(capsys, ["bounds", "--formula", "matchgate-depth", "--n", "5"])
        assert code == 1
        assert "even n" in err


class TestRecordSchema:
    def test_bound_record(self, capsys):
        code, out, err = run_cli(capsys, ["bounds", "--formula", "matchgate-depth", "--n", "4"])
        assert code == 0
        recs = records(out)
        assert all(r.get("schema") == "v1" for r in recs)
        (rec,) = [r for r in recs if r.get("type") == "bound"]
        assert rec["exact"] == "9/7"
        assert rec["value"] == pytest.approx(9 / 7)
        assert rec["reference"] == "depth-bound/matchgate"

    def test_floats_render_seventeen_digits(self, capsys):
        _, out, _ = run_cli(capsys, ["bounds", "--formula", "matchgate-depth", "--n", "4"])
        assert "1.2857142857142858" in out

    def test_manifest_goes_to_stderr_only(self, capsys):
        _, out, err = run_cli(capsys, ["bounds", "--formula", "matchgate-depth", "--n", "4"])
        assert "manifest" not in out
        manifest = json.loads(err.strip().splitlines()[-1])
        assert manifest["manifest"] is True
        assert manifest["subcommand"] == "bounds"
        assert manifest["wall_time_s"] >= 0

    def test_discriminate_record_fields(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["discriminate", "--experiment", "depth", "--group", "matchgate",
             "--n", "2", "--samples", "20", "--seed", "5"],
        )
        assert code == 0
        (rec,) = records(out)
        for field in ("experiment", "group", "n", "params", "p_shallow", "p_shallow_stderr",
                      "p_haar", "p_haar_stderr", "mc_bound", "analytic_bound",
                      "analytic_ref", "seed"):
            assert field in rec
        assert rec["params"]["perturbation"] == "XI"
        assert rec["params"]["lightcone_confined"] is True
        assert rec["p_shallow"] == pytest.approx(1.0)

    def test_census_records(self, capsys):
        code, out, _ = run_cli(capsys, ["graph", "--group", "matchgate", "--n", "2", "--census"])
        assert code == 0
        recs = [r for r in records(out) if r.get("type") == "component"]
        sizes = [r["size"] for r in recs]
        assert sizes == [1, 4, 6, 4, 1]
        assert [r["majorana_count"] for r in recs] == [0, 1, 2, 3, 4]

    def test_graph_needs_a_task(self, capsys):
        code, _, err = run_cli(capsys, ["graph", "--group", "matchgate", "--n", "2"])
        assert code == 1
        assert "nothing to do" in err

    def test_weingarten_check_record(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["moments", "--quantity", "weingarten-check", "--group", "orthogonal",
             "--n", "2", "--samples", "400", "--seed", "9"],
        )
        assert code == 0
        (rec,) = records(out)
        assert (rec["alpha"], rec["beta"], rec["gamma"]) == ("-1/9", "2/9", "2/9")
        assert rec["entrywise_pass"] is True

    def test_mixed_unitary_alias(self, capsys):
        code, out, _ = run_cli(capsys, ["mixed-unitary", "--n", "2", "--samples", "20", "--seed", "5"])
        assert code == 0
        (rec,) = records(out)
        assert rec["experiment"] == "mixed-unitary"
        assert rec["analytic_bound"] == pytest.approx(1.6)


class TestOutputModes:
    def test_csv_format(self, capsys):
        code, out, _ = run_cli(
            capsys, ["bounds", "--formula", "matchgate-depth", "--n", "4", "--format", "csv"]
        )
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert rows[0]["exact"] == "9/7"
        assert float(rows[0]["value"]) == pytest.approx(9 / 7)

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "bounds.jsonl"
        code, out, err = run_cli(
            capsys, ["bounds", "--formula", "orthogonal", "--d", "8", "--dL", "4",
                     "--out", str(target)]
        )
        assert code == 0
        assert out == ""
        recs = records(target.read_text())
        assert recs[0]["exact"] == "52/35"
        manifest = json.loads(err.strip().splitlines()[-1])
        assert manifest["out"] == str(target)


class TestConfigFile:
    def test_config_supplies_defaults(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"formula": "matchgate-depth", "n": 4}))
        code, out, _ = run_cli(capsys, ["bounds", "--config", str(cfg)])
        assert code == 0
        assert records(out)[0]["exact"] == "9/7"

    def test_flags_override_config(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"formula": "matchgate-depth", "n": 6}))
        code, out, _ = run_cli(capsys, ["bounds", "--config", str(cfg), "--n", "4"])
        assert code == 0
        assert records(out)[0]["exact"] == "9/7"

    def test_unknown_config_keys_rejected(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"formula": "matchgate-depth", "n": 4, "bogus": 1}))
        code, _, err = run_cli(capsys, ["bounds", "--config", str(cfg)])
        assert code == 1
        assert "bogus" in err

    def test_malformed_config_rejected(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("{not json")
        code, _, err = run_cli(capsys, ["bounds", "--config", str(cfg)])
        assert code == 1


class TestDeterminism:
    def test_same_seed_same_bytes(self, capsys):
        argv = ["discriminate", "--experiment", "depth", "--group", "matchgate",
                "--n", "2", "--samples", "32", "--seed", "5"]
        _, out1, _ = run_cli(capsys, argv)
        _, out2, _ = run_cli(capsys, argv)
        assert out1 == out2

    def test_threads_do_not_change_bytes(self, capsys):
        base = ["discriminate", "--experiment", "gate-count", "--n", "2",
                "--samples", "32", "--seed", "7"]
        _, out1, _ = run_cli(capsys, base + ["--threads", "1"])
        _, out2, _ = run_cli(capsys, base + ["--threads", "3"])
        assert out1 == out2

    def test_different_seeds_differ(self, capsys):
        base = ["discriminate", "--experiment", "depth", "--group", "matchgate",
                "--n", "2", "--samples", "32"]
        _, out1, _ = run_cli(capsys, base + ["--seed", "5"])
        _, out2, _ = run_cli(capsys, base + ["--seed", "6"])
        assert out1 != out2


class TestReproduce:
    def test_unknown_target_rejected(self, capsys):
        code, _, err = run_cli(capsys, ["reproduce", "--id", "unknown-target"])
        assert code == 1
        assert "propC5" in err

    def test_cheap_target_passes(self, capsys):
        code, out, _ = run_cli(capsys, ["reproduce", "--id", "propC5"])
        assert code == 0
        recs = records(out)
        summary = recs[-1]
        assert summary["check"] == "all"
        assert summary["pass"] is True
        assert summary["checks"] == len(recs) - 1
        assert all(r["pass"] for r in recs[:-1])

    def test_checks_carry_predictions(self, capsys):
        code, out, _ = run_cli(capsys, ["reproduce", "--id", "cor4"])
        assert code == 0
        for rec in records(out)[:-1]:
            assert "predicted" in rec and "measured" in rec
            assert rec["pass"] is True


class TestModuleEntryPoint:
    def test_python_dash_m_separates_streams(self):
        proc = subprocess.run(
            [sys.executable, "-m", "designgap.cli", "bounds",
             "--formula", "matchgate-depth", "--n", "4"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert all(json.loads(line).get("manifest") is None for line in proc.stdout.splitlines())
        assert json.loads(proc.stderr.strip().splitlines()[-1])["manifest"] is True
