import json
import os

import numpy as np
import pytest

from qdimer import cli
from qdimer import io as qio


def run(args):
    return cli.main(args)


class TestSimulate:
    def test_gutzwiller_run_writes_histogram(self, tmp_path, capsys):
        out = tmp_path / "h.csv"
        code = run(["simulate", "--backend", "gutzwiller",
                    "--lambda1", "0.25", "--lambda2", "0.25",
                    "--t-final", "1.0", "--n-traj", "500", "--seed", "7",
                    "--bins", "24", "--out", str(out)])
        assert code == 0
        h = qio.read_histogram(out)
        assert h.total == 500
        assert h.meta["backend"] == "gutzwiller"
        assert h.meta["master_seed"] == 7
        assert "traj/s" in capsys.readouterr().out

    def test_rerun_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["simulate", "--backend", "gutzwiller", "--lambda1", "0.6",
                "--lambda2", "0.3", "--t-final", "1.0", "--n-traj", "400",
                "--seed", "3", "--bins", "16"]
        assert run(args + ["--out", str(a)]) == 0
        assert run(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_thread_count_does_not_change_output(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["simulate", "--backend", "exact", "--lambda1", "0.3",
                "--lambda2", "0.4", "--t-final", "0.5", "--n-traj", "64",
                "--seed", "11", "--bins", "16"]
        assert run(args + ["--threads", "1", "--out", str(a)]) == 0
        assert run(args + ["--threads", "2", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_exact_summary_written(self, tmp_path):
        out, summ = tmp_path / "h.csv", tmp_path / "s.txt"
        code = run(["simulate", "--backend", "exact", "--lambda1", "0.25",
                    "--lambda2", "0.25", "--t-final", "0.5", "--n-traj", "32",
                    "--seed", "1", "--bins", "12", "--out", str(out),
                    "--summary-out", str(summ)])
        assert code == 0
        text = summ.read_text()
        assert "f_mean=" in text and "readout_r0=" in text

    def test_sse_backend_runs(self, tmp_path):
        out = tmp_path / "h.csv"
        code = run(["simulate", "--backend", "sse", "--lambda1", "0.3",
                    "--lambda2", "0.3", "--t-final", "0.5", "--n-traj", "32",
                    "--seed", "2", "--bins", "12", "--out", str(out)])
        assert code == 0
        assert qio.read_histogram(out).total == 32

    def test_fokker_planck_backend_runs(self, tmp_path):
        out = tmp_path / "h.csv"
        code = run(["simulate", "--backend", "fokker-planck",
                    "--lambda1", "0.25", "--lambda2", "0.25",
                    "--bins", "36", "--fp-tmax", "30", "--fp-tol", "1e-4",
                    "--out", str(out)])
        assert code == 0
        h = qio.read_histogram(out)
        assert h.total == 0
        assert h.density.sum() * h.dtheta**2 == pytest.approx(1.0, abs=1e-6)

    def test_validation_error_is_exit_3(self, tmp_path, capsys):
        code = run(["simulate", "--backend", "gutzwiller", "--lambda1", "0.5",
                    "--lambda2", "0.5", "--dt", "1.0",
                    "--out", str(tmp_path / "x.csv")])
        assert code == 3
        assert "dt" in capsys.readouterr().err

    def test_lambda_gamma_flags_mutually_exclusive(self, tmp_path):
        code = run(["simulate", "--backend", "gutzwiller", "--lambda1", "0.5",
                    "--gamma1", "2.0", "--out", str(tmp_path / "x.csv")])
        assert code == 3

    def test_usage_error_is_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            run(["simulate", "--backend", "unknown", "--out", "x.csv"])
        assert exc.value.code == 2

    def test_unwritable_output_is_exit_5(self, tmp_path):
        code = run(["simulate", "--backend", "gutzwiller", "--lambda1", "0.1",
                    "--lambda2", "0.1", "--t-final", "0.1", "--n-traj", "8",
                    "--bins", "8", "--out", str(tmp_path / "nodir" / "x.csv")])
        assert code == 5


class TestConfigAndEnv:
    def test_config_file_provides_defaults(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"backend": "gutzwiller", "lambda1": 0.25,
                                   "lambda2": 0.25, "t-final": 0.5,
                                   "n-traj": 100, "seed": 5, "bins": 12}))
        out = tmp_path / "h.csv"
        code = run(["simulate", "--config", str(cfg), "--out", str(out)])
        assert code == 0
        assert qio.read_histogram(out).total == 100

    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"backend": "gutzwiller", "lambda1": 0.25,
                                   "lambda2": 0.25, "t-final": 0.5,
                                   "n-traj": 100, "bins": 12}))
        out = tmp_path / "h.csv"
        code = run(["simulate", "--config", str(cfg), "--n-traj", "50",
                    "--out", str(out)])
        assert code == 0
        assert qio.read_histogram(out).total == 50

    def test_unknown_config_key_is_exit_5(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"no-such-flag": 1}))
        code = run(["simulate", "--backend", "gutzwiller", "--config", str(cfg),
                    "--out", str(tmp_path / "x.csv")])
        assert code == 5

    def test_outdir_env_resolves_relative_paths(self, tmp_path, monkeypatch):
        monkeypatch.setenv(cli.OUTDIR_ENV, str(tmp_path))
        code = run(["simulate", "--backend", "gutzwiller", "--lambda1", "0.1",
                    "--lambda2", "0.1", "--t-final", "0.1", "--n-traj", "8",
                    "--bins", "8", "--out", "rel.csv"])
        assert code == 0
        assert (tmp_path / "rel.csv").exists()


class TestAnalysisCommands:
    def test_flow_command(self, tmp_path):
        out = tmp_path / "flow.csv"
        assert run(["flow", "--lambda1", "0.25", "--lambda2", "0.25",
                    "--grid-n", "12", "--out", str(out)]) == 0
        rows = [l for l in out.read_text().strip().split("\n")
                if not l.startswith("#")]
        assert len(rows) == 144

    def test_fixed_points_command(self, tmp_path):
        out = tmp_path / "fp.csv"
        assert run(["fixed-points", "--lambda1", "1.25", "--lambda2", "0.25",
                    "--out", str(out)]) == 0
        rows = [l for l in out.read_text().strip().split("\n")
                if not l.startswith("#")]
        assert len(rows) == 4

    def test_phase_diagram_command(self, tmp_path):
        out = tmp_path / "pd.csv"
        assert run(["phase-diagram", "--l1", "0.25:1.25:2",
                    "--l2", "0.25:1.75:2", "--out", str(out)]) == 0
        rows = [l for l in out.read_text().strip().split("\n")
                if not l.startswith("#")]
        labels = {tuple(r.split(",")[:2]): r.split(",")[-1] for r in rows}
        assert labels[("0.25", "0.25")] == "ergodic"
        assert labels[("0.25", "1.75")] == "correlated_zeno"
        assert labels[("1.25", "0.25")] == "standard_zeno"

    def test_bad_range_spec_is_exit_3(self, tmp_path):
        assert run(["phase-diagram", "--l1", "0-2-5", "--l2", "0:2:5",
                    "--out", str(tmp_path / "x.csv")]) == 3

    def test_help_lists_flags(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run(["simulate", "--help"])
        assert exc.value.code == 0
        text = capsys.readouterr().out
        for flag in ("--backend", "--lambda1", "--dt", "--t-final", "--n-traj",
                     "--seed", "--bins", "--out", "--threads"):
            assert flag in text
