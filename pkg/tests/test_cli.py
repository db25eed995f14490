import json
import subprocess
import sys

import pytest

from ptwells import DomainError, IntegratorConfig, SystemParams
from ptwells.cli import (
    EXIT_AMBIGUOUS,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_USAGE,
    cmd_sweep_e2,
    default_t_max,
    main,
    parse_complex,
)

CLOSED_START = "point:-2.047311112165265,-0.3113981633974483"  # 0.474 above left n=0


class TestParseComplex:
    @pytest.mark.parametrize(
        "text,value",
        [
            ("1+1i", 1 + 1j),
            ("0.8", 0.8 + 0j),
            ("-2.5i", -2.5j),
            ("1-0.3i", 1 - 0.3j),
            ("i", 1j),
            ("-i", -1j),
            ("3.2e-1-0.4i", 0.32 - 0.4j),
            ("2i", 2j),
            ("-7.99+0.4i", -7.99 + 0.4j),
        ],
    )
    def test_literals(self, text, value):
        assert parse_complex(text) == pytest.approx(value)

    @pytest.mark.parametrize("text", ["", "abc", "1+2j+3", "++i"])
    def test_rejects_garbage(self, text):
        with pytest.raises(DomainError):
            parse_complex(text)


class TestDefaults:
    def test_t_max_heuristic(self):
        assert default_t_max(1 + 1j) == pytest.approx(640.0)
        assert default_t_max(1 + 0.5j) == pytest.approx(1280.0)
        assert default_t_max(1 + 6.7j) == pytest.approx(200.0)
        assert default_t_max(0.8 + 0j) == pytest.approx(200.0)


class TestWellsCommand:
    def test_csv_golden(self, capsys):
        assert main(["wells", "--zeta", "0.1", "--M", "3", "--n-min", "0", "--n-max", "0"]) == EXIT_OK
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "side,n,x,y"
        assert out[1] == "right,0,2.047311112165265,0.7853981633974483"
        assert out[2] == "left,0,-2.047311112165265,-0.7853981633974483"

    def test_bad_range(self, capsys):
        assert main(["wells", "--zeta", "0.1", "--M", "3", "--n-min", "2", "--n-max", "1"]) == EXIT_USAGE


class TestSpectrumCommand:
    def test_csv_and_phase_line(self, capsys, tmp_path):
        out_path = tmp_path / "spec.csv"
        assert main(["spectrum", "--zeta", "0.1", "--M", "3", "--out", str(out_path)]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "phase=unbroken zeta_c=0.5"
        lines = out_path.read_text().splitlines()
        assert lines[0] == "label,re_E,im_E,is_real"
        assert lines[1].startswith("E+,7.9697958971132")
        assert lines[3] == "E0,4.99,0.0,true"

    def test_unsupported_m(self, capsys):
        assert main(["spectrum", "--zeta", "0.1", "--M", "5"]) == EXIT_USAGE


class TestSimulateCommand:
    def test_closed_run_outputs(self, tmp_path, capsys):
        args = [
            "simulate", "--zeta", "0.1", "--M", "3", "--e", "0.8",
            "--start", CLOSED_START, "--t-max", "20",
            "--trajectory-out", str(tmp_path / "traj.csv"),
            "--events-out", str(tmp_path / "events.jsonl"),
            "--summary-out", str(tmp_path / "summary.json"),
        ]
        assert main(args) == EXIT_OK
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["classification"]["kind"] == "closed"
        assert summary["classification"]["anchor"] == {"side": "left", "n": 0}
        assert summary["max_drift"] <= 1e-8
        header = (tmp_path / "traj.csv").read_text().splitlines()[0]
        assert header == "t,re_z,im_z,re_p,im_p,e1_err,e2_err"
        events = [json.loads(l) for l in (tmp_path / "events.jsonl").read_text().splitlines()]
        assert events[-1]["type"] == "classification"
        assert all(e["type"] == "crossing" for e in events[:-1])

    def test_deterministic_output(self, tmp_path, capsys):
        files = []
        for tag in ("a", "b"):
            args = [
                "simulate", "--zeta", "0.1", "--M", "3", "--e", "0.8",
                "--start", CLOSED_START, "--t-max", "10",
                "--trajectory-out", str(tmp_path / f"traj_{tag}.csv"),
            ]
            assert main(args) == EXIT_OK
            files.append((tmp_path / f"traj_{tag}.csv").read_bytes())
        assert files[0] == files[1]

    def test_config_file_with_flag_override(self, tmp_path, capsys):
        cfg = {
            "zeta": 0.1, "m": 3, "e": "0.8", "start": CLOSED_START,
            "t_max": 999.0,
            "summary_out": str(tmp_path / "s.json"),
        }
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(json.dumps(cfg))
        assert main(["simulate", "--config", str(cfg_path), "--t-max", "10"]) == EXIT_OK
        summary = json.loads((tmp_path / "s.json").read_text())
        assert summary["t_final"] == 10.0

    def test_missing_args(self, capsys):
        assert main(["simulate", "--zeta", "0.1"]) == EXIT_USAGE

    def test_bad_complex(self, capsys):
        assert main(["simulate", "--zeta", "0.1", "--M", "3", "--e", "zzz"]) == EXIT_USAGE

    def test_ambiguous_exit(self, capsys):
        # too short to close, escape, or cross
        args = [
            "simulate", "--zeta", "0.1", "--M", "3", "--e", "0.8",
            "--start", CLOSED_START, "--t-max", "0.2",
        ]
        assert main(args) == EXIT_AMBIGUOUS

    def test_summary_printed(self, capsys):
        args = [
            "simulate", "--zeta", "0.1", "--M", "3", "--e", "0.8",
            "--start", CLOSED_START, "--t-max", "10",
        ]
        assert main(args) == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert summary["branch"] == "principal"
        assert summary["termination"] == "time_limit"


class TestSweepCommand:
    def test_single_row_matches_simulate(self, tmp_path, capsys):
        params = SystemParams(0.1, 3)
        cfg = IntegratorConfig(
            t_max=60.0, energy_drift_limit=1e-3, escape_radius=12.0, max_steps=5_000_000
        )
        rows = cmd_sweep_e2(params, 1.0, [4.0], cfg=cfg, workers=1)
        assert len(rows) == 1
        row = rows[0]
        assert row["error"] == ""

        args = [
            "simulate", "--zeta", "0.1", "--M", "3", "--e", "1+4i",
            "--start", "origin", "--t-max", "60",
            "--energy-drift-limit", "1e-3", "--escape-radius", "12",
        ]
        assert main(args) == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert summary["tunneling"]["tau"] == row["tau"]
        assert summary["classification"]["wells"]["left"]["n"] == row["n_left"]

    def test_mixed_signs_rejected(self):
        params = SystemParams(0.1, 3)
        with pytest.raises(DomainError):
            cmd_sweep_e2(params, 1.0, [0.5, -0.5], workers=1)

    def test_sweep_csv_and_order(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        args = [
            "sweep-e2", "--zeta", "0.1", "--M", "3", "--e1", "1",
            "--e2", "6.7,4.0", "--t-max", "40",
            "--energy-drift-limit", "1e-3", "--escape-radius", "12",
            "--out", str(out), "--workers", "2",
        ]
        assert main(args) == EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0] == "e2,tau,dwell_left,dwell_right,n_left,n_right,error"
        assert lines[1].startswith("6.7,")
        assert lines[2].startswith("4.0,")

    def test_row_error_recorded(self, tmp_path):
        params = SystemParams(0.1, 3)
        # closed-orbit energy: classify fails to be tunneling, error column set
        cfg = IntegratorConfig(t_max=5.0, energy_drift_limit=1e-3, escape_radius=12.0)
        rows = cmd_sweep_e2(params, 1.0, [1.0], cfg=cfg, workers=1)
        assert len(rows) == 1
        assert rows[0]["tau"] is None
        assert rows[0]["error"] != ""


class TestThresholdCommand:
    def test_bracket_failure_exit(self, capsys):
        args = [
            "threshold", "--zeta", "0.1", "--M", "3", "--e", "0.8",
            "--side", "left", "--n", "0", "--bracket", "0.10,0.20",
            "--t-max", "30", "--escape-radius", "4",
        ]
        assert main(args) == EXIT_NUMERICAL
        assert "bracket" in capsys.readouterr().err

    def test_coarse_search_reports_bracket(self, capsys):
        args = [
            "threshold", "--zeta", "0.1", "--M", "3", "--e", "0.8",
            "--side", "left", "--n", "0", "--width", "0.1",
        ]
        assert main(args) == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out["closed_offset"] < out["critical_offset"] < out["open_offset"]
        assert 0.45 <= out["critical_offset"] <= 0.6
        assert out["n_probes"] >= 4


class TestEntryPoint:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "ptwells", "wells", "--zeta", "1", "--M", "2", "--n-min", "0", "--n-max", "0"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.splitlines()[0] == "side,n,x,y"

    def test_usage_error_exit_code(self):
        proc = subprocess.run(
            [sys.executable, "-m", "ptwells", "wells", "--zeta", "0.1"],
            capture_output=True, text=True,
        )
        assert proc.returncode == EXIT_USAGE
