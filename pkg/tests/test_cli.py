"""Command-line interface: subcommands, exit codes, artifact round-trips."""

import json
import math

import pytest

from trapshuttle import build_schedule, minimum_time
from trapshuttle.cli import main

PI = math.pi
GAMMA_PI = repr(PI)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSynthesize:
    def test_gamma_pi(self, capsys):
        code, out, _ = run_cli(capsys, "synthesize", "--gamma", GAMMA_PI)
        assert code == 0
        payload = json.loads(out)
        assert len(payload["durations"]) == 3
        assert payload["total_time"] == pytest.approx(4.64, abs=5e-3)
        assert payload["initial_sign"] == 1

    def test_physical_inputs_bang(self, capsys):
        code, out, _ = run_cli(capsys, "synthesize", "--omega", "1",
                               "--distance", repr(2 * PI), "--vmax", "1")
        assert code == 0
        payload = json.loads(out)
        assert payload["durations"] == [2 * PI]
        assert payload["total_time"] == 2 * PI
        assert payload["physical"]["total_time_seconds"] == 2 * PI

    def test_negative_gamma_mirrors(self, capsys):
        code, out, _ = run_cli(capsys, "synthesize", "--gamma", "-3.14159")
        assert code == 0
        payload = json.loads(out)
        assert payload["initial_sign"] == -1
        assert payload["gamma"] == -3.14159
        code, out2, _ = run_cli(capsys, "synthesize", "--gamma", "3.14159")
        assert json.loads(out2)["durations"] == payload["durations"]

    def test_zero_gamma_warns(self, capsys):
        code, out, _ = run_cli(capsys, "synthesize", "--gamma", "0")
        assert code == 0
        payload = json.loads(out)
        assert "warning" in payload
        assert payload["durations"] == []
        assert payload["total_time"] == 0.0

    def test_requires_exactly_one_input_mode(self, capsys):
        code, _, err = run_cli(capsys, "synthesize")
        assert code == 2
        code, _, err = run_cli(capsys, "synthesize", "--gamma", "1",
                               "--omega", "1", "--distance", "1", "--vmax", "1")
        assert code == 2
        code, _, err = run_cli(capsys, "synthesize", "--omega", "1")
        assert code == 2

    def test_writes_file(self, capsys, tmp_path):
        code, out, _ = run_cli(capsys, "synthesize", "--gamma", GAMMA_PI,
                               "--out", str(tmp_path))
        assert code == 0
        on_disk = json.loads((tmp_path / "synthesis.json").read_text())
        assert on_disk == json.loads(out)


class TestTrajectory:
    def test_csv_to_stdout(self, capsys):
        code, out, _ = run_cli(capsys, "trajectory", "--gamma", GAMMA_PI,
                               "--sample-step", "0.5")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "t,x1,x2,x3,u"
        last = lines[-1].split(",")
        assert float(last[1]) == pytest.approx(PI, abs=1e-8)
        assert float(last[3]) == pytest.approx(PI, abs=1e-8)

    def test_round_trip_from_synthesis_json(self, capsys, tmp_path):
        code, out, _ = run_cli(capsys, "synthesize", "--gamma", GAMMA_PI)
        plan_file = tmp_path / "plan.json"
        plan_file.write_text(out)
        code, csv_a, _ = run_cli(capsys, "trajectory", "--schedule-json",
                                 str(plan_file), "--sample-step", "0.25")
        assert code == 0
        code, csv_b, _ = run_cli(capsys, "trajectory", "--gamma", GAMMA_PI,
                                 "--sample-step", "0.25")
        assert csv_a == csv_b  # bit-stable round trip

    def test_json_output(self, capsys):
        code, out, _ = run_cli(capsys, "trajectory", "--gamma", GAMMA_PI,
                               "--sample-step", "1.0", "--json")
        rows = json.loads(out)
        assert rows[0] == {"t": 0.0, "x1": 0.0, "x2": 0.0, "x3": 0.0, "u": 1}


class TestSweep:
    def test_files_and_boundary_values(self, capsys, tmp_path):
        code, _, _ = run_cli(capsys, "sweep", "--gamma-min", repr(PI),
                             "--gamma-max", repr(3 * PI), "--count", "3",
                             "--out", str(tmp_path))
        assert code == 0
        rows = (tmp_path / "sweep.csv").read_text().strip().split("\n")
        assert rows[0] == "gamma,rho,tau,total_time"
        middle = rows[2].split(",")
        assert float(middle[0]) == 2 * PI
        assert float(middle[3]) == 2 * PI
        limit_rows = (tmp_path / "limit.csv").read_text().strip().split("\n")
        assert limit_rows[0] == "gamma_bar,t_rho1,t_limit"
        first = limit_rows[1].split(",")
        assert first == ["0.0", "0.0", "0.0"]
        last = limit_rows[-1].split(",")
        assert float(last[1]) == 2 * PI
        assert float(last[2]) == 2 * PI

    def test_empty_range_exits_2(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "sweep", "--gamma-min", "5",
                               "--gamma-max", "2", "--count", "10",
                               "--out", str(tmp_path))
        assert code == 2
        assert "gamma" in err


class TestVerify:
    def test_single_gamma_suite_passes(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--gamma", GAMMA_PI,
                               "--random-schedules", "50",
                               "--coarse-step", "0.02")
        assert code == 0
        payload = json.loads(out)
        assert payload["status"] == "pass"
        names = {c["name"] for c in payload["checks"]}
        assert any(n.startswith("brute-force") for n in names)

    def test_schedule_json_round_trip_passes(self, capsys, tmp_path):
        code, out, _ = run_cli(capsys, "synthesize", "--gamma", GAMMA_PI)
        plan_file = tmp_path / "plan.json"
        plan_file.write_text(out)
        code, out, _ = run_cli(capsys, "verify", "--schedule-json",
                               str(plan_file), "--gamma", GAMMA_PI)
        assert code == 0
        assert json.loads(out)["status"] == "pass"

    def test_perturbed_schedule_fails_with_named_check(self, capsys, tmp_path):
        plan = build_schedule(PI)
        durations = list(plan.schedule.durations)
        durations[1] += 0.1
        plan_file = tmp_path / "bad.json"
        plan_file.write_text(json.dumps({
            "initial_sign": 1, "durations": durations, "gamma": PI,
        }))
        code, out, _ = run_cli(capsys, "verify", "--schedule-json",
                               str(plan_file), "--gamma", GAMMA_PI)
        assert code == 1
        payload = json.loads(out)
        assert payload["status"] == "fail"
        assert "schedule-endpoint-residual" in payload["failed"]

    def test_missing_file_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "verify", "--schedule-json",
                               "/nonexistent/plan.json")
        assert code == 2


class TestQuantum:
    def test_report(self, capsys):
        code, out, _ = run_cli(capsys, "quantum", "--gamma", GAMMA_PI,
                               "--level", "0", "--grid-points", "1024",
                               "--dt", "2e-3")
        assert code == 0
        payload = json.loads(out)
        assert payload["fidelity"] >= 0.999
        assert payload["heating"] <= 1e-3

    def test_snapshot_dump(self, capsys, tmp_path):
        code, _, _ = run_cli(capsys, "quantum", "--gamma", GAMMA_PI,
                             "--level", "0", "--grid-points", "1024",
                             "--dt", "2e-3", "--snapshots", "0.5,2.0",
                             "--out", str(tmp_path))
        assert code == 0
        for name in ("density_t0.5.csv", "density_t2.csv"):
            lines = (tmp_path / name).read_text().strip().split("\n")
            assert lines[0] == "x,prob"
            assert len(lines) == 1 + 1024

    def test_bad_grid_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "quantum", "--gamma", GAMMA_PI,
                               "--grid-points", "1000")
        assert code == 2

    def test_negative_gamma_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "quantum", "--gamma", "-1.0")
        assert code == 2


class TestExitCodeContract:
    def test_success_is_zero(self, capsys):
        assert run_cli(capsys, "synthesize", "--gamma", "1.0")[0] == 0

    def test_parameter_error_is_two(self, capsys):
        assert run_cli(capsys, "synthesize", "--gamma", "nan")[0] == 2

    def test_usage_error_is_two(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["no-such-command"])
        assert excinfo.value.code == 2
