import json
import subprocess
import sys

import pytest

from risuav.cli import main
from risuav.scenario import Scenario

SMALL_CONFIG = """
[generation]
num_pairs = 3
num_cus = 2
num_obstacles = 4
region = 0,80,0,80

[optimizer]
learning_rate = 2.0
max_iters = 120

[search]
num_directions = 12
step_size = 4.0
max_steps = 6

[experiment]
trials = 1
base_seed = 2
"""


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(SMALL_CONFIG, encoding="utf-8")
    return path


class TestExitCodes:
    def test_unknown_flag_exits_one(self, capsys):
        assert main(["optimize", "--bogus"]) == 1
        assert "usage" in capsys.readouterr().err

    def test_unknown_command_exits_one(self, capsys):
        assert main(["frobnicate"]) == 1

    def test_missing_config_exits_one(self, tmp_path, capsys):
        assert main(["optimize", "--config", str(tmp_path / "nope.cfg")]) == 1
        assert "config error" in capsys.readouterr().err

    def test_bad_config_value_exits_one(self, tmp_path, capsys):
        path = tmp_path / "bad.cfg"
        path.write_text("[optimizer]\nlearning_rate = -3\n", encoding="utf-8")
        assert main(["optimize", "--config", str(path)]) == 1

    def test_runtime_failure_exits_two(self, tmp_path, capsys):
        path = tmp_path / "degen.cfg"
        path.write_text(SMALL_CONFIG + "\n", encoding="utf-8")
        text = path.read_text().replace("num_pairs = 3", "num_pairs = 0")
        path.write_text(text, encoding="utf-8")
        assert main(["optimize", "--config", str(path)]) == 2
        assert "error" in capsys.readouterr().err

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0
        assert "usage" in capsys.readouterr().out


class TestGenerate:
    def test_stdout_json_parses(self, config_path, capsys):
        assert main(["generate", "--config", str(config_path), "--seed", "5"]) == 0
        scn = Scenario.from_json(capsys.readouterr().out)
        assert scn.num_pairs == 3 and scn.num_cus == 2

    def test_written_file_reloads_identically(self, config_path, tmp_path, capsys):
        out = tmp_path / "scn.json"
        assert main(["generate", "--config", str(config_path), "--out", str(out)]) == 0
        first = Scenario.load(out)
        capsys.readouterr()  # drop the banner from the --out run
        assert main(["generate", "--config", str(config_path)]) == 0
        second = Scenario.from_json(capsys.readouterr().out)
        assert first == second


class TestOptimize:
    def test_deterministic_stdout(self, config_path, capsys):
        assert main(["optimize", "--config", str(config_path), "--seed", "7"]) == 0
        first = capsys.readouterr().out
        assert main(["optimize", "--config", str(config_path), "--seed", "7"]) == 0
        second = capsys.readouterr().out
        assert first == second
        assert "r_D:" in first and "r_C:" in first and "s:" in first
        assert "JointOpt" in first

    def test_mode_flag(self, config_path, capsys):
        assert main(["optimize", "--config", str(config_path), "--mode", "sampled"]) == 0
        assert "mode=sampled" in capsys.readouterr().out


class TestExperiment:
    def test_writes_outputs(self, config_path, tmp_path, capsys):
        out_dir = tmp_path / "results"
        code = main(
            ["experiment", "--config", str(config_path), "--out", str(out_dir),
             "--trials", "2"]
        )
        assert code == 0
        assert (out_dir / "rows.csv").is_file()
        assert (out_dir / "summary.csv").is_file()
        rows = (out_dir / "rows.csv").read_text().strip().splitlines()
        assert len(rows) == 1 + 2 * 3


class TestOracle:
    def test_reports_gap(self, config_path, capsys):
        code = main(
            ["oracle", "--config", str(config_path), "--seed", "3", "--resolution", "8"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "rel_gap" in out and "D2D" in out and "CU" in out


def test_console_script_runs(config_path):
    proc = subprocess.run(
        [sys.executable, "-m", "risuav.cli", "optimize", "--config", str(config_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "r_D:" in proc.stdout
