import subprocess
import sys

import pytest

from pushcorrect.cli import main

EXPERIMENT_YAML = """\
experiment:
  kind: translation
  mode: sim
  trials: 4
  base_seed: 321
  output_dir: {out}
"""

SCENARIO_YAML = """\
scenario:
  seed: 3
  cubes:
    - {id: a, color: red, start: [0.0, 0.0, 0.0], desired: [0.10, 0.06, 0.0]}
"""


@pytest.fixture
def experiment_config(tmp_path):
    out = tmp_path / "results"
    cfg = tmp_path / "exp.yaml"
    cfg.write_text(EXPERIMENT_YAML.format(out=out))
    return cfg, out


class TestRunExperiment:
    def test_happy_path(self, experiment_config, capsys):
        cfg, out = experiment_config
        assert main(["run-experiment", "--config", str(cfg), "--jobs", "1"]) == 0
        assert (out / "translation_sim.csv").exists()
        assert (out / "translation_sim_summary.csv").exists()
        assert (out / "translation_sim_boxplot.svg").exists()
        printed = capsys.readouterr().out
        assert "After placing" in printed
        assert "After pushing" in printed
        assert "±" in printed

    def test_repeat_runs_byte_identical(self, experiment_config, tmp_path, capsys):
        cfg, out = experiment_config
        main(["run-experiment", "--config", str(cfg), "--jobs", "1"])
        first_csv = (out / "translation_sim.csv").read_bytes()
        first_svg = (out / "translation_sim_boxplot.svg").read_bytes()
        first_text = capsys.readouterr().out
        main(["run-experiment", "--config", str(cfg), "--jobs", "1"])
        assert (out / "translation_sim.csv").read_bytes() == first_csv
        assert (out / "translation_sim_boxplot.svg").read_bytes() == first_svg
        assert capsys.readouterr().out == first_text

    def test_seed_override_changes_output(self, experiment_config):
        cfg, out = experiment_config
        main(["run-experiment", "--config", str(cfg), "--jobs", "1"])
        base = (out / "translation_sim.csv").read_bytes()
        main(["run-experiment", "--config", str(cfg), "--jobs", "1",
              "--seed", "777"])
        assert (out / "translation_sim.csv").read_bytes() != base

    def test_set_override(self, experiment_config):
        cfg, out = experiment_config
        rc = main(["run-experiment", "--config", str(cfg), "--jobs", "1",
                   "--set", "experiment.kind=nominal",
                   "--set", "experiment.trials=2"])
        assert rc == 0
        assert (out / "nominal_sim.csv").exists()

    def test_malformed_config_exit_1(self, tmp_path, capsys):
        cfg = tmp_path / "bad.yaml"
        cfg.write_text("experiment:\n  kind: [unclosed\n")
        assert main(["run-experiment", "--config", str(cfg)]) == 1
        assert "line" in capsys.readouterr().err

    def test_missing_config_exit_1(self, tmp_path):
        assert main(["run-experiment", "--config",
                     str(tmp_path / "nope.yaml")]) == 1


class TestValidateConfig:
    def test_valid_file(self, experiment_config, capsys):
        cfg, _ = experiment_config
        assert main(["validate-config", "--config", str(cfg)]) == 0
        assert "config ok" in capsys.readouterr().out

    def test_invalid_value_exit_1(self, tmp_path):
        cfg = tmp_path / "bad.yaml"
        cfg.write_text("experiment:\n  trials: -3\n")
        assert main(["validate-config", "--config", str(cfg)]) == 1

    def test_stdin(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "pushcorrect.cli", "validate-config",
             "--stdin"],
            input="experiment: {kind: nominal}\n", text=True,
            capture_output=True)
        assert proc.returncode == 0
        assert "config ok" in proc.stdout

    def test_print_default(self, capsys):
        assert main(["validate-config", "--print-default"]) == 0
        out = capsys.readouterr().out
        assert "experiment:" in out
        # the default text is itself a valid config
        from pushcorrect.config import parse_config_text
        parse_config_text(out)


class TestRunArrangement:
    def test_happy_path(self, tmp_path, capsys):
        cfg = tmp_path / "scn.yaml"
        cfg.write_text(SCENARIO_YAML)
        assert main(["run-arrangement", "--config", str(cfg)]) == 0
        out = capsys.readouterr().out
        assert "a: status=converged" in out


class TestRenderDebug:
    def test_dumps(self, tmp_path, capsys):
        cfg = tmp_path / "scn.yaml"
        cfg.write_text(SCENARIO_YAML)
        debug = tmp_path / "dbg"
        assert main(["render-debug", "--config", str(cfg),
                     "--debug-dir", str(debug)]) == 0
        assert (debug / "scene.ppm").exists()
        assert (debug / "a_mask_raw.pbm").exists()
        assert (debug / "a_mask_clean.pbm").exists()
        assert (debug / "a_corners.txt").exists()
