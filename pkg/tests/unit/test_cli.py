"""Unit tests for the command-line interface."""

import csv

import pytest

from snadboy_qlogic.cli import build_parser, run
from snadboy_qlogic.measurement import parse_ensemble_line


class TestParser:
    """Test cases for argument parsing."""

    def test_run_arguments(self):
        """Test run command options."""
        args = build_parser().parse_args(
            ["run", "--config", "c.yml", "--format", "csv", "--seed", "7", "--trials", "10"]
        )
        assert args.command == "run"
        assert args.format == "csv"
        assert args.seed == 7
        assert args.trials == 10
        assert args.workers == 1

    def test_run_requires_config(self):
        """Test run without --config."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["run"])

    def test_no_command_prints_help(self, capsys):
        """Test running without a subcommand."""
        assert run([]) == 0
        assert "usage" in capsys.readouterr().out


class TestExitCodes:
    """Test cases for exit-code discipline."""

    def test_validate_ok(self, fixtures_dir, capsys):
        """Test validating a good config."""
        assert run(["validate", "--config", str(fixtures_dir / "bell.yml")]) == 0
        assert "scenario 'eprb'" in capsys.readouterr().out

    def test_norm_violation(self, fixtures_dir, capsys):
        """Test exit code 2 for an unnormalized state."""
        assert run(["validate", "--config", str(fixtures_dir / "bad_norm.yml")]) == 2
        assert "state not normalized" in capsys.readouterr().err

    def test_unknown_scenario(self, fixtures_dir, capsys):
        """Test exit code 3 for an unknown scenario."""
        assert run(["run", "--config", str(fixtures_dir / "unknown_scenario.yml")]) == 3
        assert "foo" in capsys.readouterr().err

    def test_syntax_error(self, fixtures_dir):
        """Test exit code 4 for malformed YAML."""
        assert run(["validate", "--config", str(fixtures_dir / "syntax_error.yml")]) == 4

    def test_dimension_mismatch(self, fixtures_dir):
        """Test exit code 5 for a dimension mismatch."""
        assert run(["validate", "--config", str(fixtures_dir / "dims_mismatch.yml")]) == 5

    def test_unwritable_output(self, fixtures_dir, tmp_path):
        """Test exit code 6 when the report cannot be written."""
        code = run(
            [
                "run",
                "--config",
                str(fixtures_dir / "retrodiction.yml"),
                "--trials",
                "100",
                "--out",
                str(tmp_path / "missing" / "r.csv"),
            ]
        )
        assert code == 6

    def test_invalid_seed_override(self, fixtures_dir):
        """Test a negative seed override."""
        assert run(["run", "--config", str(fixtures_dir / "retrodiction.yml"), "--seed", "-1"]) == 4


class TestRunCommand:
    """Test cases for small scenario runs."""

    def test_csv_to_stdout(self, fixtures_dir, capsys):
        """Test CSV report on stdout."""
        code = run(
            ["run", "--config", str(fixtures_dir / "retrodiction.yml"), "--trials", "2000", "--format", "csv"]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert out.startswith("check_name,exact,empirical,tolerance,pass")

    def test_text_report_echoes_seed(self, fixtures_dir, capsys):
        """Test the text report shows seed and digest."""
        run(["run", "--config", str(fixtures_dir / "retrodiction.yml"), "--trials", "500", "--seed", "9"])
        out = capsys.readouterr().out
        assert "seed: 9" in out
        assert "config digest: " in out

    def test_table_and_records(self, fixtures_dir, tmp_path):
        """Test the joint table and trial records files."""
        table = tmp_path / "joint.csv"
        records = tmp_path / "records.txt"
        out = tmp_path / "report.csv"
        code = run(
            [
                "run",
                "--config",
                str(fixtures_dir / "bell.yml"),
                "--trials",
                "1000",
                "--format",
                "csv",
                "--out",
                str(out),
                "--table",
                str(table),
                "--records",
                str(records),
            ]
        )
        assert code == 0
        rows = list(csv.reader(table.open(newline="")))
        assert rows[0] == ["n", "j", "exact", "empirical", "stderr"]
        assert len(rows) == 5
        lines = records.read_text().splitlines()
        assert lines[0] == "# selector: all"
        trial_id, stages = parse_ensemble_line(lines[1])
        assert trial_id == 0
        assert [label for label, _ in stages] == ["ch1", "ch2"]
        assert stages[0][1] == stages[1][1]

    def test_theorem1_config(self, tmp_path, capsys):
        """Test a scenario: theorem1 config runs and reports the support."""
        path = tmp_path / "t1.yml"
        assert run(["config", "--scenario", "theorem1", str(path)]) == 0
        capsys.readouterr()
        assert run(["run", "--config", str(path)]) == 0
        out = capsys.readouterr().out
        assert "scenario: theorem1" in out
        assert "support of psi in K: {0, 2}" in out


class TestConfigCommand:
    """Test cases for example config creation."""

    def test_create_example(self, tmp_path, capsys):
        """Test writing an example config."""
        path = tmp_path / "chain.yml"
        assert run(["config", "--scenario", "chain", str(path)]) == 0
        assert "scenario: chain" in path.read_text()
        assert run(["validate", "--config", str(path)]) == 0

    def test_existing_file_needs_force(self, tmp_path):
        """Test an existing file is not overwritten without --force."""
        path = tmp_path / "eprb.yml"
        path.write_text("keep me")
        assert run(["config", str(path)]) == 2
        assert path.read_text() == "keep me"
        assert run(["config", "--force", str(path)]) == 0
