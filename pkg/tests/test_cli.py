"""CLI behaviour: output formats, exit codes, and byte-level determinism."""

import shutil
import subprocess
import sys

import pytest

from sqkd_eve.cli import main
from sqkd_eve.experiments import COMPARISONS_HEADER, CURVES_HEADER

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCrossover:
    def test_prints_six_decimal_root(self, capsys):
        code, out, err = run_cli(["crossover"], capsys)
        assert code == 0
        assert out == "0.087695\n"
        assert err == ""
        assert abs(float(out) - 0.0877) <= 5e-5

    def test_out_file(self, tmp_path, capsys):
        target = tmp_path / "root.txt"
        code, out, _ = run_cli(["crossover", "--out", str(target)], capsys)
        assert code == 0
        assert out == ""
        assert target.read_text() == "0.087695\n"


class TestCurve:
    def test_two_step_endpoints(self, capsys):
        code, out, _ = run_cli(["curve", "--steps", "2", "--dmax", "0.5"], capsys)
        assert code == 0
        lines = out.split("\n")
        assert lines[0] == CURVES_HEADER
        assert lines[1].startswith("0.000000,0.500000,0.000000")
        assert lines[2].startswith("0.500000,1.000000,0.500000")
        assert lines[3] == ""

    def test_default_grid_size(self, capsys):
        code, out, _ = run_cli(["curve"], capsys)
        assert code == 0
        assert len(out.split("\n")) == 103  # header + 101 rows + trailing ""

    def test_invalid_steps_exit_code(self, capsys):
        code, out, err = run_cli(["curve", "--steps", "1"], capsys)
        assert code == 1
        assert out == ""
        assert "error" in err

    def test_inverted_range_exit_code(self, capsys):
        code, _, err = run_cli(["curve", "--dmin", "0.4", "--dmax", "0.1"], capsys)
        assert code == 1
        assert "error" in err

    def test_plot_writes_figure(self, tmp_path, capsys):
        figure = tmp_path / "advantage.png"
        csv_file = tmp_path / "curves.csv"
        code, out, _ = run_cli(
            [
                "curve",
                "--steps", "11",
                "--out", str(csv_file),
                "--plot", str(figure),
            ],
            capsys,
        )
        assert code == 0
        assert out == ""
        assert csv_file.read_text().startswith(CURVES_HEADER)
        assert figure.read_bytes()[: len(PNG_MAGIC)] == PNG_MAGIC


class TestParsing:
    def test_unknown_flag_exits_one(self, capsys):
        code, _, err = run_cli(["curve", "--bogus"], capsys)
        assert code == 1
        assert "usage" in err

    def test_unknown_subcommand_exits_one(self, capsys):
        code, _, _ = run_cli(["frobnicate"], capsys)
        assert code == 1

    def test_missing_subcommand_exits_one(self, capsys):
        code, _, _ = run_cli([], capsys)
        assert code == 1

    def test_help_exits_zero(self, capsys):
        code, out, _ = run_cli(["--help"], capsys)
        assert code == 0
        assert "curve" in out
        assert "crossover" in out


class TestSimulate:
    def test_two_way_paper_rows(self, capsys):
        code, out, _ = run_cli(
            [
                "simulate",
                "--variant", "classical",
                "--eve", "two-way",
                "--D", "0.05",
                "--trials", "20000",
                "--seed", "42",
            ],
            capsys,
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == COMPARISONS_HEADER
        assert len(lines) == 4
        success = lines[1].split(",")
        assert success[1] == "PE2_AVG"
        assert success[2] == "0.722797"
        assert success[6] == "true"
        assert lines[2].split(",")[1] == "DISTURBANCE_TEST"
        assert lines[3].split(",")[1] == "DISTURBANCE_CTRL"

    def test_hadamard_quantity_label(self, capsys):
        code, out, _ = run_cli(
            [
                "simulate",
                "--variant", "hadamard",
                "--eve", "two-way",
                "--D", "0.1",
                "--trials", "20000",
            ],
            capsys,
        )
        assert code == 0
        assert out.split("\n")[1].split(",")[1] == "PE2_AVG_H"

    def test_auto_resolves_by_crossover(self, capsys):
        _, low, _ = run_cli(
            ["simulate", "--eve", "auto", "--D", "0.05", "--trials", "10000"], capsys
        )
        assert low.split("\n")[1].split(",")[1] == "PE2_AVG"
        _, high, _ = run_cli(
            ["simulate", "--eve", "auto", "--D", "0.2", "--trials", "10000"], capsys
        )
        assert high.split("\n")[1].split(",")[1] == "PE1"

    def test_independent_mode_diverges_from_average(self, capsys):
        code, out, _ = run_cli(
            [
                "simulate",
                "--eve", "two-way",
                "--D", "0.1",
                "--mode", "independent",
                "--trials", "20000",
                "--seed", "1",
            ],
            capsys,
        )
        assert code == 0
        lines = out.strip().split("\n")
        success = lines[1].split(",")
        assert success[1] == "PE2_AVG"
        assert success[2] == "0.798142"
        assert success[6] == "false"  # protocol tracks the forward guess instead
        assert abs(float(success[3]) - 0.7236) < 0.01
        assert lines[2].split(",")[6] == "true"

    def test_p_flag_derives_cascade_disturbance(self, capsys):
        code, out, _ = run_cli(
            ["simulate", "--eve", "two-way", "--p", "0.1", "--trials", "10000"],
            capsys,
        )
        assert code == 0
        test_row = out.strip().split("\n")[2].split(",")
        assert test_row[0] == "0.180000"
        assert test_row[2] == "0.180000"

    def test_none_emits_disturbance_rows_only(self, capsys):
        code, out, _ = run_cli(["simulate", "--trials", "10000"], capsys)
        assert code == 0
        lines = out.strip().split("\n")
        assert len(lines) == 3
        assert lines[1].split(",")[1] == "DISTURBANCE_TEST"
        assert lines[1].split(",")[3] == "0.000000"

    def test_d_and_p_are_mutually_exclusive(self, capsys):
        code, _, err = run_cli(
            ["simulate", "--eve", "two-way", "--D", "0.1", "--p", "0.05"], capsys
        )
        assert code == 1
        assert "error" in err

    def test_p_requires_two_way(self, capsys):
        code, _, err = run_cli(["simulate", "--eve", "one-way", "--p", "0.1"], capsys)
        assert code == 1
        assert "--p applies only" in err

    def test_attack_without_disturbance_rejected(self, capsys):
        code, _, err = run_cli(["simulate", "--eve", "two-way"], capsys)
        assert code == 1
        assert "--D or --p" in err

    def test_none_with_disturbance_rejected(self, capsys):
        code, _, err = run_cli(["simulate", "--eve", "none", "--D", "0.1"], capsys)
        assert code == 1
        assert "error" in err

    def test_out_of_range_disturbance_rejected(self, capsys):
        code, _, err = run_cli(["simulate", "--eve", "one-way", "--D", "0.7"], capsys)
        assert code == 1
        assert "error" in err

    def test_transcript_export(self, tmp_path, capsys):
        target = tmp_path / "round.csv"
        code, out, _ = run_cli(
            [
                "simulate",
                "--eve", "one-way",
                "--D", "0.1",
                "--trials", "10000",
                "--n", "16",
                "--transcript", str(target),
            ],
            capsys,
        )
        assert code == 0
        assert out.startswith(COMPARISONS_HEADER)
        lines = target.read_text().split("\n")
        assert lines[0].startswith("index,alice_basis,alice_bit")
        assert len(lines) == 258  # header + N=256 rows + trailing ""

    def test_sifting_shortfall_exits_three(self, tmp_path, capsys):
        # delta=0 leaves no margin; seed 0, run 0 falls short of 2n Z-SIFT
        # bits, and the transcript round runs before any CSV is printed.
        code, out, err = run_cli(
            [
                "simulate",
                "--trials", "10000",
                "--n", "16",
                "--delta", "0",
                "--seed", "0",
                "--transcript", str(tmp_path / "never.csv"),
            ],
            capsys,
        )
        assert code == 3
        assert out == ""
        assert "error" in err


class TestVerifySubcommand:
    def test_small_run_passes(self, capsys):
        code, out, _ = run_cli(
            ["verify", "--grid-size", "2", "--trials", "10000"], capsys
        )
        assert code == 0
        assert out.endswith("all checks passed\n")
        assert "[PASS] crossover root" in out

    def test_independent_mode_still_exits_zero(self, capsys):
        code, out, _ = run_cli(
            ["verify", "--grid-size", "2", "--trials", "10000", "--mode", "independent"],
            capsys,
        )
        assert code == 0
        assert "documented model divergence" in out

    def test_bad_grid_exits_one(self, capsys):
        code, _, err = run_cli(["verify", "--grid-size", "1"], capsys)
        assert code == 1
        assert "error" in err


def run_subprocess(argv):
    return subprocess.run(
        [sys.executable, "-m", "sqkd_eve", *argv],
        capture_output=True,
        timeout=120,
    )


class TestByteDeterminism:
    @pytest.mark.parametrize(
        "argv",
        [
            ["crossover"],
            ["curve", "--steps", "5"],
            [
                "simulate",
                "--eve", "two-way",
                "--D", "0.05",
                "--trials", "10000",
                "--seed", "7",
            ],
            ["verify", "--grid-size", "2", "--trials", "10000", "--seed", "7"],
        ],
        ids=["crossover", "curve", "simulate", "verify"],
    )
    def test_repeat_invocations_match_bytes(self, argv):
        first = run_subprocess(argv)
        second = run_subprocess(argv)
        assert first.returncode == 0
        assert second.returncode == 0
        assert first.stdout == second.stdout
        assert first.stdout  # non-empty output

    def test_console_script_installed(self):
        path = shutil.which("sqkd-eve")
        assert path is not None
        result = subprocess.run(
            [path, "crossover"], capture_output=True, timeout=60
        )
        assert result.returncode == 0
        assert result.stdout == b"0.087695\n"
