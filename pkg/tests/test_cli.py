"""Tests for the command-line interface."""

import json

import pytest

from sharpset.cli import (
    EXIT_GATE,
    EXIT_OK,
    EXIT_VALIDATION,
    main,
    parse_rational_matrix,
    render_inequality,
)
from sharpset.ratlp import Rat

from tests.test_closedform import EX4_ROWS


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == EXIT_OK, err
    return json.loads(out)


BINARY = ("--family", "static", "--D", "2", "--T", "2", "--v", "0,0;0,1")


class TestRender:
    LABELS2 = [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_binary_swap(self):
        assert render_inequality((0, -1, 1, 0), self.LABELS2) == "p[1,0] ≤ p[0,1]"

    def test_zero_vector(self):
        assert render_inequality((0, 0, 0, 0), self.LABELS2) == "0 ≤ 0"

    def test_top_rank_row(self):
        labels = [(a, b) for a in (1, 2, 3, 4) for b in (1, 2, 3, 4)]
        y = [0] * 16
        for a in (1, 2, 3):
            y[labels.index((a, 4))] = 1
            y[labels.index((4, a))] = -1
        assert (
            render_inequality(tuple(y), labels)
            == "p[1,4] + p[2,4] + p[3,4] ≤ p[4,1] + p[4,2] + p[4,3]"
        )

    def test_rational_coefficient(self):
        y = (Rat(3, 2), Rat(-1), 0, 0)
        assert render_inequality(y, self.LABELS2) == "3/2*p[0,0] ≤ p[0,1]"


class TestParsing:
    def test_matrix(self):
        m = parse_rational_matrix("0,1/2;-3,4")
        assert m == [[0, Rat(1, 2)], [-3, 4]]

    def test_bad_literal_is_validation_error(self, capsys):
        code, _, err = run_cli(
            capsys, "solve", "--family", "static", "--D", "2", "--v", "0,x;0,1"
        )
        assert code == EXIT_VALIDATION
        assert "error" in json.loads(err)


class TestSolve:
    def test_binary_static(self, capsys):
        report = run_json(capsys, "solve", *BINARY)
        assert report["patches"] == 3
        assert report["dims"] == {"rows": 4, "cols": 9, "zdim": 3}
        assert report["reduced"] == [["0", "-1", "1", "0"]]
        assert report["rendered"] == ["p[1,0] ≤ p[0,1]"]
        assert len(report["rendered"]) == len(report["reduced"])

    @pytest.mark.parametrize("solver", ["benson", "cutplane", "oracle"])
    def test_solvers_agree(self, capsys, solver):
        report = run_json(capsys, "solve", *BINARY, "--solver", solver)
        assert report["reduced"] == [["0", "-1", "1", "0"]]

    def test_probabilistic(self, capsys):
        report = run_json(
            capsys, "solve", *BINARY, "--solver", "probabilistic", "--K", "50"
        )
        assert report["reduced"] == [["0", "-1", "1", "0"]]

    def test_deterministic(self, capsys):
        a = run_json(capsys, "solve", *BINARY)
        b = run_json(capsys, "solve", *BINARY)
        a.pop("timings_ms")
        b.pop("timings_ms")
        assert a == b

    def test_rerun_from_echoed_config(self, capsys):
        report = run_json(capsys, "solve", *BINARY)
        cfg = report["config"]
        argv = ["solve"]
        for flag in ("family", "D", "T", "v", "solver"):
            argv += [f"--{flag}", str(cfg[flag])]
        again = run_json(capsys, *argv)
        assert again["reduced"] == report["reduced"]
        assert again["raw"] == report["raw"]

    def test_out_file_round_trip(self, capsys, tmp_path):
        path = tmp_path / "report.json"
        code, out, _ = run_cli(capsys, "solve", *BINARY, "--out", str(path))
        assert code == EXIT_OK and out == ""
        saved = json.loads(path.read_text())
        direct = run_json(capsys, "solve", *BINARY)
        saved.pop("timings_ms")
        direct.pop("timings_ms")
        saved["config"].pop("out", None)
        direct["config"].pop("out", None)
        assert saved == direct

    def test_text_format(self, capsys):
        code, out, _ = run_cli(capsys, "solve", *BINARY, "--format", "text")
        assert code == EXIT_OK
        assert "p[1,0] ≤ p[0,1]" in out


class TestErrors:
    def test_too_few_alternatives(self, capsys):
        code, _, err = run_cli(
            capsys, "solve", "--family", "static", "--D", "1", "--v", "0,0"
        )
        assert code == EXIT_VALIDATION
        assert json.loads(err)["code"] == EXIT_VALIDATION

    def test_missing_v(self, capsys):
        code, _, _ = run_cli(capsys, "solve", "--family", "static", "--D", "2")
        assert code == EXIT_VALIDATION

    def test_unknown_family(self, capsys):
        code, _, _ = run_cli(capsys, "solve", "--family", "nope", "--v", "0,0;0,1")
        assert code == EXIT_VALIDATION

    def test_gate_refusal_exit_code(self, capsys):
        code, _, err = run_cli(
            capsys,
            "solve",
            "--family",
            "dyn-uncond",
            "--v",
            "0,0;0,1",
            "--gamma",
            "2",
            "--solver",
            "cutplane",
        )
        assert code == EXIT_GATE
        assert json.loads(err)["code"] == EXIT_GATE


class TestClosedForm:
    def test_dynamic_reference_set(self, capsys):
        report = run_json(
            capsys,
            "closed-form",
            "--family",
            "dynamic",
            "--D",
            "4",
            "--v",
            "0,0;0,3;0,5;0,7",
            "--gamma",
            "7",
            "--y0",
            "3",
        )
        got = {tuple(int(c) for c in row) for row in report["reduced"]}
        assert got == set(EX4_ROWS)

    def test_exchangeable_counts(self, capsys):
        report = run_json(
            capsys,
            "closed-form",
            "--family",
            "exchangeable",
            "--D",
            "4",
            "--v",
            "0,4;0,3;0,2;0,1",
        )
        assert len(report["raw"]) == 69
        assert len(report["reduced"]) == 13

    def test_pp2_sets(self, capsys):
        report = run_json(
            capsys,
            "closed-form",
            "--family",
            "pp2",
            "--v",
            "0,0;0,-4",
            "--gamma",
            "3",
            "--y0",
            "0",
        )
        assert report["sets"] == [[0], [1]]


class TestCases:
    def test_canonical_counts(self, capsys):
        report = run_json(
            capsys, "cases", "--family", "static", "--D", "3", "--symmetry", "canonical"
        )
        assert len(report["cases"]) == 4
        report = run_json(
            capsys, "cases", "--family", "dyn-uncond", "--symmetry", "canonical"
        )
        assert len(report["cases"]) == 10

    def test_solve_all(self, capsys):
        report = run_json(
            capsys,
            "cases",
            "--family",
            "static",
            "--D",
            "2",
            "--symmetry",
            "canonical",
            "--solve-all",
            "--threads",
            "2",
        )
        assert all("reduced" in c and "rendered" in c for c in report["cases"])
        strict = next(
            c for c in report["cases"] if all(len(b) == 1 for b in c["ordering"])
        )
        # the canonical representative has the larger index gain on the
        # lower-labeled alternative, so the single row is the mirror case
        assert strict["reduced"] == [["0", "1", "-1", "0"]]


class TestReduce:
    def test_from_file(self, capsys, tmp_path):
        path = tmp_path / "vectors.json"
        path.write_text(json.dumps([[0, -1, 1, 0], [0, -2, 2, 0], [-1, -1, 1, 0]]))
        report = run_json(capsys, "reduce", str(path))
        assert report["reduced"] == [["0", "-1", "1", "0"]]
        assert len(report["removed"]) == 2


class TestCheckIntegrality:
    def test_binary_static_evidence(self, capsys):
        report = run_json(
            capsys,
            "check-integrality",
            *BINARY,
            "--K",
            "25",
            "--sigma",
            "10",
            "--seed",
            "3",
        )
        assert report["evidence"] is True
        assert len(report["values"]) == 25


class TestOracle:
    def test_binary_static(self, capsys):
        report = run_json(capsys, "oracle", *BINARY)
        assert report["reduced"] == [["0", "-1", "1", "0"]]
