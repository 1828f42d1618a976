"""Tests for the command line interface."""

import json
import subprocess
import sys

import numpy as np
import pytest

from multipolyeig.cli import run_cli
from multipolyeig.io import (
    FLUTTER_MATRIX_NAMES,
    parse_solutions,
    serialize_pmep,
    serialize_solutions,
)
from multipolyeig.solver import SolverConfig, solve

from systems import quadratic_pair_system, quadratic_pair_solutions


@pytest.fixture
def problem_file(tmp_path):
    path = tmp_path / "problem.json"
    path.write_text(serialize_pmep(quadratic_pair_system()), encoding="utf-8")
    return str(path)


def flutter_file(tmp_path, seed=3):
    rng = np.random.default_rng(seed)
    doc = {
        "format_version": 1,
        "n": 2,
        "matrices": {
            name: [[[rng.standard_normal(), rng.standard_normal()] for _ in range(2)]
                   for _ in range(2)]
            for name in FLUTTER_MATRIX_NAMES
        },
    }
    path = tmp_path / "flutter.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


class TestSolveCommand:
    def test_writes_solution_document_to_stdout(self, problem_file, capsys):
        assert run_cli(["solve", problem_file]) == 0
        cap = capsys.readouterr()
        doc = json.loads(cap.out)
        assert len(doc["solutions"]) == 8
        # rotation mixes the degrees, so the working system has tau' = (4, 4)
        assert doc["diagnostics"]["resultant_size"] == 16
        assert "solve: 8 solutions" in cap.err
        assert "resultant size 16" in cap.err

    def test_output_file_keeps_stdout_clean(self, problem_file, tmp_path, capsys):
        out = tmp_path / "solutions.json"
        assert run_cli(["solve", problem_file, "-o", str(out)]) == 0
        cap = capsys.readouterr()
        assert cap.out == ""
        assert json.loads(out.read_text())["diagnostics"]["rotation_seed"] == 0

    def test_matches_library_call(self, problem_file, capsys):
        run_cli(["solve", problem_file])
        cli_text = capsys.readouterr().out
        assert cli_text == serialize_solutions(solve(quadratic_pair_system()))

    def test_byte_determinism(self, problem_file, capsys):
        run_cli(["solve", problem_file, "--seed", "5"])
        first = capsys.readouterr().out
        run_cli(["solve", problem_file, "--seed", "5"])
        assert capsys.readouterr().out == first

    def test_env_seed_fallback(self, problem_file, capsys, monkeypatch):
        run_cli(["solve", problem_file, "--seed", "7"])
        explicit = capsys.readouterr().out
        monkeypatch.setenv("MULTIPOLYEIG_SEED", "7")
        run_cli(["solve", problem_file])
        assert capsys.readouterr().out == explicit
        assert json.loads(explicit)["diagnostics"]["rotation_seed"] == 7

    def test_flag_overrides_env_seed(self, problem_file, capsys, monkeypatch):
        monkeypatch.setenv("MULTIPOLYEIG_SEED", "7")
        run_cli(["solve", problem_file, "--seed", "2"])
        doc = json.loads(capsys.readouterr().out)
        assert doc["diagnostics"]["rotation_seed"] == 2

    def test_bad_env_seed_is_an_error(self, problem_file, capsys, monkeypatch):
        monkeypatch.setenv("MULTIPOLYEIG_SEED", "twelve")
        assert run_cli(["solve", problem_file]) == 1
        assert "MULTIPOLYEIG_SEED" in capsys.readouterr().err

    def test_no_rotate_and_hide_flags(self, problem_file, capsys):
        assert run_cli(["solve", problem_file, "--no-rotate", "--hide", "1"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["diagnostics"]["rotation_seed"] is None
        # hiding the quadratic x keeps all 8 solutions reachable
        assert len(doc["solutions"]) == 8

    def test_rotation_free_solutions_match_truth(self, problem_file, capsys):
        run_cli(["solve", problem_file, "--no-rotate"])
        doc = json.loads(capsys.readouterr().out)
        got = np.array([complex(*entry["x"][0]) for entry in doc["solutions"]])
        want = np.array([s[0] for s in quadratic_pair_solutions()])
        assert np.allclose(np.sort_complex(got), np.sort_complex(want), atol=1e-8)

    def test_basis_and_tolerance_flags_accepted(self, problem_file, capsys):
        code = run_cli([
            "solve", problem_file, "--basis", "chebyshev1", "--residual-tol", "1e-6",
            "--rank-tol", "1e-9", "--nullspace-tol", "1e-12", "--keep-fraction", "0.5",
        ])
        assert code == 0
        assert len(json.loads(capsys.readouterr().out)["solutions"]) == 8


class TestVerifyCommand:
    def solved_file(self, problem_file, tmp_path):
        out = tmp_path / "solutions.json"
        run_cli(["solve", problem_file, "-o", str(out)])
        return out

    def test_accepts_true_solutions(self, problem_file, tmp_path, capsys):
        out = self.solved_file(problem_file, tmp_path)
        assert run_cli(["verify", problem_file, str(out)]) == 0
        cap = capsys.readouterr()
        lines = [line for line in cap.out.splitlines() if line.strip()]
        assert len(lines) == 8 and all(line.endswith("ok") for line in lines)
        assert "0 over tolerance" in cap.err

    def test_flags_perturbed_solutions(self, problem_file, tmp_path, capsys):
        out = self.solved_file(problem_file, tmp_path)
        sols = parse_solutions(out.read_text())
        for s in sols:
            s.x = s.x + 1e-3
        out.write_text(serialize_solutions(sols), encoding="utf-8")
        assert run_cli(["verify", problem_file, str(out)]) == 1
        cap = capsys.readouterr()
        assert "FAIL" in cap.out
        assert "8 over tolerance" in cap.err

    def test_loose_tolerance_passes_perturbed(self, problem_file, tmp_path, capsys):
        out = self.solved_file(problem_file, tmp_path)
        sols = parse_solutions(out.read_text())
        for s in sols:
            s.x = s.x + 1e-9
        out.write_text(serialize_solutions(sols), encoding="utf-8")
        assert run_cli(["verify", problem_file, str(out), "--residual-tol", "1e-4"]) == 0
        capsys.readouterr()

    def test_dimension_mismatch(self, problem_file, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"solutions": [{"x": [[1, 0]], "residual": 0.0}]}')
        assert run_cli(["verify", problem_file, str(bad)]) == 1
        assert "coordinates" in capsys.readouterr().err


class TestOracleCommand:
    def test_roots_agree_with_solver(self, problem_file, capsys):
        assert run_cli(["oracle", problem_file, "--starts", "150"]) == 0
        cap = capsys.readouterr()
        doc = json.loads(cap.out)
        assert "oracle:" in cap.err
        diag = doc["diagnostics"]
        assert diag["resultant_size"] == 0 and diag["normal_rank"] == 0
        assert diag["projected"] is False and diag["rotation_seed"] is None
        assert diag["starts"] == 150
        roots = [np.array([complex(*pair) for pair in entry["x"]])
                 for entry in doc["solutions"]]
        assert roots
        truth = quadratic_pair_solutions()
        for r in roots:
            assert min(np.linalg.norm(r - t) for t in truth) < 1e-6

    def test_deterministic_given_seed(self, problem_file, capsys):
        run_cli(["oracle", problem_file, "--starts", "40", "--seed", "1"])
        first = capsys.readouterr().out
        run_cli(["oracle", problem_file, "--starts", "40", "--seed", "1"])
        assert capsys.readouterr().out == first


class TestBenchCommand:
    def test_flutter_report(self, tmp_path, capsys):
        data = flutter_file(tmp_path)
        assert run_cli(["bench", "flutter", data]) == 0
        cap = capsys.readouterr()
        assert "resultant size 8" in cap.err
        lines = cap.out.splitlines()
        assert lines[0] == "flutter benchmark: 8 solutions"
        assert lines[1].split() == ["tau", "Lambda", "residual"]
        rows = lines[3:]
        assert len(rows) == 8
        taus = [float(row.split()[0]) for row in rows]
        assert taus == sorted(taus)

    def test_report_determinism(self, tmp_path, capsys):
        data = flutter_file(tmp_path)
        run_cli(["bench", "flutter", data])
        first = capsys.readouterr().out
        run_cli(["bench", "flutter", data])
        assert capsys.readouterr().out == first

    def test_missing_matrix_is_input_error(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text('{"format_version": 1, "n": 2, "matrices": {}}')
        assert run_cli(["bench", "flutter", str(path)]) == 1
        assert "matrices.M0" in capsys.readouterr().err


class TestExitCodes:
    def test_no_arguments_is_usage_error(self, capsys):
        assert run_cli([]) == 2
        capsys.readouterr()

    def test_unknown_command_is_usage_error(self, capsys):
        assert run_cli(["frobnicate"]) == 2
        capsys.readouterr()

    def test_bad_flag_value_is_usage_error(self, problem_file, capsys):
        assert run_cli(["solve", problem_file, "--seed", "abc"]) == 2
        capsys.readouterr()

    def test_help_exits_zero(self, capsys):
        assert run_cli(["--help"]) == 0
        assert "solve" in capsys.readouterr().out

    def test_missing_file_is_solver_error(self, tmp_path, capsys):
        assert run_cli(["solve", str(tmp_path / "nope.json")]) == 1
        assert "error:" in capsys.readouterr().err

    def test_malformed_document_is_solver_error(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{oops")
        assert run_cli(["solve", str(path)]) == 1
        assert "invalid JSON" in capsys.readouterr().err

    def test_unsolvable_system_is_solver_error(self, tmp_path, capsys):
        doc = {
            "format_version": 1,
            "d": 2,
            "basis": "monomial",
            "tau": [1, 0],
            "equations": [
                {"n": 1, "coeffs": [[1.0, 0.0], [2.0, 0.0]]},
                {"n": 1, "coeffs": [[3.0, 0.0], [4.0, 0.0]]},
            ],
        }
        path = tmp_path / "degenerate.json"
        path.write_text(json.dumps(doc))
        assert run_cli(["solve", str(path)]) == 1
        capsys.readouterr()

    def test_console_script_entry_point(self, problem_file):
        proc = subprocess.run(
            [sys.executable, "-m", "multipolyeig.cli", "solve", problem_file],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert len(json.loads(proc.stdout)["solutions"]) == 8
