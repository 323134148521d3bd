"""Command line interface, driven through main() for exit codes."""

import csv

import pytest

import mlspan as M
from mlspan.cli import main

from conftest import FIXTURES


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def instance_file(tmp_path):
    path = tmp_path / "inst.txt"
    code = main(
        [
            "generate", "--family", "erdos_renyi", "--n", "12", "--eps", "1.0",
            "--levels", "2", "--stretch", "2.0", "--seed", "5", "-o", str(path),
        ]
    )
    assert code == 0
    return path


class TestGenerate:
    def test_writes_parseable_file_with_provenance(self, tmp_path, capsys):
        out = tmp_path / "g.txt"
        code, stdout, _ = run(
            capsys, "generate", "--family", "watts_strogatz", "--n", "10",
            "--k", "4", "--beta", "0.1", "--levels", "1", "--stretch", "1.5",
            "--seed", "3", "-o", str(out),
        )
        assert code == 0
        assert "wrote" in stdout and "n=10" in stdout
        text = out.read_text()
        assert text.startswith("# generated family=watts_strogatz")
        inst = M.parse_instance(text)
        assert inst.graph.n == 10 and inst.graph.m == 20

    def test_matches_library_output(self, instance_file):
        spec = M.GeneratorSpec("erdos_renyi", 12, 2, 2.0, 5, eps=1.0)
        inst = M.build_instance(spec)
        body = instance_file.read_text()
        assert M.parse_instance(body) == inst

    def test_family_specific_flag_enforcement(self, tmp_path, capsys):
        code, _, stderr = run(
            capsys, "generate", "--family", "erdos_renyi", "--n", "10",
            "--levels", "1", "--stretch", "2.0", "--seed", "0",
            "-o", str(tmp_path / "x.txt"),
        )
        assert code == 2
        assert "--eps is required" in stderr
        code, _, stderr = run(
            capsys, "generate", "--family", "watts_strogatz", "--n", "10",
            "--levels", "1", "--stretch", "2.0", "--seed", "0",
            "-o", str(tmp_path / "x.txt"),
        )
        assert code == 2
        assert "--k is required" in stderr

    def test_degenerate_levels_fail_cleanly(self, tmp_path, capsys):
        code, _, stderr = run(
            capsys, "generate", "--family", "erdos_renyi", "--n", "4", "--eps", "2.0",
            "--levels", "3", "--stretch", "2.0", "--seed", "0",
            "-o", str(tmp_path / "x.txt"),
        )
        assert code == 1
        assert "error:" in stderr


class TestHeuristic:
    def test_writes_solution_default_path(self, instance_file, capsys):
        code, stdout, _ = run(capsys, "heuristic", "--algo", "bu", str(instance_file))
        assert code == 0
        assert stdout.startswith("cost ")
        out = instance_file.with_name(instance_file.name + ".solution")
        sol = M.parse_solution(out.read_text())
        inst = M.parse_instance(instance_file.read_text())
        assert M.validate_mlgs(inst, sol) == []

    def test_min_reports_which_side_won(self, instance_file, tmp_path, capsys):
        out = tmp_path / "s.txt"
        code, stdout, _ = run(
            capsys, "heuristic", "--algo", "min", str(instance_file), "-o", str(out)
        )
        assert code == 0
        assert "(bu)" in stdout or "(td)" in stdout

    def test_exact_subsolver_budget_exhaustion_exits_3(self, instance_file, capsys):
        code, _, stderr = run(
            capsys, "heuristic", "--algo", "td", "--subsolver", "exact",
            "--node-limit", "1", str(instance_file),
        )
        assert code == 3
        assert "unsolved" in stderr

    def test_missing_instance_file(self, tmp_path, capsys):
        code, _, stderr = run(capsys, "heuristic", "--algo", "bu", str(tmp_path / "no.txt"))
        assert code == 1
        assert "no such file" in stderr


class TestExact:
    def test_prints_optimum_and_writes_solution(self, tmp_path, capsys):
        out = tmp_path / "opt.txt"
        code, stdout, _ = run(
            capsys, "exact", str(FIXTURES / "showcase_two_level.txt"), "-o", str(out)
        )
        assert code == 0
        assert "optimum 25" in stdout
        sol = M.parse_solution(out.read_text())
        inst = M.parse_instance((FIXTURES / "showcase_two_level.txt").read_text())
        assert M.solution_cost(inst, sol) == pytest.approx(25.0)

    def test_brute_force_flag_agrees(self, capsys):
        code, stdout, _ = run(
            capsys, "exact", "--brute-force", str(FIXTURES / "cycle_two_tier.txt")
        )
        assert code == 0
        assert "optimum 6.02" in stdout

    def test_node_limit_exit_code(self, instance_file, capsys):
        code, stdout, stderr = run(
            capsys, "exact", "--node-limit", "1", str(instance_file)
        )
        assert code == 3
        assert "unsolved" in stdout
        assert "best known" in stderr

    def test_infeasible_instance(self, tmp_path, capsys):
        path = tmp_path / "disc.txt"
        path.write_text("nodes 4\nedge 0 1 1\nedge 2 3 1\nstretch 2\nlevel 1 0 3\n")
        code, _, stderr = run(capsys, "exact", str(path))
        assert code == 1
        assert "infeasible" in stderr

    def test_malformed_instance_file(self, tmp_path, capsys):
        path = tmp_path / "bad.txt"
        path.write_text("nodes 2\nedge 0 1 -1\nstretch 1\nlevel 1 0 1\n")
        code, _, stderr = run(capsys, "exact", str(path))
        assert code == 1
        assert "line 2" in stderr


class TestVerify:
    def test_accepts_own_solver_output(self, instance_file, tmp_path, capsys):
        sol = tmp_path / "sol.txt"
        assert run(capsys, "exact", str(instance_file), "-o", str(sol))[0] == 0
        code, stdout, _ = run(capsys, "verify", str(instance_file), str(sol))
        assert code == 0
        assert stdout.startswith("ok: cost ")

    def test_reports_each_violation(self, tmp_path, capsys):
        inst = tmp_path / "i.txt"
        inst.write_text(
            "nodes 4\nedge 0 1 1\nedge 1 2 1\nedge 2 3 1\nstretch 1\nlevel 1 0 3\n"
        )
        sol = tmp_path / "s.txt"
        sol.write_text("grade 0 1 1\n")
        code, stdout, stderr = run(capsys, "verify", str(inst), str(sol))
        assert code == 1
        assert "level 1: pair (0, 3) has distance inf, allowed 3" in stdout
        assert "1 violation(s)" in stderr

    def test_overgraded_solution_is_an_error(self, instance_file, tmp_path, capsys):
        sol = tmp_path / "s.txt"
        sol.write_text("grade 0 1 9\n")
        code, _, stderr = run(capsys, "verify", str(instance_file), str(sol))
        assert code == 1
        assert "exceeds instance levels" in stderr


class TestEmitLp:
    def test_multilevel_output(self, instance_file, tmp_path, capsys):
        out = tmp_path / "model.lp"
        code, stdout, _ = run(capsys, "emit-lp", str(instance_file), "-o", str(out))
        assert code == 0
        text = out.read_text()
        assert text.startswith("\\ mlgs spanner model")
        assert "variables" in stdout and "constraints" in stdout

    def test_pairwise_output(self, instance_file, tmp_path, capsys):
        out = tmp_path / "model.lp"
        code, _, _ = run(capsys, "emit-lp", "--pairwise", str(instance_file), "-o", str(out))
        assert code == 0
        assert out.read_text().startswith("\\ pairwise spanner model")

    def test_reduce_writes_sidecar_without_deleted_variables(self, tmp_path, capsys):
        path = tmp_path / "tri.txt"
        path.write_text(
            "nodes 3\nedge 0 1 1\nedge 1 2 1\nedge 0 2 3\nstretch 1.5\nlevel 1 0 1 2\n"
        )
        out = tmp_path / "tri.lp"
        code, stdout, _ = run(capsys, "emit-lp", "--reduce", str(path), "-o", str(out))
        assert code == 0
        assert f"wrote {out}.fixings" in stdout
        lp = out.read_text()
        assert "x_e_0_2" not in lp  # dominated edge is gone entirely
        sidecar = (tmp_path / "tri.lp.fixings").read_text()
        assert "deleted_edge 0 2" in sidecar

    def test_reduced_and_full_models_share_an_optimum(self, tmp_path, capsys):
        from conftest import model_optimum_by_enumeration

        path = tmp_path / "sq.txt"
        path.write_text(
            "nodes 4\nedge 0 1 1\nedge 1 2 1\nedge 2 3 1\nedge 0 3 2\n"
            "stretch 1\nlevel 1 0 1 2 3\n"
        )
        inst = M.parse_instance(path.read_text())
        pairs = inst.level_pairs(1)
        g, fixings = M.reduce_instance(inst.graph, pairs, 1.0)
        full = M.build_pairwise_model(inst.graph, pairs, 1.0)
        reduced = M.build_pairwise_model(g, pairs, 1.0, fixings=fixings)
        assert model_optimum_by_enumeration(full) == pytest.approx(
            model_optimum_by_enumeration(reduced)
        )


class TestExperimentCommand:
    def test_end_to_end(self, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("n = 8\nlevels = 1\nstretch = 2.0\ninstances_per_cell = 1\nseed = 4\n")
        out = tmp_path / "results"
        code, stdout, _ = run(capsys, "experiment", str(cfg), "-o", str(out))
        assert code == 0
        assert "records" in stdout
        with (out / "results.csv").open() as handle:
            rows = list(csv.reader(handle))
        assert rows[0][0] == "family"
        assert len(rows) == 1 + 4  # exact + bu/td/min

    def test_bad_config_fails_with_location(self, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("bogus = 1\n")
        code, _, stderr = run(capsys, "experiment", str(cfg), "-o", str(tmp_path / "r"))
        assert code == 1
        assert "unknown key" in stderr


class TestTopLevel:
    def test_usage_error_exit_code(self, capsys):
        assert run(capsys, "heuristic", "--algo", "simplex", "x")[0] == 2
        assert run(capsys)[0] == 2

    def test_version(self, capsys):
        code, stdout, _ = run(capsys, "--version")
        assert code == 0
        assert M.__version__ in stdout
