import pytest

from concurflow.cli import cli_main
from concurflow.compare import CSV_COLUMNS, csv_header, row_to_csv, run_compare
from concurflow.instance_io import parse_instance, parse_solution, serialize_instance
from test_instance_io import instance_from_system
from conftest import t1_system, t2_system


@pytest.fixture
def t1_instance():
    return instance_from_system(t1_system(), "t1")


@pytest.fixture
def t2_instance():
    return instance_from_system(t2_system(), "t2")


@pytest.fixture
def t1_file(tmp_path, t1_instance):
    path = tmp_path / "t1.flow"
    path.write_text(serialize_instance(t1_instance))
    return str(path)


class TestRunCompare:
    def test_t2_all_checks_pass(self, t2_instance):
        row = run_compare(t2_instance, 0.05, subroutine="oracle")
        assert row.status == "ok"
        assert row.all_passed
        assert row.lambda_star == pytest.approx(0.5, abs=1e-9)
        assert row.v_opt == pytest.approx(1.5, abs=1e-9)
        assert len(row.checks) == 5

    def test_t1_wider_eta(self, t1_instance):
        row = run_compare(t1_instance, 0.2, subroutine="oracle")
        assert row.all_passed
        assert row.lambda_star == pytest.approx(1 / 3, abs=1e-9)

    def test_csv_row_matches_columns(self, t1_instance):
        row = run_compare(t1_instance, 0.1, subroutine="oracle")
        assert len(csv_header().split(",")) == len(CSV_COLUMNS)
        assert len(row_to_csv(row).split(",")) == len(CSV_COLUMNS)

    def test_oracle_failure_marks_row(self, t1_instance, monkeypatch):
        import concurflow.compare as compare_mod
        from concurflow.oracle import OracleError

        def boom(system, bounds):
            raise OracleError("forced failure")

        monkeypatch.setattr(compare_mod, "lp_emcfpsc", boom)
        row = run_compare(t1_instance, 0.1, subroutine="oracle")
        assert row.oracle_failed
        assert row.status == "oracle-failed"
        # Solver results still reported.
        assert row.report.l_star >= 1
        assert not row.check("lambda_localized").passed

    def test_warns_on_large_instance(self, t1_instance, monkeypatch):
        import concurflow.compare as compare_mod

        monkeypatch.setattr(compare_mod, "ORACLE_SIZE_WARNING", 1)
        with pytest.warns(UserWarning, match="paths"):
            run_compare(t1_instance, 0.2, subroutine="oracle")


class TestCliSolve:
    def test_writes_solution_file(self, tmp_path, t1_file):
        out = tmp_path / "sol.txt"
        code = cli_main(
            ["solve", "--input", t1_file, "--eta", "0.1", "--output", str(out),
             "--subroutine", "oracle"]
        )
        assert code == 0
        data = parse_solution(out.read_text())
        assert data.counters["l_star"] == 4
        assert data.counters["h_star"] == 2

    def test_missing_file(self):
        assert cli_main(["solve", "--input", "no-such.flow", "--eta", "0.1"]) == 1

    def test_bad_eta(self, t1_file):
        assert cli_main(["solve", "--input", t1_file, "--eta", "1.5"]) == 1

    def test_unknown_flag(self, t1_file, capsys):
        code = cli_main(["solve", "--input", t1_file, "--eta", "0.1", "--frobnicate"])
        assert code == 1
        assert "usage" in capsys.readouterr().err

    def test_parse_error_is_usage_error(self, tmp_path):
        bad = tmp_path / "bad.flow"
        bad.write_text("format concurflow-instance 1\nnode a\nnode a\n")
        assert cli_main(["solve", "--input", str(bad), "--eta", "0.1"]) == 1

    def test_internal_error_maps_to_3(self, t1_file, monkeypatch):
        import concurflow.cli as cli_mod

        def boom(system, eta, bounds=None, subroutine="fptas"):
            raise RuntimeError("wedged")

        monkeypatch.setattr(cli_mod, "solve", boom)
        assert cli_main(["solve", "--input", t1_file, "--eta", "0.1"]) == 3


class TestCliOracle:
    @pytest.mark.parametrize(
        "problem,expect",
        [
            ("mmfp", "value 1.0"),
            ("mmfpb", "value 1.0"),
            ("emcfp", "lambda_star 0.333333333"),
            ("emcfpsc", "value 1.0"),
        ],
    )
    def test_problems(self, tmp_path, t1_file, problem, expect):
        out = tmp_path / f"{problem}.txt"
        code = cli_main(["oracle", "--input", t1_file, "--problem", problem, "--output", str(out)])
        assert code == 0
        assert expect in out.read_text()

    def test_unknown_problem(self, t1_file):
        assert cli_main(["oracle", "--input", t1_file, "--problem", "mcf"]) == 1


class TestCliGen:
    def test_deterministic_bytes(self, tmp_path):
        outs = []
        for name in ("a.flow", "b.flow"):
            path = tmp_path / name
            code = cli_main(
                ["gen", "--seed", "7", "--nodes", "6", "--edges", "9",
                 "--commodities", "2", "--max-paths", "4", "--output", str(path)]
            )
            assert code == 0
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]

    def test_env_seed_override(self, tmp_path, monkeypatch):
        direct = tmp_path / "direct.flow"
        assert cli_main(
            ["gen", "--seed", "3", "--nodes", "6", "--edges", "9",
             "--commodities", "2", "--max-paths", "4", "--output", str(direct)]
        ) == 0
        monkeypatch.setenv("CONCURFLOW_SEED", "3")
        overridden = tmp_path / "override.flow"
        assert cli_main(
            ["gen", "--seed", "99", "--nodes", "6", "--edges", "9",
             "--commodities", "2", "--max-paths", "4", "--output", str(overridden)]
        ) == 0
        assert direct.read_bytes() == overridden.read_bytes()

    def test_generated_instance_solvable(self, tmp_path):
        path = tmp_path / "gen.flow"
        assert cli_main(
            ["gen", "--seed", "5", "--nodes", "6", "--edges", "10",
             "--commodities", "2", "--max-paths", "3", "--output", str(path)]
        ) == 0
        inst = parse_instance(path.read_text())
        assert inst.path_system.path_count >= 2

    def test_impossible_generation(self):
        code = cli_main(
            ["gen", "--seed", "0", "--nodes", "2", "--edges", "1",
             "--commodities", "3", "--max-paths", "2"]
        )
        assert code == 1


class TestCliCompare:
    def test_exit_zero_and_csv(self, tmp_path, t1_file, capsys):
        csv_path = tmp_path / "rows.csv"
        code = cli_main(
            ["compare", "--input", t1_file, "--eta", "0.1",
             "--csv", str(csv_path), "--subroutine", "oracle"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert out.count("pass") == 5
        lines = csv_path.read_text().strip().splitlines()
        assert lines[0] == csv_header()
        assert lines[1].endswith(",ok")

    def test_check_failure_exit_two(self, t1_file, monkeypatch):
        import concurflow.cli as cli_mod
        from concurflow.compare import CheckResult, CompareRow

        real = cli_mod.run_compare

        def sabotaged(instance, eta, subroutine="fptas"):
            row = real(instance, eta, subroutine="oracle")
            checks = tuple(
                CheckResult(c.name, False, -1.0) if c.name == "min_ratio_lb" else c
                for c in row.checks
            )
            return CompareRow(
                row.instance, row.eta, row.k, row.sum_bounds, row.lambda_star,
                row.v_opt, row.report, checks, row.solver_seconds,
                row.oracle_seconds, row.oracle_failed,
            )

        monkeypatch.setattr(cli_mod, "run_compare", sabotaged)
        assert cli_main(["compare", "--input", t1_file, "--eta", "0.1"]) == 2
