import csv
import io
import json
import sys

import pytest

from fsmmint.harness.cli import main
from fsmmint.harness.io import format_scenarios

from conftest import AB, SAMPLE_SCENARIOS, QBF_SOLVER, RESPONSE_TEXT


@pytest.fixture
def sample_files(tmp_path):
    sc = tmp_path / "scenarios.txt"
    sc.write_text(format_scenarios(SAMPLE_SCENARIOS, AB))
    f = tmp_path / "spec.ltl"
    f.write_text(RESPONSE_TEXT + "\n")
    return sc, f, tmp_path


class TestIdentify:
    @pytest.mark.parametrize("method", ["iterative", "exponential", "backtracking"])
    def test_min_states(self, sample_files, method, capsys):
        sc, f, tmp = sample_files
        out = tmp / method
        code = main(["identify", "--scenarios", str(sc), "--ltl", str(f), "--min-states",
                     "--method", method, "--out", str(out)])
        assert code == 0
        assert "states: 2" in capsys.readouterr().out
        assert {p.name for p in out.iterdir()} == {"fsm.dot", "fsm.json"}
        assert json.loads((out / "fsm.json").read_text())["stateCount"] == 2

    def test_qsat(self, sample_files):
        sc, f, tmp = sample_files
        assert main(["identify", "--scenarios", str(sc), "--ltl", str(f), "--states", "2",
                     "--method", "qsat", "--qbf-solver", QBF_SOLVER, "--json",
                     "--out", str(tmp)]) == 0
        assert not (tmp / "fsm.dot").exists()

    def test_qsat_without_solver(self, sample_files, monkeypatch):
        monkeypatch.delenv("FSMMINT_QBF_SOLVER", raising=False)
        sc, f, tmp = sample_files
        assert main(["identify", "--scenarios", str(sc), "--ltl", str(f), "--states", "2",
                     "--method", "qsat", "--out", str(tmp)]) == 2

    def test_unsat_exit_code(self, sample_files):
        sc, f, tmp = sample_files
        assert main(["identify", "--scenarios", str(sc), "--ltl", str(f), "--states", "1",
                     "--out", str(tmp)]) == 1

    def test_dumps(self, sample_files):
        sc, f, tmp = sample_files
        assert main(["identify", "--scenarios", str(sc), "--ltl", str(f), "--states", "2",
                     "--dump-cnf", "--dump-qbf", "1", "--out", str(tmp)]) == 0
        assert (tmp / "problem.cnf").read_text().startswith("p cnf ")
        assert "x_1_1" in (tmp / "problem.vars").read_text()
        assert (tmp / "problem.qdimacs").read_text().splitlines()[1].startswith("e ")

    def test_bad_inputs(self, sample_files, tmp_path):
        sc, f, tmp = sample_files
        bad = tmp_path / "bad.txt"
        bad.write_text("e1 z1\n")
        assert main(["identify", "--scenarios", str(bad), "--states", "2", "--out", str(tmp)]) == 2
        assert main(["identify", "--scenarios", str(tmp / "missing"), "--states", "2"]) == 2
        assert main(["identify", "--scenarios", str(sc), "--states", "2",
                     "--events", "e1", "--out", str(tmp)]) == 2

    def test_external_sat_solver(self, sample_files):
        sc, f, tmp = sample_files
        assert main(["identify", "--scenarios", str(sc), "--ltl", str(f), "--states", "2",
                     "--sat-solver", f"{sys.executable} -m fsmmint.sat -", "--out", str(tmp)]) == 0


class TestVerify:
    def test_round_trip(self, sample_files, capsys):
        sc, f, tmp = sample_files
        main(["identify", "--scenarios", str(sc), "--ltl", str(f), "--states", "2", "--out", str(tmp)])
        capsys.readouterr()
        assert main(["verify", "--fsm", str(tmp / "fsm.json"), "--scenarios", str(sc),
                     "--ltl", str(f)]) == 0
        assert capsys.readouterr().out.strip() == "ok"
        g = tmp / "other.ltl"
        g.write_text("G wasEvent(e1)\n")
        assert main(["verify", "--fsm", str(tmp / "fsm.json"), "--ltl", str(g)]) == 1


class TestGenerateAndBench:
    def test_generate(self, tmp_path):
        out = tmp_path / "inst"
        assert main(["generate", "--preset", "custom", "--states", "3", "--events", "2",
                     "--actions", "2", "--scenario-count", "3", "--total-length", "15",
                     "--formulas", "2", "--seed", "1", "--out", str(out)]) == 0
        assert {"scenarios.txt", "formulas.ltl", "reference.json"} <= {p.name for p in out.iterdir()}
        assert main(["identify", "--scenarios", str(out / "scenarios.txt"), "--ltl",
                     str(out / "formulas.ltl"), "--states", "3", "--out", str(tmp_path)]) == 0

    def test_bench_csv(self, tmp_path):
        path = tmp_path / "bench.csv"
        assert main(["bench", "--sizes", "2..2", "--runs", "1", "--events", "2", "--actions", "2",
                     "--methods", "iterative,backtracking", "--out", str(path)]) == 0
        rows = list(csv.DictReader(io.StringIO(path.read_text())))
        assert [r["method"] for r in rows] == ["iterative", "backtracking"]
        assert all(r["solved"] == "1" for r in rows)

    def test_usage_errors(self):
        with pytest.raises(SystemExit):
            main(["identify"])
        with pytest.raises(SystemExit):
            main(["bench", "--sizes", "5..3"])
