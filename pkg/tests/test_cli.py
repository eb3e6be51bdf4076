from __future__ import annotations

import json

import pytest

from spidergather.cli import main


def _write(path, obj):
    path.write_text(json.dumps(obj), encoding="utf-8")
    return str(path)


@pytest.fixture
def clustering_file(tmp_path):
    return _write(
        tmp_path / "inst.json",
        {
            "r": 2,
            "legs": 2,
            "users": [
                {"leg": 1, "x": 1},
                {"leg": 2, "x": 1},
                {"leg": 2, "x": 10},
                {"leg": 2, "x": 11},
            ],
        },
    )


@pytest.fixture
def arrears_file(tmp_path):
    return _write(
        tmp_path / "arrears.json",
        {
            "duties": [[{"a": 1, "p": 1}, {"a": 2, "p": 2}]],
            "budgets": [{"b": 1, "q": 0}, {"b": 2, "q": 2}],
        },
    )


def test_solve_writes_solution_json(clustering_file, capsys):
    assert main(["solve", clustering_file]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out == {"value": 2, "clusters": [[0, 1], [2, 3]]}


def test_solve_oracle_agrees(clustering_file, capsys):
    assert main(["solve", clustering_file, "--oracle"]) == 0
    first = json.loads(capsys.readouterr().out)
    assert main(["solve", clustering_file]) == 0
    second = json.loads(capsys.readouterr().out)
    assert first["value"] == second["value"]


def test_solve_no_prune_agrees(clustering_file, capsys):
    assert main(["solve", clustering_file, "--no-prune"]) == 0
    assert json.loads(capsys.readouterr().out)["value"] == 2


def test_solve_infeasible_exits_one(tmp_path, capsys):
    path = _write(
        tmp_path / "short.json",
        {"r": 3, "legs": 1, "users": [{"leg": 1, "x": 0}]},
    )
    assert main(["solve", path]) == 1
    assert json.loads(capsys.readouterr().out)["value"] == "infeasible"


def test_solve_malformed_json_exits_two(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    assert main(["solve", str(path)]) == 2
    assert capsys.readouterr().err


def test_solve_gathering_needs_facilities(tmp_path, capsys):
    path = _write(
        tmp_path / "nofac.json",
        {"r": 1, "legs": 1, "users": [{"leg": 1, "x": 0}]},
    )
    assert main(["solve", path, "--problem", "gathering"]) == 2


def test_check_round_trip(clustering_file, tmp_path, capsys):
    main(["solve", clustering_file])
    sol = tmp_path / "sol.json"
    sol.write_text(capsys.readouterr().out, encoding="utf-8")
    assert main(["check", clustering_file, str(sol)]) == 0
    assert capsys.readouterr().out.strip() == "2"


def test_check_rejects_small_cluster(clustering_file, tmp_path, capsys):
    sol = _write(
        tmp_path / "bad.json",
        {"value": 1, "clusters": [[0], [1, 2, 3]]},
    )
    assert main(["check", clustering_file, sol]) == 1
    assert "SizeViolation" in capsys.readouterr().err


def test_check_confirms_infeasible_claim(tmp_path, capsys):
    inst = _write(
        tmp_path / "short.json",
        {"r": 3, "legs": 1, "users": [{"leg": 1, "x": 0}]},
    )
    sol = _write(tmp_path / "sol.json", {"value": "infeasible", "clusters": []})
    assert main(["check", inst, sol]) == 0


def test_check_arrears_verdicts(arrears_file, capsys):
    assert main(["check-arrears", arrears_file, "--z", "2"]) == 0
    assert capsys.readouterr().out.strip() == "feasible"
    assert main(["check-arrears", arrears_file, "--z", "1"]) == 1
    assert "violated budget 1" in capsys.readouterr().out


def test_check_arrears_bad_vector_exits_two(arrears_file, capsys):
    assert main(["check-arrears", arrears_file, "--z", "9"]) == 2


def test_reduce_arrears_to_spider(arrears_file, capsys):
    assert main(["reduce", arrears_file, "--from", "arrears", "--to", "spider"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["threshold"] == 6
    assert len(out["users"]) == 10
    assert out["legs"] == 6


def test_reduce_output_reparses_and_solves(arrears_file, tmp_path, capsys):
    main(["reduce", arrears_file, "--from", "arrears", "--to", "spider"])
    spider = tmp_path / "spider.json"
    spider.write_text(capsys.readouterr().out, encoding="utf-8")
    assert main(["solve", str(spider)]) == 0
    value = json.loads(capsys.readouterr().out)["value"]
    assert value <= 6


def test_reduce_sat_to_arrears(tmp_path, capsys):
    sat = _write(
        tmp_path / "sat.json", {"num_vars": 3, "clauses": [[1, 2, 3]]}
    )
    assert main(["reduce", sat, "--from", "sat", "--to", "arrears"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["duties"]) == 60
    assert len(out["budgets"]) == 6


def test_reduce_sat_report_checks_pass(tmp_path, capsys):
    sat = _write(
        tmp_path / "sat.json", {"num_vars": 3, "clauses": [[1, -2, 3]]}
    )
    assert main(["reduce", sat, "--from", "sat", "--to", "arrears", "--report"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["report"]["base"] == 900
    assert all(out["report"]["checks"].values())


def test_reduce_rejects_two_literal_clause(tmp_path, capsys):
    sat = _write(tmp_path / "sat.json", {"num_vars": 2, "clauses": [[1, 2]]})
    assert main(["reduce", sat, "--from", "sat", "--to", "arrears"]) == 2


def test_reduce_oversized_exits_three(arrears_file, capsys, monkeypatch):
    monkeypatch.setenv("SPIDERGATHER_USER_CEILING", "5")
    assert main(["reduce", arrears_file, "--from", "arrears", "--to", "spider"]) == 3
    assert "too large" in capsys.readouterr().err


def test_gen_is_deterministic(capsys):
    assert main(["gen", "--kind", "spider", "--seed", "11", "--users", "9"]) == 0
    first = capsys.readouterr().out
    assert main(["gen", "--kind", "spider", "--seed", "11", "--users", "9"]) == 0
    assert capsys.readouterr().out == first
    assert main(["gen", "--kind", "spider", "--seed", "12", "--users", "9"]) == 0
    assert capsys.readouterr().out != first


def test_gen_spider_respects_sizes(capsys):
    assert main(["gen", "--kind", "spider", "--users", "9", "--legs", "3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["users"]) == 9
    assert out["legs"] == 3
    assert all(1 <= u["leg"] <= 3 for u in out["users"])


def test_gen_arrears_is_schema_valid(tmp_path, capsys):
    assert main(["gen", "--kind", "arrears", "--seed", "3"]) == 0
    raw = capsys.readouterr().out
    path = tmp_path / "gen.json"
    path.write_text(raw, encoding="utf-8")
    assert main(["check-arrears", str(path), "--z", ",".join("1" for _ in json.loads(raw)["duties"])]) in (0, 1)


def test_gen_sat_shape(capsys):
    assert main(["gen", "--kind", "sat", "--vars", "4", "--clauses", "3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["num_vars"] == 4
    assert len(out["clauses"]) == 3
    for clause in out["clauses"]:
        assert len(clause) == 3
        assert len({abs(lit) for lit in clause}) == 3


def test_gen_bad_sizes_exit_two(capsys):
    assert main(["gen", "--kind", "sat", "--vars", "2", "--clauses", "1"]) == 2


def test_bench_emits_csv(capsys):
    assert main(["bench", "--legs-range", "2:4", "--trials", "1"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "d,n,r,mean_ms,states"
    assert len(lines) == 4
    for line, d in zip(lines[1:], (2, 3, 4)):
        fields = line.split(",")
        assert fields[0] == str(d)
        assert int(fields[4]) > 0


def test_bench_state_counts_are_reproducible(capsys):
    assert main(["bench", "--legs-range", "3:3", "--trials", "2"]) == 0
    first = capsys.readouterr().out.splitlines()[1].split(",")[4]
    assert main(["bench", "--legs-range", "3:3", "--trials", "1"]) == 0
    second = capsys.readouterr().out.splitlines()[1].split(",")[4]
    assert first == second


def test_bench_empty_range_is_header_only(capsys):
    assert main(["bench", "--legs-range", "5:4"]) == 0
    assert capsys.readouterr().out.strip() == "d,n,r,mean_ms,states"


def test_bench_writes_file(tmp_path):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--legs-range", "2:3", "--trials", "1", "--out", str(out)]) == 0
    lines = out.read_text(encoding="utf-8").strip().splitlines()
    assert lines[0] == "d,n,r,mean_ms,states"
    assert len(lines) == 3
