"""Scenario parsing, task execution, report formats, CLI exit codes."""

import json

import numpy as np
import pytest

from monotone_lab import (
    DualPair,
    FiniteGraph,
    IndicatorFn,
    NormFn,
    NormTag,
    NormalCone,
    ScenarioError,
    Subdifferential,
    interval,
    normal_cone,
    parse_fn,
    parse_operator,
    parse_scenario,
    parse_set,
    parse_space,
    report_csv,
    report_json,
    run_scenario,
    strip_timings,
    sum_test,
    support_subdiff,
    tail_experiment,
)
from monotone_lab.cli import main

PAIR1 = DualPair(1, NormTag.L2)


def write_scenario(tmp_path, data, name="scenario.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data), encoding="utf-8")
    return str(p)


def base_scenario(tasks, operators=None, space=None):
    return {
        "schema": 1,
        "space": space or {"dim": 1, "norm": "l2"},
        "operators": operators or {"abs": {"subdiff": {"norm": {"dim": 1}}}},
        "tasks": tasks,
    }


class TestDescriptorParsing:
    def test_space(self):
        pair = parse_space({"dim": 3, "norm": "l1"})
        assert pair.dim == 3
        assert pair.primal_norm is NormTag.L1
        assert pair.dual_norm is NormTag.LINF

    def test_space_needs_dim(self):
        with pytest.raises(ScenarioError, match="dim"):
            parse_space({"norm": "l2"})

    def test_set_variants(self):
        s = parse_set({"polytope": [[0.0], [1.0]]})
        assert s.support(np.array([1.0])) == 1.0
        b = parse_set({"ball": {"center": [0.0, 0.0], "radius": 2.0}})
        assert b.dim == 2
        c = parse_set({"capsule": {"a": [0.0], "b": [1.0], "radius": 0.5}})
        assert c.contains(np.array([1.4]))

    def test_unknown_set_key_is_named(self):
        with pytest.raises(ScenarioError, match="blob"):
            parse_set({"blob": []})

    def test_fn_variants(self):
        f = parse_fn({"norm": {"dim": 2, "kind": "l1"}})
        assert f.eval(np.array([1.0, -2.0])) == 3.0
        g = parse_fn({"sum": [{"half_sq": {"dim": 1}},
                              {"norm": {"dim": 1}}]})
        assert g.eval(np.array([2.0])) == 4.0
        h = parse_fn({"translate": {"inner": {"norm": {"dim": 1}},
                                    "shift": [-2.0], "tilt": [0.0]}})
        assert h.eval(np.array([2.0])) == 0.0

    def test_unknown_fn_key_is_named(self):
        with pytest.raises(ScenarioError, match="mystery"):
            parse_fn({"mystery": {}})

    def test_operator_variants(self):
        pair2 = DualPair(2)
        T = parse_operator({"tail": 2}, pair2)
        assert T.M.shape == (2, 2)
        G = parse_operator({"graph": [[[0.0], [0.0]], [[1.0], [1.0]]]}, PAIR1)
        assert isinstance(G, FiniteGraph)
        A = parse_operator({"sum": [{"subdiff": {"norm": {"dim": 1}}},
                                    {"linear": [[1.0]]}]}, PAIR1)
        pt = A.resolvent(np.array([3.0]))
        assert pt.x[0] == pytest.approx(1.0, abs=1e-7)

    def test_unknown_operator_key_is_named(self):
        with pytest.raises(ScenarioError, match="gizmo"):
            parse_operator({"gizmo": 1}, PAIR1)


class TestScenarioValidation:
    def test_schema_rejected(self):
        with pytest.raises(ScenarioError, match="schema"):
            parse_scenario({"schema": 2, "space": {"dim": 1}, "tasks": []})

    def test_unknown_operator_reference(self):
        data = base_scenario([{"kind": "gap", "operator": "nope",
                               "seed": 0}])
        with pytest.raises(ScenarioError, match="nope"):
            parse_scenario(data)

    def test_task_needs_seed(self):
        data = base_scenario([{"kind": "gap", "operator": "abs"}])
        with pytest.raises(ScenarioError, match="seed"):
            parse_scenario(data)

    def test_tail_task_needs_no_seed(self):
        data = base_scenario([{"kind": "tail_experiment", "n_list": [1]}])
        parse_scenario(data)  # should not raise

    def test_malformed_json_reports_location(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"schema": 1,\n  "space": }', encoding="utf-8")
        with pytest.raises(ScenarioError, match="line 2"):
            run_scenario(str(p))


class TestRunScenario:
    def test_gap_sweep_passes_on_maximal_subdifferential(self, tmp_path):
        data = base_scenario([{"kind": "gap", "operator": "abs",
                               "seed": 3, "count": 25}])
        rep = run_scenario(write_scenario(tmp_path, data))
        task = rep["tasks"][0]
        assert task["status"] == "ok"
        assert len(task["records"]) == 25
        assert all(r["pass"] for r in task["records"])
        assert all(r["value"] <= 1e-6 for r in task["records"])

    def test_task_error_is_recorded_not_raised(self, tmp_path):
        data = base_scenario([
            {"kind": "br", "mode": "point", "seed": 0,
             "fn": {"half_sq": {"dim": 1}},
             "u": [5.0], "alpha": 0.1, "beta": 0.1},
            {"kind": "gap", "operator": "abs", "seed": 0, "count": 3},
        ])
        rep = run_scenario(write_scenario(tmp_path, data))
        assert rep["tasks"][0]["status"] == "error"
        assert "premise" in rep["tasks"][0]["error"]
        assert rep["tasks"][1]["status"] == "ok"

    def test_reproducible_reports(self, tmp_path):
        data = base_scenario([
            {"kind": "gap", "operator": "abs", "seed": 11, "count": 10},
            {"kind": "fitz", "operator": "abs", "seed": 11,
             "points": [[[0.5], [0.0]], [[2.0], [1.0]]]},
        ])
        path = write_scenario(tmp_path, data)
        a = strip_timings(run_scenario(path))
        b = strip_timings(run_scenario(path))
        assert report_json(a) == report_json(b)

    def test_different_seed_changes_probes(self, tmp_path):
        d1 = base_scenario([{"kind": "gap", "operator": "abs", "seed": 1,
                             "count": 5}])
        d2 = base_scenario([{"kind": "gap", "operator": "abs", "seed": 2,
                             "count": 5}])
        r1 = run_scenario(write_scenario(tmp_path, d1, "a.json"))
        r2 = run_scenario(write_scenario(tmp_path, d2, "b.json"))
        p1 = [r["probe"] for r in r1["tasks"][0]["records"]]
        p2 = [r["probe"] for r in r2["tasks"][0]["records"]]
        assert p1 != p2

    def test_classify_and_br_records(self, tmp_path):
        data = base_scenario([
            {"kind": "classify", "operator": "abs", "class": "ni",
             "seed": 0, "wstar": [2.0], "wstarstar": [0.0]},
            {"kind": "br", "mode": "corollary", "seed": 0,
             "fn": {"half_sq": {"dim": 1}}, "beta": 0.1},
        ])
        rep = run_scenario(write_scenario(tmp_path, data))
        ni = rep["tasks"][0]["records"][0]
        # the true infimum is -inf (s -> +inf with s* = 1); the sampled
        # bound must at least land strictly negative
        assert ni["infimum"] < -1.0
        assert ni["nonpositive"]
        br = rep["tasks"][1]["records"][0]
        assert br["ok"]


class TestTailExperiment:
    def test_n1_exact_zero(self):
        rows = tail_experiment([1])
        assert rows[0]["status"] == "exact"
        assert rows[0]["gap_bound"] == pytest.approx(0.0, abs=1e-12)

    def test_larger_n_reports_bounds(self):
        rows = tail_experiment([2, 4], step_cap=4000)
        for row in rows:
            assert row["status"] == "upper_bound"
            assert row["gap_bound"] >= 0.0
            assert row["steps"] > 0

    def test_empty_list(self):
        assert tail_experiment([]) == []


class TestSumTest:
    def test_domain_mode_passes(self):
        S = Subdifferential(pair=PAIR1, f=NormFn(1))
        T = normal_cone(PAIR1, interval(-1.0, 1.0))
        out = sum_test(S, T, "domain", probes=10, seed=0)
        assert out["status"] == "ok"
        assert out["failed"] == 0
        assert out["worst_gap"] <= 1e-6

    def test_disjoint_domains_skipped(self):
        T1 = normal_cone(PAIR1, interval(-2.0, -1.0))
        T2 = normal_cone(PAIR1, interval(1.0, 2.0))
        out = sum_test(T1, T2, "domain", probes=5, seed=0)
        assert out["status"] == "skipped"
        assert "witness" in out["reason"]

    def test_unknown_mode(self):
        S = Subdifferential(pair=PAIR1, f=NormFn(1))
        with pytest.raises(ScenarioError):
            sum_test(S, S, "sideways")


class TestReportFormats:
    def test_csv_rows(self, tmp_path):
        data = base_scenario([{"kind": "gap", "operator": "abs",
                               "seed": 0, "count": 2}])
        rep = run_scenario(write_scenario(tmp_path, data))
        text = report_csv(rep)
        lines = text.strip().splitlines()
        assert lines[0] == "task_index,kind,record_index,field,value"
        assert any(",value," in line for line in lines[1:])

    def test_json_sorts_keys(self, tmp_path):
        data = base_scenario([{"kind": "gap", "operator": "abs",
                               "seed": 0, "count": 1}])
        rep = run_scenario(write_scenario(tmp_path, data))
        text = report_json(rep)
        assert json.loads(text) == json.loads(report_json(json.loads(text)))


class TestCli:
    def test_gap_ok(self, capsys):
        code = main(["gap", "--operator",
                     '{"subdiff": {"norm": {"dim": 1}}}',
                     "--seed", "4", "--count", "5"])
        assert code == 0
        out = json.loads(capsys.readouterr().out)
        assert out["scenario"] == "<inline>"
        assert out["tasks"][0]["status"] == "ok"

    def test_missing_scenario_file_is_config_error(self, capsys):
        assert main(["run", "/nonexistent/scenario.json"]) == 2

    def test_bad_operator_descriptor_is_config_error(self, capsys):
        code = main(["gap", "--operator", '{"gizmo": 1}'])
        assert code == 2

    def test_csv_format(self, capsys, tmp_path):
        out = tmp_path / "report.csv"
        code = main(["tail", "--task", '{"n_list": [1]}',
                     "--format", "csv", "--out", str(out)])
        assert code == 0
        text = out.read_text(encoding="utf-8")
        assert text.startswith("task_index,kind,record_index,field,value")

    def test_run_scenario_file(self, capsys, tmp_path):
        data = base_scenario([{"kind": "gap", "operator": "abs",
                               "seed": 0, "count": 2}])
        path = write_scenario(tmp_path, data)
        assert main(["run", path]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["tasks"][0]["status"] == "ok"

    def test_solver_failure_exit_code(self, capsys, tmp_path, monkeypatch):
        import monotone_lab.cli as cli_mod

        def boom(path):
            raise RuntimeError("solver blew up")

        monkeypatch.setattr(cli_mod, "run_scenario", boom)
        data = base_scenario([{"kind": "gap", "operator": "abs",
                               "seed": 0, "count": 1}])
        assert main(["run", write_scenario(tmp_path, data)]) == 3
