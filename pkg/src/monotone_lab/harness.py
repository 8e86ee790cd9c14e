"""Scenario execution and report generation.

A scenario is a UTF-8 JSON file (top-level "schema": 1) declaring a
space, named operators, and a task list.  Tasks run in declaration
order; per-task failures are recorded and never abort the batch.  JSON
is the canonical report format and is bit-reproducible under a fixed
seed (timing fields are excluded from comparisons); CSV is a lossy flat
projection.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from . import br as br_mod
from . import classifiers as cls_mod
from . import fitzpatrick as fitz_mod
from . import quasidensity as qd_mod
from .functions import (
    Affine,
    ConvexFn,
    HalfSqNorm,
    IndicatorFn,
    NormFn,
    Quadratic,
    SumFn,
    SupportFn,
    Translate,
)
from .operators import (
    FiniteGraph,
    InverseOp,
    Linear,
    MonotoneOperator,
    NormalCone,
    ResolventError,
    Shift,
    Subdifferential,
    SumOp,
    SupportSubdiff,
    parallel_sum,
    tail_operator,
)
from .sets import Ball, Capsule, CompactConvexSet, Polytope
from .solvers import subgradient_descent
from .spaces import DualPair, NormTag, PairedPoint, norm_subgradient, vector_norm

SCHEMA_VERSION = 1


class ScenarioError(ValueError):
    """Parse or configuration error in a scenario file."""


# ---------------------------------------------------------------------------
# descriptor parsing


def parse_space(desc: dict) -> DualPair:
    if not isinstance(desc, dict) or "dim" not in desc:
        raise ScenarioError("space descriptor needs a 'dim' key")
    return DualPair(int(desc["dim"]), NormTag.parse(desc.get("norm", "l2")))


def parse_set(desc: dict, side: str = "primal") -> CompactConvexSet:
    if not isinstance(desc, dict) or len(desc) == 0:
        raise ScenarioError("empty set descriptor")
    side = desc.get("side", side)
    if "polytope" in desc:
        return Polytope(side=side, vertices=np.asarray(desc["polytope"],
                                                       dtype=float))
    if "ball" in desc:
        b = desc["ball"]
        return Ball(side=side, center=np.asarray(b["center"], float),
                    radius=float(b["radius"]),
                    norm=NormTag.parse(b.get("norm", "l2")))
    if "capsule" in desc:
        c = desc["capsule"]
        return Capsule(side=side, a=np.asarray(c["a"], float),
                       b=np.asarray(c["b"], float),
                       radius=float(c.get("radius", 0.0)),
                       norm=NormTag.parse(c.get("norm", "l2")))
    raise ScenarioError(f"unknown set descriptor key: {sorted(desc)[0]!r}")


def parse_fn(desc: dict) -> ConvexFn:
    if not isinstance(desc, dict) or len(desc) == 0:
        raise ScenarioError("empty function descriptor")
    if "quadratic" in desc:
        q = desc["quadratic"]
        return Quadratic(np.asarray(q["Q"], float), np.asarray(q["b"], float),
                         float(q.get("c", 0.0)))
    if "norm" in desc:
        n = desc["norm"]
        return NormFn(int(n["dim"]), float(n.get("scale", 1.0)),
                      NormTag.parse(n.get("kind", "l2")))
    if "support" in desc:
        return SupportFn(parse_set(desc["support"], side="dual"))
    if "indicator" in desc:
        return IndicatorFn(parse_set(desc["indicator"]))
    if "affine" in desc:
        a = desc["affine"]
        return Affine(np.asarray(a["a"], float), float(a.get("c", 0.0)))
    if "half_sq" in desc:
        return HalfSqNorm(int(desc["half_sq"]["dim"]))
    if "translate" in desc:
        t = desc["translate"]
        return Translate(parse_fn(t["inner"]),
                         shift=np.asarray(t.get("shift", []), float),
                         tilt=np.asarray(t.get("tilt", []), float),
                         offset=float(t.get("offset", 0.0)))
    if "sum" in desc:
        fns = [parse_fn(d) for d in desc["sum"]]
        if len(fns) < 2:
            raise ScenarioError("function sum needs at least two summands")
        out = fns[0]
        for f in fns[1:]:
            out = SumFn(out, f)
        return out
    raise ScenarioError(f"unknown function descriptor key: {sorted(desc)[0]!r}")


def parse_operator(desc: dict, pair: DualPair) -> MonotoneOperator:
    if not isinstance(desc, dict) or len(desc) == 0:
        raise ScenarioError("empty operator descriptor")
    if "tail" in desc:
        return tail_operator(int(desc["tail"]))
    if "graph" in desc:
        pts = [PairedPoint(np.asarray(a, float), np.asarray(b, float))
               for a, b in desc["graph"]]
        return FiniteGraph(pair=pair, points=tuple(pts))
    if "linear" in desc:
        return Linear(pair=pair, M=np.asarray(desc["linear"], float))
    if "subdiff" in desc:
        return Subdifferential(pair=pair, f=parse_fn(desc["subdiff"]))
    if "normal_cone" in desc:
        return NormalCone(pair=pair,
                          f=IndicatorFn(parse_set(desc["normal_cone"])))
    if "support_subdiff" in desc:
        return SupportSubdiff(
            pair=pair,
            f=SupportFn(parse_set(desc["support_subdiff"], side="dual")),
        )
    if "shift" in desc:
        s = desc["shift"]
        return Shift(pair=pair, inner=parse_operator(s["inner"], pair),
                     dx=np.asarray(s.get("dx", np.zeros(pair.dim)), float),
                     dxstar=np.asarray(s.get("dxstar", np.zeros(pair.dim)),
                                       float))
    if "sum" in desc:
        ops = [parse_operator(d, pair) for d in desc["sum"]]
        if len(ops) != 2:
            raise ScenarioError("operator sum needs exactly two operands")
        return SumOp(pair=pair, S=ops[0], T=ops[1])
    if "inverse" in desc:
        return InverseOp(pair=pair, inner=parse_operator(desc["inverse"],
                                                         pair))
    if "parallel_sum" in desc:
        ops = [parse_operator(d, pair) for d in desc["parallel_sum"]]
        if len(ops) != 2:
            raise ScenarioError("parallel sum needs exactly two operands")
        return parallel_sum(ops[0], ops[1])
    raise ScenarioError(f"unknown operator descriptor key: {sorted(desc)[0]!r}")


# ---------------------------------------------------------------------------
# scenario model


@dataclass
class Scenario:
    pair: DualPair
    operators: dict[str, MonotoneOperator]
    tasks: list[dict]
    raw: dict = field(default_factory=dict)


def parse_scenario(data: dict) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    if data.get("schema") != SCHEMA_VERSION:
        raise ScenarioError(
            f"unsupported schema {data.get('schema')!r}; expected "
            f"{SCHEMA_VERSION}"
        )
    pair = parse_space(data.get("space", {}))
    ops: dict[str, MonotoneOperator] = {}
    for name, desc in data.get("operators", {}).items():
        ops[name] = parse_operator(desc, pair)
    tasks = data.get("tasks", [])
    if not isinstance(tasks, list):
        raise ScenarioError("'tasks' must be a list")
    for i, t in enumerate(tasks):
        if not isinstance(t, dict) or "kind" not in t:
            raise ScenarioError(f"task {i} needs a 'kind' key")
        if "seed" not in t and t["kind"] not in ("tail_experiment",):
            raise ScenarioError(f"task {i} needs an explicit 'seed'")
        ref = t.get("operator")
        if ref is not None and ref not in ops:
            raise ScenarioError(f"task {i} references unknown operator "
                                f"{ref!r}")
    return Scenario(pair, ops, tasks, data)


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"parse error at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}"
        ) from exc
    return parse_scenario(data)


# ---------------------------------------------------------------------------
# task execution


def _vec(v) -> np.ndarray:
    return np.asarray(v, dtype=float).ravel()


def _jsonable(x: Any) -> Any:
    if isinstance(x, np.ndarray):
        return [float(v) for v in x.ravel()]
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, PairedPoint):
        return {"x": _jsonable(x.x), "xstar": _jsonable(x.xstar)}
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _task_gap(sc: Scenario, task: dict) -> list[dict]:
    S = sc.operators[task["operator"]]
    seed = int(task["seed"])
    budget = int(task.get("budget", 100))
    eta = float(task.get("eta", 1e-6))
    if "probes" in task:
        probes = [PairedPoint(_vec(p[0]), _vec(p[1]))
                  for p in task["probes"]]
    else:
        probes = qd_mod.default_probes(S, int(task.get("count", 20)), seed)
    fuzz_dual = fuzz_primal = None
    if "dual_fuzz" in task:
        fuzz_dual = parse_set(task["dual_fuzz"], side="dual")
    if "primal_fuzz" in task:
        fuzz_primal = parse_set(task["primal_fuzz"])
    records = []
    for p in probes:
        q = qd_mod.GapQuery(p, dual_fuzz=fuzz_dual, primal_fuzz=fuzz_primal,
                            eta=eta)
        rep = qd_mod.gap(S, q, budget=budget, seed=seed)
        records.append({
            "anchor": "gap objective over the operator graph",
            "probe": _jsonable(p),
            "value": rep.value,
            "status": rep.status,
            "method": rep.method,
            "witness": _jsonable(rep.witness),
            "pass": rep.value <= eta,
        })
    return records


def _task_fitz(sc: Scenario, task: dict) -> list[dict]:
    S = sc.operators[task["operator"]]
    seed = int(task["seed"])
    budget = int(task.get("budget", 200))
    tol = float(task.get("tol", 1e-6))
    records = []
    for p in task.get("points", []):
        ystar, ystarstar = _vec(p[0]), _vec(p[1])
        # phi reads the probe as a primal pair (x, x*); theta and the
        # membership verdict read it as a dual pair (y*, y**)
        ph = fitz_mod.phi(S, ystar, ystarstar, budget, seed)
        th = fitz_mod.theta(S, ystar, ystarstar, budget, seed)
        verdict = fitz_mod.fitz_membership(S, ystar, ystarstar, tol,
                                           budget, seed)
        records.append({
            "anchor": "Fitzpatrick sup and extension membership "
                      "(finite-dimensional identification)",
            "point": [_jsonable(ystar), _jsonable(ystarstar)],
            "phi": _jsonable(ph.value),
            "phi_status": ph.status,
            "theta": _jsonable(th.value),
            "theta_status": th.status,
            "membership": verdict,
        })
    return records


def _task_classify(sc: Scenario, task: dict) -> list[dict]:
    S = sc.operators[task["operator"]]
    seed = int(task["seed"])
    budget = int(task.get("budget", 200))
    cls = task.get("class")
    if cls == "ni":
        w_star = _vec(task["wstar"])
        w_ss = _vec(task["wstarstar"])
        val = cls_mod.ni_infimum(S, w_star, w_ss, budget, seed)
        return [{
            "anchor": "negative-infimum criterion over the graph",
            "class": "ni", "wstar": _jsonable(w_star),
            "wstarstar": _jsonable(w_ss), "infimum": val,
            "nonpositive": val <= 1e-6,
        }]
    if cls in ("fpv", "fp"):
        side = "primal" if cls == "fpv" else "dual"
        window = cls_mod.LocalWindow(parse_set(task["window"], side=side),
                                     side=side)
        w = _vec(task["w"])
        wstar = _vec(task["wstar"])
        fn = cls_mod.check_fpv if cls == "fpv" else cls_mod.check_fp
        v = fn(S, window, w, wstar, budget, seed)
        return [{
            "anchor": "windowed local-maximality premise and graph "
                      "membership conclusion",
            "class": cls,
            "premise_holds": v.premise_holds,
            "vacuous": v.vacuous,
            "conclusion": v.conclusion,
            "consistent": v.consistent_with_class,
            "budget": v.budget, "seed": v.seed,
        }]
    if cls == "strongmax":
        side = task.get("fuzz_side", "dual")
        if side == "dual":
            res = cls_mod.strong_max_dual(
                S, _vec(task["w"]), parse_set(task["fuzz"], side="dual"),
                budget, seed,
            )
        else:
            res = cls_mod.strong_max_primal(
                S, parse_set(task["fuzz"]), _vec(task["wstar"]),
                budget, seed,
            )
        return [{
            "anchor": "fuzzy-set strong maximality search",
            "class": "strongmax",
            "premise_holds": res.premise_holds,
            "status": res.status,
            "point": _jsonable(res.point),
            "residual": _jsonable(res.residual),
        }]
    raise ScenarioError(f"unknown classifier class {cls!r}")


def _task_br(sc: Scenario, task: dict) -> list[dict]:
    mode = task.get("mode")
    fn = parse_fn(task["fn"])
    if mode == "point":
        res = br_mod.br_point(br_mod.BRRequest(
            fn, _vec(task["u"]), float(task["alpha"]), float(task["beta"])
        ))
    elif mode == "corollary":
        res = br_mod.br_corollary(fn, float(task["beta"]))
    elif mode == "van":
        pt = br_mod.van_point(fn, float(task["eps"]))
        return [{
            "anchor": "near-zero subgradient pair",
            "mode": "van", "point": _jsonable(pt),
        }]
    elif mode == "witness":
        pt = br_mod.quasidense_witness(
            fn, _vec(task["x"]), _vec(task["xstar"]), float(task["eps"])
        )
        return [{
            "anchor": "constructive gap witness",
            "mode": "witness", "point": _jsonable(pt),
        }]
    else:
        raise ScenarioError(f"unknown br mode {mode!r}")
    return [{
        "anchor": "approximate-minimizer subgradient certificates",
        "mode": mode, "s": _jsonable(res.s), "xstar": _jsonable(res.xstar),
        "certs": _jsonable(res.certs), "membership": res.membership,
        "ok": res.ok,
    }]


def tail_experiment(
    n_list: list[int],
    probe_rule=None,
    seed: int = 0,
    step_cap: int = 100000,
) -> list[dict]:
    """Gap upper bounds for tail-map truncations under the l1/linf pair.

    The default probe is x = 0, x* = all-ones.  n = 1 is solved in
    closed form (the 1-D objective is a perfect square, minimized at
    the midpoint of x and x*); larger n report the best descent value
    as an upper bound only, with diagnostics.
    """
    rows = []
    for n in n_list:
        T = tail_operator(int(n))
        if probe_rule is not None:
            x, xstar = probe_rule(int(n))
            x, xstar = _vec(x), _vec(xstar)
        else:
            x, xstar = np.zeros(n), np.ones(n)
        target = PairedPoint(x, xstar)
        if n == 1:
            s = 0.5 * (x + xstar)
            val = qd_mod.r_objective(T, target, s, T.M @ s)
            rows.append({
                "anchor": "tail truncation gap at the designated probe",
                "n": 1, "gap_bound": float(val), "status": "exact",
                "steps": 0, "restarts": 0,
            })
            continue
        row = _tail_descent(T, target, seed, step_cap)
        rows.append(row)
    return rows


def _tail_descent(
    T: Linear, target: PairedPoint, seed: int, step_cap: int
) -> dict:
    M = T.M
    pn, dn = T.pair.primal_norm, T.pair.dual_norm

    def obj(s: np.ndarray) -> float:
        return qd_mod.r_objective(T, target, s, M @ s)

    def sub(s: np.ndarray) -> np.ndarray:
        a = s - target.x
        b = M @ s - target.xstar
        g = vector_norm(a, pn) * norm_subgradient(a, pn)
        g = g + M.T @ (vector_norm(b, dn) * norm_subgradient(b, dn))
        return g + b + M.T @ a

    rng = np.random.default_rng(seed)
    n = T.pair.dim
    starts = [np.zeros(n), target.x.copy(), 0.5 * (target.x + target.xstar)]
    for _ in range(9):
        starts.append(rng.uniform(-2.0, 2.0, size=n))
    per_start = max(200, step_cap // len(starts))
    s_best, f_best, steps = subgradient_descent(
        obj, sub, starts, step_scale=1.0, max_steps=per_start,
    )
    return {
        "anchor": "tail truncation gap at the designated probe",
        "n": n, "gap_bound": float(f_best), "status": "upper_bound",
        "steps": int(steps), "restarts": len(starts),
        "witness": _jsonable(PairedPoint(s_best, M @ s_best)),
    }


def _domain_projection(S: MonotoneOperator, x: np.ndarray) -> np.ndarray:
    """Approximate nearest point of cl D(S): the small-step resolvent."""
    return S.resolvent_scaled(x, 1e-8).x


def _interior_domain_witness(
    S: MonotoneOperator, T: MonotoneOperator, seed: int, budget: int = 40
) -> Optional[np.ndarray]:
    """A point of D(S) lying in the interior of D(T), probed on the 2n
    axis perturbations."""
    delta = 1e-4
    n = S.pair.dim
    cands = [p.x for p in S.graph_sample(budget, seed)]
    for c in cands:
        try:
            c = _domain_projection(S, c)
            ok = True
            for i in range(n):
                e = np.zeros(n)
                e[i] = delta
                for probe in (c + e, c - e):
                    if np.linalg.norm(
                        _domain_projection(T, probe) - probe
                    ) > delta * 0.5:
                        ok = False
                        break
                if not ok:
                    break
            if ok and np.linalg.norm(_domain_projection(T, c) - c) <= 1e-9:
                return c
        except ResolventError:
            continue
    return None


def sum_test(
    S: MonotoneOperator,
    T: MonotoneOperator,
    mode: str,
    probes: int = 50,
    seed: int = 0,
    eta: float = 1e-6,
) -> dict:
    """Gap sweep over the operator sum (domain mode) or the parallel
    sum (range mode); skipped when no interior-intersection witness is
    found."""
    if mode == "domain":
        witness = _interior_domain_witness(S, T, seed)
        combined: MonotoneOperator = SumOp(pair=S.pair, S=S, T=T)
    elif mode == "range":
        witness = _interior_domain_witness(
            InverseOp(pair=S.pair, inner=S), InverseOp(pair=T.pair, inner=T),
            seed,
        )
        combined = parallel_sum(S, T)
    else:
        raise ScenarioError(f"unknown sum_test mode {mode!r}")
    if witness is None:
        return {
            "anchor": "sum-rule gap sweep",
            "mode": mode, "status": "skipped",
            "reason": "no interior witness",
        }
    probe_pts = qd_mod.default_probes(combined, probes, seed)
    passed = failed = errors = 0
    worst = 0.0
    for p in probe_pts:
        try:
            rep = qd_mod.gap(combined, qd_mod.GapQuery(p, eta=eta),
                             seed=seed)
        except ResolventError:
            errors += 1
            continue
        worst = max(worst, rep.value)
        if rep.value <= eta:
            passed += 1
        else:
            failed += 1
    return {
        "anchor": "sum-rule gap sweep",
        "mode": mode, "status": "ok", "witness": _jsonable(witness),
        "probes": len(probe_pts), "passed": passed, "failed": failed,
        "errors": errors, "worst_gap": worst, "eta": eta,
    }


def _task_tail(sc: Scenario, task: dict) -> list[dict]:
    return tail_experiment(
        [int(n) for n in task.get("n_list", [])],
        seed=int(task.get("seed", 0)),
        step_cap=int(task.get("step_cap", 100000)),
    )


def _task_sum(sc: Scenario, task: dict) -> list[dict]:
    S = sc.operators[task["S"]]
    T = sc.operators[task["T"]]
    return [sum_test(
        S, T, task.get("mode", "domain"),
        probes=int(task.get("probes", 50)), seed=int(task["seed"]),
        eta=float(task.get("eta", 1e-6)),
    )]


_TASK_RUNNERS = {
    "gap": _task_gap,
    "fitz": _task_fitz,
    "classify": _task_classify,
    "br": _task_br,
    "tail_experiment": _task_tail,
    "sum_test": _task_sum,
}


def run_scenario(path: str) -> dict:
    """Executes every task of the scenario at ``path`` and returns the
    report dict (JSON-ready)."""
    sc = load_scenario(path)
    report: dict[str, Any] = {"schema": SCHEMA_VERSION, "scenario": path,
                              "tasks": []}
    for i, task in enumerate(sc.tasks):
        runner = _TASK_RUNNERS.get(task["kind"])
        entry: dict[str, Any] = {"index": i, "kind": task["kind"],
                                 "task": task}
        t0 = time.perf_counter()
        if runner is None:
            entry["status"] = "error"
            entry["error"] = f"unknown task kind {task['kind']!r}"
        else:
            try:
                entry["records"] = runner(sc, task)
                entry["status"] = "ok"
            except ScenarioError:
                raise
            except Exception as exc:  # recorded, batch continues
                entry["status"] = "error"
                entry["error"] = f"{type(exc).__name__}: {exc}"
        entry["elapsed_s"] = time.perf_counter() - t0
        report["tasks"].append(entry)
    return report


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


def strip_timings(report: dict) -> dict:
    """Copy of the report without timing fields, for reproducibility
    comparisons."""
    out = json.loads(report_json(report))
    for t in out.get("tasks", []):
        t.pop("elapsed_s", None)
    return out


def report_csv(report: dict) -> str:
    """Flat projection: one row per record, complex fields serialized
    as compact JSON."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["task_index", "kind", "record_index", "field", "value"])
    for t in report.get("tasks", []):
        if t.get("status") != "ok":
            writer.writerow([t.get("index"), t.get("kind"), "", "status",
                             t.get("status")])
            if "error" in t:
                writer.writerow([t.get("index"), t.get("kind"), "", "error",
                                 t["error"]])
            continue
        for j, rec in enumerate(t.get("records", [])):
            for k in sorted(rec):
                v = rec[k]
                if isinstance(v, (dict, list)):
                    v = json.dumps(v, sort_keys=True)
                writer.writerow([t["index"], t["kind"], j, k, v])
    return buf.getvalue()
