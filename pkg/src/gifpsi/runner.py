"""Execute the tasks of a :class:`RunConfig` and assemble the run report.

The report has two parts.  ``payload`` holds everything computed and is a
pure function of the config (and the seed override); ``timing`` holds
wall-clock figures and a digest of the payload.  Only ``timing`` varies
between identical runs.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .alpha import (AlphaNormFamily, alpha_norms, check_ascending_family, check_crisp_norm_axioms,
                    closed_form_alpha_norm, estimate_collinearity_constant)
from .compactness import (check_compact, coordinate_limit_reconstruction,
                          extract_convergent_subsequence)
from .config import RunConfig, TaskSpec
from .continuity import (check_compact_image, check_ifc_grid, check_sequentially_ifc,
                         check_strongly_ifc)
from .core import check_extra_conditions, validate_axioms
from .errors import GifPsiError
from .reports import SamplerConfig, to_jsonable
from .sequences import CAUCHY, CONVERGES, check_bounded, check_cauchy, check_convergence

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG = 0, 1, 2


@dataclass
class TaskOutcome:
    id: str
    kind: str
    status: str  # "ok", "violation" or "error"
    violations: list
    result: dict
    seconds: float = 0.0

    def payload(self) -> dict:
        return {"id": self.id, "kind": self.kind, "status": self.status,
                "violations": self.violations, "result": self.result}


@dataclass
class RunReport:
    payload: dict
    timing: dict
    exit_code: int

    def to_dict(self) -> dict:
        return {"payload": self.payload, "timing": self.timing}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1, allow_nan=False)


def canonical(payload) -> str:
    """Byte-stable serialization used for digests and comparisons."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False)


# ---------------------------------------------------------------- task bodies


def _validate_axioms(cfg: RunConfig, p: dict):
    report = validate_axioms(cfg.norm, cfg.sampler)
    out = {"axioms": report.to_dict(), "passed": report.passed}
    violations = [{"axiom": e.axiom, "witness": to_jsonable(e.witness), "lhs": e.lhs, "rhs": e.rhs}
                  for e in report.failures()]
    if p["extra_conditions"]:
        out["extra_conditions"] = check_extra_conditions(cfg.norm, cfg.sampler).to_dict()
    return out, violations


def _alpha_norm(cfg: RunConfig, p: dict):
    f = AlphaNormFamily(cfg.norm, p["variant"])
    alpha = p["alpha"]
    V = np.asarray(p["vectors"], float)
    values = alpha_norms(f, V, alpha)
    rows = [{"x": v.tolist(), "alpha_norm": float(val)} for v, val in zip(V, values)]
    if cfg.norm.kind == "standard":
        for row, v in zip(rows, V):
            row["closed_form"] = closed_form_alpha_norm(cfg.norm.k, cfg.space.norm(v), alpha)
    out: dict = {"alpha": alpha, "family": f.describe(), "values": rows}
    violations = []
    if p["crisp_axioms"]:
        rep = check_crisp_norm_axioms(f, alpha, cfg.sampler)
        out["crisp_axioms"] = rep.to_dict()
        violations += [{"axiom": e.axiom, "witness": e.witness} for e in rep.failures()]
    asc = [check_ascending_family(f, v, p["alpha_grid"]) for v in V]
    out["ascending"] = [{"x": v.tolist(), "table": a.table(), "violations": a.violations}
                        for v, a in zip(V, asc)]
    violations += [{"relation": "ascending family", "x": v.tolist(), **viol}
                   for v, a in zip(V, asc) for viol in a.violations]
    if p["collinearity"] is not None:
        out["collinearity"] = to_jsonable(
            estimate_collinearity_constant(f, p["collinearity"], alpha, cfg.sampler))
    return out, violations


def _analyze_sequence(cfg: RunConfig, p: dict):
    n, s, N = cfg.norm, cfg.sequences[p["sequence"]], p["horizon"]
    grids = (p["r_grid"], p["t_grid"])
    out: dict = {"sequence": s.describe()}
    violations = []
    cauchy = check_cauchy(n, s, *grids, N, p["p_max"])
    out["cauchy"] = to_jsonable(cauchy)
    limit = p["limit"]
    if p["reconstruct"] or (limit is None and cauchy.verdict == CAUCHY):
        rec = coordinate_limit_reconstruction(n, s, p["basis"], N, *grids)
        out["reconstruction"] = to_jsonable(rec)
        if limit is None:
            limit = rec.limit
        if not rec.verified:
            violations.append({"relation": "reconstructed limit converges",
                               "limit": rec.limit, "verdict": rec.convergence.verdict})
    if limit is not None:
        conv = check_convergence(n, s, limit, *grids, N)
        out["convergence"] = to_jsonable(conv)
        if conv.verdict == CONVERGES and cauchy.verdict != CAUCHY:
            violations.append({"relation": "convergent implies cauchy",
                               "convergence": conv.verdict, "cauchy": cauchy.verdict})
    bound = check_bounded(n, s, N, p["t_search_grid"], p["r_search_grid"], cauchy=cauchy)
    out["bounded"] = to_jsonable(bound)
    if bound.violation:
        violations.append({"relation": "cauchy implies bounded", "detail": bound.detail})
    if p["subsequence"]:
        sub = extract_convergent_subsequence(n, s, N, p["basis"], r_grid=grids[0], t_grid=grids[1])
        out["subsequence"] = to_jsonable(sub)
        if not sub.verified:
            violations.append({"relation": "subsequence re-verifies", "limit": sub.limit})
    return out, violations


def _check_continuity(cfg: RunConfig, p: dict, complement_thresholds: bool):
    n, f, N = cfg.norm, cfg.maps[p["map"]], p["horizon"]
    x0 = np.asarray(p["x0"], float)
    sampler = SamplerConfig(seed=cfg.sampler.seed, samples=p["samples"])
    family = None if p["family"] is None else [cfg.sequences[k] for k in p["family"]]
    strong = check_strongly_ifc(f, x0, n, n, p["eps_grid"], sampler=sampler)
    ifc = check_ifc_grid(f, x0, n, n, p["eps_grid"], p["alpha_grid"], sampler, complement_thresholds)
    seq = check_sequentially_ifc(f, x0, n, n, family, p["r_grid"], p["t_grid"], N)
    ifc_ok = all(r.verdict for r in ifc)
    out = {"map": f.describe(), "x0": x0.tolist(), "strongly_ifc": to_jsonable(strong),
           "ifc": to_jsonable(ifc), "ifc_verdict": ifc_ok,
           "sequentially_ifc": to_jsonable(seq)}
    violations = []
    if strong.verdict and not seq.verdict:
        violations.append({"relation": "strongly ifc implies sequentially ifc"})
    if ifc_ok != seq.verdict:
        violations.append({"relation": "ifc iff sequentially ifc", "ifc": ifc_ok,
                           "sequential": seq.verdict})
    return out, violations


def _check_compact(cfg: RunConfig, p: dict):
    n, S, N = cfg.norm, cfg.sets[p["set"]], p["horizon"]
    probes = [cfg.sequences[k] for k in p["probes"]]
    violations = []
    if p["map"] is not None:
        rep = check_compact_image(cfg.maps[p["map"]], n, n, S, probes, N)
        report = rep.image
        out = {"image": to_jsonable(report), "continuity": to_jsonable(rep.continuity)}
    else:
        report = check_compact(n, S, probes, N)
        out = to_jsonable(report)
    if report.closed and report.bounded and not report.compatible:
        violations.append({"relation": "closed and bounded implies compact",
                           "set": report.set_spec})
    return out, violations


def execute_task(cfg: RunConfig, task: TaskSpec, complement_thresholds: bool = False) -> TaskOutcome:
    start = time.perf_counter()
    try:
        if task.kind == "validate-axioms":
            result, violations = _validate_axioms(cfg, task.params)
        elif task.kind == "alpha-norm":
            result, violations = _alpha_norm(cfg, task.params)
        elif task.kind == "analyze-sequence":
            result, violations = _analyze_sequence(cfg, task.params)
        elif task.kind == "check-continuity":
            result, violations = _check_continuity(cfg, task.params, complement_thresholds)
        else:
            result, violations = _check_compact(cfg, task.params)
        status = "violation" if violations else "ok"
    except GifPsiError as exc:
        result, violations, status = {"error": type(exc).__name__, "message": str(exc)}, [], "error"
    return TaskOutcome(task.id, task.kind, status, to_jsonable(violations), to_jsonable(result),
                       time.perf_counter() - start)


def run(cfg: RunConfig, parallel: bool = False, complement_thresholds: bool = False,
        max_workers: int | None = None) -> RunReport:
    """Run every task; the payload does not depend on ``parallel``."""
    start = time.perf_counter()
    if parallel and len(cfg.tasks) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            outcomes = list(pool.map(lambda t: execute_task(cfg, t, complement_thresholds), cfg.tasks))
    else:
        outcomes = [execute_task(cfg, t, complement_thresholds) for t in cfg.tasks]
    counts = {s: sum(o.status == s for o in outcomes) for s in ("ok", "violation", "error")}
    payload = {
        "artifact_version": __version__,
        "schema_version": cfg.schema_version,
        "config": to_jsonable(cfg.echo),
        "continuity_form": "complement" if complement_thresholds else "direct",
        "tasks": [o.payload() for o in outcomes],
        "summary": {"tasks": len(outcomes), **counts},
    }
    exit_code = EXIT_VIOLATION if counts["violation"] or counts["error"] else EXIT_OK
    payload["summary"]["exit_code"] = exit_code
    digest = hashlib.sha256(canonical(payload).encode()).hexdigest()
    timing = {"total_seconds": time.perf_counter() - start,
              "tasks": {o.id: o.seconds for o in outcomes}, "payload_sha256": digest,
              "parallel": parallel}
    return RunReport(payload, timing, exit_code)
