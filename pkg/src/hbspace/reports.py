"""Batch pipelines and machine-readable reports.

Every ``run_*`` function returns a report whose :meth:`to_dict` output is
plain JSON data.  Wall-clock timings live in a separate ``timing`` field
so that :meth:`AnalysisReport.canonical_json` is byte-identical across runs
with the same symbol and configuration.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import HbError, PreconditionError, SymbolError
from .inner_case import commutant_projection_check
from .reducibility import ReducibilityConfig, decide_reducibility
from .space import (
    EXTREME_CLASSES,
    cauchy_isometry_residual,
    cyclicity_check,
    gram_closed_form,
    gram_model_space,
    gram_via_moments,
    gram_via_pseudoinverse,
    intertwining_residual,
    verify_defect_identities,
)
from .symbols import (
    describe,
    evaluate_boundary,
    extremality_diagnostic,
    inner_diagnostic,
    moments_of_modulus_squared,
    parity_classify,
    parse_symbol,
    resolved_class,
)

SCHEMA_VERSION = "1"
MODES = ("analyze", "verify", "reduce", "scan", "moments")
DEFAULT_TOLERANCES = {
    "gram_exact": 1e-10,
    "gram_truncated": 1e-3,
    "identity_exact": 1e-10,
    "identity_truncated": 1e-3,
    "isometry": 1e-6,
    "spectral": 1e-10,
    "range": 1e-6,
    "product": 1e-6,
}


class ConfigError(HbError, ValueError):
    """Invalid run configuration."""


@dataclass(frozen=True)
class RunConfig:
    """Sizes and tolerances of a run.

    ``tolerances`` overrides entries of ``DEFAULT_TOLERANCES`` plus the
    optional ``nullspace`` and ``verify`` thresholds of the reducibility
    solver.
    """

    mode: str = "analyze"
    truncation: int = 256
    grid: int = 4096
    orbit: int = 30
    cutoff: int | None = None
    tolerances: dict = field(default_factory=dict)
    jobs: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        for name in ("truncation", "grid", "orbit", "jobs"):
            if int(getattr(self, name)) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.grid & (self.grid - 1):
            raise ConfigError("grid size must be a power of two")
        if self.cutoff is not None and self.cutoff <= 0:
            raise ConfigError("cutoff must be positive")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES) - {"nullspace", "verify"}
        if unknown:
            raise ConfigError(f"unknown tolerance names: {sorted(unknown)}")

    def tol(self, name: str) -> float:
        return float(self.tolerances.get(name, DEFAULT_TOLERANCES.get(name, math.nan)))

    def to_dict(self) -> dict:
        out = asdict(self)
        out["tolerances"] = dict(sorted(self.tolerances.items()))
        return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [_jsonable(float(obj.real)), _jsonable(float(obj.imag))]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return None if math.isnan(x) else (str(x) if math.isinf(x) else x)
    if hasattr(obj, "to_dict"):
        return _jsonable(obj.to_dict())
    return obj


@dataclass
class AnalysisReport:
    """Outcome of one pipeline run on one symbol.

    ``tables`` carries CSV companion data (header, rows); it is not part of
    the JSON document.
    """

    mode: str
    symbol: dict
    config: dict
    status: str = "ok"
    exit_code: int = 0
    parity: str | None = None
    diagnostics: dict = field(default_factory=dict)
    gram_agreement: list = field(default_factory=list)
    defect_identities: list = field(default_factory=list)
    isometry: dict = field(default_factory=dict)
    reducibility: dict | None = None
    refinement: list = field(default_factory=list)
    moments: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)
    timing: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION
    tables: dict = field(default_factory=dict, repr=False, compare=False)

    _FIELDS = ("schema_version", "mode", "symbol", "config", "status", "exit_code", "parity",
               "diagnostics", "gram_agreement", "defect_identities", "isometry",
               "reducibility", "refinement", "moments", "errors", "timing")

    def to_dict(self, timing: bool = True) -> dict:
        out = {k: _jsonable(getattr(self, k)) for k in self._FIELDS}
        if not timing:
            out.pop("timing")
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> AnalysisReport:
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {doc.get('schema_version')!r}")
        return cls(**{k: doc[k] for k in cls._FIELDS if k in doc})

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True, allow_nan=False)

    def canonical_json(self) -> str:
        """JSON without the timing field, for reproducibility comparisons."""
        return self.to_json(timing=False)

    def fail(self, code: int, status: str):
        if code > self.exit_code:
            self.exit_code, self.status = code, status


# ----------------------------------------------------------------------
# pipeline stages

def _load(report: AnalysisReport, path):
    try:
        spec = parse_symbol(path)
    except (SymbolError, ValueError) as exc:
        report.errors.append({"stage": "parse", "type": type(exc).__name__, "message": str(exc)})
        report.fail(2, "input_error")
        return None
    report.symbol = {"label": spec.label, "description": describe(spec), "spec": spec.to_dict(),
                     "source": str(path) if not isinstance(path, dict) else None}
    return spec


def _stage(report: AnalysisReport, name: str, func):
    t0 = time.perf_counter()
    try:
        return func()
    except (HbError, ValueError, np.linalg.LinAlgError) as exc:
        report.errors.append({"stage": name, "type": type(exc).__name__, "message": str(exc)})
        report.fail(1, "error")
        return None
    finally:
        report.timing[name] = round(time.perf_counter() - t0, 6)


def _classify(report, spec, cfg):
    cls = resolved_class(spec)
    report.parity = parity_classify(spec.coefficients(1024)).label
    diag = {"class": cls, "declared_class": spec.declared_class}
    grid = evaluate_boundary(spec, cfg.grid)
    if spec.blaschke_zeros() is None:
        diag["inner_deviation"] = inner_diagnostic(grid).deviation
        if spec.has_outer_factor or spec.declared_class == "unknown":
            ext = extremality_diagnostic(spec)
            diag["extremality"] = {"label": ext.label, "sizes": list(ext.sizes),
                                   "log_integrals": list(ext.estimates),
                                   "zero_fractions": list(ext.zero_fractions)}
    modulus = np.sqrt(grid.modulus_squared)
    report.tables["modulus"] = (("theta", "modulus"), list(zip(grid.theta.tolist(),
                                                                modulus.tolist())))
    report.diagnostics.update(diag)
    return cls


def _gram_stage(report, spec, cfg, cls):
    # late orbit vectors feel the truncation first; 16 keeps N = 256 well resolved
    L = min(cfg.orbit, 16)
    exact = spec.blaschke_zeros() is not None
    tol = cfg.tol("gram_exact" if exact else "gram_truncated")
    grams = {}
    if cls in EXTREME_CLASSES:
        grams["closed_form"] = gram_closed_form(spec, L)
        grams["moment_formula"] = gram_via_moments(spec, L, cfg.grid)
    if exact:
        grams["model_space"] = gram_model_space(spec, L)
    grams["pseudoinverse_oracle"] = gram_via_pseudoinverse(
        spec, cfg.truncation, L, cutoff=cfg.tol("spectral"), range_tol=cfg.tol("range"))
    names = list(grams)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            diff = float(np.max(np.abs(grams[a].entries - grams[b].entries)))
            ok = diff <= tol
            report.gram_agreement.append({"methods": [a, b], "max_difference": diff,
                                          "tolerance": tol, "agree": ok})
            if not ok:
                report.fail(1, "disagreement")
    ref = grams.get("closed_form", grams.get("pseudoinverse_oracle"))
    lam = np.linalg.eigvalsh(ref.entries)
    report.tables["gram_eigenvalues"] = (("index", "eigenvalue"), list(enumerate(lam.tolist())))
    report.diagnostics["gram_invariants"] = {m: g.invariants() for m, g in grams.items()}
    report.diagnostics["oracle"] = grams["pseudoinverse_oracle"].truncation
    if cls in EXTREME_CLASSES:
        cyc = cyclicity_check(ref)
        report.diagnostics["cyclicity"] = {"min_eigenvalue": cyc.min_eigenvalue,
                                           "ranks": list(cyc.ranks)}
    return grams


def _identity_stage(report, spec, cfg, cls):
    exact = spec.blaschke_zeros() is not None
    tol = cfg.tol("identity_exact" if exact else "identity_truncated")
    reps = verify_defect_identities(spec, 4, truncation=cfg.truncation, tol=tol)
    for r in reps:
        report.defect_identities.append({"identity": r.identity, "residual": r.residual,
                                         "truncation": r.truncation, "passed": r.passed,
                                         "detail": r.detail})
        if not r.passed:
            report.fail(1, "disagreement")
    if cls in EXTREME_CLASSES:
        tol_i = cfg.tol("isometry")
        iso = cauchy_isometry_residual(spec, grid_size=cfg.grid)
        inter = intertwining_residual(spec, grid_size=cfg.grid)
        report.isometry = {"cauchy_isometry": iso, "intertwining": inter, "tolerance": tol_i,
                           "passed": iso <= tol_i and inter <= tol_i}
        if not report.isometry["passed"]:
            report.fail(1, "disagreement")
    else:
        report.isometry = {"skipped": "requires an extreme symbol"}


def _refinement_stage(report, spec, cfg, cls):
    rows = []
    if cls in EXTREME_CLASSES and spec.has_outer_factor:
        L = min(cfg.orbit, 16)
        ref = gram_closed_form(spec, L).entries
        for m in (cfg.grid, 2 * cfg.grid):
            diff = float(np.max(np.abs(gram_via_moments(spec, L, m).entries - ref)))
            rows.append({"quantity": "gram_moment_formula", "level": m, "residual": diff})
    if spec.blaschke_zeros() is None:
        for n in (cfg.truncation, 2 * cfg.truncation):
            reps = verify_defect_identities(spec, 2, truncation=n, exact=False)
            worst = max((r.residual for r in reps if not math.isnan(r.residual)), default=0.0)
            rows.append({"quantity": "defect_identities", "level": n, "residual": worst})
    report.refinement = rows
    report.tables["refinement"] = (("quantity", "level", "residual"),
                                   [(r["quantity"], r["level"], r["residual"]) for r in rows])


def _moment_stage(report, spec, cfg):
    grid = evaluate_boundary(spec, cfg.grid)
    order = min(64, cfg.grid // 2)
    m = moments_of_modulus_squared(grid, order)
    vals = np.array([m.pairing(k) for k in range(order)])
    b = spec.coefficients(cfg.grid // 2)
    norm2 = float(vals[0].real)
    # energy beyond the computed coefficients belongs to every tail
    missing = max(norm2 - float(np.sum(np.abs(b) ** 2)), 0.0)
    tails = np.sqrt(np.cumsum((np.abs(b) ** 2)[::-1])[::-1] + missing)
    bound = np.sqrt(norm2) * tails[:order]
    decay_ok = bool(np.all(np.abs(vals) <= bound + 1e-10))
    odd = float(np.max(np.abs(vals[1::2]))) if order > 1 else 0.0
    symmetric = report.parity in ("even", "odd")
    bridge = symmetric == (odd <= 1e-8)
    # |b|^2 even forces b even or odd only when b has no inner factor
    applicable = not spec.has_inner_factor
    report.moments = {"order": order, "max_odd_moment": odd, "decay_bound_holds": decay_ok,
                      "parity_bridge_holds": bool(bridge), "parity_bridge_applicable": applicable,
                      "m0": norm2}
    report.tables["moments"] = (("k", "re", "im"),
                                [(k, v.real, v.imag) for k, v in enumerate(vals)])
    if not decay_ok or (applicable and not bridge):
        report.fail(1, "disagreement")


def _reduce_stage(report, spec, cfg, cls):
    if cls not in EXTREME_CLASSES:
        report.reducibility = {"skipped": f"no characterization for class {cls!r}"}
        return
    tol = cfg.tolerances
    rc = ReducibilityConfig(n_orbit=cfg.orbit, cutoff=cfg.cutoff, tol=tol.get("nullspace"),
                            tol_verify=tol.get("verify"), tol_product=cfg.tol("product"),
                            grid=cfg.grid)
    cert = decide_reducibility(spec, rc)
    report.reducibility = cert.to_dict()
    if spec.blaschke_zeros() is not None:
        comm = commutant_projection_check(spec, "z")
        report.reducibility["X_irreducibility"] = {
            "commutant_dimension": comm.dimension, "reducible": comm.reducible,
            "certified": comm.certified}
    if cert.decision == "inconclusive":
        report.fail(1, "inconclusive")


# ----------------------------------------------------------------------
# entry points

def _new(mode, cfg) -> AnalysisReport:
    return AnalysisReport(mode=mode, symbol={}, config=replace(cfg, mode=mode).to_dict())


def run_analyze(config: RunConfig, spec_path) -> AnalysisReport:
    """Full pipeline: classification, Gram agreement, identities, reducibility."""
    report = _new("analyze", config)
    spec = _load(report, spec_path)
    if spec is None:
        return report
    cls = _stage(report, "classify", lambda: _classify(report, spec, config))
    if cls is None:
        return report
    _stage(report, "gram", lambda: _gram_stage(report, spec, config, cls))
    _stage(report, "identities", lambda: _identity_stage(report, spec, config, cls))
    _stage(report, "moments", lambda: _moment_stage(report, spec, config))
    _stage(report, "reduce", lambda: _reduce_stage(report, spec, config, cls))
    return report


def run_verify(config: RunConfig, spec_path) -> AnalysisReport:
    """Identities, Gram agreement, isometry checks and the refinement table."""
    report = _new("verify", config)
    spec = _load(report, spec_path)
    if spec is None:
        return report
    cls = _stage(report, "classify", lambda: _classify(report, spec, config))
    if cls is None:
        return report
    _stage(report, "gram", lambda: _gram_stage(report, spec, config, cls))
    _stage(report, "identities", lambda: _identity_stage(report, spec, config, cls))
    _stage(report, "refinement", lambda: _refinement_stage(report, spec, config, cls))
    return report


def run_reduce(config: RunConfig, spec_path) -> AnalysisReport:
    """Reducibility decision only."""
    report = _new("reduce", config)
    spec = _load(report, spec_path)
    if spec is None:
        return report
    cls = _stage(report, "classify", lambda: _classify(report, spec, config))
    if cls is not None:
        _stage(report, "reduce", lambda: _reduce_stage(report, spec, config, cls))
    return report


def run_moments(config: RunConfig, spec_path) -> AnalysisReport:
    """Moments of ``|b|^2`` with the decay bound and the parity bridge."""
    report = _new("moments", config)
    spec = _load(report, spec_path)
    if spec is None:
        return report
    report.parity = parity_classify(spec.coefficients(1024)).label
    _stage(report, "moments", lambda: _moment_stage(report, spec, config))
    return report


@dataclass
class ScanReport:
    config: dict
    rows: list
    errors: list
    summary: dict
    exit_code: int = 0
    timing: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    def to_dict(self, timing: bool = True) -> dict:
        out = {"schema_version": self.schema_version, "mode": "scan", "config": self.config,
               "rows": self.rows, "errors": self.errors, "summary": self.summary,
               "exit_code": self.exit_code}
        if timing:
            out["timing"] = self.timing
        return _jsonable(out)

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True, allow_nan=False)

    def canonical_json(self) -> str:
        return self.to_json(timing=False)

    @property
    def tables(self):
        header = ("symbol", "class", "parity", "decision", "theory_agrees", "exit_code")
        return {"scan": (header, [tuple(r[h] for h in header) for r in self.rows])}


def _scan_one(args):
    cfg, path = args
    t0 = time.perf_counter()
    rep = run_reduce(cfg, path)
    red = rep.reducibility or {}
    checks = red.get("cross_checks", {})
    theory = [v for k, v in checks.items() if k in ("parity_theory", "inner_structure")]
    row = {"symbol": Path(path).name, "class": rep.diagnostics.get("class"),
           "parity": rep.parity, "decision": red.get("decision", "skipped"),
           "theory_agrees": (theory[0] == "agree") if theory else None,
           "exit_code": rep.exit_code}
    return row, rep.errors, time.perf_counter() - t0


def run_scan(config: RunConfig, corpus_dir) -> ScanReport:
    """One-line verdicts for every ``*.json`` spec in a directory.

    Failures are isolated per file and collected in ``errors``.
    """
    cfg = replace(config, mode="reduce")
    directory = Path(corpus_dir)
    if not directory.is_dir():
        raise ConfigError(f"corpus directory {directory} not found")
    paths = sorted(str(p) for p in directory.glob("*.json"))
    t0 = time.perf_counter()
    if config.jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_scan_one, [(cfg, p) for p in paths]))
    else:
        results = [_scan_one((cfg, p)) for p in paths]
    rows, errors, timing = [], [], {}
    for path, (row, errs, dt) in zip(paths, results):
        timing[row["symbol"]] = round(dt, 6)
        if errs:
            errors.append({"symbol": row["symbol"], "errors": errs})
        if row["exit_code"] == 2:
            continue
        rows.append(row)
    judged = [r for r in rows if r["theory_agrees"] is not None]
    agree = sum(1 for r in judged if r["theory_agrees"])
    summary = {"symbols": len(paths), "analyzed": len(rows), "failed": len(errors),
               "decisions": {d: sum(1 for r in rows if r["decision"] == d)
                             for d in sorted({r["decision"] for r in rows})},
               "theory_agreement_rate": (agree / len(judged)) if judged else None}
    timing["total"] = round(time.perf_counter() - t0, 6)
    code = 0
    if any(r["exit_code"] == 1 for r in rows) or (judged and agree < len(judged)):
        code = 1
    return ScanReport(config.to_dict(), rows, errors, summary, code, timing)


def emit_report(report, path=None, csv_dir=None) -> list:
    """Write the JSON document and CSV companions; return the written paths."""
    written = []
    if path is not None:
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(report.to_json() + "\n")
        written.append(p)
    if csv_dir is not None:
        d = Path(csv_dir)
        d.mkdir(parents=True, exist_ok=True)
        for name, (header, rows) in sorted(report.tables.items()):
            out = d / f"{name}.csv"
            with out.open("w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(header)
                w.writerows(rows)
            written.append(out)
    return written


def load_report(path) -> AnalysisReport:
    return AnalysisReport.from_dict(json.loads(Path(path).read_text()))


__all__ = [
    "AnalysisReport", "ConfigError", "PreconditionError", "RunConfig", "ScanReport",
    "emit_report", "load_report", "run_analyze", "run_moments", "run_reduce", "run_scan",
    "run_verify",
]
