"""Machine-readable reports for the CLI.

A report is a header config, a list of flat rows and a summary. CSV
output is

    # config: {...}
    <header>
    <rows>
    # summary: {...}

and JSON output is one object with ``version``, ``config``, ``columns``,
``rows``, ``summary`` and ``outcome``. Keys are sorted and floats are
written with repr, so equal inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from bergman_probe import __version__
from bergman_probe.experiments.checks import CaratheodoryResult, ConeBound
from bergman_probe.experiments.identities import IdentityReport
from bergman_probe.experiments.localization import LocalizationSeries
from bergman_probe.experiments.path import PathExperiment
from bergman_probe.experiments.peak import PeakFunctionSpec, PeakReport
from bergman_probe.naming import complex_columns, flatten_complex
from bergman_probe.numeric import BergmanEstimate
from bergman_probe.policies import Outcome

FORMATS = ("csv", "json")


@dataclass
class Report:
    kind: str
    config: dict
    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    outcome: Outcome = Outcome.PASS


def plain(value):
    """JSON-ready copy: complex -> [re, im], arrays -> lists, enums -> values."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [plain(float(value.real)), plain(float(value.imag))]
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else repr(v)
    return value


def cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _dumps(value) -> str:
    return json.dumps(plain(value), sort_keys=True, separators=(",", ":"))


def write_csv(report: Report, stream) -> None:
    stream.write(f"# config: {_dumps({'version': __version__, **report.config})}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([cell(row.get(c)) for c in report.columns])
    stream.write(f"# summary: {_dumps(report.summary)}\n")


def write_json(report: Report, stream) -> None:
    body = {
        "version": __version__,
        "kind": report.kind,
        "config": report.config,
        "columns": report.columns,
        "rows": report.rows,
        "summary": report.summary,
        "outcome": report.outcome,
    }
    stream.write(json.dumps(plain(body), sort_keys=True, indent=2) + "\n")


def render(report: Report, fmt: str = "csv") -> str:
    if fmt not in FORMATS:
        raise ValueError(f"unknown report format {fmt!r} (known: {', '.join(FORMATS)})")
    buf = io.StringIO()
    (write_csv if fmt == "csv" else write_json)(report, buf)
    return buf.getvalue()


def emit(report: Report, fmt: str = "csv", path: str | None = None) -> None:
    """Write to ``path`` or stdout."""
    text = render(report, fmt)
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as f:
        f.write(text)


# ---------------------------------------------------------------------------
# Row builders
# ---------------------------------------------------------------------------

def _vec(prefix: str, values) -> dict:
    v = np.asarray(values).ravel()
    return dict(zip(complex_columns(prefix, v.size), flatten_complex(v)))


def estimate_columns(n: int, with_direction: bool) -> list[str]:
    cols = complex_columns("z", n)
    if with_direction:
        cols += complex_columns("X", n)
    cols += ["source", "d_max", "K"]
    if with_direction:
        cols += ["M", "B"]
    cols += ["closed", "rel_err", "condition", "rank", "dropped",
             "quadrature_error", "converged"]
    return cols


def estimate_row(z, estimate: BergmanEstimate, X=None, closed: float | None = None) -> dict:
    """One kernel (X None) or metric row; ``closed`` is the closed-form K or B if one exists."""
    row = _vec("z", z)
    value = estimate.K if X is None else estimate.B
    if X is not None:
        row.update(_vec("X", X))
        row.update(M=estimate.M, B=estimate.B)
    row.update(
        source=estimate.source, d_max=estimate.d_max, K=estimate.K, closed=closed,
        rel_err=None if closed is None else abs(value - closed) / abs(closed),
        condition=estimate.condition, rank=estimate.rank, dropped=estimate.dropped,
        quadrature_error=estimate.kernel_error if X is None else estimate.metric_error,
        converged=estimate.converged,
    )
    return row


def path_columns(n: int) -> list[str]:
    return (["t"] + complex_columns("z", n) + complex_columns("X", n)
            + ["dist", "K", "M", "B", "K_dist2", "d_zX", "converged", "condition"])


def path_rows(experiment: PathExperiment) -> list[dict]:
    rows = []
    for i, t in enumerate(experiment.t):
        z = experiment.points[i]
        dist = float(experiment.dist[i])
        for j, X in enumerate(experiment.probes):
            e = experiment.estimates[i][j]
            row = {"t": float(t), **_vec("z", z), **_vec("X", X)}
            row.update(dist=dist, K=e.K, M=e.M, B=e.B, K_dist2=e.K * dist * dist,
                       d_zX=float(experiment.radii[i, j]), converged=e.converged,
                       condition=e.condition)
            rows.append(row)
    return rows


def path_summary(experiment: PathExperiment, checks: dict) -> dict:
    out: dict = dict(experiment.summary())
    fits = {label: {"slope": f.slope, "residual": f.residual, "ratio": f.ratio}
            for label, f in zip(experiment.labels, experiment.fits)}
    out["checks"] = checks
    out["fits"] = fits
    out["samples"] = int(experiment.t.size)
    out["truncated"] = experiment.truncated
    return out


def caratheodory_summary(result: CaratheodoryResult) -> dict:
    return {"passed": result.passed, "worst_margin": result.worst}


def cone_columns(n: int) -> list[str]:
    return ["anchor", "t"] + complex_columns("z", n) + complex_columns("X", n) + ["B", "B_over_X", "converged"]


def cone_rows(bound: ConeBound) -> list[dict]:
    rows = []
    P = len(bound.probes)
    for a in range(len(bound.anchors)):
        for i, t in enumerate(bound.t):
            z = bound.points[a * bound.t.size + i]
            for j, X in enumerate(bound.probes):
                e = bound.estimates[(a * bound.t.size + i) * P + j]
                rows.append({"anchor": a, "t": float(t), **_vec("z", z), **_vec("X", X),
                             "B": e.B, "B_over_X": float(bound.values[a, i, j]),
                             "converged": e.converged})
    return rows


def localization_columns(n: int) -> list[str]:
    return ["t"] + complex_columns("z", n) + ["K_D", "K_DU", "ratio", "metric_ratio"]


def localization_rows(series: LocalizationSeries) -> list[dict]:
    rows = []
    for i, t in enumerate(series.t):
        rows.append({
            "t": float(t), **_vec("z", series.points[i]),
            "K_D": series.global_estimates[i].K, "K_DU": series.local_estimates[i].K,
            "ratio": float(series.ratio[i]),
            "metric_ratio": None if series.metric_ratio is None else float(series.metric_ratio[i]),
        })
    return rows


def peak_columns(n: int) -> list[str]:
    return complex_columns("z0", n) + complex_columns("nu", n) + [
        "a", "inf_re", "samples", "on_peak_set", "off_peak_set", "violations",
        "max_off_modulus", "max_unit_deviation"]


def peak_rows(spec: PeakFunctionSpec, report: PeakReport) -> list[dict]:
    return [{
        **_vec("z0", spec.z0), **_vec("nu", spec.normal), "a": spec.a, "inf_re": spec.inf_re,
        "samples": report.samples, "on_peak_set": report.on_peak_set,
        "off_peak_set": report.off_peak_set, "violations": report.violations,
        "max_off_modulus": report.max_off_modulus, "max_unit_deviation": report.max_unit_deviation,
    }]


IDENTITY_COLUMNS = ["identity", "case", "lhs", "rhs", "rel_error", "tolerance", "passed"]


def identity_rows(report: IdentityReport) -> list[dict]:
    return [{"identity": c.identity, "case": c.case, "lhs": c.lhs, "rhs": c.rhs,
             "rel_error": c.rel_error, "tolerance": c.tolerance, "passed": c.passed}
            for c in report.checks]
