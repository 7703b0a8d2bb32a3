"""Command-line entry point.

Usage:
  python -m bergman_probe.cli kernel --domain FILE --point "re,im,..." [--degree N]
  python -m bergman_probe.cli metric --domain FILE --point STR --direction STR
  python -m bergman_probe.cli experiment {path,cone,localization,peak,identities} --domain FILE ...

Points and directions are comma-separated re,im pairs ("0.5,0,0,0" is
(0.5, 0) in C^2); --probes and --anchors separate vectors with ";".
--t-grid is "geo:base,count" (t_k = base^-k) or "list:t1,t2,...".

The report goes to stdout (or --out); logs go to stderr. Exit codes come
from bergman_probe.policies: 0 pass, 2 usage or input error,
3 inconclusive, 4 check failed.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys

import numpy as np

from bergman_probe import __version__, defaults
from bergman_probe import report as reports
from bergman_probe.closed_forms import has_closed_form, kernel_closed, metric_closed
from bergman_probe.domain_io import domain_hash, load_domain
from bergman_probe.domains import Domain, simplify, supporting_normal
from bergman_probe.errors import BergmanError
from bergman_probe.experiments.checks import caratheodory_for_path, cone_bound_check
from bergman_probe.experiments.identities import run_identities
from bergman_probe.experiments.localization import localization_ratio
from bergman_probe.experiments.path import run_path_experiment, theorem2a_series, uniformity_probe
from bergman_probe.experiments.peak import build_peak_function, verify_peak
from bergman_probe.gram import GramCache
from bergman_probe.naming import Classification, ExperimentKind
from bergman_probe.numeric import Estimator
from bergman_probe.paths import geometric_grid
from bergman_probe.points import as_direction, as_point
from bergman_probe.policies import Outcome, exit_code_for, worst

logger = logging.getLogger("bergman_probe")

LOG_FORMAT = "[bergman] %(levelname)s %(message)s"


# ---------------------------------------------------------------------------
# Literal parsing
# ---------------------------------------------------------------------------

def parse_vector(text: str) -> np.ndarray:
    """"re,im,re,im,..." -> complex vector."""
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ValueError(f"not a list of numbers: {text!r}") from None
    if not values or len(values) % 2:
        raise ValueError(f"expected an even number of values (re,im pairs), got {text!r}")
    pairs = np.array(values).reshape(-1, 2)
    return pairs[:, 0] + 1j * pairs[:, 1]


def parse_vectors(text: str) -> list[np.ndarray]:
    return [parse_vector(part) for part in text.split(";") if part.strip()]


def parse_t_grid(text: str | None) -> list[float]:
    if text is None:
        return geometric_grid(float(defaults.harness("t_grid")["base"]),
                              int(defaults.harness("t_grid")["count"]))
    kind, _, body = text.partition(":")
    if kind == "geo":
        parts = body.split(",")
        if len(parts) != 2:
            raise ValueError(f"--t-grid geo expects 'geo:base,count', got {text!r}")
        return geometric_grid(float(parts[0]), int(parts[1]))
    if kind == "list":
        values = [float(v) for v in body.split(",") if v.strip()]
        if not values:
            raise ValueError("--t-grid list is empty")
        return values
    raise ValueError(f"--t-grid must start with 'geo:' or 'list:', got {text!r}")


# ---------------------------------------------------------------------------
# Arguments
# ---------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--domain", required=True, help="domain JSON file")
    p.add_argument("--degree", type=int, default=None, help="basis degree (default: cap for the dimension)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--candidates-log2", type=int, default=None,
                   help="qmc candidate budget as a power of two")
    p.add_argument("--out", default=None, help="report file (default: stdout)")
    p.add_argument("--format", choices=reports.FORMATS, default=None)
    p.add_argument("--log-level", default=None)
    p.add_argument("--numeric", action="store_true",
                   help="use the numeric engine even where a closed form exists")
    p.add_argument("--cache-dir", default=None,
                   help="reuse Gram systems stored under this directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bergman-probe",
                                     description="Bergman kernel and metric estimates")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    k = sub.add_parser("kernel", help="K_D(z)")
    _common(k)
    k.add_argument("--point", required=True)

    m = sub.add_parser("metric", help="B_D(z; X)")
    _common(m)
    m.add_argument("--point", required=True)
    m.add_argument("--direction", required=True)

    e = sub.add_parser("experiment", help="boundary-behaviour experiments")
    e.add_argument("kind", choices=[kind.value for kind in ExperimentKind])
    _common(e)
    e.add_argument("--point", default=None, help="boundary point z0")
    e.add_argument("--direction", default=None, help="path direction w (default: inward normal)")
    e.add_argument("--probes", default=None, help="probe directions, ';'-separated")
    e.add_argument("--anchors", default=None, help="cone anchor points, ';'-separated")
    e.add_argument("--neighborhood", default=None, help="neighbourhood U as a domain JSON file")
    e.add_argument("--t-grid", default=None)
    e.add_argument("--alpha", type=float, default=None)
    e.add_argument("--budget", type=int, default=None, help="peak-function closure samples")
    e.add_argument("--samples", type=int, default=8, help="points per identity suite")
    e.add_argument("--workers", type=int, default=None)
    e.add_argument("--uniformity", action="store_true",
                   help="also run the local-uniformity probe on the path")
    return parser


def _configure_logging(level: str | None) -> None:
    name = (level or str(defaults.cli("log_level"))).upper()
    if not isinstance(logging.getLevelName(name), int):
        raise ValueError(f"unknown log level {level!r}")
    logging.basicConfig(level=name, format=LOG_FORMAT, stream=sys.stderr, force=True)


def _config(args: argparse.Namespace, domain: Domain) -> dict:
    skip = ("out", "log_level", "cache_dir")
    run = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    run["seed"] = _seed(args)
    run["format"] = _format(args)
    return {"run": run, "domain_hash": domain_hash(domain), "defaults": defaults.settings()}


def _seed(args) -> int:
    return int(args.seed if args.seed is not None else defaults.cli("seed"))


def _format(args) -> str:
    return str(args.format or defaults.cli("format"))


def _estimator(args, domain: Domain) -> Estimator:
    cache = GramCache(args.cache_dir) if args.cache_dir else None
    return Estimator(domain, args.degree, seed=_seed(args), candidates_log2=args.candidates_log2,
                     numeric_only=args.numeric, cache=cache)


def _require(value, flag: str):
    if value is None:
        raise ValueError(f"{flag} is required for this command")
    return value


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_kernel(args, domain: Domain) -> reports.Report:
    z = as_point(parse_vector(args.point), domain.dim)
    est = _estimator(args, domain).kernel(z)
    closed = kernel_closed(domain, z).K if has_closed_form(simplify(domain)) else None
    outcome = Outcome.PASS if est.converged else Outcome.INCONCLUSIVE
    return reports.Report(
        kind="kernel", config=_config(args, domain),
        columns=reports.estimate_columns(domain.dim, with_direction=False),
        rows=[reports.estimate_row(z, est, closed=closed)],
        summary={"K": est.K, "source": est.source, "converged": est.converged}, outcome=outcome,
    )


def cmd_metric(args, domain: Domain) -> reports.Report:
    z = as_point(parse_vector(args.point), domain.dim)
    X = as_direction(parse_vector(args.direction), domain.dim)
    est = _estimator(args, domain).metric(z, X)
    closed = metric_closed(domain, z, X).B if has_closed_form(simplify(domain)) else None
    outcome = Outcome.PASS if est.converged else Outcome.INCONCLUSIVE
    return reports.Report(
        kind="metric", config=_config(args, domain),
        columns=reports.estimate_columns(domain.dim, with_direction=True),
        rows=[reports.estimate_row(z, est, X=X, closed=closed)],
        summary={"K": est.K, "B": est.B, "source": est.source, "converged": est.converged},
        outcome=outcome,
    )


def _default_probes(n: int) -> list[np.ndarray]:
    eye = np.eye(n, dtype=complex)
    probes = [eye[k] for k in range(n)]
    if n > 1:
        probes.append(np.ones(n, dtype=complex) / math.sqrt(n))
    return probes


def _path_inputs(args, domain: Domain):
    z0 = as_point(parse_vector(_require(args.point, "--point")), domain.dim)
    w = (parse_vector(args.direction) if args.direction is not None
         else -supporting_normal(domain, z0))
    probes = parse_vectors(args.probes) if args.probes else _default_probes(domain.dim)
    return z0, as_direction(w, domain.dim), probes


def run_path(args, domain: Domain) -> reports.Report:
    z0, w, probes = _path_inputs(args, domain)
    est = _estimator(args, domain)
    t_grid = parse_t_grid(args.t_grid)
    exp = run_path_experiment(domain, z0, w, t_grid, probes, estimator=est, workers=args.workers)
    series = theorem2a_series(exp)
    cara = caratheodory_for_path(exp)
    agreement = exp.agrees_with_flat_space()
    checks = {
        "flat_space_agreement": agreement,
        "kdist2_running_inf": float(series.running_inf[-1]) if series.values.size else None,
        "kdist2_passed": series.passed,
        "caratheodory": reports.caratheodory_summary(cara),
    }
    outcomes = [Outcome.PASS if series.passed else Outcome.CHECK_FAILED,
                Outcome.PASS if cara.passed else Outcome.CHECK_FAILED]
    if any(f.classification is Classification.INCONCLUSIVE for f in exp.fits):
        outcomes.append(Outcome.INCONCLUSIVE)
    elif agreement is False:
        outcomes.append(Outcome.CHECK_FAILED)
    if args.uniformity:
        uni = uniformity_probe(domain, z0, w, t_grid, estimator=est, seed=_seed(args),
                               workers=args.workers)
        checks["uniformity"] = {"slope": uni.fit.slope, "passed": uni.passed}
        outcomes.append(Outcome.PASS if uni.passed else Outcome.CHECK_FAILED)
    return reports.Report(
        kind="path", config=_config(args, domain), columns=reports.path_columns(domain.dim),
        rows=reports.path_rows(exp), summary=reports.path_summary(exp, checks),
        outcome=worst(outcomes),
    )


def run_cone(args, domain: Domain) -> reports.Report:
    z0 = as_point(parse_vector(_require(args.point, "--point")), domain.dim)
    anchors = parse_vectors(_require(args.anchors, "--anchors"))
    probes = parse_vectors(_require(args.probes, "--probes"))
    t_grid = parse_t_grid(args.t_grid) if args.t_grid else [1.0] + parse_t_grid(None)
    bound = cone_bound_check(domain, z0, anchors, t_grid, probes, estimator=_estimator(args, domain),
                             workers=args.workers)
    return reports.Report(
        kind="cone", config=_config(args, domain), columns=reports.cone_columns(domain.dim),
        rows=reports.cone_rows(bound),
        summary={"C_emp": bound.c_emp, "ratio": bound.ratio, "passed": bound.passed},
        outcome=Outcome.PASS if bound.passed else Outcome.CHECK_FAILED,
    )


def run_localization(args, domain: Domain) -> reports.Report:
    neighborhood = load_domain(_require(args.neighborhood, "--neighborhood"))
    z0, w, probes = _path_inputs(args, domain)
    probe = probes[0] if args.probes else None
    series = localization_ratio(domain, neighborhood, z0, w, parse_t_grid(args.t_grid), probe=probe,
                                d_max=args.degree, seed=_seed(args),
                                candidates_log2=args.candidates_log2)
    summary = {"peak_point": series.peak_point, "bound_ok": series.bound_ok,
               "trend_ok": series.trend_ok, "final_ratio": float(series.ratio[-1]),
               "passed": series.passed}
    return reports.Report(
        kind="localization", config=_config(args, domain),
        columns=reports.localization_columns(domain.dim), rows=reports.localization_rows(series),
        summary=summary, outcome=Outcome.PASS if series.passed else Outcome.CHECK_FAILED,
    )


def run_peak(args, domain: Domain) -> reports.Report:
    z0 = as_point(parse_vector(_require(args.point, "--point")), domain.dim)
    spec = build_peak_function(domain, z0)
    result = verify_peak(spec, args.budget, seed=_seed(args))
    return reports.Report(
        kind="peak", config=_config(args, domain), columns=reports.peak_columns(domain.dim),
        rows=reports.peak_rows(spec, result),
        summary={"violations": result.violations, "samples": result.samples, "passed": result.passed},
        outcome=Outcome.PASS if result.passed else Outcome.CHECK_FAILED,
    )


def run_identities_cmd(args, domain: Domain) -> reports.Report:
    result = run_identities(domain, args.alpha, points=args.samples, seed=_seed(args),
                            d_max=args.degree, candidates_log2=args.candidates_log2)
    return reports.Report(
        kind="identities", config=_config(args, domain), columns=reports.IDENTITY_COLUMNS,
        rows=reports.identity_rows(result),
        summary={"checks": len(result.checks), "max_rel_error": result.max_rel_error,
                 "skipped": list(result.skipped), "passed": result.passed},
        outcome=Outcome.PASS if result.passed else Outcome.CHECK_FAILED,
    )


EXPERIMENTS = {
    ExperimentKind.PATH: run_path,
    ExperimentKind.CONE: run_cone,
    ExperimentKind.LOCALIZATION: run_localization,
    ExperimentKind.PEAK: run_peak,
    ExperimentKind.IDENTITIES: run_identities_cmd,
}


def cmd_experiment(args, domain: Domain) -> reports.Report:
    return EXPERIMENTS[ExperimentKind(args.kind)](args, domain)


COMMANDS = {"kernel": cmd_kernel, "metric": cmd_metric, "experiment": cmd_experiment}


def main(argv: list) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _configure_logging(args.log_level)
        domain = load_domain(args.domain)
        report = COMMANDS[args.command](args, domain)
    except (BergmanError, ValueError, OSError) as exc:
        logger.error("%s", exc)
        return exit_code_for(Outcome.USAGE_ERROR)
    reports.emit(report, _format(args), args.out)
    code = exit_code_for(report.outcome)
    if code:
        logger.warning("%s finished with outcome %s", args.command, report.outcome.value)
    return code


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))
