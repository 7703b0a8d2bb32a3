"""Lower and upper bounds on the metric near a convex boundary point.

The Caratheodory floor: B(z; X) >= C(z; X) >= 1 / (2 d(z; X)), where
d(z; X) is the directional radius. The cone bound: along the cone
z0 + t (k - z0) over an anchor set inside E(z0), B(z; X) <= C |X| for
X in L(z0), so the per-anchor B series stays flat as t shrinks.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from bergman_probe import defaults
from bergman_probe.domains import Domain, directional_radius
from bergman_probe.experiments.path import PathExperiment, fan_out
from bergman_probe.flats import flat_space, require_flat_probe
from bergman_probe.numeric import BergmanEstimate, Estimator
from bergman_probe.paths import cone_samples
from bergman_probe.points import as_direction, as_point

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CaratheodoryResult:
    margins: NDArray[np.float64]
    tolerances: NDArray[np.float64]
    passed: bool

    @property
    def worst(self) -> float:
        live = self.margins[~np.isnan(self.margins)]
        return float(live.min()) if live.size else math.inf


def caratheodory_check(domain: Domain, samples, estimates, radii=None,
                       tol: float | None = None) -> CaratheodoryResult:
    """Margins B - 1/(2 d(z;X)) per (z, X) sample; each must be >= -(tol + quadrature error).

    Non-converged estimates are skipped (margin nan). ``radii`` reuses
    directional radii computed elsewhere.
    """
    base = float(tol if tol is not None else defaults.harness("caratheodory_tol"))
    samples = list(samples)
    estimates = list(estimates)
    if len(samples) != len(estimates):
        raise ValueError(f"{len(samples)} samples but {len(estimates)} estimates")
    margins = np.full(len(samples), math.nan)
    tolerances = np.full(len(samples), base)
    for k, ((z, X), est) in enumerate(zip(samples, estimates)):
        if not est.converged:
            continue
        d = radii[k] if radii is not None else directional_radius(domain, z, as_direction(X))
        floor = 0.0 if math.isinf(d) else 1.0 / (2.0 * d)
        margins[k] = est.B - floor
        tolerances[k] = base + est.metric_error
    live = ~np.isnan(margins)
    passed = bool(np.all(margins[live] >= -tolerances[live]))
    if not passed:
        k = int(np.nanargmin(margins + tolerances))
        logger.error("Caratheodory floor violated at sample %d: margin %.3g", k, margins[k])
    return CaratheodoryResult(margins=margins, tolerances=tolerances, passed=passed)


def caratheodory_for_path(experiment: PathExperiment, tol: float | None = None) -> CaratheodoryResult:
    samples = [(z, X) for z in experiment.points for X in experiment.probes]
    estimates = [e for row in experiment.estimates for e in row]
    return caratheodory_check(experiment.domain, samples, estimates,
                              radii=experiment.radii.ravel(), tol=tol)


@dataclass(frozen=True, eq=False)
class ConeBound:
    """B/|X| on the cone grid: ``values[a, i, j]`` for anchor a, t[i] and probe j."""

    z0: NDArray[np.complex128]
    anchors: tuple[NDArray[np.complex128], ...]
    t: NDArray[np.float64]
    probes: tuple[NDArray[np.complex128], ...]
    points: tuple[NDArray[np.complex128], ...]
    estimates: tuple[BergmanEstimate, ...]
    values: NDArray[np.float64]
    c_emp: float
    ratio: float
    passed: bool


def cone_bound_check(domain: Domain, z0, K_set, t_grid, probes, d_max: int | None = None, *,
                     estimator: Estimator | None = None, seed: int | None = None,
                     candidates_log2: int | None = None, workers: int | None = None) -> ConeBound:
    """Empirical C = max B/|X| over the cone, passing when every series has max/min < cone_ratio."""
    fs = flat_space(domain, z0)
    directions = tuple(as_point(as_direction(p, domain.dim)) for p in probes)
    if not directions:
        raise ValueError("cone check needs at least one probe in L(z0)")
    for X in directions:
        require_flat_probe(fs, X, 1e-6)
    anchors = tuple(as_point(k, domain.dim) for k in K_set)
    t = np.asarray(list(t_grid), dtype=float)
    points = cone_samples(domain, z0, anchors, t, flat=fs)
    est = estimator or Estimator(domain, d_max, seed=seed, candidates_log2=candidates_log2)
    results = fan_out(est, [(z, X) for z in points for X in directions], workers)

    norms = np.array([np.linalg.norm(X) for X in directions])
    B = np.array([e.B for e in results]).reshape(len(anchors), t.size, len(directions))
    values = B / norms[None, None, :]
    c_emp = float(values.max())
    ratio = float((values.max(axis=1) / values.min(axis=1)).max())
    passed = ratio < float(defaults.harness("cone_ratio"))
    logger.info("cone bound: C_emp %.6g, max/min ratio %.4g -> %s",
                c_emp, ratio, "pass" if passed else "fail")
    return ConeBound(z0=as_point(z0, domain.dim), anchors=anchors, t=t, probes=directions,
                     points=tuple(points), estimates=tuple(results), values=values,
                     c_emp=c_emp, ratio=ratio, passed=passed)
