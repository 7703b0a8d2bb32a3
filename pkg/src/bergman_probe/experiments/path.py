"""Boundary-approach experiments: K dist^2 floors and metric blow-up classification.

Along z(t) = z0 + t w the metric in a unit direction X either diverges
(X outside L(z0)) or stays bounded (X inside). Divergence is witnessed by
a least-squares slope of log B against log t over the last
``fit_window`` converged samples; boundedness by a small slope together
with a small max/min ratio over the last decade of t.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from bergman_probe import defaults
from bergman_probe.domains import Domain, boundary_distance, directional_radius, sphere_directions
from bergman_probe.flats import FlatSpace, flat_space
from bergman_probe.naming import Classification, vector_label
from bergman_probe.numeric import BergmanEstimate, Estimator
from bergman_probe.paths import approach_path
from bergman_probe.points import as_direction, as_point, unit

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    residual: float
    ratio: float
    samples: int
    classification: Classification


def fit_slope(t, B, window: int | None = None) -> SlopeFit:
    """Classify one B(t) series; ``t`` strictly decreasing, B positive.

    The last ``window`` samples are fitted in log-log. A slope at or below
    blowup_slope + slope_slack (-0.5 + 0.05 by default) with a small
    residual is a blow-up; the slack admits the t^(-1/2) tangential rate
    at strongly convex points, whose fitted slope sits just above -0.5.
    A slope near zero whose last decade stays within bounded_ratio is
    bounded. Everything else is inconclusive.
    """
    t = np.asarray(t, dtype=float)
    B = np.asarray(B, dtype=float)
    size = int(window if window is not None else defaults.harness("fit_window"))
    if t.size < 3 or np.any(~(B > 0)):
        return SlopeFit(math.nan, math.nan, math.nan, int(t.size), Classification.INCONCLUSIVE)
    x = np.log(t[-size:])
    y = np.log(B[-size:])
    coeffs = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - np.polyval(coeffs, x)) ** 2)))
    slope = float(coeffs[0])
    decade = t <= 10.0 * t.min()
    ratio = float(B[decade].max() / B[decade].min())

    blowup = float(defaults.harness("blowup_slope")) + float(defaults.harness("slope_slack"))
    if slope <= blowup and residual < float(defaults.harness("fit_residual")):
        label = Classification.BLOW_UP
    elif (abs(slope) <= float(defaults.harness("bounded_slope"))
          and ratio < float(defaults.harness("bounded_ratio"))):
        label = Classification.BOUNDED
    else:
        label = Classification.INCONCLUSIVE
    return SlopeFit(slope, residual, ratio, int(x.size), label)


@dataclass(frozen=True, eq=False)
class PathExperiment:
    """Samples of one approach path, truncated to its converged prefix.

    ``estimates[i][j]`` belongs to t[i] and probes[j]; ``radii[i, j]`` is
    d(z(t_i); X_j).
    """

    domain: Domain
    z0: NDArray[np.complex128]
    w: NDArray[np.complex128]
    t: NDArray[np.float64]
    points: tuple[NDArray[np.complex128], ...]
    dist: NDArray[np.float64]
    probes: tuple[NDArray[np.complex128], ...]
    estimates: tuple[tuple[BergmanEstimate, ...], ...]
    radii: NDArray[np.float64]
    fits: tuple[SlopeFit, ...]
    flat: FlatSpace | None = None
    requested: int = 0

    @property
    def labels(self) -> list[str]:
        return [vector_label(p) for p in self.probes]

    @property
    def truncated(self) -> bool:
        return self.t.size < self.requested

    @property
    def K(self) -> NDArray[np.float64]:
        return np.array([row[0].K for row in self.estimates])

    @property
    def B(self) -> NDArray[np.float64]:
        return np.array([[e.B for e in row] for row in self.estimates]).reshape(self.t.size, len(self.probes))

    @property
    def kdist2(self) -> NDArray[np.float64]:
        return self.K * self.dist ** 2

    def predictions(self) -> list[Classification] | None:
        """bounded for probes in L(z0), blow-up otherwise; None without a flat space."""
        if self.flat is None:
            return None
        return [Classification.BOUNDED if self.flat.contains_direction(p, 1e-6)
                else Classification.BLOW_UP for p in self.probes]

    def agrees_with_flat_space(self) -> bool | None:
        expected = self.predictions()
        if expected is None:
            return None
        return all(f.classification is e for f, e in zip(self.fits, expected))

    def summary(self) -> dict:
        return {label: fit.classification.value for label, fit in zip(self.labels, self.fits)}


def fan_out(estimator: Estimator, jobs, workers: int | None) -> list[BergmanEstimate]:
    count = int(workers if workers is not None else defaults.harness("workers"))

    def evaluate(job):
        z, X = job
        return estimator.metric(z, X)

    if count <= 1:
        return [evaluate(job) for job in jobs]
    with ThreadPoolExecutor(max_workers=count) as pool:
        return list(pool.map(evaluate, jobs))


def run_path_experiment(domain: Domain, z0, w, t_grid, probes, d_max: int | None = None, *,
                        estimator: Estimator | None = None, seed: int | None = None,
                        candidates_log2: int | None = None, workers: int | None = None,
                        with_flat_space: bool = True) -> PathExperiment:
    """Estimate K and B(.; X) along z0 + t w for every probe and classify each probe."""
    points = approach_path(domain, z0, w, t_grid)
    t = np.asarray(list(t_grid), dtype=float)
    units = tuple(as_point(unit(as_direction(p, domain.dim))) for p in probes)
    if not units:
        raise ValueError("path experiment needs at least one probe direction")
    est = estimator or Estimator(domain, d_max, seed=seed, candidates_log2=candidates_log2)

    jobs = [(z, X) for z in points for X in units]
    flat = fan_out(est, jobs, workers)
    rows = [tuple(flat[i * len(units):(i + 1) * len(units)]) for i in range(len(points))]

    keep = len(rows)
    for i, row in enumerate(rows):
        if not all(e.converged for e in row):
            keep = i
            break
    if keep < len(rows):
        logger.warning("estimates stop converging at t=%r; keeping %d of %d samples",
                       float(t[keep]), keep, len(rows))

    rows = rows[:keep]
    kept_points = tuple(points[:keep])
    dist = np.array([boundary_distance(domain, z) for z in kept_points])
    radii = np.array([[directional_radius(domain, z, X) for X in units] for z in kept_points])
    B = np.array([[e.B for e in row] for row in rows]).reshape(keep, len(units))
    fits = tuple(fit_slope(t[:keep], B[:, j]) for j in range(len(units)))

    fs = flat_space(domain, z0) if with_flat_space else None
    experiment = PathExperiment(
        domain=domain, z0=as_point(z0, domain.dim), w=as_point(w, domain.dim), t=t[:keep],
        points=kept_points, dist=dist, probes=units, estimates=tuple(rows),
        radii=radii.reshape(keep, len(units)), fits=fits, flat=fs, requested=len(points),
    )
    for label, fit in zip(experiment.labels, fits):
        logger.info("probe %s: slope %.4f (residual %.3g, ratio %.3g) -> %s",
                    label, fit.slope, fit.residual, fit.ratio, fit.classification.value)
    return experiment


@dataclass(frozen=True)
class KDistSeries:
    t: NDArray[np.float64]
    values: NDArray[np.float64]
    running_inf: NDArray[np.float64]
    floor: float
    passed: bool


def theorem2a_series(experiment: PathExperiment, floor: float | None = None) -> KDistSeries:
    """K dist^2 along the path and its running infimum; passes above a positive floor."""
    level = float(floor if floor is not None else defaults.harness("kdist2_floor"))
    values = experiment.kdist2
    running = np.minimum.accumulate(values) if values.size else values
    passed = bool(values.size) and float(running[-1]) > level
    return KDistSeries(t=experiment.t, values=values, running_inf=running, floor=level, passed=passed)


@dataclass(frozen=True, eq=False)
class UniformityResult:
    experiment: PathExperiment
    minimum: NDArray[np.float64]
    fit: SlopeFit
    passed: bool


def uniform_probes(fs: FlatSpace, count: int | None = None, min_angle: float | None = None,
                   seed: int = 0) -> list[NDArray[np.complex128]]:
    """Unit directions at angle >= min_angle from L(z0), drawn from a scrambled Sobol sphere."""
    want = int(count if count is not None else defaults.harness("uniformity_count"))
    angle = float(min_angle if min_angle is not None else defaults.harness("uniformity_min_angle"))
    n = fs.ambient_dim
    pool = sphere_directions(64 * want, n, seed=seed)
    picked = [as_point(x) for x in pool if fs.angle_from(x) >= angle][:want]
    if len(picked) < want:
        raise ValueError(f"only {len(picked)} of {want} probes lie at angle >= {angle} from L(z0)")
    return picked


def uniformity_probe(domain: Domain, z0, w, t_grid, d_max: int | None = None, *,
                     count: int | None = None, min_angle: float | None = None,
                     estimator: Estimator | None = None, seed: int | None = None,
                     candidates_log2: int | None = None, workers: int | None = None
                     ) -> UniformityResult:
    """The minimum of B over a grid of directions away from L(z0) must blow up too."""
    fs = flat_space(domain, z0)
    probes = uniform_probes(fs, count, min_angle, seed=int(seed or 0))
    experiment = run_path_experiment(domain, z0, w, t_grid, probes, d_max, estimator=estimator,
                                     seed=seed, candidates_log2=candidates_log2, workers=workers)
    minimum = experiment.B.min(axis=1) if experiment.t.size else np.zeros(0)
    fit = fit_slope(experiment.t, minimum)
    passed = fit.classification is Classification.BLOW_UP
    logger.info("uniformity probe over %d directions: slope %.4f -> %s",
                len(probes), fit.slope, "pass" if passed else "fail")
    return UniformityResult(experiment=experiment, minimum=minimum, fit=fit, passed=passed)
