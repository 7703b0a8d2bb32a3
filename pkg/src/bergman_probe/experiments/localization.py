"""Localization of the kernel (and metric) to a neighbourhood of a boundary point.

K_D <= K_{D cap U} always, since D cap U is smaller. Near a peak point
the two agree in the limit, so the ratio K_D / K_{D cap U} climbs to 1
along an approach path. Whether z0 is a peak point is decided by the
flat space: L(z0) = {0}. At other points the series is still computed,
as a control, but the trend is not required.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from bergman_probe import defaults
from bergman_probe.domains import Domain, Intersection, simplify
from bergman_probe.flats import flat_space
from bergman_probe.numeric import BergmanEstimate, Estimator
from bergman_probe.paths import approach_path
from bergman_probe.points import as_direction, as_point

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LocalizationSeries:
    domain: Domain
    neighborhood: Domain
    local: Domain
    z0: NDArray[np.complex128]
    t: NDArray[np.float64]
    points: tuple[NDArray[np.complex128], ...]
    global_estimates: tuple[BergmanEstimate, ...]
    local_estimates: tuple[BergmanEstimate, ...]
    ratio: NDArray[np.float64]
    metric_ratio: NDArray[np.float64] | None
    probe: NDArray[np.complex128] | None
    peak_point: bool
    bound_ok: bool
    trend_ok: bool

    @property
    def passed(self) -> bool:
        return self.bound_ok and (self.trend_ok or not self.peak_point)


def localization_ratio(domain: Domain, neighborhood: Domain, z0, w, t_grid, *, probe=None,
                       d_max: int | None = None, seed: int | None = None,
                       candidates_log2: int | None = None) -> LocalizationSeries:
    """K_D / K_{D cap U} (and B_D / B_{D cap U} for a probe) along z0 + t w."""
    local = simplify(Intersection(domain, neighborhood))
    points = approach_path(local, z0, w, t_grid)
    t = np.asarray(list(t_grid), dtype=float)
    X = as_point(as_direction(probe, domain.dim)) if probe is not None else None

    outer = Estimator(domain, d_max, seed=seed, candidates_log2=candidates_log2)
    inner = Estimator(local, d_max, seed=seed, candidates_log2=candidates_log2)
    if X is None:
        big = tuple(outer.kernel(z) for z in points)
        small = tuple(inner.kernel(z) for z in points)
    else:
        big = tuple(outer.metric(z, X) for z in points)
        small = tuple(inner.metric(z, X) for z in points)

    ratio = np.array([a.K / b.K for a, b in zip(big, small)])
    metric_ratio = None if X is None else np.array([a.B / b.B for a, b in zip(big, small)])

    tol = float(defaults.harness("localization_tol"))
    slack = np.array([tol + a.K_rel_error + b.K_rel_error if a.kernel_error or b.kernel_error
                      else tol for a, b in zip(big, small)])
    bound_ok = bool(np.all(ratio <= 1.0 + slack))
    floor = float(defaults.harness("localization_floor"))
    trend_ok = bool(ratio[-1] >= floor and ratio[-1] >= ratio[0] - tol)
    peak = flat_space(domain, z0).dim == 0

    if not bound_ok:
        logger.error("K_D exceeds K_(D cap U) beyond tolerance: max ratio %.6g", float(ratio.max()))
    logger.info("localization ratio %.6g -> %.6g over %d samples (peak point: %s)",
                float(ratio[0]), float(ratio[-1]), ratio.size, peak)
    return LocalizationSeries(
        domain=domain, neighborhood=neighborhood, local=local, z0=as_point(z0, domain.dim), t=t,
        points=tuple(points), global_estimates=big, local_estimates=small, ratio=ratio,
        metric_ratio=metric_ratio, probe=X, peak_point=peak, bound_ok=bound_ok, trend_ok=trend_ok,
    )
