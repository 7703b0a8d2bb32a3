"""Boundary-approach paths and cone grids used by the experiments."""

from __future__ import annotations

import logging

import numpy as np
from numpy.typing import NDArray

from bergman_probe.domains import Domain, interior_mask
from bergman_probe.errors import NotInNormalSlice, PathExitError
from bergman_probe.flats import FlatSpace, flat_space
from bergman_probe.points import as_direction, as_point

logger = logging.getLogger(__name__)


def geometric_grid(base: float, count: int) -> list[float]:
    """t_k = base**-k for k = 1..count (strictly decreasing)."""
    if not base > 1:
        raise ValueError(f"t-grid base must exceed 1, got {base!r}")
    if count < 1:
        raise ValueError(f"t-grid count must be positive, got {count!r}")
    return [float(base) ** -k for k in range(1, count + 1)]


def _check_grid(t_grid, *, decreasing: bool) -> NDArray[np.float64]:
    t = np.asarray(list(t_grid), dtype=float)
    if t.size == 0:
        raise ValueError("t-grid is empty")
    if np.any(~np.isfinite(t)) or np.any(t <= 0):
        raise ValueError(f"t-grid values must be positive, got {t.tolist()!r}")
    if decreasing and np.any(np.diff(t) >= 0):
        raise ValueError("t-grid must be strictly decreasing")
    return t


def approach_path(domain: Domain, z0, w, t_grid) -> list[NDArray[np.complex128]]:
    """Points z0 + t w for t in a strictly decreasing grid; all must be interior."""
    base = as_point(z0, domain.dim)
    step = as_direction(w, domain.dim)
    t = _check_grid(t_grid, decreasing=True)
    Z = base[None, :] + t[:, None] * step[None, :]
    inside = interior_mask(domain, Z)
    if not np.all(inside):
        k = int(np.flatnonzero(~inside)[0])
        raise PathExitError(f"path z0 + t w leaves the domain at t={t[k]!r}")
    return [as_point(z) for z in Z]


def cone_samples(domain: Domain, z0, K, t_grid,
                 flat: FlatSpace | None = None) -> list[NDArray[np.complex128]]:
    """The grid z0 + t (k - z0) for k in K and t in t_grid, ordered by k then t.

    Every anchor must lie in E(z0): its offset from z0 has no component
    in L(z0). ``flat`` is computed when not given.
    """
    base = as_point(z0, domain.dim)
    anchors = [as_point(k, domain.dim) for k in K]
    if not anchors:
        raise ValueError("cone needs at least one anchor point")
    t = _check_grid(t_grid, decreasing=False)
    if np.any(t > 1):
        raise ValueError("cone t-grid values must lie in (0, 1]")
    fs = flat if flat is not None else flat_space(domain, base)
    for k in anchors:
        offset = k - base
        along = float(np.linalg.norm(fs.projector @ offset))
        if along > 1e-9 * (1.0 + float(np.linalg.norm(offset))):
            raise NotInNormalSlice(
                f"cone anchor {k!r} moves {along:.3g} along L(z0); anchors must lie in E(z0)"
            )
    points = [base + s * (k - base) for k in anchors for s in t]
    inside = interior_mask(domain, np.array(points))
    if not np.all(inside):
        bad = int(np.flatnonzero(~inside)[0])
        raise PathExitError(
            f"cone point {points[bad]!r} is not interior; the anchor set must lie inside E(z0)"
        )
    logger.debug("cone grid: %d anchors x %d scales", len(anchors), t.size)
    return [as_point(z) for z in points]
