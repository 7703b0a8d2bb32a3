"""Holomorphic peak functions at convex boundary points.

With nu the outward supporting normal at z0 and a unitary frame Q whose
first column is nu, the coordinate w1 = <nu, z - z0> has Re w1 <= 0 on
the closure. For a > 0 with a * inf Re w1 > -1,

    f(z) = exp(w1 + a w1^2)

has log|f| = x (1 + a x) - a y^2 (w1 = x + iy), which is negative unless
w1 = 0. So |f| < 1 on the closure away from {w1 = 0} and |f| = 1 on it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import qr
from scipy.stats import qmc

from bergman_probe import defaults
from bergman_probe.domains import (
    Domain,
    closure_mask,
    interior_mask,
    ray_exit,
    sphere_directions,
    support,
    supporting_normal,
)
from bergman_probe.errors import AdmissibilityError
from bergman_probe.points import as_point, from_real

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PeakFunctionSpec:
    domain: Domain
    z0: NDArray[np.complex128]
    normal: NDArray[np.complex128]
    frame: NDArray[np.complex128]
    a: float
    inf_re: float

    def coordinates(self, Z) -> NDArray[np.complex128]:
        """w = Q^H (z - z0) for a batch of points; w[:, 0] is the peak coordinate."""
        W = np.atleast_2d(np.asarray(Z, dtype=np.complex128)) - self.z0[None, :]
        return W @ self.frame.conj()

    def log_modulus(self, Z) -> NDArray[np.float64]:
        w1 = self.coordinates(Z)[:, 0]
        return (w1 + self.a * w1 * w1).real

    def __call__(self, Z) -> NDArray[np.complex128]:
        w1 = self.coordinates(Z)[:, 0]
        return np.exp(w1 + self.a * w1 * w1)


def _frame(nu: NDArray) -> NDArray[np.complex128]:
    n = nu.size
    Q, _ = qr(np.column_stack([nu, np.eye(n, dtype=np.complex128)]), mode="economic")
    Q = Q[:, :n].copy()
    Q[:, 0] = nu
    return Q


def build_peak_function(domain: Domain, z0) -> PeakFunctionSpec:
    """exp(w1 + a w1^2) at z0 with a = min(peak_max_coefficient, -0.5 / inf Re w1)."""
    nu = supporting_normal(domain, z0)
    point = as_point(z0, domain.dim)
    inf_re = -support(domain, -nu) - float(np.vdot(nu, point).real)
    if not math.isfinite(inf_re):
        raise AdmissibilityError(f"Re w1 is unbounded below on the domain (normal {nu!r})")
    cap = float(defaults.harness("peak_max_coefficient"))
    a = cap if inf_re >= 0 else min(cap, -0.5 / inf_re)
    if not a * inf_re > -1:
        raise AdmissibilityError(f"a={a!r} with inf Re w1={inf_re!r} is not admissible")
    logger.info("peak function at %s: a=%.6g, inf Re w1=%.6g", point, a, inf_re)
    return PeakFunctionSpec(domain=domain, z0=point, normal=nu, frame=_frame(nu), a=a, inf_re=inf_re)


@dataclass(frozen=True)
class PeakReport:
    samples: int
    on_peak_set: int
    off_peak_set: int
    violations: int
    max_off_modulus: float
    max_unit_deviation: float

    @property
    def passed(self) -> bool:
        return self.violations == 0


def _pow2(count: int) -> int:
    return 1 << max(int(count) - 1, 0).bit_length()


def _sobol(d: int, count: int, seed: int) -> NDArray[np.float64]:
    """``count`` scrambled Sobol points, drawn as a power-of-two block."""
    return qmc.Sobol(d=d, scramble=True, seed=seed).random(_pow2(count))[:count]


def _box_points(domain: Domain, count: int, seed: int) -> NDArray[np.complex128]:
    lo, hi = domain.bbox
    u = _sobol(lo.size, count, seed)
    return from_real(lo + u * (hi - lo))


def _hyperplane_points(spec: PeakFunctionSpec, count: int, seed: int) -> NDArray[np.complex128]:
    """Points of the closure with w1 = 0 (the peak set)."""
    domain = spec.domain
    n = domain.dim
    if n == 1:
        return spec.z0[None, :]
    reach = domain.diameter
    u = _sobol(2 * (n - 1), count, seed)
    zeta = from_real((2.0 * u - 1.0) * reach)
    Z = spec.z0[None, :] + zeta @ spec.frame[:, 1:].T
    keep = closure_mask(domain, Z)
    return Z[keep]


def _boundary_points(domain: Domain, origin, targets) -> NDArray[np.complex128]:
    out = []
    for target in targets:
        v = target - origin
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            continue
        out.append(origin + ray_exit(domain, origin, v / norm) * v / norm)
    return np.array(out).reshape(-1, domain.dim)


def sample_closure(spec: PeakFunctionSpec, budget: int, seed: int = 0) -> NDArray[np.complex128]:
    """Interior Sobol points, boundary points and points on and near the peak set.

    Boundary points are ray exits from the reference point in uniform
    directions. Near-peak points pull peak-set points a small step toward
    the reference point, which keeps them strictly inside.
    """
    domain = spec.domain
    origin = domain.reference
    quarter = max(budget // 4, 1)

    interior = []
    rounds = 0
    while sum(len(p) for p in interior) < quarter:
        Z = _box_points(domain, 2 * quarter, seed + rounds)
        interior.append(Z[interior_mask(domain, Z)])
        rounds += 1
    inside = np.vstack(interior)[:quarter]

    directions = sphere_directions(_pow2(quarter), domain.dim, seed)[:quarter]
    uniform = _boundary_points(domain, origin, origin[None, :] + directions)
    peak_set = _hyperplane_points(spec, 2 * quarter, seed + 1)[:quarter]
    steps = np.logspace(-6, -1, 6)
    near = (peak_set[:, None, :] + steps[None, :, None] * (origin - peak_set)[:, None, :])
    near = near.reshape(-1, domain.dim)[:quarter]
    samples = np.vstack([inside, uniform, near, peak_set, spec.z0[None, :]])
    short = budget - samples.shape[0]
    if short > 0:
        Z = _box_points(domain, 4 * short, seed + 7)
        samples = np.vstack([samples, Z[closure_mask(domain, Z)][:short]])
    return samples


def verify_peak(spec: PeakFunctionSpec, budget: int | None = None, seed: int = 0) -> PeakReport:
    """|f| < 1 off {w1 = 0} and ||f| - 1| <= peak_unit_tol on it, over at least ``budget`` samples."""
    size = int(budget if budget is not None else defaults.harness("peak_budget"))
    Z = sample_closure(spec, size, seed)
    w1 = spec.coordinates(Z)[:, 0]
    on = np.abs(w1) <= float(defaults.harness("peak_set_radius"))
    log_mod = spec.log_modulus(Z)
    modulus = np.exp(log_mod)

    off_bad = int(np.count_nonzero(log_mod[~on] >= 0))
    deviation = np.abs(modulus[on] - 1.0)
    on_bad = int(np.count_nonzero(deviation > float(defaults.harness("peak_unit_tol"))))
    report = PeakReport(
        samples=int(Z.shape[0]),
        on_peak_set=int(np.count_nonzero(on)),
        off_peak_set=int(np.count_nonzero(~on)),
        violations=off_bad + on_bad,
        max_off_modulus=float(modulus[~on].max()) if np.any(~on) else 0.0,
        max_unit_deviation=float(deviation.max()) if deviation.size else 0.0,
    )
    if not report.passed:
        logger.error("peak function: %d violations in %d samples", report.violations, report.samples)
    return report
