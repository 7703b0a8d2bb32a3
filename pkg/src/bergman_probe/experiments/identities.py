"""Exact identities the estimators must reproduce.

* halfplane: K = 1/(4 pi dist^2) and B = |X| / (sqrt2 dist) on a half-plane.
* product: kernels multiply and squared metrics add over a product.
* scaling: K_{aF}(z) = a^-4k K_{F/a}(z / a^2), with F_t = {z : t z in F}.
* affine: K picks up |det A|^-2 under z -> A z + b and B is invariant.
* limit: discs of radius R tangent to a half-plane converge to it at rate 1/R.

Closed-form cases are held to ``exact_rtol``; numeric scaling cases to
three times the combined quadrature error of the two sides.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from bergman_probe import defaults
from bergman_probe.closed_forms import has_closed_form, kernel_closed, metric_closed
from bergman_probe.domains import (
    AffineImage,
    Disc,
    Domain,
    HalfPlane,
    Polydisc,
    Product,
    interior_mask,
    scaled,
)
from bergman_probe.numeric import Estimator
from bergman_probe.points import from_real

logger = logging.getLogger(__name__)

SUITES = ("halfplane", "product", "scaling", "affine")
OPTIONAL_SUITES = ("limit",)


@dataclass(frozen=True)
class IdentityCheck:
    identity: str
    case: str
    lhs: float
    rhs: float
    tolerance: float

    @property
    def rel_error(self) -> float:
        scale = max(abs(self.lhs), abs(self.rhs))
        return abs(self.lhs - self.rhs) / scale if scale else 0.0

    @property
    def passed(self) -> bool:
        return self.rel_error <= self.tolerance


@dataclass(frozen=True)
class IdentityReport:
    checks: tuple[IdentityCheck, ...]
    skipped: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_rel_error(self) -> float:
        return max((c.rel_error for c in self.checks), default=0.0)


def interior_samples(domain: Domain, count: int, seed: int) -> np.ndarray:
    """``count`` interior points from scrambled Sobol draws over the bounding box."""
    lo, hi = domain.bbox
    sampler = qmc.Sobol(d=lo.size, scramble=True, seed=seed)
    found: list[np.ndarray] = []
    total = 0
    while total < count:
        Z = from_real(lo + sampler.random(256) * (hi - lo))
        Z = Z[interior_mask(domain, Z)]
        found.append(Z)
        total += Z.shape[0]
    return np.vstack(found)[:count]


def halfplane_checks(rtol: float) -> list[IdentityCheck]:
    pi = HalfPlane(1.0, 0.0)
    out = []
    for dist in (1.0, 0.25, 3.0):
        z = np.array([-dist + 0.5j])
        mv = metric_closed(pi, z, np.array([1.0 + 0.0j]))
        out.append(IdentityCheck("halfplane", f"K at dist={dist:g}", mv.K,
                                 1.0 / (4 * math.pi * dist * dist), rtol))
        out.append(IdentityCheck("halfplane", f"B at dist={dist:g}", mv.B,
                                 1.0 / (math.sqrt(2.0) * dist), rtol))
    return out


def limit_checks(radii=(10.0, 100.0, 1000.0)) -> list[IdentityCheck]:
    """K of Disc(-R, R) at z = -1 against the half-plane value; tolerance 2/R."""
    target = 1.0 / (4 * math.pi)
    out = []
    for R in radii:
        K = kernel_closed(Disc(-R, R), np.array([-1.0 + 0.0j])).K
        out.append(IdentityCheck("limit", f"R={R:g}", K, target, 2.0 / R))
    return out


def _factors(domain: Domain) -> list[Domain] | None:
    if isinstance(domain, Polydisc):
        return list(domain.factors())
    if isinstance(domain, Product):
        return [domain.left, domain.right]
    return None


def product_checks(domain: Domain, count: int, seed: int, rtol: float) -> list[IdentityCheck]:
    factors = _factors(domain)
    if factors is None:
        domain = Product(domain, domain)
        factors = [domain.left, domain.right]
    rng = np.random.default_rng(seed)
    out = []
    for k, z in enumerate(interior_samples(domain, count, seed)):
        X = rng.standard_normal(domain.dim) + 1j * rng.standard_normal(domain.dim)
        whole = metric_closed(domain, z, X)
        K_parts, B2_parts = 1.0, 0.0
        offset = 0
        for f in factors:
            part = metric_closed(f, z[offset:offset + f.dim], X[offset:offset + f.dim])
            K_parts *= part.K
            B2_parts += part.B ** 2
            offset += f.dim
        out.append(IdentityCheck("product", f"K sample {k}", whole.K, K_parts, rtol))
        out.append(IdentityCheck("product", f"B^2 sample {k}", whole.B ** 2, B2_parts, rtol))
    return out


def scaling_checks(domain: Domain, alpha: float, count: int, seed: int, rtol: float, *,
                   d_max: int | None = None, candidates_log2: int | None = None
                   ) -> list[IdentityCheck]:
    if not alpha >= 1:
        raise ValueError(f"alpha must be >= 1, got {alpha!r}")
    big = Estimator(scaled(domain, 1.0 / alpha), d_max, seed=seed, candidates_log2=candidates_log2)
    small = Estimator(scaled(domain, alpha), d_max, seed=seed, candidates_log2=candidates_log2)
    k = domain.dim
    base = [np.asarray(domain.reference)]
    if domain.bbox is not None and count > 1:
        base.extend(interior_samples(domain, count - 1, seed))
    out = []
    for j, p in enumerate(base):
        z = alpha * p
        left = big.kernel(z)
        right = small.kernel(z / alpha ** 2)
        rhs = alpha ** (-4 * k) * right.K
        if left.kernel_error or right.kernel_error:
            tol = 3.0 * math.hypot(left.K_rel_error, right.K_rel_error) + rtol
        else:
            tol = rtol
        out.append(IdentityCheck("scaling", f"alpha={alpha:g} point {j}", left.K, rhs, tol))
    return out


def affine_checks(domain: Domain, count: int, seed: int, rtol: float) -> list[IdentityCheck]:
    rng = np.random.default_rng(seed)
    n = domain.dim
    A = np.eye(n) + 0.3 * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    image = AffineImage(domain, A, b)
    jac = abs(np.linalg.det(A)) ** 2
    out = []
    for k, z in enumerate(interior_samples(domain, count, seed)):
        X = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        before = metric_closed(domain, z, X)
        after = metric_closed(image, A @ z + b, A @ X)
        out.append(IdentityCheck("affine", f"K sample {k}", after.K * jac, before.K, rtol))
        out.append(IdentityCheck("affine", f"B sample {k}", after.B, before.B, rtol))
    return out


def run_identities(domain: Domain, alpha: float | None = None, *, suites=SUITES,
                   points: int = 8, seed: int | None = None, d_max: int | None = None,
                   candidates_log2: int | None = None) -> IdentityReport:
    """Run the requested identity suites on ``domain``; suites that do not apply are skipped."""
    a = float(alpha if alpha is not None else defaults.cli("alpha"))
    s = int(seed if seed is not None else defaults.cli("seed"))
    rtol = float(defaults.harness("exact_rtol"))
    unknown = set(suites) - set(SUITES) - set(OPTIONAL_SUITES)
    if unknown:
        raise ValueError(f"unknown identity suites: {sorted(unknown)}")
    closed = has_closed_form(domain)
    bounded = domain.bbox is not None
    checks: list[IdentityCheck] = []
    skipped: list[str] = []
    for suite in suites:
        if suite == "halfplane":
            checks.extend(halfplane_checks(rtol))
        elif suite == "limit":
            checks.extend(limit_checks())
        elif suite == "product":
            fits = _factors(domain) is not None or 2 * domain.dim <= int(defaults.geometry("max_dimension"))
            if closed and bounded and fits:
                checks.extend(product_checks(domain, points, s, rtol))
            else:
                skipped.append(suite)
        elif suite == "scaling":
            checks.extend(scaling_checks(domain, a, points if bounded else 1, s, rtol,
                                         d_max=d_max, candidates_log2=candidates_log2))
        elif suite == "affine":
            if closed and bounded:
                checks.extend(affine_checks(domain, points, s, rtol))
            else:
                skipped.append(suite)
    for suite in skipped:
        logger.info("identity suite %r does not apply to %s; skipped", suite, type(domain).__name__)
    report = IdentityReport(checks=tuple(checks), skipped=tuple(skipped))
    logger.info("%d identity checks, max relative error %.3g", len(checks), report.max_rel_error)
    return report
