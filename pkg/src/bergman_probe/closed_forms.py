"""Closed-form Bergman kernels and metrics on model domains.

Leaves with explicit formulas: disc, ball, half-plane and the lens
(disc cut by a half-plane whose line crosses it). Polydiscs and products
compose factor values (kernels multiply, squared metrics add); affine
images pull back through the map (K picks up |det A|^-2, B is invariant).
Polytopes and sections have no closed form and raise UnsupportedVariant;
use the numeric engine for those.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from bergman_probe.domains import (
    AffineImage,
    Ball,
    Disc,
    Domain,
    HalfPlane,
    Intersection,
    Polydisc,
    Product,
    is_lens,
    lens_parts,
    require_interior,
    scaled,
    simplify,
)
from bergman_probe.errors import UnsupportedVariant
from bergman_probe.naming import Source
from bergman_probe.points import as_point


@dataclass(frozen=True)
class KernelValue:
    K: float
    source: Source = Source.CLOSED_FORM


@dataclass(frozen=True)
class MetricValue:
    B: float
    M: float
    K: float
    source: Source = Source.CLOSED_FORM


def has_closed_form(domain: Domain) -> bool:
    if isinstance(domain, (Disc, Ball, HalfPlane, Polydisc)):
        return True
    if isinstance(domain, Product):
        return has_closed_form(domain.left) and has_closed_form(domain.right)
    if isinstance(domain, (AffineImage, Intersection)):
        reduced = simplify(domain)
        if isinstance(reduced, AffineImage):
            return has_closed_form(reduced.base)
        if isinstance(reduced, Intersection):
            return is_lens(reduced)
        return has_closed_form(reduced)
    return False


def _composed(domain: Domain) -> bool:
    return isinstance(domain, (Product, AffineImage))


# ---------------------------------------------------------------------------
# Lens: disc cut by a half-plane, mapped onto the right half-plane
# ---------------------------------------------------------------------------

def _wrap(angle: float) -> float:
    return (angle + math.pi) % (2 * math.pi) - math.pi


def _lens_map(disc: Disc, hp: HalfPlane, z: complex) -> tuple[complex, complex]:
    """(phi(z), phi'(z)) for the conformal map of the lens onto {Re > 0}.

    A Moebius map sends the two corners to 0 and infinity, the lens to a
    wedge; a rotation centres the wedge on the positive axis and a power
    opens it to the half-plane.
    """
    a, c, r = hp.normal, disc.center, disc.radius
    delta = hp.offset - (np.conj(a) * c).real
    foot = c + delta * a
    h = math.sqrt(r * r - delta * delta)
    q1, q2 = foot + 1j * a * h, foot - 1j * a * h

    def moebius(w):
        return (w - q1) / (w - q2)

    theta_line = math.pi
    theta_arc = float(np.angle(moebius(c - r * a)))
    d1 = _wrap(theta_arc - theta_line)
    opening = abs(d1)
    rotation = np.exp(-1j * (theta_line + 0.5 * d1))
    w = moebius(z) * rotation
    power = math.pi / opening
    zeta = w ** power
    dphi = power * (zeta / w) * rotation * (q1 - q2) / (z - q2) ** 2
    return complex(zeta), complex(dphi)


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------

def _kernel(domain: Domain, z) -> float:
    if isinstance(domain, Disc):
        r2 = domain.radius ** 2
        return r2 / (math.pi * (r2 - abs(z[0] - domain.center) ** 2) ** 2)
    if isinstance(domain, Ball):
        n = domain.dim
        r2 = domain.radius ** 2
        gap = r2 - float(np.vdot(z - domain.center, z - domain.center).real)
        return math.factorial(n) / math.pi ** n * r2 / gap ** (n + 1)
    if isinstance(domain, HalfPlane):
        dist = domain.offset - (np.conj(domain.normal) * z[0]).real
        return 1.0 / (4 * math.pi * dist * dist)
    if isinstance(domain, Polydisc):
        return math.prod(_kernel(f, z[k:k + 1]) for k, f in enumerate(domain.factors()))
    if isinstance(domain, Product):
        k = domain.split
        return _kernel(domain.left, z[:k]) * _kernel(domain.right, z[k:])
    if isinstance(domain, AffineImage):
        reduced = simplify(domain)
        if not isinstance(reduced, AffineImage):
            return _kernel(reduced, z)
        base_z = reduced.pullback(z[None, :])[0]
        return _kernel(reduced.base, base_z) / reduced.jacobian
    if isinstance(domain, Intersection):
        reduced = simplify(domain)
        if not isinstance(reduced, Intersection):
            return _kernel(reduced, z)
        if is_lens(reduced):
            zeta, dphi = _lens_map(*lens_parts(reduced), complex(z[0]))
            return abs(dphi) ** 2 / (4 * math.pi * zeta.real ** 2)
    raise UnsupportedVariant(
        f"no closed-form kernel for {type(domain).__name__}; use the numeric engine"
    )


def kernel_closed(domain: Domain, z) -> KernelValue:
    """K_D(z) from the model formulas; z must be interior."""
    point = require_interior(domain, z)
    value = _kernel(domain, point)
    return KernelValue(K=value, source=Source.COMPOSED if _composed(domain) else Source.CLOSED_FORM)


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

def _metric_sq(domain: Domain, z, X) -> float:
    if not np.any(X):
        return 0.0
    if isinstance(domain, Disc):
        r2 = domain.radius ** 2
        return 2.0 * abs(X[0]) ** 2 * r2 / (r2 - abs(z[0] - domain.center) ** 2) ** 2
    if isinstance(domain, Ball):
        n = domain.dim
        w = (z - domain.center) / domain.radius
        Y = X / domain.radius
        gap = 1.0 - float(np.vdot(w, w).real)
        yy = float(np.vdot(Y, Y).real)
        return (n + 1) * (yy / gap + abs(np.vdot(w, Y)) ** 2 / gap ** 2)
    if isinstance(domain, HalfPlane):
        dist = domain.offset - (np.conj(domain.normal) * z[0]).real
        return abs(X[0]) ** 2 / (2.0 * dist * dist)
    if isinstance(domain, Polydisc):
        return sum(_metric_sq(f, z[k:k + 1], X[k:k + 1]) for k, f in enumerate(domain.factors()))
    if isinstance(domain, Product):
        k = domain.split
        return _metric_sq(domain.left, z[:k], X[:k]) + _metric_sq(domain.right, z[k:], X[k:])
    if isinstance(domain, AffineImage):
        reduced = simplify(domain)
        if not isinstance(reduced, AffineImage):
            return _metric_sq(reduced, z, X)
        base_z = reduced.pullback(z[None, :])[0]
        return _metric_sq(reduced.base, base_z, reduced.inverse @ X)
    if isinstance(domain, Intersection):
        reduced = simplify(domain)
        if not isinstance(reduced, Intersection):
            return _metric_sq(reduced, z, X)
        if is_lens(reduced):
            zeta, dphi = _lens_map(*lens_parts(reduced), complex(z[0]))
            return abs(dphi * X[0]) ** 2 / (2.0 * zeta.real ** 2)
    raise UnsupportedVariant(
        f"no closed-form metric for {type(domain).__name__}; use the numeric engine"
    )


def metric_closed(domain: Domain, z, X) -> MetricValue:
    """B_D(z; X) with M = B sqrt(K); X = 0 gives B = 0."""
    point = require_interior(domain, z)
    direction = as_point(X, domain.dim)
    K = _kernel(domain, point)
    B = math.sqrt(_metric_sq(domain, point, direction))
    source = Source.COMPOSED if _composed(domain) else Source.CLOSED_FORM
    return MetricValue(B=B, M=B * math.sqrt(K), K=K, source=source)


# ---------------------------------------------------------------------------
# Scaling identity
# ---------------------------------------------------------------------------

KernelFn = Callable[[Domain, np.ndarray], KernelValue]


def scaling_identity_check(F: Domain, alpha: float, z, kernel: KernelFn | None = None
                           ) -> tuple[KernelValue, KernelValue]:
    """Both sides of K_{F_{1/a}}(z) = a^{-4k} K_{F_a}(a^{-2} z), with F_t = {z : t z in F}.

    Note F_t is the image of F under z -> z / t, so F_{1/a} is the dilation
    a F. ``kernel`` defaults to kernel_closed; pass a numeric evaluator for
    domains without closed forms.
    """
    if not alpha >= 1:
        raise ValueError(f"alpha must be >= 1, got {alpha!r}")
    evaluate = kernel or kernel_closed
    point = as_point(z, F.dim)
    k = F.dim
    left = evaluate(scaled(F, 1.0 / alpha), point)
    inner = evaluate(scaled(F, alpha), point / alpha ** 2)
    right = KernelValue(K=alpha ** (-4 * k) * inner.K, source=inner.source)
    return left, right
