"""Domain variants and the geometry queries every other module builds on.

A domain is one of the frozen dataclasses below (the ``Domain`` union).
Each variant precomputes its derived data (bounding box, constraint norms,
an interior reference point) at construction and is immutable afterwards,
so every query here is a pure function of its arguments.

Coordinates: points are complex n-vectors; the real picture used for
linear programs and bounding boxes is ``[Re z; Im z]`` (see
``points.to_real``). The Hermitian product is <a, z> = sum conj(a_k) z_k,
so Re<a, z> is the Euclidean dot product of the real pictures.

Every variant exposes ``_defects(Z)``: for an (N, n) batch, an (N, m)
array of signed constraint values, negative inside, measured as Euclidean
distances for all variants except affine images and sections (which
measure in base coordinates). ``contains`` and the exact
``boundary_distance`` formulas are both read off these.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import brentq, linprog, minimize, minimize_scalar
from scipy.special import ndtri
from scipy.stats import qmc

from bergman_probe import defaults
from bergman_probe.errors import (
    DimensionMismatch,
    EmptyDomain,
    NotInterior,
    NotOnBoundary,
    UnboundedDomain,
    UnsupportedVariant,
)
from bergman_probe.naming import Membership
from bergman_probe.points import as_direction, as_point, from_real, to_real, unit

logger = logging.getLogger(__name__)


def _frozen(arr: ArrayLike, dtype) -> NDArray:
    out = np.array(arr, dtype=dtype)
    out.setflags(write=False)
    return out


def _check_dimension(n: int) -> None:
    cap = int(defaults.geometry("max_dimension"))
    if n < 1 or n > cap:
        raise DimensionMismatch(f"dimension {n} outside the supported range 1..{cap}")


def _box_from_parts(re_lo, im_lo, re_hi, im_hi):
    return (
        _frozen(np.concatenate([re_lo, im_lo]), np.float64),
        _frozen(np.concatenate([re_hi, im_hi]), np.float64),
    )


# ---------------------------------------------------------------------------
# Variants
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Disc:
    center: complex
    radius: float

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"disc radius must be positive, got {self.radius!r}")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return 1

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    @property
    def bbox(self):
        c, r = self.center, self.radius
        return _box_from_parts([c.real - r], [c.imag - r], [c.real + r], [c.imag + r])

    @property
    def reference(self) -> NDArray[np.complex128]:
        return as_point([self.center])

    def _defects(self, Z):
        return (np.abs(Z[:, 0] - self.center) - self.radius)[:, None]


@dataclass(frozen=True, eq=False)
class Polydisc:
    centers: NDArray[np.complex128]
    radii: NDArray[np.float64]

    def __post_init__(self):
        centers = _frozen(np.asarray(self.centers).reshape(-1), np.complex128)
        radii = _frozen(np.asarray(self.radii).reshape(-1), np.float64)
        if centers.size != radii.size:
            raise DimensionMismatch("polydisc needs one radius per center")
        if not np.all(np.isfinite(radii)) or np.any(radii <= 0):
            raise ValueError(f"polydisc radii must be positive, got {radii!r}")
        _check_dimension(centers.size)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "radii", radii)

    @property
    def dim(self) -> int:
        return int(self.centers.size)

    @property
    def diameter(self) -> float:
        return 2.0 * float(np.linalg.norm(self.radii))

    @property
    def bbox(self):
        c, r = self.centers, self.radii
        return _box_from_parts(c.real - r, c.imag - r, c.real + r, c.imag + r)

    @property
    def reference(self) -> NDArray[np.complex128]:
        return as_point(self.centers)

    def factors(self) -> list[Disc]:
        return [Disc(c, r) for c, r in zip(self.centers, self.radii)]

    def _defects(self, Z):
        return np.abs(Z - self.centers[None, :]) - self.radii[None, :]


@dataclass(frozen=True, eq=False)
class Ball:
    center: NDArray[np.complex128]
    radius: float

    def __post_init__(self):
        center = _frozen(np.asarray(self.center).reshape(-1), np.complex128)
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"ball radius must be positive, got {self.radius!r}")
        _check_dimension(center.size)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return int(self.center.size)

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    @property
    def bbox(self):
        c, r = self.center, self.radius
        return _box_from_parts(c.real - r, c.imag - r, c.real + r, c.imag + r)

    @property
    def reference(self) -> NDArray[np.complex128]:
        return as_point(self.center)

    def _defects(self, Z):
        return (np.linalg.norm(Z - self.center[None, :], axis=1) - self.radius)[:, None]


@dataclass(frozen=True, eq=False)
class HalfPlane:
    """{zeta in C : Re(conj(a) zeta) < b}; the normal is normalized at construction."""

    normal: complex
    offset: float

    def __post_init__(self):
        a = complex(self.normal)
        if a == 0 or not math.isfinite(abs(a)):
            raise ValueError("half-plane normal must be finite and nonzero")
        object.__setattr__(self, "normal", a / abs(a))
        object.__setattr__(self, "offset", float(self.offset) / abs(a))

    @property
    def dim(self) -> int:
        return 1

    @property
    def diameter(self) -> float:
        return math.inf

    @property
    def bbox(self):
        return None

    @property
    def reference(self) -> NDArray[np.complex128]:
        return as_point([(self.offset - 1.0) * self.normal])

    def _defects(self, Z):
        return (np.conj(self.normal) * Z[:, 0]).real[:, None] - self.offset


@dataclass(frozen=True, eq=False)
class Polytope:
    """{z : Re<a_m, z> + c_m < 0 for all m}; must be bounded with nonempty interior."""

    normals: NDArray[np.complex128]
    offsets: NDArray[np.float64]

    def __post_init__(self):
        normals = np.atleast_2d(np.asarray(self.normals, dtype=np.complex128))
        offsets = np.asarray(self.offsets, dtype=np.float64).reshape(-1)
        if normals.shape[0] != offsets.size:
            raise DimensionMismatch("polytope needs one offset per normal")
        _check_dimension(normals.shape[1])
        norms = np.linalg.norm(normals, axis=1)
        if np.any(norms == 0):
            raise ValueError("polytope constraint normals must be nonzero")
        object.__setattr__(self, "normals", _frozen(normals, np.complex128))
        object.__setattr__(self, "offsets", _frozen(offsets, np.float64))
        object.__setattr__(self, "norms", _frozen(norms, np.float64))
        self._solve_box()
        self._solve_chebyshev()

    @classmethod
    def from_constraints(cls, constraints) -> "Polytope":
        pairs = list(constraints)
        if not pairs:
            raise ValueError("polytope needs at least one constraint")
        return cls(np.array([np.asarray(a, dtype=complex) for a, _ in pairs]),
                   np.array([float(c) for _, c in pairs]))

    @property
    def dim(self) -> int:
        return int(self.normals.shape[1])

    @property
    def real_matrix(self) -> NDArray[np.float64]:
        return to_real(self.normals)

    def _solve_box(self) -> None:
        A, b = self.real_matrix, -self.offsets
        d = A.shape[1]
        lo, hi = np.empty(d), np.empty(d)
        for k in range(d):
            for sign, store in ((1.0, lo), (-1.0, hi)):
                c = np.zeros(d)
                c[k] = sign
                res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * d, method="highs")
                if res.status == 2:
                    raise EmptyDomain("polytope constraints are infeasible")
                if res.status == 3:
                    raise UnboundedDomain(
                        f"polytope is unbounded along real coordinate {k}"
                    )
                if not res.success:
                    raise UnboundedDomain(f"bounding-box LP failed: {res.message}")
                store[k] = sign * res.fun
        object.__setattr__(self, "_bbox", (_frozen(lo, np.float64), _frozen(hi, np.float64)))

    def _solve_chebyshev(self) -> None:
        A, b = self.real_matrix, -self.offsets
        d = A.shape[1]
        c = np.zeros(d + 1)
        c[-1] = -1.0
        A_ub = np.hstack([A, self.norms[:, None]])
        res = linprog(c, A_ub=A_ub, b_ub=b,
                      bounds=[(None, None)] * d + [(0.0, None)], method="highs")
        if not res.success or res.x[-1] <= 0:
            raise EmptyDomain("polytope has empty interior")
        object.__setattr__(self, "_center", as_point(from_real(res.x[:-1])))
        object.__setattr__(self, "inradius", float(res.x[-1]))
        logger.debug("polytope: %d constraints in C^%d, inradius %.3g",
                     self.normals.shape[0], self.dim, self.inradius)

    @property
    def bbox(self):
        return self._bbox

    @property
    def diameter(self) -> float:
        lo, hi = self._bbox
        return float(np.linalg.norm(hi - lo))

    @property
    def reference(self) -> NDArray[np.complex128]:
        return self._center

    def slack(self, z) -> NDArray[np.float64]:
        """-(Re<a_m, z> + c_m) per constraint (positive inside, unnormalized)."""
        return -((np.asarray(z) @ self.normals.conj().T).real + self.offsets)

    def _defects(self, Z):
        return ((Z @ self.normals.conj().T).real + self.offsets[None, :]) / self.norms[None, :]


@dataclass(frozen=True, eq=False)
class Product:
    left: "Domain"
    right: "Domain"

    def __post_init__(self):
        _check_dimension(self.left.dim + self.right.dim)

    @property
    def dim(self) -> int:
        return self.left.dim + self.right.dim

    @property
    def split(self) -> int:
        return self.left.dim

    @property
    def diameter(self) -> float:
        return math.hypot(self.left.diameter, self.right.diameter)

    @property
    def bbox(self):
        lb, rb = self.left.bbox, self.right.bbox
        if lb is None or rb is None:
            return None
        nl, nr = self.left.dim, self.right.dim
        lo = np.concatenate([lb[0][:nl], rb[0][:nr], lb[0][nl:], rb[0][nr:]])
        hi = np.concatenate([lb[1][:nl], rb[1][:nr], lb[1][nl:], rb[1][nr:]])
        return _frozen(lo, np.float64), _frozen(hi, np.float64)

    @property
    def reference(self) -> NDArray[np.complex128]:
        return as_point(np.concatenate([self.left.reference, self.right.reference]))

    def _defects(self, Z):
        k = self.split
        return np.hstack([self.left._defects(Z[:, :k]), self.right._defects(Z[:, k:])])


@dataclass(frozen=True, eq=False)
class AffineImage:
    """{A z + b : z in base} for an invertible complex matrix A."""

    base: "Domain"
    matrix: NDArray[np.complex128]
    shift: NDArray[np.complex128]

    def __post_init__(self):
        n = self.base.dim
        A = np.asarray(self.matrix, dtype=np.complex128).reshape(n, n)
        b = np.asarray(self.shift, dtype=np.complex128).reshape(n)
        if not np.all(np.isfinite(A)) or not np.all(np.isfinite(b)):
            raise ValueError("affine map must be finite")
        if np.linalg.cond(A) > 1e12:
            raise ValueError("affine map is not invertible (condition number > 1e12)")
        object.__setattr__(self, "matrix", _frozen(A, np.complex128))
        object.__setattr__(self, "shift", _frozen(b, np.complex128))
        object.__setattr__(self, "inverse", _frozen(np.linalg.inv(A), np.complex128))

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def jacobian(self) -> float:
        """|det A|^2, the real Jacobian of z -> Az + b on R^2n."""
        return float(abs(np.linalg.det(self.matrix)) ** 2)

    def forward(self, Z):
        return np.asarray(Z) @ self.matrix.T + self.shift

    def pullback(self, W):
        return (np.asarray(W) - self.shift) @ self.inverse.T

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.matrix, 2)) * self.base.diameter

    @property
    def bbox(self):
        box = self.base.bbox
        if box is None:
            return None
        lo, hi = box
        d = lo.size
        corners = np.array([[hi[k] if (mask >> k) & 1 else lo[k] for k in range(d)]
                            for mask in range(2 ** d)])
        images = to_real(self.forward(from_real(corners)))
        return _frozen(images.min(axis=0), np.float64), _frozen(images.max(axis=0), np.float64)

    @property
    def reference(self) -> NDArray[np.complex128]:
        return as_point(self.forward(self.base.reference[None, :])[0])

    def _defects(self, Z):
        return self.base._defects(self.pullback(Z))


@dataclass(frozen=True, eq=False)
class Intersection:
    left: "Domain"
    right: "Domain"

    def __post_init__(self):
        if self.left.dim != self.right.dim:
            raise DimensionMismatch("intersection operands must share a dimension")
        if self.bbox is None:
            raise UnboundedDomain("intersection needs at least one bounded operand")

    @property
    def dim(self) -> int:
        return self.left.dim

    @property
    def diameter(self) -> float:
        lo, hi = self.bbox
        return float(np.linalg.norm(hi - lo))

    @property
    def bbox(self):
        lb, rb = self.left.bbox, self.right.bbox
        if lb is None:
            return rb
        if rb is None:
            return lb
        lo, hi = np.maximum(lb[0], rb[0]), np.minimum(lb[1], rb[1])
        if np.any(lo >= hi):
            raise EmptyDomain("intersection of disjoint bounding boxes")
        return _frozen(lo, np.float64), _frozen(hi, np.float64)

    @property
    def reference(self) -> NDArray[np.complex128]:
        for candidate in (self.left.reference, self.right.reference):
            if max_defect(self, candidate[None, :])[0] < 0:
                return candidate
        return _deepest_sample(self)

    def _defects(self, Z):
        return np.hstack([self.left._defects(Z), self.right._defects(Z)])


@dataclass(frozen=True, eq=False)
class Section:
    """{zeta in C^m : origin + frame @ zeta in base}: a complex-affine slice of base."""

    base: "Domain"
    origin: NDArray[np.complex128]
    frame: NDArray[np.complex128]

    def __post_init__(self):
        origin = _frozen(np.asarray(self.origin).reshape(-1), np.complex128)
        frame = np.asarray(self.frame, dtype=np.complex128).reshape(origin.size, -1)
        if origin.size != self.base.dim:
            raise DimensionMismatch("section origin must live in the base space")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "frame", _frozen(frame, np.complex128))

    @property
    def dim(self) -> int:
        return int(self.frame.shape[1])

    def embed(self, Z):
        return self.origin + np.asarray(Z) @ self.frame.T

    @property
    def diameter(self) -> float:
        return self.base.diameter / max(float(np.linalg.svd(self.frame, compute_uv=False).min()), 1e-300)

    @property
    def bbox(self):
        return None

    @property
    def reference(self) -> NDArray[np.complex128]:
        raise UnsupportedVariant("sections carry no interior reference point")

    def _defects(self, Z):
        return self.base._defects(self.embed(Z))


Domain = Union[Disc, Polydisc, Ball, HalfPlane, Polytope, Product, AffineImage, Intersection, Section]

BOUNDED_EXACT = (Disc, Polydisc, Ball, Polytope, Product, Intersection)


def box(center, half_re, half_im=None) -> Polytope:
    """Axis-aligned polytope {|Re(z_k - c_k)| < half_re_k, |Im(z_k - c_k)| < half_im_k}."""
    c = np.asarray(center, dtype=np.complex128).reshape(-1)
    n = c.size
    hr = np.broadcast_to(np.asarray(half_re, dtype=float), (n,))
    hi = hr if half_im is None else np.broadcast_to(np.asarray(half_im, dtype=float), (n,))
    constraints = []
    for k in range(n):
        e = np.zeros(n, dtype=complex)
        e[k] = 1.0
        constraints.append((e, -(c[k].real + hr[k])))
        constraints.append((-e, c[k].real - hr[k]))
        constraints.append((1j * e, -(c[k].imag + hi[k])))
        constraints.append((-1j * e, c[k].imag - hi[k]))
    return Polytope.from_constraints(constraints)


# ---------------------------------------------------------------------------
# Membership and distance
# ---------------------------------------------------------------------------

def scale(domain: Domain) -> float:
    """1 + diameter, or 1 + |offset| for the unbounded half-plane."""
    if isinstance(domain, HalfPlane):
        return 1.0 + abs(domain.offset)
    return 1.0 + domain.diameter


def membership_tolerance(domain: Domain) -> float:
    return float(defaults.geometry("membership_scale")) * scale(domain)


def _batch(domain: Domain, Z) -> NDArray[np.complex128]:
    arr = np.atleast_2d(np.asarray(Z, dtype=np.complex128))
    if arr.shape[1] != domain.dim:
        raise DimensionMismatch(f"expected points in C^{domain.dim}, got C^{arr.shape[1]}")
    return arr


def max_defect(domain: Domain, Z) -> NDArray[np.float64]:
    return domain._defects(_batch(domain, Z)).max(axis=1)


_VERDICTS = (Membership.INTERIOR, Membership.BOUNDARY, Membership.EXTERIOR)


def membership_codes(domain: Domain, Z) -> NDArray[np.intp]:
    """0 interior, 1 boundary within tolerance, 2 exterior; indexes ``_VERDICTS``."""
    m = max_defect(domain, Z)
    tol = membership_tolerance(domain)
    return (m >= -tol).astype(np.intp) + (m > tol).astype(np.intp)


def classify(domain: Domain, Z) -> NDArray:
    """Vectorized contains(): an object array of Membership values, one per row of Z."""
    codes = membership_codes(domain, Z)
    out = np.empty(codes.shape, dtype=object)
    # element-wise so numpy never coerces the str-valued enum to a fixed-width string
    for i, code in enumerate(codes):
        out[i] = _VERDICTS[code]
    return out


def interior_mask(domain: Domain, Z) -> NDArray[np.bool_]:
    return membership_codes(domain, Z) == 0


def boundary_mask(domain: Domain, Z) -> NDArray[np.bool_]:
    return membership_codes(domain, Z) == 1


def closure_mask(domain: Domain, Z) -> NDArray[np.bool_]:
    return membership_codes(domain, Z) < 2


def contains(domain: Domain, z) -> Membership:
    """Interior / boundary-within-tolerance / exterior verdict for a single point."""
    code = membership_codes(domain, as_point(z, domain.dim)[None, :])[0]
    return _VERDICTS[code]


def require_interior(domain: Domain, z) -> NDArray[np.complex128]:
    point = as_point(z, domain.dim)
    verdict = contains(domain, point)
    if verdict is not Membership.INTERIOR:
        raise NotInterior(f"point {point!r} is {verdict.value}, not interior")
    return point


def _is_scaled_unitary(A: NDArray) -> float | None:
    """Return |s| when A = s U with U unitary, else None."""
    gram = A.conj().T @ A
    s2 = float(np.real(np.trace(gram))) / A.shape[0]
    if np.allclose(gram, s2 * np.eye(A.shape[0]), rtol=0, atol=1e-13 * s2):
        return math.sqrt(s2)
    return None


def ray_exit(domain: Domain, z, v) -> float:
    """Largest s > 0 with z + s v inside (v need not be normalized)."""
    v = np.asarray(v, dtype=np.complex128)
    norm = float(np.linalg.norm(v))
    reach = domain.diameter
    if not math.isfinite(reach):
        raise UnsupportedVariant("ray exits need a bounded domain")
    hi = 1.01 * reach / norm + 1e-300

    def g(s):
        return float(max_defect(domain, (z + s * v)[None, :])[0])

    g_hi = g(hi)
    for _ in range(60):
        if g_hi > 0:
            break
        hi *= 2.0
        g_hi = g(hi)
    rtol = float(defaults.geometry("bisection_rtol"))
    return float(brentq(g, 0.0, hi, xtol=rtol * hi, rtol=max(rtol, 4 * np.finfo(float).eps)))


def sphere_directions(count: int, n: int, seed: int = 0) -> NDArray[np.complex128]:
    """Deterministic, roughly uniform unit directions in C^n = R^2n."""
    u = qmc.Sobol(d=2 * n, scramble=True, seed=seed).random(count)
    g = ndtri(np.clip(u, 1e-12, 1 - 1e-12))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return from_real(g)


def _deepest_sample(domain: Domain, count: int = 4096) -> NDArray[np.complex128]:
    lo, hi = domain.bbox
    u = qmc.Sobol(d=lo.size, scramble=True, seed=0).random(count)
    Z = from_real(lo + u * (hi - lo))
    m = max_defect(domain, Z)
    k = int(np.argmin(m))
    if m[k] >= 0:
        raise EmptyDomain("no interior point found by sampling the bounding box")
    return as_point(Z[k])


def _numeric_distance(domain: Domain, z) -> float:
    count = int(defaults.geometry("distance_directions"))
    dirs = sphere_directions(count, domain.dim)
    exits = np.array([ray_exit(domain, z, u) for u in dirs])
    best = float(exits.min())

    def objective(x):
        v = from_real(x)
        nv = np.linalg.norm(v)
        return ray_exit(domain, z, v / nv) if nv > 0 else math.inf

    for k in np.argsort(exits)[:3]:
        res = minimize(objective, to_real(dirs[k]), method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-14 * scale(domain), "maxiter": 4000})
        best = min(best, float(res.fun))
    return best


def boundary_distance(domain: Domain, z) -> float:
    """Euclidean distance from an interior point to the boundary."""
    return _distance(domain, require_interior(domain, z))


def _distance(domain: Domain, point) -> float:
    if isinstance(domain, AffineImage):
        reduced = simplify(domain)
        if not isinstance(reduced, AffineImage):
            return _distance(reduced, point)
        s = _is_scaled_unitary(domain.matrix)
        if s is not None:
            return s * _distance(domain.base, domain.pullback(point[None, :])[0])
        return _numeric_distance(domain, point)
    if isinstance(domain, Section):
        return _numeric_distance(domain, point)
    if isinstance(domain, Product):
        k = domain.split
        return min(_distance(domain.left, point[:k]), _distance(domain.right, point[k:]))
    if isinstance(domain, Intersection):
        return min(_distance(domain.left, point), _distance(domain.right, point))
    return float(-max_defect(domain, point[None, :])[0])


# ---------------------------------------------------------------------------
# Directional radius d(z; X)
# ---------------------------------------------------------------------------

def _phase_grid_radius(domain: Domain, z, X, phases: int | None = None) -> float:
    """inf over theta of the ray exit along e^{i theta} X, by grid + bounded Brent refinement."""
    count = int(phases or defaults.geometry("phase_grid"))
    thetas = 2 * np.pi * np.arange(count) / count
    exits = np.array([ray_exit(domain, z, np.exp(1j * t) * X) for t in thetas])
    k = int(np.argmin(exits))
    best_theta, best = float(thetas[k]), float(exits[k])
    half = 2 * np.pi / count
    for _ in range(int(defaults.geometry("phase_refine_rounds"))):
        res = minimize_scalar(
            lambda t: ray_exit(domain, z, np.exp(1j * t) * X),
            bounds=(best_theta - half, best_theta + half),
            method="bounded",
            options={"xatol": 1e-12},
        )
        if res.fun < best:
            best_theta, best = float(res.x), float(res.fun)
        half /= 4.0
    return best


def _exact_radius(domain: Domain, z, X) -> float:
    if isinstance(domain, Disc):
        return (domain.radius - abs(z[0] - domain.center)) / abs(X[0])
    if isinstance(domain, Polydisc):
        slack = domain.radii - np.abs(z - domain.centers)
        moving = np.abs(X) > 0
        return float(np.min(slack[moving] / np.abs(X[moving])))
    if isinstance(domain, Ball):
        w = z - domain.center
        p = abs(np.vdot(X, w))
        xx = float(np.vdot(X, X).real)
        slack = domain.radius ** 2 - float(np.vdot(w, w).real)
        return (math.sqrt(p * p + xx * slack) - p) / xx
    if isinstance(domain, HalfPlane):
        w = abs(np.conj(domain.normal) * X[0])
        s = domain.offset - (np.conj(domain.normal) * z[0]).real
        return s / w if w > 0 else math.inf
    if isinstance(domain, Polytope):
        w = np.abs(domain.normals.conj() @ X)
        s = domain.slack(z)
        live = w > 1e-15 * domain.norms * np.linalg.norm(X)
        return float(np.min(s[live] / w[live])) if np.any(live) else math.inf
    if isinstance(domain, Product):
        k = domain.split
        parts = []
        for sub, zs, xs in ((domain.left, z[:k], X[:k]), (domain.right, z[k:], X[k:])):
            parts.append(_exact_radius(sub, zs, xs) if np.any(xs) else math.inf)
        return min(parts)
    if isinstance(domain, Intersection):
        return min(_exact_radius(domain.left, z, X), _exact_radius(domain.right, z, X))
    if isinstance(domain, AffineImage):
        zb = domain.pullback(z[None, :])[0]
        return _exact_radius(domain.base, zb, domain.inverse @ X)
    if isinstance(domain, Section):
        return _exact_radius(domain.base, domain.embed(z[None, :])[0], domain.frame @ X)
    return _phase_grid_radius(domain, z, X)


def directional_radius(domain: Domain, z, X, *, exact: bool = True, phases: int | None = None) -> float:
    """d(z; X) = sup{r : z + lambda X in D for all |lambda| < r}; may be +inf.

    ``exact=False`` forces the phase-grid fallback (used to cross-check the
    closed formulas).
    """
    point = require_interior(domain, z)
    direction = as_direction(X, domain.dim)
    if not exact:
        return _phase_grid_radius(domain, point, direction, phases)
    return float(_exact_radius(domain, point, direction))


# ---------------------------------------------------------------------------
# Support function and simplification
# ---------------------------------------------------------------------------

def support(domain: Domain, y) -> float:
    """sup over the domain of Re<y, z>; +inf when unbounded in that direction.

    For intersections the value is min of the operands' supports, an upper
    bound that is exact whenever the maximizer of one operand lies in the other.
    """
    y = np.asarray(y, dtype=np.complex128).reshape(-1)
    if isinstance(domain, Disc):
        return float((np.conj(y[0]) * domain.center).real + domain.radius * abs(y[0]))
    if isinstance(domain, Polydisc):
        return float(np.sum((np.conj(y) * domain.centers).real + domain.radii * np.abs(y)))
    if isinstance(domain, Ball):
        return float(np.vdot(y, domain.center).real + domain.radius * np.linalg.norm(y))
    if isinstance(domain, HalfPlane):
        mu = np.conj(domain.normal) * y[0]
        if abs(mu.imag) <= 1e-15 * abs(y[0]) and mu.real >= 0:
            return float(mu.real * domain.offset)
        return math.inf
    if isinstance(domain, Polytope):
        res = linprog(-to_real(y), A_ub=domain.real_matrix, b_ub=-domain.offsets,
                      bounds=[(None, None)] * (2 * domain.dim), method="highs")
        if not res.success:
            raise UnboundedDomain(f"support LP failed: {res.message}")
        return float(-res.fun)
    if isinstance(domain, Product):
        k = domain.split
        return support(domain.left, y[:k]) + support(domain.right, y[k:])
    if isinstance(domain, AffineImage):
        return float(np.vdot(y, domain.shift).real) + support(domain.base, domain.matrix.conj().T @ y)
    if isinstance(domain, Intersection):
        return min(support(domain.left, y), support(domain.right, y))
    raise UnsupportedVariant(f"no support function for {type(domain).__name__}")


def scaled(domain: Domain, t: float) -> Domain:
    """F_t = {z : t z in F}, i.e. the image of F under z -> z / t."""
    if not t > 0:
        raise ValueError(f"scale must be positive, got {t!r}")
    n = domain.dim
    return simplify(AffineImage(domain, np.eye(n) / t, np.zeros(n)))


def _simplify_affine(domain: AffineImage) -> Domain:
    base = simplify(domain.base)
    A, b, n = domain.matrix, domain.shift, domain.dim
    if isinstance(base, AffineImage):
        return _simplify_affine(AffineImage(base.base, A @ base.matrix, A @ base.shift + b))
    if isinstance(base, Polytope):
        normals = base.normals @ domain.inverse.conj()
        offsets = base.offsets - (normals.conj() @ b).real
        return Polytope(normals, offsets)
    if n == 1:
        s = complex(A[0, 0])
        if isinstance(base, Disc):
            return Disc(s * base.center + b[0], abs(s) * base.radius)
        if isinstance(base, HalfPlane):
            a = base.normal / np.conj(s)
            hp = HalfPlane(a, base.offset + (np.conj(a) * b[0]).real)
            return hp
    s_abs = _is_scaled_unitary(A)
    if isinstance(base, Ball) and s_abs is not None:
        return Ball(A @ base.center + b, s_abs * base.radius)
    off_diag = A - np.diag(np.diag(A))
    if isinstance(base, Polydisc) and not np.any(off_diag):
        d = np.diag(A)
        return Polydisc(d * base.centers + b, np.abs(d) * base.radii)
    if isinstance(base, Product):
        k = base.split
        if not np.any(A[:k, k:]) and not np.any(A[k:, :k]):
            return Product(
                _simplify_affine(AffineImage(base.left, A[:k, :k], b[:k])),
                _simplify_affine(AffineImage(base.right, A[k:, k:], b[k:])),
            )
    if base is domain.base:
        return domain
    return AffineImage(base, A, b)


def _lens_offset(disc: Disc, hp: HalfPlane) -> float:
    """Signed distance from the disc center to the half-plane's line (positive inside)."""
    return hp.offset - float((np.conj(hp.normal) * disc.center).real)


def _simplify_intersection(domain: Intersection) -> Domain:
    left, right = simplify(domain.left), simplify(domain.right)
    for a, b in ((left, right), (right, left)):
        if isinstance(a, Polytope) and isinstance(b, Polytope):
            return Polytope(np.vstack([a.normals, b.normals]),
                            np.concatenate([a.offsets, b.offsets]))
        if isinstance(a, Polytope) and isinstance(b, HalfPlane):
            return Polytope(np.vstack([a.normals, [[b.normal]]]),
                            np.concatenate([a.offsets, [-b.offset]]))
        if isinstance(a, Disc) and isinstance(b, HalfPlane):
            delta = _lens_offset(a, b)
            if delta >= a.radius:
                return a
            if delta <= -a.radius:
                raise EmptyDomain("half-plane misses the disc")
            return Intersection(a, b)
        if isinstance(a, Polydisc) and isinstance(b, Polydisc) and np.allclose(a.centers, b.centers):
            return Polydisc(a.centers, np.minimum(a.radii, b.radii))
        if isinstance(a, Disc) and isinstance(b, Disc) and a.center == b.center:
            return Disc(a.center, min(a.radius, b.radius))
        if isinstance(a, Ball) and isinstance(b, Ball) and np.allclose(a.center, b.center):
            return Ball(a.center, min(a.radius, b.radius))
        if (isinstance(a, Product) and isinstance(b, Product) and a.split == b.split):
            return Product(
                _simplify_intersection(Intersection(a.left, b.left)),
                _simplify_intersection(Intersection(a.right, b.right)),
            )
    if left is domain.left and right is domain.right:
        return domain
    return Intersection(left, right)


def simplify(domain: Domain) -> Domain:
    """Fold compositions that reduce to a single variant with exact formulas.

    Affine images of polytopes become polytopes; one-dimensional similarities
    of discs and half-planes, unitary-times-scalar images of balls and
    diagonal images of polydiscs stay in their family; intersections of
    polytopes merge; concentric discs, balls and polydiscs intersect to the
    smaller one; a half-plane containing a disc drops out.
    """
    if isinstance(domain, AffineImage):
        return _simplify_affine(domain)
    if isinstance(domain, Intersection):
        return _simplify_intersection(domain)
    if isinstance(domain, Product):
        left, right = simplify(domain.left), simplify(domain.right)
        if left is domain.left and right is domain.right:
            return domain
        return Product(left, right)
    return domain


def is_lens(domain: Domain) -> bool:
    """Disc intersected with a half-plane whose line cuts it (a circular-arc two-gon)."""
    if not isinstance(domain, Intersection):
        return False
    pair = {type(domain.left), type(domain.right)}
    return pair == {Disc, HalfPlane}


def lens_parts(domain: Intersection) -> tuple[Disc, HalfPlane]:
    if isinstance(domain.left, Disc):
        return domain.left, domain.right
    return domain.right, domain.left


def active_tolerance(domain: Domain) -> float:
    return float(defaults.geometry("active_scale")) * scale(domain)


def require_boundary(domain: Domain, z0) -> NDArray[np.complex128]:
    point = as_point(z0, domain.dim)
    verdict = contains(domain, point)
    if verdict is not Membership.BOUNDARY:
        raise NotOnBoundary(f"point {point!r} is {verdict.value}, not on the boundary")
    return point


def supporting_normal(domain: Domain, z0) -> NDArray[np.complex128]:
    """Unit outward normal nu at a boundary point: Re<nu, z - z0> <= 0 on the closure."""
    point = require_boundary(domain, z0)
    return _normal(domain, point)


def _normal(domain: Domain, z0) -> NDArray[np.complex128]:
    tol = active_tolerance(domain)
    if isinstance(domain, (Disc, Ball)):
        c = domain.reference
        return unit(z0 - c)
    if isinstance(domain, HalfPlane):
        return as_point([domain.normal])
    if isinstance(domain, Polydisc):
        gap = domain._defects(z0[None, :])[0]
        k = int(np.argmax(gap))
        nu = np.zeros(domain.dim, dtype=complex)
        nu[k] = (z0[k] - domain.centers[k]) / abs(z0[k] - domain.centers[k])
        return nu
    if isinstance(domain, Polytope):
        k = int(np.argmax(domain._defects(z0[None, :])[0]))
        return domain.normals[k] / domain.norms[k]
    if isinstance(domain, Product):
        k = domain.split
        left_gap = float(max_defect(domain.left, z0[None, :k])[0])
        right_gap = float(max_defect(domain.right, z0[None, k:])[0])
        nu = np.zeros(domain.dim, dtype=complex)
        if left_gap >= right_gap:
            nu[:k] = _normal(domain.left, z0[:k])
        else:
            nu[k:] = _normal(domain.right, z0[k:])
        return nu
    if isinstance(domain, AffineImage):
        base_nu = _normal(domain.base, domain.pullback(z0[None, :])[0])
        return unit(domain.inverse.conj().T @ base_nu)
    if isinstance(domain, Intersection):
        left_gap = float(max_defect(domain.left, z0[None, :])[0])
        if left_gap >= -tol:
            return _normal(domain.left, z0)
        return _normal(domain.right, z0)
    raise UnsupportedVariant(f"no supporting normal for {type(domain).__name__}")
