"""Flat spaces L(z0) and normal slices E(z0) at boundary points.

L(z0) is the complex-linear space of directions X for which a whole
analytic disc z0 + lambda X, |lambda| <= eps, stays in the boundary.
It is computed exactly for polytopes (complex null space of the active
normals), polydiscs and products (coordinate bookkeeping), intersections
(intersection of the operands' flats) and simplifiable affine images.
Sections and other affine images fall back to ``numeric_flat_space``.

Every exact answer is certified before it is returned: each basis vector
is pushed out to radius eps at 16 phases and must stay on the boundary.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import null_space, svd

from bergman_probe import defaults
from bergman_probe.domains import (
    AffineImage,
    Ball,
    Disc,
    Domain,
    HalfPlane,
    Intersection,
    Polydisc,
    Polytope,
    Product,
    Section,
    active_tolerance,
    boundary_mask,
    max_defect,
    require_boundary,
    scale,
    simplify,
)
from bergman_probe.errors import FlatValidationError, ProbeNotFlat
from bergman_probe.points import as_direction, as_point

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FlatSpace:
    """Orthonormal basis (columns of an n x k matrix) of L(z0) plus a validated radius."""

    base: NDArray[np.complex128]
    basis: NDArray[np.complex128]
    radius: float
    certified: bool = True

    @property
    def dim(self) -> int:
        return int(self.basis.shape[1])

    @property
    def ambient_dim(self) -> int:
        return int(self.base.size)

    @property
    def projector(self) -> NDArray[np.complex128]:
        return self.basis @ self.basis.conj().T

    def residual(self, X) -> float:
        """Norm of the component of X orthogonal to L(z0), relative to |X|."""
        x = as_direction(X, self.ambient_dim)
        return float(np.linalg.norm(x - self.projector @ x) / np.linalg.norm(x))

    def contains_direction(self, X, tol: float = 1e-9) -> bool:
        return self.residual(X) <= tol

    def angle_from(self, X) -> float:
        """Angle between X and L(z0) in [0, pi/2]; pi/2 when L(z0) = {0}."""
        return math.asin(min(1.0, self.residual(X)))


@dataclass(frozen=True, eq=False)
class NormalSlice:
    """E(z0) = D cut by N(z0), in coordinates zeta with z = origin + basis @ zeta."""

    base: NDArray[np.complex128]
    basis: NDArray[np.complex128]
    origin: NDArray[np.complex128]
    domain: Domain
    flat: FlatSpace = field(repr=False)

    @property
    def dim(self) -> int:
        return int(self.basis.shape[1])

    def embed(self, zeta) -> NDArray[np.complex128]:
        return as_point(self.origin + self.basis @ np.asarray(zeta, dtype=complex).reshape(-1))

    def coordinates(self, z) -> NDArray[np.complex128]:
        return as_point(self.basis.conj().T @ np.asarray(z, dtype=complex).reshape(-1))


def _identity_columns(n: int, indices) -> NDArray[np.complex128]:
    eye = np.eye(n, dtype=np.complex128)
    return eye[:, list(indices)]


def _orth(M: NDArray) -> NDArray[np.complex128]:
    """Orthonormal basis of the column span (coordinate columns pass through unchanged)."""
    if M.shape[1] == 0:
        return np.zeros((M.shape[0], 0), dtype=np.complex128)
    if _coordinate_indices(M) is not None:
        return M.astype(np.complex128)
    u, s, _ = svd(M, full_matrices=False)
    keep = s > 1e-10 * max(float(s.max()), 1.0)
    return u[:, keep]


def _coordinate_indices(M: NDArray) -> list[int] | None:
    """Indices k when every column of M is e_k; None otherwise."""
    picked = []
    for col in M.T:
        nz = np.flatnonzero(np.abs(col) > 0)
        if nz.size != 1 or abs(col[nz[0]] - 1) > 0:
            return None
        picked.append(int(nz[0]))
    return picked


def _complement(basis: NDArray, n: int) -> NDArray[np.complex128]:
    idx = _coordinate_indices(basis)
    if idx is not None:
        return _identity_columns(n, [k for k in range(n) if k not in idx])
    if basis.shape[1] == 0:
        return np.eye(n, dtype=np.complex128)
    return null_space(basis.conj().T)


def _intersect(U: NDArray, V: NDArray, n: int) -> NDArray[np.complex128]:
    if U.shape[1] == 0 or V.shape[1] == 0:
        return np.zeros((n, 0), dtype=np.complex128)
    iu, iv = _coordinate_indices(U), _coordinate_indices(V)
    if iu is not None and iv is not None:
        return _identity_columns(n, sorted(set(iu) & set(iv)))
    eye = np.eye(n)
    stacked = np.vstack([eye - U @ U.conj().T, eye - V @ V.conj().T])
    return null_space(stacked, rcond=1e-10)


def _block(left: NDArray, right: NDArray) -> NDArray[np.complex128]:
    nl, nr = left.shape[0], right.shape[0]
    out = np.zeros((nl + nr, left.shape[1] + right.shape[1]), dtype=np.complex128)
    out[:nl, :left.shape[1]] = left
    out[nl:, left.shape[1]:] = right
    return out


def _flat(domain: Domain, z0) -> tuple[NDArray[np.complex128], float]:
    """(basis, eps) of L(z0) for a point on the boundary of ``domain``."""
    n = domain.dim
    tol = active_tolerance(domain)
    if isinstance(domain, (Disc, Ball, HalfPlane)):
        return np.zeros((n, 0), dtype=np.complex128), math.inf
    if isinstance(domain, Polydisc):
        gap = domain.radii - np.abs(z0 - domain.centers)
        free = [k for k in range(n) if gap[k] > tol]
        eps = 0.5 * float(min(gap[free])) if free else math.inf
        return _identity_columns(n, free), eps
    if isinstance(domain, Polytope):
        slack = domain.slack(z0) / domain.norms
        active = slack <= tol
        basis = null_space(domain.normals[active].conj()) if np.any(active) else np.eye(n)
        basis = _orth(_snap(basis))
        inactive = slack[~active]
        eps = 0.5 * float(inactive.min()) if inactive.size else math.inf
        return basis, eps
    if isinstance(domain, Product):
        k = domain.split
        parts, eps = [], math.inf
        for sub, zs in ((domain.left, z0[:k]), (domain.right, z0[k:])):
            gap = -float(max_defect(sub, zs[None, :])[0])
            if gap > tol:
                parts.append(np.eye(sub.dim, dtype=np.complex128))
                eps = min(eps, 0.5 * gap)
            else:
                b, e = _flat(sub, zs)
                parts.append(b)
                eps = min(eps, e)
        return _block(*parts), eps
    if isinstance(domain, Intersection):
        basis, eps = np.eye(n, dtype=np.complex128), math.inf
        for sub in (domain.left, domain.right):
            gap = -float(max_defect(sub, z0[None, :])[0])
            if gap > tol:
                eps = min(eps, 0.5 * gap)
                continue
            b, e = _flat(sub, z0)
            basis = _intersect(basis, b, n)
            eps = min(eps, e)
        return basis, eps
    if isinstance(domain, AffineImage):
        reduced = simplify(domain)
        if not isinstance(reduced, AffineImage):
            return _flat(reduced, z0)
        b, e = _flat(domain.base, domain.pullback(z0[None, :])[0])
        sigma_min = float(np.linalg.svd(domain.matrix, compute_uv=False).min())
        return _orth(domain.matrix @ b), e * sigma_min
    raise FlatValidationError(f"no exact flat space for {type(domain).__name__}")


def _snap(basis: NDArray) -> NDArray:
    """Round null-space bases that are coordinate subspaces up to roundoff to exact e_k columns."""
    if basis.shape[1] == 0:
        return basis
    support = np.flatnonzero(np.linalg.norm(basis, axis=1) > 1e-12)
    if support.size == basis.shape[1]:
        return _identity_columns(basis.shape[0], support)
    return basis


def _certify(domain: Domain, z0, basis: NDArray, eps: float) -> float:
    phases = int(defaults.geometry("flat_validation_phases"))
    if basis.shape[1] == 0:
        return 0.0
    if not math.isfinite(eps):
        eps = 0.5 * scale(domain)
    thetas = 2 * np.pi * np.arange(phases) / phases
    for X in basis.T:
        ring = z0[None, :] + eps * np.exp(1j * thetas)[:, None] * X[None, :]
        if not np.all(boundary_mask(domain, ring)):
            raise FlatValidationError(
                f"flat direction {X!r} leaves the boundary at radius {eps:g}; "
                "check the active-constraint tolerance"
            )
    return eps


def flat_space(domain: Domain, z0) -> FlatSpace:
    """L(z0) for a boundary point, with a certified radius eps_flat."""
    point = require_boundary(domain, z0)
    try:
        basis, eps = _flat(domain, point)
    except FlatValidationError:
        logger.info("no exact flat space for %s; using the numeric fallback", type(domain).__name__)
        return numeric_flat_space(domain, point)
    eps = _certify(domain, point, basis, eps)
    logger.debug("flat space at %s: dim %d, eps %.3g", point, basis.shape[1], eps)
    return FlatSpace(base=point, basis=basis, radius=eps, certified=True)


def _candidate_directions(n: int) -> list[NDArray[np.complex128]]:
    eye = np.eye(n, dtype=np.complex128)
    out = [eye[j] for j in range(n)]
    for j, k in combinations(range(n), 2):
        for c in (1, -1, 1j, -1j):
            out.append((eye[j] + c * eye[k]) / math.sqrt(2))
    return out


def is_flat_direction(domain: Domain, z0, X, radius: float | None = None) -> bool:
    """Phase-grid test: does z0 + lambda X stay on the boundary for |lambda| = radius and radius/2?"""
    point = as_point(z0, domain.dim)
    x = as_direction(X, domain.dim)
    x = x / np.linalg.norm(x)
    rho = radius if radius is not None else 1e-3 * scale(domain)
    phases = int(defaults.geometry("flat_validation_phases"))
    lam = np.exp(2j * np.pi * np.arange(phases) / phases)
    for r in (rho, 0.5 * rho):
        ring = point[None, :] + r * lam[:, None] * x[None, :]
        if not np.all(boundary_mask(domain, ring)):
            return False
    return True


def numeric_flat_space(domain: Domain, z0, radius: float | None = None) -> FlatSpace:
    """Flat space spanned by the candidate directions e_j, (e_j + c e_k)/sqrt2 that test flat.

    Only detects flats spanned by such candidates; the result is marked
    uncertified ("numerically flat").
    """
    point = require_boundary(domain, z0)
    n = domain.dim
    rho = radius if radius is not None else 1e-3 * scale(domain)
    passing = [X for X in _candidate_directions(n) if is_flat_direction(domain, point, X, rho)]
    if passing:
        basis = _orth(_snap(_orth(np.column_stack(passing))))
    else:
        basis = np.zeros((n, 0), dtype=np.complex128)
    return FlatSpace(base=point, basis=basis, radius=rho, certified=False)


def _restrict(domain: Domain, origin: NDArray, frame: NDArray) -> Domain:
    """D cut by {origin + frame @ zeta}, as a closed variant where one exists."""
    n, m = frame.shape
    idx = _coordinate_indices(frame)
    if idx is not None and idx == list(range(n)) and not np.any(origin):
        return domain
    if isinstance(domain, Polytope):
        normals = domain.normals @ frame.conj()
        offsets = domain.offsets + (domain.normals.conj() @ origin).real
        live = np.linalg.norm(normals, axis=1) > 1e-12 * domain.norms
        return Polytope(normals[live], offsets[live])
    if isinstance(domain, Polydisc) and idx is not None:
        if len(idx) == 1:
            k = idx[0]
            return Disc(domain.centers[k], domain.radii[k])
        return Polydisc(domain.centers[idx], domain.radii[idx])
    if isinstance(domain, Product):
        k = domain.split
        top, bottom = frame[:k], frame[k:]
        left_cols = np.flatnonzero(np.linalg.norm(top, axis=0) > 0)
        right_cols = np.flatnonzero(np.linalg.norm(bottom, axis=0) > 0)
        if not set(left_cols) & set(right_cols):
            if right_cols.size == 0:
                return _restrict(domain.left, origin[:k], top[:, left_cols])
            if left_cols.size == 0:
                return _restrict(domain.right, origin[k:], bottom[:, right_cols])
            if list(left_cols) + list(right_cols) == list(range(m)):
                return Product(
                    _restrict(domain.left, origin[:k], top[:, left_cols]),
                    _restrict(domain.right, origin[k:], bottom[:, right_cols]),
                )
    return Section(domain, origin, frame)


def normal_slice(domain: Domain, z0) -> NormalSlice:
    """N(z0) = orthogonal complement of L(z0) through z0, and E(z0) = D cut by it."""
    fs = flat_space(domain, z0)
    n = domain.dim
    N = _complement(fs.basis, n)
    origin = fs.base - N @ (N.conj().T @ fs.base)
    sliced = _restrict(simplify(domain), origin, N)
    return NormalSlice(base=fs.base, basis=N, origin=as_point(origin), domain=sliced, flat=fs)


def require_flat_probe(fs: FlatSpace, X, tol: float = 1e-9) -> None:
    if not fs.contains_direction(X, tol):
        raise ProbeNotFlat(
            f"probe {np.asarray(X)!r} is not in L(z0) (residual {fs.residual(X):.3g})"
        )
