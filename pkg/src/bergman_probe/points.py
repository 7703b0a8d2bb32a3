"""Points and direction vectors in C^n.

ComplexPoint and ComplexVector are plain 1-D complex128 arrays; these
helpers validate and convert them. Batches of points are (N, n) arrays.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from bergman_probe.errors import DimensionMismatch, ZeroDirection

ComplexPoint = NDArray[np.complex128]
ComplexVector = NDArray[np.complex128]


def as_point(coords: ArrayLike, n: int | None = None) -> ComplexPoint:
    """Return a read-only complex vector; checks length, finiteness and (optionally) dimension."""
    z = np.array(coords, dtype=np.complex128).reshape(-1)
    if z.size < 1:
        raise DimensionMismatch("a point needs at least one coordinate")
    if not np.all(np.isfinite(z)):
        raise ValueError(f"non-finite coordinate in {coords!r}")
    if n is not None and z.size != n:
        raise DimensionMismatch(f"expected {n} coordinates, got {z.size}")
    z.setflags(write=False)
    return z


def as_direction(coords: ArrayLike, n: int | None = None) -> ComplexVector:
    """Like as_point, and rejects the zero vector."""
    x = as_point(coords, n)
    if not np.any(x):
        raise ZeroDirection("direction vector must be nonzero")
    return x


def hermitian(a: ArrayLike, z: ArrayLike) -> complex:
    """<a, z> = sum conj(a_k) z_k."""
    return complex(np.vdot(a, z))


def unit(x: ArrayLike) -> ComplexVector:
    v = np.asarray(x, dtype=np.complex128)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ZeroDirection("cannot normalize the zero vector")
    return v / norm


def to_real(z: ArrayLike) -> NDArray[np.float64]:
    """C^n -> R^2n as [Re z; Im z] (works on the last axis of a batch)."""
    arr = np.asarray(z, dtype=np.complex128)
    return np.concatenate([arr.real, arr.imag], axis=-1)


def from_real(x: ArrayLike) -> NDArray[np.complex128]:
    arr = np.asarray(x, dtype=np.float64)
    n = arr.shape[-1] // 2
    return arr[..., :n] + 1j * arr[..., n:]
