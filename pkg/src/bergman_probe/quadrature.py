"""Monomial bases and integration rules over supported domains.

Three rule kinds:

* exact-polar: discs and balls. Each coordinate is written as
  sqrt(s_k) e^{i theta_k}; the angles use an equispaced trapezoid rule and
  the squared radii are collapsed onto the unit cube
  (s_k = r^2 u_k prod_{l<k}(1 - u_l)) with Gauss-Legendre points in each
  u_k. The rule integrates (z - c)^j conj(z - c)^k exactly for j, k of
  total degree up to d_max + 1.
* tensor: polydiscs and products of exactly integrable factors. The
  rule keeps its factor rules; Gram matrices are assembled factor-wise.
* qmc-rejection: everything else. Scrambled Sobol points over the
  bounding box, kept when interior, all with weight box volume / N.
  Candidates come in independently scrambled blocks whose spread gives
  the Monte-Carlo error bar.

Affine images of exactly integrable domains reuse the base rule pushed
forward (nodes A z + b, weights |det A|^2 w).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import combinations_with_replacement

import numpy as np
from numpy.polynomial.legendre import leggauss
from numpy.typing import NDArray
from scipy.stats import qmc

from bergman_probe import defaults
from bergman_probe.domains import (
    AffineImage,
    Ball,
    Disc,
    Domain,
    Polydisc,
    Product,
    interior_mask,
    simplify,
)
from bergman_probe.errors import DimensionMismatch, EmptyDomain, UnboundedDomain
from bergman_probe.points import from_real

logger = logging.getLogger(__name__)


class RuleKind(str, Enum):
    EXACT_POLAR = "exact-polar"
    TENSOR = "tensor"
    QMC = "qmc-rejection"


# ---------------------------------------------------------------------------
# Basis
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BasisIndexSet:
    """Multi-indices of total degree <= d_max in graded-lex order.

    Degree-d indices come after every index of lower degree, so the basis
    of degree <= d' < d_max is the leading ``size_at(d')`` entries.
    """

    n: int
    d_max: int

    def __post_init__(self):
        if self.n < 1:
            raise DimensionMismatch(f"basis dimension must be positive, got {self.n}")
        if self.d_max < 0:
            raise ValueError(f"basis degree must be nonnegative, got {self.d_max}")
        cap = defaults.degree_cap(self.n)
        if self.d_max > cap:
            raise ValueError(f"degree {self.d_max} exceeds the cap {cap} for n={self.n}")

    @cached_property
    def exponents(self) -> NDArray[np.int64]:
        rows = []
        for d in range(self.d_max + 1):
            block = []
            for combo in combinations_with_replacement(range(self.n), d):
                j = [0] * self.n
                for k in combo:
                    j[k] += 1
                block.append(tuple(j))
            rows.extend(sorted(block, reverse=True))
        out = np.array(rows, dtype=np.int64).reshape(-1, self.n)
        out.setflags(write=False)
        return out

    @cached_property
    def position(self) -> dict:
        return {tuple(int(v) for v in j): k for k, j in enumerate(self.exponents)}

    def __len__(self) -> int:
        return int(self.exponents.shape[0])

    def size_at(self, d: int) -> int:
        """Number of indices of total degree <= d."""
        if d < 0 or d > self.d_max:
            raise ValueError(f"degree {d} outside 0..{self.d_max}")
        return math.comb(self.n + d, d)

    def evaluate(self, Z, center) -> NDArray[np.complex128]:
        """(N, len) matrix of (z - center)^j."""
        W = np.atleast_2d(np.asarray(Z, dtype=np.complex128)) - np.asarray(center)[None, :]
        out = np.ones((W.shape[0], len(self)), dtype=np.complex128)
        for k in range(self.n):
            powers = W[:, k:k + 1] ** np.arange(self.d_max + 1)[None, :]
            out *= powers[:, self.exponents[:, k]]
        return out

    def derivative(self, z, X, center) -> NDArray[np.complex128]:
        """Directional derivative sum_k X_k d/dz_k of every monomial at one point."""
        w = np.asarray(z, dtype=np.complex128) - np.asarray(center)
        X = np.asarray(X, dtype=np.complex128)
        J = self.exponents
        out = np.zeros(len(self), dtype=np.complex128)
        for k in range(self.n):
            if X[k] == 0:
                continue
            lowered = J.copy()
            lowered[:, k] -= 1
            live = J[:, k] > 0
            term = np.ones(len(self), dtype=np.complex128)
            for m in range(self.n):
                term[live] *= w[m] ** lowered[live, m]
            out[live] += X[k] * J[live, k] * term[live]
        return out


# ---------------------------------------------------------------------------
# Rules
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class QuadratureRule:
    kind: RuleKind
    dim: int
    center: NDArray[np.complex128]
    degree: int
    nodes: NDArray[np.complex128] | None = None
    weights: NDArray[np.float64] | None = None
    factors: tuple["QuadratureRule", ...] = ()
    groups: NDArray[np.int64] | None = None
    candidates: int = 0
    seed: int | None = None
    extra: dict = field(default_factory=dict)

    @property
    def node_count(self) -> int:
        if self.kind is RuleKind.TENSOR:
            return math.prod(f.node_count for f in self.factors)
        return int(self.weights.size)

    @property
    def volume(self) -> float:
        if self.kind is RuleKind.TENSOR:
            return math.prod(f.volume for f in self.factors)
        return float(self.weights.sum())

    @property
    def group_count(self) -> int:
        return 0 if self.groups is None else int(defaults.quadrature("qmc_groups"))

    @property
    def volume_error(self) -> float:
        """Monte-Carlo standard error of the volume (0 for exact rules)."""
        if self.groups is None:
            return 0.0
        g = self.group_count
        parts = np.bincount(self.groups, weights=self.weights, minlength=g) * g
        return float(parts.std(ddof=1) / math.sqrt(g))

    def materialize(self) -> tuple[NDArray[np.complex128], NDArray[np.float64]]:
        """Explicit (nodes, weights); expands tensor rules."""
        if self.kind is not RuleKind.TENSOR:
            return self.nodes, self.weights
        nodes, weights = self.factors[0].materialize()
        for f in self.factors[1:]:
            fn, fw = f.materialize()
            nodes = np.hstack([np.repeat(nodes, fn.shape[0], axis=0), np.tile(fn, (nodes.shape[0], 1))])
            weights = np.outer(weights, fw).ravel()
        return nodes, weights


def _unit_interval_gauss(points: int) -> tuple[NDArray, NDArray]:
    x, w = leggauss(points)
    return 0.5 * (x + 1.0), 0.5 * w


def _polar_rule(center, radius: float, degree: int) -> QuadratureRule:
    """Exact rule on the ball |z - center| < radius in C^n (n = 1 is the disc)."""
    c = np.asarray(center, dtype=np.complex128).reshape(-1)
    n = c.size
    angles = degree + 2
    points = (degree + 1 + n) // 2 + 1
    u, wu = _unit_interval_gauss(points)
    theta = 2 * np.pi * np.arange(angles) / angles

    grids = np.meshgrid(*([u] * n), indexing="ij")
    U = np.stack([g.ravel() for g in grids], axis=1)
    WU = np.prod(np.stack([g.ravel() for g in np.meshgrid(*([wu] * n), indexing="ij")], axis=1), axis=1)

    s = np.empty_like(U)
    tail = np.ones(U.shape[0])
    jac = np.ones(U.shape[0])
    for k in range(n):
        s[:, k] = radius ** 2 * U[:, k] * tail
        jac *= (1.0 - U[:, k]) ** (n - 1 - k)
        tail = tail * (1.0 - U[:, k])
    radial_w = WU * jac * radius ** (2 * n) * (0.5 * 2 * np.pi / angles) ** n

    tgrids = np.meshgrid(*([theta] * n), indexing="ij")
    T = np.stack([g.ravel() for g in tgrids], axis=1)

    nodes = (np.sqrt(s)[:, None, :] * np.exp(1j * T)[None, :, :]).reshape(-1, n) + c[None, :]
    weights = np.repeat(radial_w, T.shape[0])
    return QuadratureRule(kind=RuleKind.EXACT_POLAR, dim=n, center=c, degree=degree,
                          nodes=nodes, weights=weights)


def _exact_rule(domain: Domain, degree: int) -> QuadratureRule | None:
    if isinstance(domain, Disc):
        return _polar_rule([domain.center], domain.radius, degree)
    if isinstance(domain, Ball):
        return _polar_rule(domain.center, domain.radius, degree)
    if isinstance(domain, Polydisc):
        factors = tuple(_polar_rule([c], r, degree) for c, r in zip(domain.centers, domain.radii))
        return QuadratureRule(kind=RuleKind.TENSOR, dim=domain.dim, center=domain.centers.copy(),
                              degree=degree, factors=factors)
    if isinstance(domain, Product):
        left, right = _exact_rule(domain.left, degree), _exact_rule(domain.right, degree)
        if left is None or right is None:
            return None
        factors = tuple(
            part for sub in (left, right)
            for part in (sub.factors if sub.kind is RuleKind.TENSOR else (sub,))
        )
        return QuadratureRule(kind=RuleKind.TENSOR, dim=domain.dim,
                              center=np.concatenate([left.center, right.center]),
                              degree=degree, factors=factors)
    if isinstance(domain, AffineImage):
        base = _exact_rule(domain.base, degree)
        if base is None:
            return None
        nodes, weights = base.materialize()
        return QuadratureRule(kind=RuleKind.EXACT_POLAR, dim=domain.dim,
                              center=domain.forward(base.center[None, :])[0],
                              degree=degree, nodes=domain.forward(nodes),
                              weights=weights * domain.jacobian,
                              extra={"pushed_forward": True})
    return None


def rule_kind(domain: Domain) -> RuleKind:
    """The kind of rule build_rule would return, without building it."""
    reduced = simplify(domain)
    if isinstance(reduced, (Disc, Ball)):
        return RuleKind.EXACT_POLAR
    if isinstance(reduced, Polydisc):
        return RuleKind.TENSOR
    if isinstance(reduced, Product):
        parts = (rule_kind(reduced.left), rule_kind(reduced.right))
        return RuleKind.QMC if RuleKind.QMC in parts else RuleKind.TENSOR
    if isinstance(reduced, AffineImage) and rule_kind(reduced.base) is not RuleKind.QMC:
        return RuleKind.EXACT_POLAR
    return RuleKind.QMC


def _qmc_candidates(dim: int, candidates_log2: int, seed: int) -> tuple[NDArray, NDArray]:
    """Points in [0, 1)^dim from independently scrambled Sobol blocks, with their block labels.

    Each of the qmc_groups blocks is a full 2**(candidates_log2 - log2 groups)
    point net under its own scramble, so the blocks are independent
    replicates of the same randomized rule.
    """
    groups = int(defaults.quadrature("qmc_groups"))
    shift = groups.bit_length() - 1
    if groups < 2 or 1 << shift != groups:
        raise ValueError(f"qmc_groups must be a power of two >= 2, got {groups}")
    if candidates_log2 < shift:
        raise ValueError(f"need at least {groups} qmc candidates, got 2**{candidates_log2}")
    streams = np.random.SeedSequence(seed).spawn(groups)
    blocks = [
        qmc.Sobol(d=dim, scramble=True, seed=np.random.default_rng(stream))
        .random_base2(candidates_log2 - shift)
        for stream in streams
    ]
    labels = np.repeat(np.arange(groups), 1 << (candidates_log2 - shift))
    return np.vstack(blocks), labels


def _qmc_rule(domain: Domain, degree: int, candidates_log2: int, seed: int) -> QuadratureRule:
    box = domain.bbox
    if box is None:
        raise UnboundedDomain(f"{type(domain).__name__} has no bounding box to sample")
    lo, hi = box
    total = 2 ** candidates_log2
    U, groups = _qmc_candidates(lo.size, candidates_log2, seed)
    X = lo + U * (hi - lo)
    Z = from_real(X)
    keep = np.zeros(total, dtype=bool)
    chunk = int(defaults.quadrature("chunk_nodes"))
    for start in range(0, total, chunk):
        keep[start:start + chunk] = interior_mask(domain, Z[start:start + chunk])
    if not np.any(keep):
        raise EmptyDomain("no sample landed inside the domain")
    weight = float(np.prod(hi - lo)) / total
    nodes = Z[keep]
    weights = np.full(nodes.shape[0], weight)
    centroid = nodes.mean(axis=0)
    logger.debug("qmc rule: kept %d of %d candidates (seed %d)", nodes.shape[0], total, seed)
    return QuadratureRule(kind=RuleKind.QMC, dim=domain.dim, center=centroid, degree=degree,
                          nodes=nodes, weights=weights, groups=groups[keep],
                          candidates=total, seed=seed)


def build_rule(domain: Domain, degree: int, *, candidates_log2: int | None = None,
               seed: int | None = None) -> QuadratureRule:
    """Integration rule for bases of total degree <= degree.

    Exact rules are used where they exist; everything else gets a seeded
    qmc-rejection rule with 2**candidates_log2 candidates.
    """
    if degree < 0:
        raise ValueError(f"degree must be nonnegative, got {degree}")
    reduced = simplify(domain)
    rule = _exact_rule(reduced, degree)
    if rule is None:
        log2 = int(candidates_log2 if candidates_log2 is not None
                   else defaults.quadrature("qmc_candidates_log2"))
        rule = _qmc_rule(reduced, degree, log2, int(seed if seed is not None else defaults.cli("seed")))
    logger.info("%s rule for %s: %d nodes, volume %.12g",
                rule.kind.value, type(reduced).__name__, rule.node_count, rule.volume)
    return rule
