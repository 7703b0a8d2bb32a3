"""Gram matrices of monomial bases and their pivoted factorizations.

G[j, k] = sum_q w_q (z_q - c)^j conj((z_q - c)^k). Tensor rules assemble G
from the factor Grams (Fubini), so the tensor node set is never formed.
qmc rules also keep one sub-Gram per interleaved group; the group spread
is the Monte-Carlo error bar used by the numeric engine.

Factorization is a complex pivoted Cholesky that stops once the largest
remaining pivot falls below sigma_drop times the first one; the remaining
indices are recorded as dropped.
"""

from __future__ import annotations

import hashlib
import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import solve_triangular

from bergman_probe import __version__, defaults
from bergman_probe.domain_io import domain_hash
from bergman_probe.domains import Domain
from bergman_probe.errors import ConditioningError
from bergman_probe.quadrature import BasisIndexSet, QuadratureRule, RuleKind

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Factorization:
    """P^T G P ~= L L^H on the first ``rank`` pivots; ``perm[:rank]`` are the retained indices."""

    L: NDArray[np.complex128]
    perm: NDArray[np.int64]
    rank: int
    pivots: NDArray[np.float64]

    @property
    def retained(self) -> NDArray[np.int64]:
        return self.perm[:self.rank]

    @property
    def dropped(self) -> list[int]:
        return sorted(int(k) for k in self.perm[self.rank:])

    @property
    def condition(self) -> float:
        return float(self.pivots[0] / self.pivots[self.rank - 1])

    def whiten(self, v) -> NDArray[np.complex128]:
        """L^{-1} v[retained]; K-type quadratic forms are squared norms of this."""
        rhs = np.asarray(v, dtype=np.complex128)[self.retained]
        return solve_triangular(self.L, rhs, lower=True, check_finite=False)

    def solve(self, v) -> NDArray[np.complex128]:
        """G^{-1} v restricted to the retained indices (zeros elsewhere)."""
        y = self.whiten(v)
        x = solve_triangular(self.L.conj().T, y, lower=False, check_finite=False)
        out = np.zeros(len(self.perm), dtype=np.complex128)
        out[self.retained] = x
        return out


def pivoted_cholesky(G: NDArray, sigma_drop: float | None = None) -> Factorization:
    """Complex pivoted Cholesky of a Hermitian positive semidefinite matrix."""
    drop = float(sigma_drop if sigma_drop is not None else defaults.quadrature("sigma_drop"))
    A = np.array(G, dtype=np.complex128)
    n = A.shape[0]
    perm = np.arange(n)
    pivots = np.zeros(n)
    rank = n
    first = None
    for i in range(n):
        d = A.diagonal().real
        j = i + int(np.argmax(d[i:]))
        p = d[j]
        if first is None:
            first = p
        if not p > drop * first:
            rank = i
            break
        if j != i:
            A[:, [i, j]] = A[:, [j, i]]
            A[[i, j], :] = A[[j, i], :]
            perm[[i, j]] = perm[[j, i]]
        pivots[i] = p
        A[i, i] = math.sqrt(p)
        A[i + 1:, i] /= A[i, i]
        A[i + 1:, i + 1:] -= np.outer(A[i + 1:, i], A[i + 1:, i].conj())
    if rank < 1:
        raise ConditioningError("Gram factorization retained no basis function")
    L = np.tril(A[:rank, :rank])
    L.setflags(write=False)
    return Factorization(L=L, perm=perm, rank=rank, pivots=pivots[:rank])


@dataclass(frozen=True, eq=False)
class GramSystem:
    domain: Domain
    basis: BasisIndexSet
    center: NDArray[np.complex128]
    G: NDArray[np.complex128]
    factor: Factorization
    kind: RuleKind
    node_count: int
    volume: float
    group_grams: NDArray[np.complex128] | None = None
    seed: int | None = None
    candidates: int = 0
    rule: QuadratureRule | None = field(default=None, repr=False)

    @property
    def d_max(self) -> int:
        return self.basis.d_max

    @property
    def rank(self) -> int:
        return self.factor.rank

    @property
    def condition(self) -> float:
        return self.factor.condition

    @property
    def dropped(self) -> list[int]:
        return self.factor.dropped

    @property
    def is_qmc(self) -> bool:
        return self.group_grams is not None

    def entry_error(self) -> NDArray[np.float64]:
        """Monte-Carlo standard error per Gram entry (zeros for exact rules)."""
        if self.group_grams is None:
            return np.zeros(self.G.shape)
        g = self.group_grams.shape[0]
        return (g * self.group_grams).std(axis=0, ddof=1) / math.sqrt(g)

    def truncated(self, d: int) -> "GramSystem":
        """The Gram system of the sub-basis of degree <= d (a leading principal block)."""
        if d == self.d_max:
            return self
        m = self.basis.size_at(d)
        basis = BasisIndexSet(self.basis.n, d)
        G = self.G[:m, :m]
        groups = None if self.group_grams is None else self.group_grams[:, :m, :m]
        return GramSystem(domain=self.domain, basis=basis, center=self.center, G=G,
                          factor=pivoted_cholesky(G), kind=self.kind, node_count=self.node_count,
                          volume=self.volume, group_grams=groups, seed=self.seed,
                          candidates=self.candidates, rule=self.rule)


def _hermitize(G: NDArray) -> NDArray[np.complex128]:
    H = 0.5 * (G + G.conj().T)
    H.setflags(write=False)
    return H


def _node_gram(basis: BasisIndexSet, nodes, weights, center, labels=None, groups: int = 0):
    size = len(basis)
    G = np.zeros((size, size), dtype=np.complex128)
    sub = np.zeros((groups, size, size), dtype=np.complex128) if groups else None
    chunk = int(defaults.quadrature("chunk_nodes"))
    for start in range(0, nodes.shape[0], chunk):
        V = basis.evaluate(nodes[start:start + chunk], center)
        W = weights[start:start + chunk]
        if sub is None:
            G += (V * W[:, None]).T @ V.conj()
            continue
        lab = labels[start:start + chunk]
        for g in range(groups):
            mask = lab == g
            if np.any(mask):
                Vg = V[mask]
                sub[g] += (Vg * W[mask, None]).T @ Vg.conj()
    if sub is not None:
        G = sub.sum(axis=0)
    return G, sub


def _tensor_gram(basis: BasisIndexSet, rule: QuadratureRule) -> NDArray[np.complex128]:
    G = np.ones((len(basis), len(basis)), dtype=np.complex128)
    offset = 0
    for f in rule.factors:
        fb = BasisIndexSet(f.dim, basis.d_max)
        Gf, _ = _node_gram(fb, f.nodes, f.weights, f.center)
        cols = basis.exponents[:, offset:offset + f.dim]
        pos = np.array([fb.position[tuple(int(v) for v in j)] for j in cols])
        G *= Gf[np.ix_(pos, pos)]
        offset += f.dim
    return G


def gram(domain: Domain, basis: BasisIndexSet, rule: QuadratureRule) -> GramSystem:
    """Assemble and factorize the Gram matrix of ``basis`` under ``rule``."""
    if basis.n != domain.dim:
        raise ValueError(f"basis lives in C^{basis.n}, domain in C^{domain.dim}")
    if rule.degree < basis.d_max:
        raise ValueError(f"rule sized for degree {rule.degree}, basis needs {basis.d_max}")
    groups = None
    if rule.kind is RuleKind.TENSOR:
        G = _tensor_gram(basis, rule)
    elif rule.groups is not None:
        G, groups = _node_gram(basis, rule.nodes, rule.weights, rule.center,
                               rule.groups, rule.group_count)
    else:
        G, _ = _node_gram(basis, rule.nodes, rule.weights, rule.center)
    G = _hermitize(G)
    factor = pivoted_cholesky(G)
    if factor.dropped:
        logger.debug("gram d=%d: dropped %d of %d indices (condition %.3g)",
                     basis.d_max, len(factor.dropped), len(basis), factor.condition)
    return GramSystem(domain=domain, basis=basis, center=np.asarray(rule.center), G=G,
                      factor=factor, kind=rule.kind, node_count=rule.node_count,
                      volume=rule.volume, group_grams=groups, seed=rule.seed,
                      candidates=rule.candidates, rule=rule)


# ---------------------------------------------------------------------------
# Cache
# ---------------------------------------------------------------------------

class GramCache:
    """GramSystems stored as versioned .npz files keyed by (domain, d_max, rule kind, seed).

    qmc systems also key on the candidate budget; exact rules store 0 there.
    """

    def __init__(self, directory: str | None = None):
        self.directory = directory or str(defaults.quadrature("cache_dir"))
        self.format_version = int(defaults.quadrature("cache_format_version"))

    def key(self, domain: Domain, d_max: int, kind: RuleKind, seed: int | None,
            candidates: int = 0) -> str:
        text = f"{domain_hash(domain)}:{d_max}:{kind.value}:{seed}:{candidates}"
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:32]

    def path(self, key: str) -> str:
        return os.path.join(self.directory, f"gram-{key}.npz")

    def store(self, gs: GramSystem) -> str:
        os.makedirs(self.directory, exist_ok=True)
        target = self.path(self.key(gs.domain, gs.d_max, gs.kind, gs.seed, gs.candidates))
        arrays = {
            "format_version": np.array(self.format_version),
            "library_version": np.array(__version__),
            "kind": np.array(gs.kind.value),
            "n": np.array(gs.basis.n),
            "d_max": np.array(gs.d_max),
            "seed": np.array(-1 if gs.seed is None else gs.seed),
            "candidates": np.array(gs.candidates),
            "node_count": np.array(gs.node_count),
            "volume": np.array(gs.volume),
            "center": gs.center,
            "G": gs.G,
        }
        if gs.group_grams is not None:
            arrays["group_grams"] = gs.group_grams
        np.savez_compressed(target, **arrays)
        logger.debug("cached gram system at %s", target)
        return target

    def load(self, domain: Domain, d_max: int, kind: RuleKind, seed: int | None,
             candidates: int = 0) -> GramSystem | None:
        target = self.path(self.key(domain, d_max, kind, seed, candidates))
        if not os.path.exists(target):
            return None
        with np.load(target) as data:
            version = int(data["format_version"])
            if version != self.format_version:
                logger.info("ignoring %s: cache format %d, expected %d",
                            target, version, self.format_version)
                return None
            G = np.array(data["G"])
            groups = np.array(data["group_grams"]) if "group_grams" in data.files else None
            stored_seed = int(data["seed"])
            basis = BasisIndexSet(int(data["n"]), int(data["d_max"]))
            G = _hermitize(G)
            return GramSystem(domain=domain, basis=basis, center=np.array(data["center"]), G=G,
                              factor=pivoted_cholesky(G), kind=RuleKind(str(data["kind"])),
                              node_count=int(data["node_count"]), volume=float(data["volume"]),
                              group_grams=groups, seed=None if stored_seed < 0 else stored_seed,
                              candidates=int(data["candidates"]))
