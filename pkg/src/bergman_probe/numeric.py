"""Finite-basis estimates of K, M and B from a GramSystem.

With b the vector of basis monomials at z, u the vector of their
directional derivatives along X, and G = L L^H on the retained indices:

    K_N = |L^-1 b|^2
    M_N^2 = |L^-1 u|^2 - |<L^-1 b, L^-1 u>|^2 / K_N
    B_N = M_N / sqrt(K_N)

These are the exact suprema over the span of the basis, hence lower
bounds for the true K and M up to quadrature error. For qmc Gram systems
the Monte-Carlo error of K and B comes from first-order perturbation by
each group's sub-Gram.

``Estimator`` is the entry point the harness and CLI use: it returns
closed forms where they exist, composes product factors, and falls back
to the numeric engine with a two-degree convergence check otherwise.
"""

from __future__ import annotations

import logging
import math
import threading
from dataclasses import dataclass, replace

import numpy as np

from bergman_probe import defaults
from bergman_probe.closed_forms import has_closed_form, kernel_closed, metric_closed
from bergman_probe.domains import Domain, Product, require_interior, scale, simplify
from bergman_probe.gram import GramCache, GramSystem, gram
from bergman_probe.naming import Source
from bergman_probe.points import as_point
from bergman_probe.quadrature import BasisIndexSet, RuleKind, build_rule, rule_kind

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BergmanEstimate:
    K: float
    M: float
    B: float
    d_max: int | None = None
    rank: int | None = None
    condition: float | None = None
    dropped: int = 0
    kernel_error: float = 0.0
    metric_error: float = 0.0
    source: Source = Source.NUMERIC
    converged: bool = True

    @property
    def K_rel_error(self) -> float:
        return self.kernel_error / self.K if self.K else math.inf

    @property
    def B_rel_error(self) -> float:
        return self.metric_error / self.B if self.B else 0.0


def _vectors(gs: GramSystem, z, X=None):
    point = require_interior(gs.domain, z)
    b = gs.basis.evaluate(point[None, :], gs.center)[0]
    if X is None:
        return point, b, None
    u = gs.basis.derivative(point, as_point(X, gs.domain.dim), gs.center)
    return point, b, u


def kernel_estimate(gs: GramSystem, z) -> float:
    """K_N(z) = b* G^-1 b over the retained basis."""
    _, b, _ = _vectors(gs, z)
    y = gs.factor.whiten(b)
    return float(np.vdot(y, y).real)


def _m_squared(yb, yu) -> float:
    K = float(np.vdot(yb, yb).real)
    value = float(np.vdot(yu, yu).real) - abs(np.vdot(yb, yu)) ** 2 / K
    return max(value, 0.0)


def m_estimate(gs: GramSystem, z, X) -> float:
    """sup |d_X f(z)| over unit-norm f in the span with f(z) = 0."""
    if not np.any(np.asarray(X)):
        require_interior(gs.domain, z)
        return 0.0
    _, b, u = _vectors(gs, z, X)
    return math.sqrt(_m_squared(gs.factor.whiten(b), gs.factor.whiten(u)))


def _qmc_errors(gs: GramSystem, b, u) -> tuple[float, float]:
    """Monte-Carlo standard errors of K and B from first-order group perturbations."""
    if gs.group_grams is None:
        return 0.0, 0.0
    x = gs.factor.solve(b)
    K = float(np.vdot(b, x).real)
    groups = gs.group_grams.shape[0]
    dK = np.empty(groups)
    dB_rel = np.zeros(groups)
    p = gs.factor.solve(u) if u is not None else None
    if p is not None:
        c = complex(np.vdot(x, u))
        M2 = max(float(np.vdot(u, p).real) - abs(c) ** 2 / K, 1e-300)
    for g in range(groups):
        dG = groups * gs.group_grams[g] - gs.G
        dK[g] = -float(np.vdot(x, dG @ x).real)
        if p is None:
            continue
        dc = -complex(np.vdot(x, dG @ p))
        dM2 = (-float(np.vdot(p, dG @ p).real)
               - (2 * (np.conj(c) * dc).real * K - abs(c) ** 2 * dK[g]) / K ** 2)
        dB_rel[g] = 0.5 * dM2 / M2 - 0.5 * dK[g] / K
    k_err = float(dK.std(ddof=1) / math.sqrt(groups))
    b_err = float(dB_rel.std(ddof=1) / math.sqrt(groups)) if p is not None else 0.0
    return k_err, b_err


def metric_estimate(gs: GramSystem, z, X) -> BergmanEstimate:
    """K_N, M_N and B_N = M_N / sqrt(K_N) with conditioning and quadrature diagnostics."""
    _, b, u = _vectors(gs, z, X)
    yb = gs.factor.whiten(b)
    K = float(np.vdot(yb, yb).real)
    M = math.sqrt(_m_squared(yb, gs.factor.whiten(u))) if np.any(u) else 0.0
    B = M / math.sqrt(K)
    k_err, b_rel = _qmc_errors(gs, b, u if np.any(u) else None)
    return BergmanEstimate(K=K, M=M, B=B, d_max=gs.d_max, rank=gs.rank, condition=gs.condition,
                           dropped=len(gs.dropped), kernel_error=k_err, metric_error=b_rel * B)


def derivative_check(gs: GramSystem, z, X, step: float | None = None) -> tuple[float, float]:
    """(analytic, finite-difference) values of d/ds K_N(z + s X) at s = 0."""
    point, b, u = _vectors(gs, z, X)
    analytic = 2.0 * float(np.vdot(gs.factor.whiten(b), gs.factor.whiten(u)).real)
    h = step if step is not None else float(defaults.numeric("fd_step_scale")) * scale(gs.domain)
    x = as_point(X, gs.domain.dim)
    plus = kernel_estimate(gs, point + h * x)
    minus = kernel_estimate(gs, point - h * x)
    return analytic, (plus - minus) / (2 * h)


def build_gram(domain: Domain, d_max: int, *, candidates_log2: int | None = None,
               seed: int | None = None) -> GramSystem:
    basis = BasisIndexSet(domain.dim, d_max)
    rule = build_rule(domain, d_max, candidates_log2=candidates_log2, seed=seed)
    return gram(domain, basis, rule)


@dataclass(frozen=True)
class Sweep:
    degrees: tuple[int, ...]
    estimates: tuple[BergmanEstimate, ...]
    converged: bool


def _agree(a: float, b: float, rtol: float) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b), 1e-300)


def sweep_converged(coarse: BergmanEstimate, fine: BergmanEstimate) -> bool:
    """Last two K within kernel_rtol and last two B within metric_rtol."""
    return (_agree(coarse.K, fine.K, float(defaults.numeric("kernel_rtol")))
            and _agree(coarse.B, fine.B, float(defaults.numeric("metric_rtol"))))


def convergence_sweep(domain: Domain, z, X, d_list, *, gs: GramSystem | None = None,
                      candidates_log2: int | None = None, seed: int | None = None) -> Sweep:
    """Estimates at each degree of an increasing list from one Gram system's principal blocks."""
    degrees = tuple(int(d) for d in d_list)
    if not degrees or any(b <= a for a, b in zip(degrees, degrees[1:])):
        raise ValueError(f"degree list must be increasing, got {degrees!r}")
    top = gs if gs is not None else build_gram(domain, degrees[-1],
                                                candidates_log2=candidates_log2, seed=seed)
    estimates = tuple(metric_estimate(top.truncated(d), z, X) for d in degrees)
    converged = len(estimates) >= 2 and sweep_converged(estimates[-2], estimates[-1])
    return Sweep(degrees=degrees, estimates=estimates, converged=converged)


class Estimator:
    """K and B at points of one domain, by the best available route.

    Closed forms first; then products with at least one factor lacking a
    closed form are composed factor-wise (K multiplies, B^2 adds); anything
    else goes to the numeric engine at ``d_max`` with a convergence check
    against ``d_max - sweep_step``. The Gram system is built on first use
    and shared by every later call (including from worker threads); with a
    ``cache`` it is read from and written to disk.
    """

    def __init__(self, domain: Domain, d_max: int | None = None, *, seed: int | None = None,
                 candidates_log2: int | None = None, numeric_only: bool = False,
                 cache: GramCache | None = None):
        self.domain = domain
        self.reduced = simplify(domain)
        self._explicit_degree = d_max is not None
        self.d_max = int(d_max if d_max is not None else defaults.degree_cap(domain.dim))
        self.seed = seed
        self.candidates_log2 = candidates_log2
        self.numeric_only = numeric_only
        self.cache = cache
        self._lock = threading.Lock()
        self._gs: GramSystem | None = None
        self._factors: tuple[Estimator, Estimator] | None = None
        if not numeric_only and isinstance(self.reduced, Product) and not has_closed_form(self.reduced):
            self._factors = (
                Estimator(self.reduced.left, self._factor_degree(self.reduced.left), seed=seed,
                          candidates_log2=candidates_log2, cache=cache),
                Estimator(self.reduced.right, self._factor_degree(self.reduced.right), seed=seed,
                          candidates_log2=candidates_log2, cache=cache),
            )
        if numeric_only:
            self._source = Source.NUMERIC
        elif has_closed_form(self.reduced):
            self._source = Source.CLOSED_FORM
        elif self._factors is not None:
            self._source = Source.COMPOSED
        else:
            self._source = Source.NUMERIC

    def _factor_degree(self, sub: Domain) -> int:
        cap = defaults.degree_cap(sub.dim)
        return min(self.d_max, cap) if self._explicit_degree else cap

    @property
    def source(self) -> Source:
        return self._source

    def gram_system(self) -> GramSystem:
        with self._lock:
            if self._gs is None:
                self._gs = self._load_or_build()
            return self._gs

    def _load_or_build(self) -> GramSystem:
        kind = rule_kind(self.reduced)
        if kind is RuleKind.QMC:
            seed = int(self.seed if self.seed is not None else defaults.cli("seed"))
            candidates = 2 ** int(self.candidates_log2 if self.candidates_log2 is not None
                                  else defaults.quadrature("qmc_candidates_log2"))
        else:
            seed, candidates = None, 0
        if self.cache is not None:
            cached = self.cache.load(self.reduced, self.d_max, kind, seed, candidates)
            if cached is not None:
                logger.info("gram system for d_max=%d loaded from %s", self.d_max, self.cache.directory)
                return cached
        gs = build_gram(self.reduced, self.d_max, candidates_log2=self.candidates_log2, seed=self.seed)
        if self.cache is not None:
            self.cache.store(gs)
        return gs

    def _numeric(self, z, X) -> BergmanEstimate:
        gs = self.gram_system()
        fine = metric_estimate(gs, z, X)
        coarse_degree = self.d_max - int(defaults.numeric("sweep_step"))
        if coarse_degree < 0:
            return replace(fine, converged=False)
        coarse = metric_estimate(gs.truncated(coarse_degree), z, X)
        return replace(fine, converged=sweep_converged(coarse, fine))

    def metric(self, z, X) -> BergmanEstimate:
        point = require_interior(self.domain, z)
        direction = as_point(X, self.domain.dim)
        source = self.source
        if source is Source.CLOSED_FORM:
            mv = metric_closed(self.reduced, point, direction)
            return BergmanEstimate(K=mv.K, M=mv.M, B=mv.B, source=Source.CLOSED_FORM)
        if source is Source.COMPOSED:
            k = self.reduced.split
            left = self._factors[0].metric(point[:k], direction[:k])
            right = self._factors[1].metric(point[k:], direction[k:])
            K = left.K * right.K
            B = math.hypot(left.B, right.B)
            k_rel = math.hypot(left.K_rel_error, right.K_rel_error)
            b_err = (left.B * left.metric_error + right.B * right.metric_error) / B if B else 0.0
            return BergmanEstimate(
                K=K, M=B * math.sqrt(K), B=B, source=Source.COMPOSED,
                converged=left.converged and right.converged,
                kernel_error=k_rel * K, metric_error=b_err,
                d_max=max(e.d_max or 0 for e in (left, right)) or None,
            )
        return self._numeric(point, direction)

    def kernel(self, z) -> BergmanEstimate:
        point = require_interior(self.domain, z)
        if self.source is Source.CLOSED_FORM:
            kv = kernel_closed(self.reduced, point)
            return BergmanEstimate(K=kv.K, M=0.0, B=0.0, source=Source.CLOSED_FORM)
        return self.metric(point, np.zeros(self.domain.dim, dtype=complex))
