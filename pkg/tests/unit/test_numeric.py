"""Tests for finite-basis estimates and the Estimator dispatch."""

import math
import os

import numpy as np
import pytest

from bergman_probe.closed_forms import kernel_closed, metric_closed
from bergman_probe.domains import Disc, box
from bergman_probe.gram import GramCache
from bergman_probe.naming import Source
from bergman_probe.numeric import (
    Estimator,
    build_gram,
    convergence_sweep,
    derivative_check,
    kernel_estimate,
    m_estimate,
    metric_estimate,
    sweep_converged,
)


@pytest.fixture(scope="module")
def disc_gram():
    return build_gram(Disc(0j, 1.0), 30)


@pytest.mark.parametrize("r", [0.0, 0.25, 0.5, 0.75])
def test_disc_kernel_matches_closed_form(unit_disc, disc_gram, r):
    closed = kernel_closed(unit_disc, [r]).K
    assert kernel_estimate(disc_gram, [r]) == pytest.approx(closed, rel=1e-5)


@pytest.mark.parametrize("r", [0.9, 0.95, 0.99])
def test_disc_kernel_is_a_lower_bound_near_the_boundary(unit_disc, disc_gram, r):
    assert kernel_estimate(disc_gram, [r]) <= kernel_closed(unit_disc, [r]).K * (1 + 1e-12)


TWENTY_RADII = np.linspace(0.0, 0.95, 20)


def test_disc_numerics_at_twenty_radii(unit_disc, disc_gram):
    """Twenty radii on [0, 0.95] at degree 30.

    The monomials are orthogonal on the disc, so K_30 is the partial sum
    (1/pi) sum_{k<=30} (k+1) r^(2k) at every radius; it meets the closed
    form to 1e-5 while the tail is that small (r <= 0.7).
    """
    k = np.arange(31)
    for r in TWENTY_RADII:
        closed = metric_closed(unit_disc, [r], [1])
        est = metric_estimate(disc_gram, [r], [1])
        partial = float(np.sum((k + 1) * r ** (2 * k)) / math.pi)
        assert est.K == pytest.approx(partial, rel=1e-12)
        assert est.K <= closed.K * (1 + 1e-12)
        if r <= 0.7:
            assert est.K == pytest.approx(closed.K, rel=1e-5)
            assert est.B == pytest.approx(closed.B, rel=1e-5)


def test_disc_metric_at_the_centre(disc_gram):
    assert metric_estimate(disc_gram, [0], [1]).B == pytest.approx(math.sqrt(2), abs=1e-9)


def test_disc_metric_matches_closed_form(unit_disc, disc_gram):
    est = metric_estimate(disc_gram, [0.5], [1])
    closed = metric_closed(unit_disc, [0.5], [1])
    assert est.B == pytest.approx(closed.B, rel=1e-6)
    assert est.M == pytest.approx(closed.M, rel=1e-6)
    assert est.kernel_error == 0.0
    assert est.rank == 31


def test_m_estimate_of_zero_direction(disc_gram):
    assert m_estimate(disc_gram, [0.2], [0]) == 0.0


def test_kernel_grows_with_degree(disc_gram):
    values = [kernel_estimate(disc_gram.truncated(d), [0.8]) for d in (4, 8, 16, 30)]
    assert values == sorted(values)


def test_derivative_check(disc_gram):
    analytic, fd = derivative_check(disc_gram, [0.3 + 0.1j], [1 + 0.5j])
    assert analytic == pytest.approx(fd, rel=1e-4)


def test_bidisc_numeric_matches_product_formula(bidisc):
    gs = build_gram(bidisc, 14)
    z, X = [0.3, 0.2j], [1, 1]
    est = metric_estimate(gs, z, X)
    closed = metric_closed(bidisc, z, X)
    assert est.K == pytest.approx(closed.K, rel=1e-4)
    assert est.B == pytest.approx(closed.B, rel=1e-4)


def test_convergence_sweep(unit_disc):
    sweep = convergence_sweep(unit_disc, [0.5], [1], [10, 20, 30])
    assert sweep.converged
    assert [e.d_max for e in sweep.estimates] == [10, 20, 30]
    Ks = [e.K for e in sweep.estimates]
    assert Ks == sorted(Ks)


def test_convergence_sweep_requires_increasing_degrees(unit_disc):
    with pytest.raises(ValueError, match="increasing"):
        convergence_sweep(unit_disc, [0.5], [1], [20, 10])


def test_sweep_reports_non_convergence_near_the_boundary(unit_disc):
    sweep = convergence_sweep(unit_disc, [0.97], [1], [4, 6])
    assert not sweep.converged
    assert not sweep_converged(*sweep.estimates)


# ---------------------------------------------------------------------------
# Estimator
# ---------------------------------------------------------------------------

@pytest.mark.parametrize(
    "name, source",
    [
        ("unit_disc", Source.CLOSED_FORM),
        ("bidisc", Source.CLOSED_FORM),
        ("disc_x_box", Source.COMPOSED),
        ("unit_box", Source.NUMERIC),
    ],
)
def test_estimator_source(request, name, source):
    assert Estimator(request.getfixturevalue(name)).source is source


def test_numeric_only_overrides_closed_forms(unit_disc):
    est = Estimator(unit_disc, 30, numeric_only=True)
    assert est.source is Source.NUMERIC
    value = est.kernel([0.5])
    assert value.K == pytest.approx(0.565884, abs=1e-6)
    assert value.converged


def test_closed_form_estimates_are_exact(bidisc):
    value = Estimator(bidisc).metric([0.5, 0], [1, 0])
    assert value.B == pytest.approx(1.885618, abs=1e-6)
    assert value.source is Source.CLOSED_FORM
    assert value.d_max is None


def test_box_kernel_lies_between_disc_bounds(unit_box):
    """The unit box sits between the discs of radius 1 and sqrt(2) about 0."""
    value = Estimator(unit_box, 6, candidates_log2=14).kernel([0])
    assert value.source is Source.NUMERIC
    assert 0.25 <= value.K <= 1 / math.pi
    assert value.kernel_error > 0


def test_composed_estimate_uses_disc_factor_exactly(disc_x_box, unit_box):
    composed = Estimator(disc_x_box, 6, candidates_log2=14, seed=7)
    box_only = Estimator(unit_box, 6, candidates_log2=14, seed=7)
    z = [0.5, 0.2j]
    whole = composed.metric(z, [1, 0])
    part = box_only.kernel([0.2j])
    assert whole.source is Source.COMPOSED
    assert whole.K == pytest.approx(kernel_closed(disc_x_box.left, [0.5]).K * part.K)
    assert whole.B == pytest.approx(metric_closed(disc_x_box.left, [0.5], [1]).B)


def test_estimator_cache_reuses_gram_systems(tmp_path, unit_box):
    cache = GramCache(str(tmp_path / "grams"))
    first = Estimator(unit_box, 4, candidates_log2=10, seed=3, cache=cache).kernel([0.1])
    files = os.listdir(tmp_path / "grams")
    assert len(files) == 1
    second = Estimator(unit_box, 4, candidates_log2=10, seed=3, cache=cache).kernel([0.1])
    assert second.K == pytest.approx(first.K, rel=1e-14)
    assert os.listdir(tmp_path / "grams") == files


def test_estimator_shares_its_gram_system(unit_box):
    est = Estimator(unit_box, 4, candidates_log2=10)
    assert est.gram_system() is est.gram_system()


# ---------------------------------------------------------------------------
# Structural properties of the finite-basis estimates
# ---------------------------------------------------------------------------

def test_metric_grows_with_degree(disc_gram):
    Ms = [m_estimate(disc_gram.truncated(d), [0.8], [1]) for d in (4, 8, 16, 30)]
    assert Ms == sorted(Ms)
    assert Ms[0] < Ms[-1]


def test_kernel_decreases_with_the_domain(unit_disc, disc_gram):
    small = build_gram(Disc(0j, 0.8), 30)
    for z in ([0.0], [0.3], [0.5 + 0.4j]):
        assert kernel_estimate(small, z) >= kernel_estimate(disc_gram, z)
    assert metric_estimate(small, [0.3], [1]).B >= metric_estimate(disc_gram, [0.3], [1]).B


def test_kernel_decreases_with_the_box():
    inner = build_gram(box([0j], [0.5]), 6, candidates_log2=12, seed=1)
    outer = build_gram(box([0j], [1.0]), 6, candidates_log2=12, seed=1)
    assert kernel_estimate(inner, [0]) >= 1.0 > 1 / math.pi >= kernel_estimate(outer, [0])
    assert kernel_estimate(inner, [0.2 + 0.1j]) > kernel_estimate(outer, [0.2 + 0.1j])


@pytest.mark.parametrize("c", [2.0, -0.5j, 3 - 4j])
def test_metric_is_homogeneous_in_the_direction(disc_gram, unit_box, c):
    box_gram = build_gram(unit_box, 4, candidates_log2=12, seed=3)
    for gs, z, X in ((disc_gram, [0.4 + 0.1j], np.array([1 + 0.5j])),
                     (box_gram, [0.2 - 0.3j], np.array([1.0 + 0j]))):
        base = metric_estimate(gs, z, X)
        scaled_est = metric_estimate(gs, z, c * X)
        assert scaled_est.B == pytest.approx(abs(c) * base.B, rel=1e-10)
        assert scaled_est.K == pytest.approx(base.K, rel=1e-14)


def test_kernel_is_conjugation_symmetric(disc_gram, bidisc, unit_box):
    z = 0.3 + 0.4j
    assert kernel_estimate(disc_gram, [z]) == pytest.approx(kernel_estimate(disc_gram, [z.conjugate()]), rel=1e-12)
    tensor = build_gram(bidisc, 8)
    w = np.array([0.2 + 0.5j, -0.1 - 0.3j])
    assert kernel_estimate(tensor, w) == pytest.approx(kernel_estimate(tensor, w.conj()), rel=1e-12)
    sampled = build_gram(unit_box, 4, candidates_log2=14, seed=5)
    assert kernel_estimate(sampled, [z]) == pytest.approx(kernel_estimate(sampled, [z.conjugate()]), rel=2e-2)
