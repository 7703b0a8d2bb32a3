"""Exact identities reproduced by the estimators."""

import numpy as np
import pytest

from bergman_probe.domains import interior_mask
from bergman_probe.experiments.identities import (
    affine_checks,
    halfplane_checks,
    interior_samples,
    limit_checks,
    product_checks,
    run_identities,
    scaling_checks,
)


def test_disc_default_suites(unit_disc):
    report = run_identities(unit_disc, 2.0)
    assert report.passed
    assert report.skipped == ()
    assert {c.identity for c in report.checks} == {"halfplane", "product", "scaling", "affine"}
    assert report.max_rel_error < 1e-12


def test_halfplane_checks_are_exact():
    checks = halfplane_checks(1e-12)
    assert len(checks) == 6
    assert all(c.passed for c in checks)


def test_limit_converges_at_rate_one_over_radius():
    checks = limit_checks()
    assert all(c.passed for c in checks)
    errors = [c.rel_error for c in checks]
    assert errors[0] > errors[1] > errors[2]


def test_limit_suite_is_opt_in(unit_disc):
    report = run_identities(unit_disc, suites=("limit",))
    assert [c.identity for c in report.checks] == ["limit"] * 3


def test_unknown_suite(unit_disc):
    with pytest.raises(ValueError, match="unknown identity suites"):
        run_identities(unit_disc, suites=("halfplane", "modular"))


def test_bidisc_product_uses_its_factors(bidisc):
    checks = product_checks(bidisc, 200, seed=3, rtol=1e-12)
    assert len(checks) == 400
    assert all(c.passed for c in checks)


def test_ball_product_would_exceed_dimension_cap(ball2):
    report = run_identities(ball2, suites=("product", "affine"), points=4)
    assert report.skipped == ("product",)
    assert report.passed


def test_halfplane_domain_skips_bounded_suites(halfplane):
    report = run_identities(halfplane, suites=("product", "scaling", "affine"))
    assert set(report.skipped) == {"product", "affine"}
    assert [c.identity for c in report.checks] == ["scaling"]
    assert report.passed


def test_scaling_rejects_shrinking(unit_disc):
    with pytest.raises(ValueError, match="alpha must be >= 1"):
        scaling_checks(unit_disc, 0.5, 1, seed=0, rtol=1e-12)


def test_affine_checks_on_ball(ball2):
    checks = affine_checks(ball2, 6, seed=1, rtol=1e-10)
    assert len(checks) == 12
    assert all(c.passed for c in checks)


def test_interior_samples(ball2):
    Z = interior_samples(ball2, 100, seed=5)
    assert Z.shape == (100, 2)
    assert np.all(interior_mask(ball2, Z))


@pytest.mark.slow
def test_box_scaling_through_numeric_engine(unit_box):
    checks = scaling_checks(unit_box, 2.0, 3, seed=11, rtol=1e-12, d_max=7, candidates_log2=12)
    assert len(checks) == 3
    assert all(c.passed for c in checks)
