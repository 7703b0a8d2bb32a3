"""Tests for domain variants, membership, distances and simplification."""

import math

import numpy as np
import pytest

from bergman_probe.domains import (
    AffineImage,
    Ball,
    Disc,
    HalfPlane,
    Intersection,
    Polydisc,
    Polytope,
    Product,
    boundary_distance,
    boundary_mask,
    box,
    classify,
    closure_mask,
    contains,
    directional_radius,
    interior_mask,
    is_lens,
    ray_exit,
    require_boundary,
    scaled,
    simplify,
    support,
    supporting_normal,
)
from bergman_probe.errors import (
    DimensionMismatch,
    EmptyDomain,
    NotInterior,
    NotOnBoundary,
    UnboundedDomain,
)
from bergman_probe.naming import Membership


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def test_disc_rejects_non_positive_radius():
    with pytest.raises(ValueError, match="radius must be positive"):
        Disc(0j, 0.0)


def test_polydisc_needs_one_radius_per_center():
    with pytest.raises(DimensionMismatch):
        Polydisc([0j, 0j], [1.0])


def test_dimension_above_cap_is_rejected():
    with pytest.raises(DimensionMismatch, match="outside the supported range"):
        Ball(np.zeros(4, dtype=complex), 1.0)


def test_halfplane_normalizes_its_normal():
    hp = HalfPlane(2j, 4.0)
    assert hp.normal == pytest.approx(1j)
    assert hp.offset == pytest.approx(2.0)


def test_unbounded_polytope_is_rejected():
    with pytest.raises(UnboundedDomain):
        Polytope.from_constraints([(np.array([1.0 + 0j]), -1.0)])


def test_infeasible_polytope_is_rejected():
    with pytest.raises(EmptyDomain):
        Polytope.from_constraints([
            (np.array([1.0 + 0j]), 1.0),
            (np.array([-1.0 + 0j]), 1.0),
        ])


def test_box_bbox_and_reference(unit_box):
    lo, hi = unit_box.bbox
    assert lo == pytest.approx([-1.0, -1.0])
    assert hi == pytest.approx([1.0, 1.0])
    assert unit_box.reference == pytest.approx([0j], abs=1e-9)
    assert unit_box.inradius == pytest.approx(1.0)


def test_product_bbox_interleaves_re_then_im(shifted_disc_x_disc):
    lo, hi = shifted_disc_x_disc.bbox
    assert lo == pytest.approx([-2.0, -1.0, -1.0, -1.0])
    assert hi == pytest.approx([0.0, 1.0, 1.0, 1.0])


# ---------------------------------------------------------------------------
# Membership
# ---------------------------------------------------------------------------

@pytest.mark.parametrize(
    "z, expected",
    [
        ([0.5], Membership.INTERIOR),
        ([1.0], Membership.BOUNDARY),
        ([1j * (1 + 1e-14)], Membership.BOUNDARY),
        ([1.1], Membership.EXTERIOR),
    ],
    ids=["inside", "on-circle", "within-tolerance", "outside"],
)
def test_disc_contains(unit_disc, z, expected):
    assert contains(unit_disc, z) is expected


def test_classify_is_vectorized(bidisc):
    Z = np.array([[0, 0], [1, 0.5], [1.5, 0]], dtype=complex)
    assert list(classify(bidisc, Z)) == [
        Membership.INTERIOR, Membership.BOUNDARY, Membership.EXTERIOR,
    ]


def test_classify_returns_enum_members_for_exterior_rows(bidisc):
    Z = np.array([[2, 0], [0, 3j], [1.5, 1.5]], dtype=complex)
    verdicts = classify(bidisc, Z)
    assert verdicts.dtype == object
    assert all(v is Membership.EXTERIOR for v in verdicts)
    assert contains(bidisc, Z[0]).value == "exterior"


def test_masks_agree_with_classify(tridisc):
    thetas = 2 * np.pi * np.arange(16) / 16
    ring = np.zeros((16, 3), dtype=complex)
    ring[:, 0] = 1.0
    ring[:, 1] = 0.5 * np.exp(1j * thetas)
    Z = np.vstack([ring, [[0, 0, 0], [1.2, 0, 0]]])
    verdicts = classify(tridisc, Z)
    assert boundary_mask(tridisc, Z).tolist() == [v is Membership.BOUNDARY for v in verdicts]
    assert interior_mask(tridisc, Z).tolist() == [v is Membership.INTERIOR for v in verdicts]
    assert closure_mask(tridisc, Z).tolist() == [v is not Membership.EXTERIOR for v in verdicts]
    assert np.all(boundary_mask(tridisc, ring))


def test_contains_checks_dimension(bidisc):
    with pytest.raises(DimensionMismatch):
        contains(bidisc, [0j])


def test_require_boundary_rejects_interior(unit_disc):
    with pytest.raises(NotOnBoundary, match="interior"):
        require_boundary(unit_disc, [0.5])


# ---------------------------------------------------------------------------
# Distances
# ---------------------------------------------------------------------------

def test_boundary_distance_exact_variants(unit_disc, bidisc, ball2, halfplane, unit_box):
    assert boundary_distance(unit_disc, [0.25]) == pytest.approx(0.75)
    assert boundary_distance(bidisc, [0.5, 0.25j]) == pytest.approx(0.5)
    assert boundary_distance(ball2, [0.3, 0.4]) == pytest.approx(0.5)
    assert boundary_distance(halfplane, [-2 + 5j]) == pytest.approx(2.0)
    assert boundary_distance(unit_box, [0.5 + 0.25j]) == pytest.approx(0.5)


def test_boundary_distance_rejects_non_interior(unit_disc):
    with pytest.raises(NotInterior):
        boundary_distance(unit_disc, [1.0])


def test_boundary_distance_of_product_is_min_over_factors(shifted_disc_x_disc):
    assert boundary_distance(shifted_disc_x_disc, [-1.0, 0.9]) == pytest.approx(0.1)


def test_boundary_distance_through_non_unitary_affine_image():
    """A shear of the bidisc has no exact distance formula and goes through sampling."""
    base = Polydisc(np.zeros(2, dtype=complex), np.ones(2))
    A = np.array([[1.0, 0.5], [0.0, 1.0]], dtype=complex)
    image = AffineImage(base, A, np.zeros(2))
    d = boundary_distance(image, [0j, 0j])
    # nearest boundary point solves |row_k(A^-1) w| = 1 for the longest row
    expected = 1.0 / np.linalg.norm(np.linalg.inv(A), axis=1).max()
    assert d == pytest.approx(expected, rel=1e-4)


@pytest.mark.parametrize(
    "z, X, expected",
    [
        ([0.5, 0], [1, 0], 0.5),
        ([0.5, 0], [0, 1], 1.0),
        ([0.5, 0], [1, 1], 0.5),
        ([0.5, 0.5j], [0, 2], 0.25),
    ],
    ids=["normal", "flat", "diagonal", "scaled-probe"],
)
def test_directional_radius_bidisc(bidisc, z, X, expected):
    assert directional_radius(bidisc, z, X) == pytest.approx(expected)


def test_directional_radius_ball_matches_phase_grid(ball2):
    z, X = [0.5, 0.1j], [0.3 + 0.2j, 1.0]
    exact = directional_radius(ball2, z, X)
    grid = directional_radius(ball2, z, X, exact=False)
    assert grid == pytest.approx(exact, rel=1e-8)


def test_directional_radius_polytope_matches_phase_grid(unit_box):
    exact = directional_radius(unit_box, [0.5 + 0.2j], [1.0])
    grid = directional_radius(unit_box, [0.5 + 0.2j], [1.0], exact=False)
    assert exact == pytest.approx(0.5)
    assert grid == pytest.approx(exact, rel=1e-8)


def test_directional_radius_product_ignores_untouched_factor():
    slab = Product(HalfPlane(1.0, 0.0), Disc(0j, 1.0))
    assert directional_radius(slab, [-5, 0], [0, 1]) == pytest.approx(1.0)
    assert directional_radius(slab, [-5, 0], [1, 0]) == pytest.approx(5.0)


def test_ray_exit_disc(unit_disc):
    assert ray_exit(unit_disc, np.array([0.5 + 0j]), np.array([1.0 + 0j])) == pytest.approx(0.5)


# ---------------------------------------------------------------------------
# Support, scaling and simplification
# ---------------------------------------------------------------------------

def test_support_values(unit_disc, bidisc, ball2, unit_box):
    assert support(unit_disc, [1j]) == pytest.approx(1.0)
    assert support(bidisc, [1, 1]) == pytest.approx(2.0)
    assert support(ball2, [1, 1]) == pytest.approx(math.sqrt(2.0))
    assert support(unit_box, [1 + 1j]) == pytest.approx(2.0)


def test_support_of_halfplane(halfplane):
    assert support(halfplane, [2.0]) == pytest.approx(0.0)
    assert math.isinf(support(halfplane, [-1.0]))


def test_scaled_disc_is_a_disc(unit_disc):
    small = scaled(unit_disc, 2.0)
    assert isinstance(small, Disc)
    assert small.radius == pytest.approx(0.5)


def test_scaled_box_stays_a_polytope(unit_box):
    big = scaled(unit_box, 0.5)
    assert isinstance(big, Polytope)
    assert big.bbox[1] == pytest.approx([2.0, 2.0])


def test_simplify_affine_ball_with_unitary_map(ball2):
    U = np.array([[0, 1j], [1, 0]], dtype=complex)
    image = simplify(AffineImage(ball2, 3.0 * U, np.array([1.0, 0.0])))
    assert isinstance(image, Ball)
    assert image.radius == pytest.approx(3.0)
    assert image.center == pytest.approx([1.0, 0.0])


def test_simplify_keeps_lens_and_drops_containing_halfplane(unit_disc):
    lens = simplify(Intersection(unit_disc, HalfPlane(-1.0, -0.5)))
    assert is_lens(lens)
    whole = simplify(Intersection(unit_disc, HalfPlane(1.0, 2.0)))
    assert isinstance(whole, Disc)


def test_simplify_rejects_disjoint_lens(unit_disc):
    with pytest.raises(EmptyDomain):
        simplify(Intersection(unit_disc, HalfPlane(1.0, -2.0)))


def test_simplify_concentric_polydiscs(bidisc):
    inner = Polydisc(np.zeros(2, dtype=complex), [2.0, 0.5])
    both = simplify(Intersection(bidisc, inner))
    assert isinstance(both, Polydisc)
    assert both.radii == pytest.approx([1.0, 0.5])


def test_box_intersection_merges_constraints(unit_box):
    merged = simplify(Intersection(unit_box, box([0.5 + 0j], 1.0)))
    assert isinstance(merged, Polytope)
    lo, hi = merged.bbox
    assert lo == pytest.approx([-0.5, -1.0])
    assert hi == pytest.approx([1.0, 1.0])


# ---------------------------------------------------------------------------
# Supporting normals
# ---------------------------------------------------------------------------

@pytest.mark.parametrize(
    "name, z0, expected",
    [
        ("unit_disc", [1j], [1j]),
        ("bidisc", [1, 0], [1, 0]),
        ("ball2", [0.6, 0.8j], [0.6, 0.8j]),
        ("unit_box", [1 + 0.5j], [1]),
        ("shifted_disc_x_disc", [-1, 1j], [0, 1j]),
    ],
)
def test_supporting_normal(request, name, z0, expected):
    domain = request.getfixturevalue(name)
    assert supporting_normal(domain, z0) == pytest.approx(np.array(expected, dtype=complex))


def test_supporting_normal_of_affine_image():
    image = AffineImage(Polydisc([0j, 0j], [1.0, 1.0]), np.diag([2.0, 1.0]).astype(complex), [0, 0])
    nu = supporting_normal(image, [2.0, 0.0])
    assert nu == pytest.approx([1.0, 0.0])
