"""Tests for flat spaces and normal slices."""

import math

import numpy as np
import pytest

from bergman_probe.domains import Ball, Disc, Intersection, Polytope, box
from bergman_probe.errors import NotOnBoundary, ProbeNotFlat
from bergman_probe.flats import (
    flat_space,
    is_flat_direction,
    normal_slice,
    numeric_flat_space,
    require_flat_probe,
)


@pytest.mark.parametrize(
    "name, z0, dim",
    [
        ("unit_disc", [1], 0),
        ("ball2", [1, 0], 0),
        ("bidisc", [1, 0], 1),
        ("bidisc", [1, 1j], 0),
        ("tridisc", [1, 0, 0], 2),
        ("tridisc", [1, 1, 0], 1),
        ("unit_box", [1 + 0.5j], 0),
        ("disc_x_box", [1, 0], 1),
        ("disc_x_box", [0, 1 + 0.5j], 1),
        ("shifted_disc_x_disc", [0, 1], 0),
    ],
)
def test_flat_space_dimension(request, name, z0, dim):
    domain = request.getfixturevalue(name)
    fs = flat_space(domain, z0)
    assert fs.dim == dim
    assert fs.certified


def test_bidisc_flat_space_is_second_coordinate(bidisc):
    fs = flat_space(bidisc, [1, 0])
    assert fs.basis[:, 0] == pytest.approx([0, 1])
    assert fs.contains_direction([0, 1])
    assert fs.contains_direction([0, 1j])
    assert not fs.contains_direction([1, 1])
    assert fs.radius == pytest.approx(0.5)


def test_angle_from_flat_space(bidisc, unit_disc):
    fs = flat_space(bidisc, [1, 0])
    assert fs.angle_from([1, 1]) == pytest.approx(math.pi / 4)
    assert fs.angle_from([0, 2]) == pytest.approx(0.0)
    assert flat_space(unit_disc, [1]).angle_from([1]) == pytest.approx(math.pi / 2)


def test_polytope_flat_space_in_c2():
    square = box([0j, 0j], 1.0)
    fs = flat_space(square, [1, 0])
    assert fs.dim == 1
    assert fs.basis[:, 0] == pytest.approx([0, 1])
    assert fs.radius == pytest.approx(0.5)


def test_intersection_flat_space_takes_the_tighter_radius(bidisc):
    lens = Intersection(bidisc, Ball(np.zeros(2, dtype=complex), 1.2))
    fs = flat_space(lens, [1, 0])
    assert fs.dim == 1
    assert fs.radius == pytest.approx(0.1)


def test_flat_space_requires_a_boundary_point(bidisc):
    with pytest.raises(NotOnBoundary):
        flat_space(bidisc, [0.5, 0])


def _square():
    return box([0j, 0j], 1.0)


def _slanted_square():
    """Square in C^2 cut by Re(z1 + z2) < 1; its flat at (1/2, 1/2) is spanned by (1, -1)."""
    square = _square()
    return Polytope.from_constraints(
        list(zip(square.normals, square.offsets)) + [(np.array([1, 1], dtype=complex), -1.0)]
    )


@pytest.mark.parametrize(
    "make, z0",
    [
        (lambda request: request.getfixturevalue("tridisc"), [1, 0, 0]),
        (lambda request: request.getfixturevalue("unit_box"), [1 + 0.5j]),
        (lambda request: _square(), [1, 0]),
        (lambda request: _slanted_square(), [0.5, 0.5]),
    ],
    ids=["tridisc", "box", "square", "slanted-square"],
)
def test_numeric_flat_space_agrees_with_exact(request, make, z0):
    domain = make(request)
    exact = flat_space(domain, z0)
    numeric = numeric_flat_space(domain, z0)
    assert exact.certified
    assert not numeric.certified
    assert numeric.dim == exact.dim
    for X in exact.basis.T:
        assert numeric.contains_direction(X, 1e-9)
    for X in numeric.basis.T:
        assert exact.contains_direction(X, 1e-9)


def test_non_coordinate_flat_is_complex_linear():
    fs = flat_space(_slanted_square(), [0.5, 0.5])
    assert fs.dim == 1
    assert fs.contains_direction([1, -1])
    assert not fs.contains_direction([1, 0])
    for X in fs.basis.T:
        assert fs.contains_direction(1j * X)
    assert fs.contains_direction([1j, -1j])
    assert is_flat_direction(_slanted_square(), [0.5, 0.5], [1j, -1j])


def test_is_flat_direction(bidisc):
    assert is_flat_direction(bidisc, [1, 0], [0, 1])
    assert not is_flat_direction(bidisc, [1, 0], [1, 0])
    assert not is_flat_direction(bidisc, [1, 0], [1, 1])


def test_normal_slice_of_bidisc_is_a_disc(bidisc):
    ns = normal_slice(bidisc, [1, 0.3])
    assert ns.dim == 1
    assert isinstance(ns.domain, Disc)
    assert ns.domain.radius == pytest.approx(1.0)
    assert ns.embed([0.5]) == pytest.approx([0.5, 0.3])
    assert ns.coordinates([0.5, 0.3]) == pytest.approx([0.5])


def test_normal_slice_at_strongly_convex_point_is_whole_domain(ball2):
    ns = normal_slice(ball2, [1, 0])
    assert ns.dim == 2
    assert ns.domain is ball2


def test_require_flat_probe(bidisc):
    fs = flat_space(bidisc, [1, 0])
    require_flat_probe(fs, [0, 1j])
    with pytest.raises(ProbeNotFlat, match="not in L"):
        require_flat_probe(fs, [1, 1])
