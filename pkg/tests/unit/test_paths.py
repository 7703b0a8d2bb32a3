"""Tests for approach paths and cone grids."""

import numpy as np
import pytest

from bergman_probe.errors import NotInNormalSlice, PathExitError
from bergman_probe.flats import flat_space
from bergman_probe.paths import approach_path, cone_samples, geometric_grid


def test_geometric_grid():
    assert geometric_grid(2.0, 3) == [0.5, 0.25, 0.125]


@pytest.mark.parametrize("base, count", [(1.0, 3), (2.0, 0)], ids=["base", "count"])
def test_geometric_grid_rejects_bad_arguments(base, count):
    with pytest.raises(ValueError):
        geometric_grid(base, count)


def test_approach_path_points(bidisc):
    points = approach_path(bidisc, [1, 0], [-1, 0], [0.5, 0.25])
    assert points[0] == pytest.approx([0.5, 0])
    assert points[1] == pytest.approx([0.75, 0])


def test_approach_path_requires_decreasing_grid(bidisc):
    with pytest.raises(ValueError, match="strictly decreasing"):
        approach_path(bidisc, [1, 0], [-1, 0], [0.25, 0.5])


def test_approach_path_rejects_outward_direction(bidisc):
    with pytest.raises(PathExitError, match="leaves the domain"):
        approach_path(bidisc, [1, 0], [1, 0], [0.5])


def test_approach_path_rejects_tangent_direction(unit_disc):
    """Tangent lines to a strictly convex boundary stay outside."""
    with pytest.raises(PathExitError):
        approach_path(unit_disc, [1], [1j], [0.1])


def test_cone_samples_are_ordered_by_anchor_then_t(bidisc):
    points = cone_samples(bidisc, [1, 0], [[0, 0], [0.5j, 0]], [1.0, 0.5])
    expected = [[0, 0], [0.5, 0], [0.5j, 0], [0.5 + 0.25j, 0]]
    assert np.array(points) == pytest.approx(np.array(expected, dtype=complex))


def test_cone_samples_reject_t_above_one(bidisc):
    with pytest.raises(ValueError, match=r"\(0, 1\]"):
        cone_samples(bidisc, [1, 0], [[0, 0]], [2.0])


def test_cone_samples_reject_anchor_outside(bidisc):
    with pytest.raises(PathExitError, match="anchor set"):
        cone_samples(bidisc, [1, 0], [[-2.5, 0]], [1.0])


@pytest.mark.parametrize("anchor", [[0, 0.5], [0.2, 0.1j]], ids=["flat-offset", "mixed"])
def test_cone_samples_reject_anchor_off_the_normal_slice(bidisc, anchor):
    with pytest.raises(NotInNormalSlice, match="along L"):
        cone_samples(bidisc, [1, 0], [[0, 0], anchor], [1.0])


def test_cone_samples_accept_a_given_flat_space(bidisc):
    fs = flat_space(bidisc, [1, 0])
    points = cone_samples(bidisc, [1, 0], [[-0.5, 0]], [0.5], flat=fs)
    assert points[0] == pytest.approx([0.25, 0])


def test_cone_samples_need_anchors(bidisc):
    with pytest.raises(ValueError, match="at least one anchor"):
        cone_samples(bidisc, [1, 0], [], [1.0])
