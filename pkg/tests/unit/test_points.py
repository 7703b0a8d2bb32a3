"""Tests for point and direction helpers."""

import numpy as np
import pytest

from bergman_probe.errors import DimensionMismatch, ZeroDirection
from bergman_probe.points import as_direction, as_point, from_real, hermitian, to_real, unit


def test_as_point_is_read_only_complex():
    z = as_point([1, 2j])
    assert z.dtype == np.complex128
    with pytest.raises(ValueError):
        z[0] = 0


def test_as_point_checks_dimension():
    with pytest.raises(DimensionMismatch):
        as_point([1, 2], 3)


def test_as_point_rejects_non_finite():
    with pytest.raises(ValueError, match="non-finite"):
        as_point([np.nan])


def test_as_direction_rejects_zero():
    with pytest.raises(ZeroDirection):
        as_direction([0, 0])


def test_hermitian_conjugates_first_argument():
    assert hermitian([1j], [1j]) == pytest.approx(1.0)
    assert hermitian([1], [1j]) == pytest.approx(1j)


def test_unit_normalizes():
    assert np.linalg.norm(unit([3, 4j])) == pytest.approx(1.0)


def test_real_picture_is_re_then_im():
    z = np.array([1 + 2j, 3 - 4j])
    assert to_real(z).tolist() == [1.0, 3.0, 2.0, -4.0]
    assert np.array_equal(from_real(to_real(z)), z)
