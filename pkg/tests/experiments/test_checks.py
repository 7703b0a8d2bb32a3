"""Caratheodory floor and cone upper bound."""

import math

import numpy as np
import pytest

from bergman_probe.errors import NotInNormalSlice, ProbeNotFlat
from bergman_probe.experiments.checks import (
    caratheodory_check,
    caratheodory_for_path,
    cone_bound_check,
)
from bergman_probe.experiments.path import run_path_experiment
from bergman_probe.numeric import BergmanEstimate
from bergman_probe.paths import geometric_grid

CONE_GRID = [1.0] + geometric_grid(2.0, 12)


class TestCaratheodory:
    def test_bidisc_path_clears_the_floor(self, bidisc):
        exp = run_path_experiment(bidisc, [1, 0], [-1, 0], geometric_grid(2.0, 12),
                                  [[1, 0], [0, 1], [1, 1j]])
        result = caratheodory_for_path(exp)
        assert result.passed
        assert result.margins.shape == (36,)
        assert result.worst > 0

    def test_violation_is_reported(self, unit_disc):
        too_small = BergmanEstimate(K=1.0, M=0.01, B=0.01)
        result = caratheodory_check(unit_disc, [(np.array([0.5]), np.array([1.0]))], [too_small])
        assert not result.passed
        assert result.worst == pytest.approx(0.01 - 1.0)

    def test_unconverged_samples_are_skipped(self, unit_disc):
        stale = BergmanEstimate(K=1.0, M=0.0, B=0.0, converged=False)
        result = caratheodory_check(unit_disc, [(np.array([0.5]), np.array([1.0]))], [stale])
        assert result.passed
        assert math.isnan(result.margins[0])
        assert result.worst == math.inf

    def test_quadrature_error_widens_tolerance(self, unit_disc):
        noisy = BergmanEstimate(K=1.0, M=0.99, B=0.99, metric_error=0.05)
        result = caratheodory_check(unit_disc, [(np.array([0.5]), np.array([1.0]))], [noisy])
        assert result.passed
        assert result.tolerances[0] == pytest.approx(0.05 + 1e-6)

    def test_infinite_radius_has_zero_floor(self, halfplane):
        est = BergmanEstimate(K=1.0, M=0.0, B=0.0)
        result = caratheodory_check(halfplane, [(np.array([-1.0]), np.array([1j]))], [est],
                                    radii=[math.inf])
        assert result.passed

    def test_length_mismatch(self, unit_disc):
        with pytest.raises(ValueError, match="samples but"):
            caratheodory_check(unit_disc, [(np.array([0.5]), np.array([1.0]))], [])


class TestConeBound:
    def test_bidisc_flat_direction(self, bidisc):
        bound = cone_bound_check(bidisc, [1, 0], [[0, 0], [0.5j, 0], [-0.5, 0]], CONE_GRID,
                                 [[0, 1], [0, 1j]])
        assert bound.values.shape == (3, 13, 2)
        assert bound.c_emp == pytest.approx(math.sqrt(2), abs=1e-3)
        assert bound.ratio < 1.05
        assert bound.passed

    def test_tridisc_flat_plane(self, tridisc):
        bound = cone_bound_check(tridisc, [1, 0, 0], [[0, 0, 0], [-0.5, 0, 0], [0.3j, 0, 0]], CONE_GRID,
                                 [[0, 1, 0], [0, 0, 1], [0, 1, 1]])
        assert bound.c_emp == pytest.approx(math.sqrt(2), rel=1e-6)
        assert bound.ratio < 1.05
        assert bound.passed

    def test_anchor_off_the_normal_slice(self, tridisc):
        with pytest.raises(NotInNormalSlice, match="E\\(z0\\)"):
            cone_bound_check(tridisc, [1, 0, 0], [[0, 0, 0], [0, 0.3, 0]], CONE_GRID, [[0, 1, 0]])

    def test_probe_outside_flat_space(self, bidisc):
        with pytest.raises(ProbeNotFlat):
            cone_bound_check(bidisc, [1, 0], [[0, 0]], CONE_GRID, [[1, 0]])

    def test_needs_probes(self, bidisc):
        with pytest.raises(ValueError, match="at least one probe"):
            cone_bound_check(bidisc, [1, 0], [[0, 0]], CONE_GRID, [])
