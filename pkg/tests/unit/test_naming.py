"""Tests for report naming conventions."""

import numpy as np
import pytest

from bergman_probe.naming import (
    PROJECT,
    Classification,
    ExperimentKind,
    complex_columns,
    flatten_complex,
    vector_label,
)


def test_constants():
    assert PROJECT == "bergman-probe"


def test_experiment_kinds_are_the_cli_choices():
    assert [k.value for k in ExperimentKind] == ["path", "cone", "localization", "peak", "identities"]


def test_classification_values():
    assert Classification.BLOW_UP.value == "blow-up"
    assert Classification.BOUNDED.value == "bounded"


def test_complex_columns_interleave_re_im():
    assert complex_columns("z", 2) == ["z1_re", "z1_im", "z2_re", "z2_im"]


def test_complex_columns_rejects_empty():
    with pytest.raises(ValueError):
        complex_columns("X", 0)


def test_flatten_complex_matches_column_order():
    assert flatten_complex([1 + 2j, -3j]) == [1.0, 2.0, 0.0, -3.0]


def test_vector_label_real_vectors():
    assert vector_label([1, 0]) == "(1,0)"
    assert vector_label([0, 1]) == "(0,1)"


def test_vector_label_folds_negative_zero_and_rounds():
    assert vector_label(np.array([-0.0, 1 / np.sqrt(2)])) == "(0,0.7071)"


def test_vector_label_complex_entries():
    assert vector_label([1j, 1 - 2j]) == "(1j,1-2j)"
