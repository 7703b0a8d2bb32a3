"""Test configuration shared across all bergman_probe tests."""

import os
import sys

import numpy as np
import pytest

# Add src/ to import path so `import bergman_probe` works.
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from bergman_probe.domains import Ball, Disc, HalfPlane, Polydisc, Product, box  # noqa: E402

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)


@pytest.fixture
def unit_disc():
    return Disc(0j, 1.0)


@pytest.fixture
def halfplane():
    """{Re z < 0}."""
    return HalfPlane(1 + 0j, 0.0)


@pytest.fixture
def bidisc():
    return Polydisc(np.zeros(2, dtype=complex), np.ones(2))


@pytest.fixture
def tridisc():
    return Polydisc(np.zeros(3, dtype=complex), np.ones(3))


@pytest.fixture
def ball2():
    return Ball(np.zeros(2, dtype=complex), 1.0)


@pytest.fixture
def unit_box():
    """[-1, 1] x [-1, 1] in C."""
    return box([0j], [1.0], [1.0])


@pytest.fixture
def shifted_disc_x_disc():
    return Product(Disc(-1 + 0j, 1.0), Disc(0j, 1.0))


@pytest.fixture
def disc_x_box(unit_box):
    return Product(Disc(0j, 1.0), unit_box)


@pytest.fixture
def fixture_file():
    """fixture_file("disc.json") -> absolute path under fixtures/."""
    return fixture_path
