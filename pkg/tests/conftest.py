from __future__ import annotations

import math

import numpy as np
import pytest

from lagosc import hamgen

THREE_HALVES_PI = 1.5 * math.pi


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def rotation():
    """The benchmark path (sin t, cos t) on [0, 3pi/2]."""
    return hamgen.rotation_path(1, interval=(0.0, THREE_HALVES_PI))


@pytest.fixture
def rotation_pair():
    """Decoupled rotations with speeds 1 and 2 on [0, 3pi/2]."""
    return hamgen.rotation_path(2, speeds=[1.0, 2.0], interval=(0.0, THREE_HALVES_PI))
