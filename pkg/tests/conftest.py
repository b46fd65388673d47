import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import metricforge as mf


@pytest.fixture(scope="session")
def three_point():
    """The hand-checkable 3-point space: d(p,a)=1, d(p,b)=2, d(a,b)=1."""
    dist = np.array([
        [0.0, 1.0, 2.0],
        [1.0, 0.0, 1.0],
        [2.0, 1.0, 0.0],
    ])
    return mf.FiniteMetricSpace(("p", "a", "b"), dist)


@pytest.fixture(scope="session")
def marked_line():
    """Three collinear points at spacing 1 with the left end marked."""
    dist = np.array([
        [0.0, 1.0, 2.0],
        [1.0, 0.0, 1.0],
        [2.0, 1.0, 0.0],
    ])
    return mf.FiniteMetricSpace(("0", "1", "2"), dist, boundary=frozenset({0}))


@pytest.fixture(scope="session")
def circle_256():
    from scipy.spatial.distance import cdist
    th = 2.0 * np.pi * np.arange(256) / 256
    coords = np.stack([np.cos(th), np.sin(th)], axis=1)
    return mf.FiniteMetricSpace(tuple(f"c{i}" for i in range(256)),
                                cdist(coords, coords), coords=coords)
