import numpy as np
import pytest

from boostmot.geometry import BBox


def random_boxes(rng, n, span=500.0, max_size=80.0, min_size=1.0):
    """(n, 4) tlwh boxes with positive sizes."""
    xy = rng.uniform(0.0, span, size=(n, 2))
    wh = rng.uniform(min_size, max_size, size=(n, 2))
    return np.hstack([xy, wh])


def random_bbox(rng, **kwargs):
    arr = random_boxes(rng, 1, **kwargs)[0]
    return BBox(*arr)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
