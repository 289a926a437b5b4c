import math

import numpy as np
import pytest

from willmore_tori.fields import TorusGrid
from willmore_tori.geometry import ConformalTorusMetric
from willmore_tori.moduli import ModuliPoint


@pytest.fixture
def square_grid():
    return TorusGrid(ModuliPoint(0.0, 1.0), 64, 64)


def cosine_metric(eps=0.2, moduli=ModuliPoint(0.0, 1.0), n=64):
    grid = TorusGrid(moduli, n, n)
    return ConformalTorusMetric.from_function(grid, lambda w1, w2: eps * np.cos(2 * math.pi * w1 / moduli.scale))
