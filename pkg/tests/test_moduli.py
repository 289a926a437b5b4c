import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from willmore_tori.moduli import (
    DegenerateLatticeError,
    Lattice,
    ModuliPoint,
    ModuliRegion,
    classify_region,
    flat_V,
    flat_systole,
    reduce,
)


def test_reduce_identity_square():
    m = reduce(Lattice((1, 0), (0, 1)))
    assert (m.x, m.y, m.scale) == pytest.approx((0.0, 1.0, 1.0))


def test_reduce_hexagonal_from_skewed_basis():
    m = reduce(Lattice((1, 0), (1.5, math.sqrt(3) / 2)))
    assert m.x == pytest.approx(0.5)
    assert m.y == pytest.approx(math.sqrt(3) / 2)


def test_reduce_scales_and_rotates():
    c, s = math.cos(0.7), math.sin(0.7)
    m = reduce(Lattice((3 * c, 3 * s), (3 * (0.2 * c - 2 * s), 3 * (0.2 * s + 2 * c))))
    assert (m.x, m.y, m.scale) == pytest.approx((0.2, 2.0, 3.0))


def test_reduce_swaps_long_first_generator():
    m = reduce(Lattice((0, 2), (1, 0)))
    assert (m.x, m.y, m.scale) == pytest.approx((0.0, 2.0, 1.0))


def test_degenerate_lattice_rejected():
    with pytest.raises(DegenerateLatticeError, match="degenerate"):
        reduce(Lattice((1, 0), (2, 0)))


@settings(max_examples=200, deadline=None)
@given(
    st.floats(0.2, 5), st.floats(-3, 3), st.floats(0.2, 5), st.floats(0, 2 * math.pi),
    st.integers(-3, 3), st.integers(-3, 3),
)
def test_reduce_lands_in_fundamental_domain_and_is_invariant(a, b, c, angle, k, l):
    v1 = np.array([a, 0.0])
    v2 = np.array([b, c])
    rot = np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])
    m = reduce(Lattice(tuple(rot @ v1), tuple(rot @ v2)))
    assert -1e-12 <= m.x <= 0.5 + 1e-12
    assert m.x**2 + m.y**2 >= 1 - 1e-9
    # a change of basis by an element of GL(2, Z) gives the same point
    w2 = v2 + k * v1
    w1 = v1 + l * w2
    m2 = reduce(Lattice(tuple(w1), tuple(w2)))
    assert (m2.x, m2.y, m2.scale) == pytest.approx((m.x, m.y, m.scale), rel=1e-7, abs=1e-7)
    # area is preserved
    assert m.flat_area == pytest.approx(abs(a * c), rel=1e-9)


def test_moduli_point_validation():
    with pytest.raises(ValueError):
        ModuliPoint(0.1, 0.5)
    with pytest.raises(ValueError):
        ModuliPoint(0.7, 1.0)
    with pytest.raises(ValueError):
        ModuliPoint(0.0, 1.0, scale=0.0)
    with pytest.raises(ValueError):
        ModuliPoint(float("nan"), 1.0)


def test_flat_quantities():
    m = ModuliPoint(0.3, 2.0, 1.5)
    assert flat_systole(m) == 1.5
    assert flat_V(m) == pytest.approx(2.0)
    assert flat_V(ModuliPoint(0.5, math.sqrt(3) / 2)) >= math.sqrt(3) / 2 - 1e-12


@pytest.mark.parametrize(
    "x, y, region",
    [
        (0.5, 0.9, ModuliRegion.LI_YAU),
        (0.0, 1.0, ModuliRegion.LI_YAU),
        (0.3, 1.1, ModuliRegion.MONTIEL_ROS),
        (0.5, 1.5, ModuliRegion.MONTIEL_ROS),
        (0.0, 2.0, ModuliRegion.GENERAL),
        (0.0, 1.1, ModuliRegion.GENERAL),
    ],
)
def test_regions(x, y, region):
    assert classify_region(ModuliPoint(x, y)) is region


def test_round_trip_dict():
    m = ModuliPoint(0.25, 1.5, 2.0)
    assert ModuliPoint.from_dict(m.to_dict()) == m
