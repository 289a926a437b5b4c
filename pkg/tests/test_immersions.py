import math

import numpy as np
import pytest

from willmore_tori.geometry import oscillation
from willmore_tori.immersions import (
    BUILTINS,
    EXACT_ENERGY,
    ImmersedTorus,
    NotConformalError,
    check_conformal,
    clifford_torus,
    induced_metric,
    inverted_clifford,
    parseval_area_identities,
    read_immersion,
    revolution_angle_parametrization,
    revolution_closed_form,
    revolution_conformal,
    verify_lower_bounds,
    willmore_energy,
    willmore_energy_conformal,
    willmore_energy_revolution,
    willmore_energy_sff,
    write_immersion,
)


def test_clifford_energy():
    assert willmore_energy_conformal(clifford_torus(128)) == pytest.approx(2 * math.pi**2, rel=5e-3)


def test_scale_invariance():
    t = clifford_torus(64)
    scaled = ImmersedTorus.conformal_grid(t.grid, 3.0 * t.F)
    assert willmore_energy(scaled) == pytest.approx(willmore_energy(t), rel=1e-10)


@pytest.mark.parametrize("c, exact", [(math.sqrt(2), 2 * math.pi**2), (2.0, 4 * math.pi**2 / math.sqrt(3))])
def test_revolution_quadrature(c, exact):
    assert willmore_energy_revolution(c, 1.0) == pytest.approx(exact, abs=1e-8)
    assert revolution_closed_form(c) == pytest.approx(exact, abs=1e-12)


def test_revolution_blows_up_near_one():
    assert willmore_energy_revolution(1.0001, 1.0) > 50 * math.pi**2
    with pytest.raises(ValueError, match="self-intersecting"):
        willmore_energy_revolution(1.0, 1.0)
    with pytest.raises(ValueError, match="self-intersecting"):
        ImmersedTorus.revolution(1.0, 2.0)


@pytest.mark.parametrize("c", [1.2, math.sqrt(2), 2.0, 3.5])
def test_conformal_revolution_matches_quadrature(c):
    t = revolution_conformal(c, 1.0, 128)
    assert willmore_energy_conformal(t) == pytest.approx(willmore_energy_revolution(c, 1.0), rel=1e-9)


def test_revolution_moduli():
    assert revolution_conformal(2.0, 1.0, 32).grid.moduli.y == pytest.approx(math.sqrt(3))
    m = induced_metric(revolution_conformal(2.0, 1.0, 64))
    assert oscillation(m) == pytest.approx(math.log(3), abs=1e-3)


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_builtin_energies_and_identities(name):
    t = BUILTINS[name]()
    w = willmore_energy(t)
    assert w == pytest.approx(EXACT_ENERGY[name], rel=1e-8)
    a = parseval_area_identities(t)
    assert max(a) - min(a) <= 1e-6 * min(a)
    assert verify_lower_bounds(t).holds


def test_mean_curvature_identity_at_256():
    for t in (inverted_clifford(256), revolution_conformal(2.0, 1.0, 256)):
        assert willmore_energy_sff(t) == pytest.approx(willmore_energy_conformal(t), rel=5e-3)


def test_angle_parametrization_rejected():
    t = revolution_angle_parametrization(2.0, 1.0)
    with pytest.raises(NotConformalError, match="not conformal"):
        check_conformal(t)
    with pytest.raises(NotConformalError):
        willmore_energy_conformal(t)
    # the second fundamental form route does not need conformality
    assert willmore_energy_sff(t) == pytest.approx(4 * math.pi**2 / math.sqrt(3), rel=1e-8)


def test_tight_and_strict_cases():
    cl = verify_lower_bounds(clifford_torus(128))
    assert dict(cl.bounds)["li_yau_conformal"] == pytest.approx(cl.W, rel=1e-9)
    inv = verify_lower_bounds(inverted_clifford(128))
    assert inv.geometry.osc_u > 1.0
    assert inv.W > dict(inv.bounds).get("q_bound_flat", 0.0)
    rev = verify_lower_bounds(ImmersedTorus.revolution(math.sqrt(2), 1.0))
    assert rev.W >= 2 * math.pi**2 * (1 - 1e-9) and rev.certificate.certified


def test_file_round_trip(tmp_path):
    t = clifford_torus(16)
    path = tmp_path / "F.json"
    write_immersion(t, path)
    u = read_immersion(path)
    np.testing.assert_allclose(u.F, t.F)
    write_immersion(ImmersedTorus.revolution(2.0, 1.0), path)
    assert read_immersion(path).R == 2.0


def test_rejects_low_dimension():
    t = clifford_torus(16)
    with pytest.raises(ValueError, match="at least 3"):
        ImmersedTorus.conformal_grid(t.grid, t.F[:2])
