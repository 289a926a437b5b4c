import math

import numpy as np
import pytest

from willmore_tori.bounds import disk_max_bound, disk_min_bound
from willmore_tori.fields import dft
from willmore_tori.generators import (
    ConeSpec,
    RadialProfile,
    cone_curvature_integral,
    cone_osc_lower_bound,
    disk_test_field,
    generate_cone,
    generate_cylinder,
    oscillation_family_specs,
    random_trig_metric,
    smooth_step,
)
from willmore_tori.geometry import curvature_functionals, oscillation, report, systole
from willmore_tori.moduli import ModuliPoint


def test_smooth_step_symmetry():
    t = np.linspace(-0.5, 1.5, 101)
    np.testing.assert_allclose(smooth_step(t) + smooth_step(1 - t), 1.0, atol=1e-15)
    assert smooth_step(0.0) == 0 and smooth_step(1.0) == 1


def test_profile_oscillation_and_support():
    prof = RadialProfile(c0=0.5, w=0.4, L=1.3, t_b=math.log(0.1))
    r = np.array([1e-6, prof.plateau_radius * 0.99, prof.support_radius * 1.01])
    u = prof(r)
    assert u[0] == pytest.approx(prof.osc)
    assert u[1] == pytest.approx(prof.osc)
    assert u[2] == 0
    # monotone decreasing in r
    rr = np.geomspace(1e-4, 0.3, 500)
    assert np.all(np.diff(prof(rr)) <= 1e-15)


def test_cone_spec_validation():
    with pytest.raises(ValueError, match="rho"):
        ConeSpec(R=0.1, H=1.0, beta=math.pi / 2)
    spec = ConeSpec(R=0.2, H=0.1, beta=math.pi / 6)
    assert spec.rho == pytest.approx(0.15)
    assert spec.log_length == pytest.approx(math.log(0.2 / 0.15) / 0.5)


def test_cone_does_not_fit():
    with pytest.raises(ValueError, match="cone does not fit"):
        generate_cone(ConeSpec(0.45, 0.2), 64)


@pytest.mark.parametrize("beta", [0.0, math.pi / 6, math.pi / 4])
def test_cone_curvature_and_oscillation(beta):
    spec = ConeSpec(0.15, 0.15) if beta == 0 else ConeSpec.from_log_length(0.2, 1.0, beta)
    m = generate_cone(spec, 512)
    k1 = curvature_functionals(m)[0]
    assert k1 == pytest.approx(cone_curvature_integral(beta), rel=0.02)
    assert oscillation(m) >= cone_osc_lower_bound(spec)


def test_cone_with_R_over_rho_e():
    spec = ConeSpec(0.2, (0.2 - 0.2 / math.e) / 0.5, math.pi / 6)
    assert spec.R / spec.rho == pytest.approx(math.e)
    assert oscillation(generate_cone(spec, 256)) >= 1.0


def test_flat_cone_limit():
    m = generate_cone(ConeSpec(0.2, 0.1, math.pi / 2), 64)
    assert oscillation(m) == 0
    assert curvature_functionals(m)[0] == pytest.approx(0, abs=1e-12)


def test_cylinder_oscillation_and_systole():
    m = generate_cylinder(0.05, 0.15, n=256)
    assert oscillation(m) >= 3.0
    assert systole(m).length == pytest.approx(1.0, abs=1e-12)


def test_cone_sampling_has_no_seam():
    m = generate_cone(ConeSpec.from_log_length(0.2, 1.0, math.pi / 4), 256)
    c = dft(m.u).coefficients
    q, p = m.grid.mode_indices
    high = (np.abs(q) > m.grid.n1 // 4) | (np.abs(p) > m.grid.n2 // 4)
    power = np.abs(c) ** 2
    assert power[high].sum() <= 1e-6 * power.sum()


def test_family_specs_double_oscillation_at_constant_area():
    specs = oscillation_family_specs(0.0, 4, smoothing=0.12)
    oscs = [s.profile().osc for s in specs]
    assert all(b >= 2 * a for a, b in zip(oscs, oscs[1:]))
    areas = [s.profile().area_excess() for s in specs]
    np.testing.assert_allclose(areas, areas[0], rtol=1e-9)
    with pytest.raises(ValueError):
        oscillation_family_specs(0.0, 1)


def test_random_metric_determinism_and_amplitude():
    lat = ModuliPoint(0.2, 1.4)
    a = random_trig_metric(lat, 3, 0.2, seed=7)
    b = random_trig_metric(lat, 3, 0.2, seed=7)
    np.testing.assert_array_equal(a.values, b.values)
    assert oscillation(a) == pytest.approx(0.2)
    assert report(a).Kp < 4 * math.pi
    assert oscillation(random_trig_metric(lat, 3, 0.0, seed=7)) == 0


def test_disk_fields():
    zero = disk_test_field("cap", 0.0)
    assert np.all(zero.u == 0)
    cap = disk_test_field("cap", 0.7, power=2, shoulder=1.0)
    assert cap.extrema()[0] == pytest.approx(0.7)
    assert cap.poly(1.0) == pytest.approx(0.0, abs=1e-15)
    well = disk_test_field("well", 0.5)
    kp_plus, kp_minus = well.functionals(2)
    assert well.extrema()[1] >= disk_min_bound(kp_minus, 2)
    kp_plus, _ = cap.functionals(2)
    if kp_plus < 2 * math.pi:
        assert cap.extrema()[0] <= disk_max_bound(kp_plus, 2)


def test_disk_curvature_quadrature_matches_gauss_bonnet_flux():
    # int Delta_0 u dA_0 = -int_{boundary} du/dn = -2 pi u'(1)
    d = disk_test_field("cap", 0.4, power=1)
    integral = np.sum(d.flat_laplacian * d.weights)
    slope = 2 * d.poly.deriv()(1.0)  # du/dr = 2 r P'(r^2)
    assert integral == pytest.approx(-2 * math.pi * slope, rel=1e-12)
