"""Test metrics: cones and cylinders glued into flat tori, random trigonometric
metrics, and radial fields on the unit disk.

Cones and cylinders
-------------------
A truncated cone of opening angle beta (beta = 0 is a cylinder) capped by a
spherical cap and glued into a flat torus has a rotationally symmetric conformal
factor. In log-radius t = log r the flat part is u = c0 (t_b - t) + const with
c0 = 1 - sin(beta); the cap makes u constant near the centre and the socket
brings u down to 0. All transitions are driven by the flux

    -du/dt = c0 * S((t - t_a)/w) * (1 - S((t - t_b)/w)),

with S the C-infinity smooth step exp(-1/t)/(exp(-1/t) + exp(-1/(1-t))). The
log-radius width w of the two transitions is the smoothing parameter. Because
the Laplacian of a radial function is -r^{-2} d^2u/dt^2, the total curvature
int |K| dA_g is exactly 4 pi c0 for the continuous field, independently of the
cone length, and u >= 0 so no noncontractible loop gets shorter than flat.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import quad

from .fields import TorusGrid
from .geometry import ConformalTorusMetric
from .moduli import ModuliPoint

DEFAULT_SMOOTHING = math.log(2.0)
_GL_NODES = 80


def smooth_step(t):
    """C-infinity step from 0 (t <= 0) to 1 (t >= 1), with S(t) + S(1 - t) = 1."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


@lru_cache(maxsize=1)
def _gauss_legendre_unit():
    x, w = np.polynomial.legendre.leggauss(_GL_NODES)
    return (x + 1.0) / 2.0, w / 2.0


def _step_integral(s):
    """G(s) = int_0^s S; G(1) = 1/2."""
    x, w = _gauss_legendre_unit()
    s = np.asarray(s, dtype=float)[..., None]
    return (s * smooth_step(s * x) * w).sum(-1)


@dataclass(frozen=True)
class RadialProfile:
    """u as a function of radius: plateau, cap transition, cone, socket, zero."""

    c0: float
    w: float
    L: float
    t_b: float

    @property
    def t_a(self) -> float:
        return self.t_b - self.L - self.w

    @property
    def support_radius(self) -> float:
        return math.exp(self.t_b + self.w)

    @property
    def plateau_radius(self) -> float:
        return math.exp(self.t_a)

    @property
    def osc(self) -> float:
        return self.c0 * (self.L + self.w)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        c0, w, L, tb, ta = self.c0, self.w, self.L, self.t_b, self.t_a
        with np.errstate(divide="ignore"):
            t = np.log(r)
        u = np.zeros_like(r)
        s = (t - tb) / w
        m = (s >= 0) & (s < 1)
        u[m] = c0 * w * _step_integral(1.0 - s[m])
        m = (t >= ta + w) & (t < tb)
        u[m] = c0 * (w / 2 + tb - t[m])
        s = (t - ta) / w
        m = (s >= 0) & (s < 1)
        u[m] = c0 * (w / 2 + L + w * (0.5 - _step_integral(s[m])))
        u[t < ta] = c0 * (L + w)
        return u

    def area_excess(self) -> float:
        """int (e^{2u} - 1) dA_0 over the plane."""
        def f(t):
            return (math.exp(2.0 * float(self(np.array([math.exp(t)]))[0])) - 1.0) * 2 * math.pi * math.exp(2 * t)

        ta, tb, w = self.t_a, self.t_b, self.w
        pts = [ta - 40.0, ta, ta + w, tb, tb + w]
        return sum(quad(f, a, b, limit=200)[0] for a, b in zip(pts[:-1], pts[1:]) if b > a)


@dataclass(frozen=True)
class ConeSpec:
    """Truncated cone of outer radius R, slant height H and opening angle beta.

    center is given in lattice coordinates (s, t) in [0, 1)^2; smoothing is the
    log-radius width of the cap and socket transitions.
    """

    R: float
    H: float
    beta: float = 0.0
    lattice: ModuliPoint = ModuliPoint(0.0, 1.0)
    center: tuple[float, float] = (0.5, 0.5)
    smoothing: float = DEFAULT_SMOOTHING

    def __post_init__(self):
        if not (self.R > 0 and self.H >= 0 and self.smoothing > 0):
            raise ValueError("R and smoothing must be positive and H nonnegative")
        if not (0.0 <= self.beta <= math.pi / 2):
            raise ValueError("beta must lie in [0, pi/2]")
        if self.rho <= 0:
            raise ValueError("cone apex reached: rho = R - H sin(beta) must be positive")

    @property
    def rho(self) -> float:
        return self.R - self.H * math.sin(self.beta)

    @property
    def log_length(self) -> float:
        """Length of the cone part in log-radius."""
        sb = math.sin(self.beta)
        if sb == 0.0:
            return self.H / self.R
        return math.log(self.R / self.rho) / sb

    @property
    def c0(self) -> float:
        return 1.0 - math.sin(self.beta)

    def profile(self) -> RadialProfile:
        w = self.smoothing
        t_b = math.log(self.R) - self.c0 * w / 2
        return RadialProfile(self.c0, w, self.log_length, t_b)

    @classmethod
    def from_log_length(cls, R: float, L: float, beta: float = 0.0, **kw) -> "ConeSpec":
        sb = math.sin(beta)
        H = L * R if sb == 0.0 else (R - R * math.exp(-L * sb)) / sb
        return cls(R=R, H=H, beta=beta, **kw)


def min_image_distance(grid: TorusGrid, center: tuple[float, float]) -> np.ndarray:
    """Flat distance from every sample to the nearest lattice translate of center."""
    m = grid.moduli
    s, t = grid.fractional()
    ds = (s - center[0] + 0.5) % 1.0 - 0.5
    dt = (t - center[1] + 0.5) % 1.0 - 0.5
    best = None
    for a in (-1, 0, 1):
        for b in (-1, 0, 1):
            ss, tt = ds + a, dt + b
            d = np.hypot(m.scale * (ss + m.x * tt), m.scale * m.y * tt)
            best = d if best is None else np.minimum(best, d)
    return best


def _profile_metric(profile: RadialProfile, lattice: ModuliPoint, center, n: int) -> ConformalTorusMetric:
    if profile.support_radius >= lattice.scale / 2:
        raise ValueError("cone does not fit")
    grid = TorusGrid(lattice, n, n)
    r = min_image_distance(grid, center)
    return ConformalTorusMetric(grid.field(profile(r)))


def generate_cone(spec: ConeSpec, n: int = 512) -> ConformalTorusMetric:
    return _profile_metric(spec.profile(), spec.lattice, spec.center, n)


def generate_cylinder(R: float, H: float, lattice: ModuliPoint = ModuliPoint(0.0, 1.0),
                      center=(0.5, 0.5), smoothing: float = DEFAULT_SMOOTHING, n: int = 512) -> ConformalTorusMetric:
    return generate_cone(ConeSpec(R, H, 0.0, lattice, tuple(center), smoothing), n)


def cone_curvature_integral(beta: float) -> float:
    """int |K| dA of the glued cone, 4 pi (1 - sin beta)."""
    return 4.0 * math.pi * (1.0 - math.sin(beta))


def cone_osc_lower_bound(spec: ConeSpec) -> float:
    """(1/sin(beta) - 1) log(R/rho) for beta > 0, H/R for the cylinder."""
    if spec.beta == 0.0:
        return spec.H / spec.R
    return (1.0 / math.sin(spec.beta) - 1.0) * math.log(spec.R / spec.rho)


def oscillation_family_specs(beta: float = 0.0, steps: int = 4, smoothing: float = 0.12,
                             base_log_length: float = 0.0, growth: float = 2.1,
                             max_support: float = 0.42,
                             lattice: ModuliPoint = ModuliPoint(0.0, 1.0)) -> list[ConeSpec]:
    """Cones whose oscillation grows by `growth` per step at constant area.

    The lattice is fixed and u stays compactly supported; the area is held fixed
    by shrinking the outer radius R_i so that the area excess R_i^2 E(L_i) is constant.
    """
    if steps < 2:
        raise ValueError("steps must be at least 2")
    if growth < 2.0:
        raise ValueError("growth must be at least 2")
    c0 = 1.0 - math.sin(beta)
    if c0 <= 0:
        raise ValueError("beta = pi/2 gives a flat metric; oscillation cannot grow")
    w = smoothing
    osc0 = base_log_length + w
    lengths = [growth**i * osc0 - w for i in range(steps)]
    unit = [RadialProfile(c0, w, L, -c0 * w / 2).area_excess() for L in lengths]
    r0 = max_support * lattice.scale * math.exp(c0 * w / 2 - w)
    target = unit[0] * r0**2
    specs = []
    for L, e in zip(lengths, unit):
        R = math.sqrt(target / e)
        specs.append(ConeSpec.from_log_length(R, L, beta, lattice=lattice, smoothing=w))
    return specs


def unbounded_oscillation_family(beta: float = 0.0, steps: int = 4, n: int = 1024,
                                 **kw) -> list[ConformalTorusMetric]:
    return [generate_cone(s, n) for s in oscillation_family_specs(beta, steps, **kw)]


def random_trig_metric(lattice: ModuliPoint, modes: int = 3, amplitude: float = 0.2,
                       seed: int = 0, n: int = 64, max_freq: int = 2) -> ConformalTorusMetric:
    """Sum of up to `modes` random lattice plane waves, rescaled so that osc u = amplitude on the grid."""
    if amplitude < 0:
        raise ValueError("amplitude must be nonnegative")
    grid = TorusGrid(lattice, n, n)
    if amplitude == 0 or modes <= 0:
        return ConformalTorusMetric(grid.constant(0.0))
    rng = np.random.default_rng(seed)
    pool = [(p, q) for q in range(0, max_freq + 1) for p in range(-max_freq, max_freq + 1)
            if (q > 0 or p > 0)]
    pick = rng.choice(len(pool), size=min(modes, len(pool)), replace=False)
    xi1, xi2 = grid.wavevectors
    w1, w2 = grid.positions()
    u = np.zeros(grid.shape)
    for idx in pick:
        p, q = pool[idx]
        k1 = q / lattice.scale
        k2 = (p - lattice.x * q) / (lattice.y * lattice.scale)
        u += rng.normal() * np.cos(2 * math.pi * (k1 * w1 + k2 * w2) + rng.uniform(0, 2 * math.pi))
    spread = u.max() - u.min()
    if spread == 0:
        return ConformalTorusMetric(grid.constant(0.0))
    u = (u - u.mean()) * (amplitude / spread)
    return ConformalTorusMetric(grid.field(u))


# -- radial fields on the unit disk ------------------------------------------

@dataclass(frozen=True)
class DiskField:
    """Radial field u(r) = P(r^2) on the unit disk with u = 0 on the boundary.

    Integrals use Gauss-Legendre nodes in s = r^2 (so dA = pi ds), split at the
    sign changes of the curvature so K^+ and K^- are integrated without kinks.
    """

    profile: str
    magnitude: float
    poly: Polynomial
    s: np.ndarray
    weights: np.ndarray

    @property
    def r(self) -> np.ndarray:
        return np.sqrt(self.s)

    @property
    def u(self) -> np.ndarray:
        return self.poly(self.s)

    @property
    def flat_laplacian(self) -> np.ndarray:
        """Delta_0 u = -(u'' + u'/r) = -4 d/ds (s P'(s))."""
        sp = Polynomial([0.0, 1.0]) * self.poly.deriv()
        return -4.0 * sp.deriv()(self.s)

    @property
    def curvature(self) -> np.ndarray:
        return np.exp(-2.0 * self.u) * self.flat_laplacian

    @property
    def area(self) -> float:
        return float(np.sum(self.weights * np.exp(2.0 * self.u)))

    def functionals(self, p: float = 2.0) -> tuple[float, float]:
        """(K^+_p, K^-_p) on (disk, e^{2u} g0)."""
        k = self.curvature
        dens = np.exp(2.0 * self.u) * self.weights
        a = float(dens.sum())

        def kp(f):
            return float((np.sum(np.abs(f) ** p * dens)) ** (1.0 / p) * a ** (1.0 - 1.0 / p))

        return kp(np.maximum(k, 0.0)), kp(np.minimum(k, 0.0))

    def extrema(self) -> tuple[float, float]:
        """(max u, min u), including the centre and the boundary."""
        cand = np.concatenate([self.u, self.poly(np.array([0.0, 1.0]))])
        crit = [c.real for c in self.poly.deriv().roots() if abs(c.imag) < 1e-12 and 0 < c.real < 1]
        cand = np.concatenate([cand, self.poly(np.array(crit))]) if crit else cand
        return float(cand.max()), float(cand.min())


def disk_test_field(profile: str = "cap", magnitude: float = 0.5, n: int = 64,
                    power: int = 2, shoulder: float = 0.0) -> DiskField:
    """u = +-magnitude (1 - r^2)^power (1 + shoulder r^2), a cap (max at the centre) or a well.

    shoulder in [0, power] keeps the extremum at the centre.
    """
    if magnitude < 0:
        raise ValueError("magnitude must be nonnegative")
    if profile not in ("cap", "well"):
        raise ValueError("profile must be 'cap' or 'well'")
    if power < 1 or not (0.0 <= shoulder <= power):
        raise ValueError("need power >= 1 and 0 <= shoulder <= power")
    sign = 1.0 if profile == "cap" else -1.0
    poly = sign * magnitude * Polynomial([1.0, -1.0]) ** power * Polynomial([1.0, shoulder])
    lap = -4.0 * (Polynomial([0.0, 1.0]) * poly.deriv()).deriv()
    cuts = sorted({0.0, 1.0} | {float(c.real) for c in (lap.roots() if lap.degree() > 0 else [])
                                 if abs(c.imag) < 1e-12 and 0 < c.real < 1})
    x, w = np.polynomial.legendre.leggauss(n)
    nodes, weights = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        nodes.append(a + (b - a) * (x + 1) / 2)
        weights.append(math.pi * (b - a) / 2 * w)
    return DiskField(profile, magnitude, poly, np.concatenate(nodes), np.concatenate(weights))
