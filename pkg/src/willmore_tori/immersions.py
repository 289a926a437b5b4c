"""Willmore energy of explicit immersed tori and checks of the lower bounds against it.

For a conformal immersion F of a flat torus with induced metric e^{2u} g0 the
mean curvature vector satisfies 2H = Delta_g F = e^{-2u} Delta_{g0} F, so

    W(F) = int |H|^2 dA_g = 1/4 sum_i int e^{-2u} (Delta_{g0} F_i)^2 dA_{g0}.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import quad

from .bounds import Certificate, certify_report, willmore_lower_bounds
from .fields import TorusGrid, derivative_values, laplacian_values
from .geometry import ConformalTorusMetric, GeometryReport, report as geometry_report
from .moduli import ModuliPoint

CONFORMAL_TOL = 1e-6
BOUND_RTOL = 1e-9


class NotConformalError(ValueError):
    pass


@dataclass(frozen=True)
class ImmersedTorus:
    kind: str
    grid: TorusGrid | None = None
    F: np.ndarray | None = field(default=None, repr=False)
    R: float | None = None
    r: float | None = None
    name: str = ""

    def __post_init__(self):
        if self.kind == "conformal_grid":
            F = np.asarray(self.F, dtype=float)
            if self.grid is None or F.ndim != 3 or F.shape[1:] != self.grid.shape:
                raise ValueError("conformal_grid needs F of shape (n, n1, n2) matching the grid")
            if F.shape[0] < 3:
                raise ValueError("ambient dimension must be at least 3")
            if not np.all(np.isfinite(F)):
                raise ValueError("immersion samples must be finite")
            F.setflags(write=False)
            object.__setattr__(self, "F", F)
        elif self.kind == "revolution":
            if self.R is None or self.r is None or not (self.r > 0):
                raise ValueError("revolution torus needs radii R > r > 0")
            if not self.R > self.r:
                raise ValueError("self-intersecting profile")
        else:
            raise ValueError(f"unknown immersion kind {self.kind!r}")

    @classmethod
    def conformal_grid(cls, grid: TorusGrid, F, name: str = "") -> "ImmersedTorus":
        return cls("conformal_grid", grid=grid, F=F, name=name)

    @classmethod
    def revolution(cls, R: float, r: float) -> "ImmersedTorus":
        return cls("revolution", R=float(R), r=float(r), name=f"revolution(R={R}, r={r})")

    @property
    def is_grid(self) -> bool:
        return self.kind == "conformal_grid"

    def as_conformal_grid(self, n: int = 128) -> "ImmersedTorus":
        if self.is_grid:
            return self
        return revolution_conformal(self.R, self.r, n)

    # -- serialisation
    def to_dict(self) -> dict:
        if self.is_grid:
            return {
                "kind": "conformal_grid",
                "lattice": self.grid.moduli.to_dict(),
                "grid": [self.grid.n1, self.grid.n2],
                "F": [[float(v) for v in comp.ravel()] for comp in self.F],
            }
        return {"kind": "revolution", "R": self.R, "r": self.r}

    @classmethod
    def from_dict(cls, d: dict) -> "ImmersedTorus":
        kind = d.get("kind")
        if kind == "revolution":
            return cls.revolution(float(d["R"]), float(d["r"]))
        if kind == "conformal_grid":
            grid = TorusGrid(ModuliPoint.from_dict(d["lattice"]), *(int(n) for n in d["grid"]))
            F = np.asarray(d["F"], dtype=float).reshape(-1, grid.n1, grid.n2)
            return cls.conformal_grid(grid, F)
        raise ValueError(f"unknown immersion kind {kind!r}")


def write_immersion(t: ImmersedTorus, path) -> None:
    Path(path).write_text(json.dumps(t.to_dict()))


def read_immersion(path) -> ImmersedTorus:
    def _reject(token):
        raise ValueError(f"non-finite entry {token!r} in immersion file")

    return ImmersedTorus.from_dict(json.loads(Path(path).read_text(), parse_constant=_reject))


# -- differential quantities -------------------------------------------------

def _require_grid(t: ImmersedTorus) -> None:
    if not t.is_grid:
        raise ValueError("operation needs a conformal_grid immersion")


def _first_derivatives(t: ImmersedTorus):
    d1 = np.stack([derivative_values(c, t.grid, (1, 0)) for c in t.F])
    d2 = np.stack([derivative_values(c, t.grid, (0, 1)) for c in t.F])
    return d1, d2


def conformality_defect(t: ImmersedTorus) -> float:
    """max over samples of (| |F_1|^2 - |F_2|^2 | + 2 |<F_1, F_2>|) / ((|F_1|^2 + |F_2|^2) / 2)."""
    _require_grid(t)
    d1, d2 = _first_derivatives(t)
    e = (d1 * d1).sum(0)
    g = (d2 * d2).sum(0)
    f = (d1 * d2).sum(0)
    scale = 0.5 * (e + g)
    if np.any(scale <= 0):
        raise NotConformalError("parametrization not conformal (degenerate differential)")
    return float(np.max((np.abs(e - g) + 2.0 * np.abs(f)) / scale))


def check_conformal(t: ImmersedTorus, tol: float = CONFORMAL_TOL) -> None:
    defect = conformality_defect(t)
    if defect > tol:
        raise NotConformalError(f"parametrization not conformal (defect {defect:.3g} > {tol:g})")


def conformal_factor(t: ImmersedTorus) -> np.ndarray:
    """u with e^{2u} = (|F_1|^2 + |F_2|^2) / 2."""
    _require_grid(t)
    d1, d2 = _first_derivatives(t)
    return 0.5 * np.log(0.5 * ((d1 * d1).sum(0) + (d2 * d2).sum(0)))


def induced_metric(t: ImmersedTorus, n: int = 128) -> ConformalTorusMetric:
    g = t.as_conformal_grid(n)
    check_conformal(g)
    return ConformalTorusMetric(g.grid.field(conformal_factor(g)))


def willmore_energy_conformal(t: ImmersedTorus) -> float:
    _require_grid(t)
    check_conformal(t)
    u = conformal_factor(t)
    lap_sq = sum(laplacian_values(c, t.grid) ** 2 for c in t.F)
    return float(0.25 * np.sum(np.exp(-2.0 * u) * lap_sq) * t.grid.cell_area)


def willmore_energy_sff(t: ImmersedTorus) -> float:
    """int |H|^2 dA from the second fundamental form; does not assume conformality."""
    _require_grid(t)
    grid = t.grid
    d1, d2 = _first_derivatives(t)
    d11 = np.stack([derivative_values(c, grid, (2, 0)) for c in t.F])
    d12 = np.stack([derivative_values(c, grid, (1, 1)) for c in t.F])
    d22 = np.stack([derivative_values(c, grid, (0, 2)) for c in t.F])
    E = (d1 * d1).sum(0)
    Fm = (d1 * d2).sum(0)
    G = (d2 * d2).sum(0)
    det = E * G - Fm * Fm
    inv = (G / det, -Fm / det, E / det)

    def normal(X):
        # remove the tangential part using the inverse first fundamental form
        a = (X * d1).sum(0)
        b = (X * d2).sum(0)
        c1 = inv[0] * a + inv[1] * b
        c2 = inv[1] * a + inv[2] * b
        return X - c1 * d1 - c2 * d2

    H = 0.5 * (inv[0] * normal(d11) + 2.0 * inv[1] * normal(d12) + inv[2] * normal(d22))
    return float(np.sum((H * H).sum(0) * np.sqrt(det)) * grid.cell_area)


def revolution_closed_form(c: float) -> float:
    """W of the torus of revolution with R/r = c: pi^2 c^2 / sqrt(c^2 - 1)."""
    if not c > 1:
        raise ValueError("self-intersecting profile")
    return math.pi**2 * c * c / math.sqrt(c * c - 1.0)


def willmore_energy_revolution(R: float, r: float) -> float:
    """2 pi int_0^{2 pi} H^2 r (R + r cos theta) d theta with H = (R + 2r cos theta)/(2r(R + r cos theta))."""
    if not (R > r > 0):
        raise ValueError("self-intersecting profile")

    def integrand(th):
        rho = R + r * math.cos(th)
        h = (R + 2.0 * r * math.cos(th)) / (2.0 * r * rho)
        return h * h * r * rho

    val, _ = quad(integrand, 0.0, 2.0 * math.pi, epsabs=1e-14, epsrel=1e-13, limit=200)
    return 2.0 * math.pi * val


def willmore_energy(t: ImmersedTorus) -> float:
    if t.is_grid:
        return willmore_energy_conformal(t)
    return willmore_energy_revolution(t.R, t.r)


def parseval_area_identities(t: ImmersedTorus) -> tuple[float, float, float]:
    """Area from the Fourier coefficients weighted by q^2, by ((p - qx)/y)^2, and by direct quadrature.

    For a conformal parametrisation area = int |F_1|^2 dA0 = int |F_2|^2 dA0, and
    Parseval turns these into weighted sums of squared coefficients. The third
    value integrates the area element sqrt(EG - F^2) directly.
    """
    _require_grid(t)
    grid = t.grid
    xi1, xi2 = grid._derivative_wavevectors
    c = np.fft.fft2(t.F, axes=(1, 2)) / (grid.n1 * grid.n2)
    power = (np.abs(c) ** 2).sum(0)
    area_e1 = float(grid.area * np.sum(power * (2 * math.pi * xi1) ** 2))
    area_e2 = float(grid.area * np.sum(power * (2 * math.pi * xi2) ** 2))
    d1, d2 = _first_derivatives(t)
    det = (d1 * d1).sum(0) * (d2 * d2).sum(0) - (d1 * d2).sum(0) ** 2
    area_quad = float(np.sum(np.sqrt(np.maximum(det, 0.0))) * grid.cell_area)
    return area_e1, area_e2, area_quad


# -- built-in immersions -----------------------------------------------------

def clifford_torus(n: int = 128) -> ImmersedTorus:
    """(1/sqrt 2)(cos sqrt2 s, sin sqrt2 s, cos sqrt2 t, sin sqrt2 t) on the square lattice of side sqrt2 pi."""
    grid = TorusGrid(ModuliPoint(0.0, 1.0, math.sqrt(2.0) * math.pi), n, n)
    w1, w2 = grid.positions()
    k = math.sqrt(2.0)
    F = np.stack([np.cos(k * w1), np.sin(k * w1), np.cos(k * w2), np.sin(k * w2)]) / k
    return ImmersedTorus.conformal_grid(grid, F, name="clifford")


def flat_product_torus(y: float = 2.0, n: int = 64) -> ImmersedTorus:
    """Product of circles of circumference 1 and y in R^4: a flat isometric embedding of Gamma_{0,y}."""
    grid = TorusGrid(ModuliPoint(0.0, y), n, n)
    w1, w2 = grid.positions()
    a1, a2 = 2 * math.pi * w1, 2 * math.pi * w2 / y
    F = np.stack([np.cos(a1), np.sin(a1), y * np.cos(a2), y * np.sin(a2)]) / (2 * math.pi)
    return ImmersedTorus.conformal_grid(grid, F, name=f"flat_product(y={y})")


def revolution_conformal(R: float, r: float, n: int = 128) -> ImmersedTorus:
    """Torus of revolution in isothermal coordinates (psi, phi), metric (R + r cos theta)^2 (dpsi^2 + dphi^2)."""
    if not (R > r > 0):
        raise ValueError("self-intersecting profile")
    root = math.sqrt(R * R - r * r)
    psi_period = 2 * math.pi * r / root
    k = math.sqrt((R + r) / (R - r))
    if psi_period <= 2 * math.pi:
        grid = TorusGrid(ModuliPoint(0.0, 2 * math.pi / psi_period, psi_period), n, n)
        psi, phi = grid.positions()
    else:
        grid = TorusGrid(ModuliPoint(0.0, psi_period / (2 * math.pi), 2 * math.pi), n, n)
        phi, psi = grid.positions()
    half = psi * root / (2 * r)
    theta = 2.0 * np.arctan2(k * np.sin(half), np.cos(half))
    rho = R + r * np.cos(theta)
    F = np.stack([rho * np.cos(phi), rho * np.sin(phi), r * np.sin(theta)])
    return ImmersedTorus.conformal_grid(grid, F, name=f"revolution_conformal(R={R}, r={r})")


def revolution_angle_parametrization(R: float, r: float, n: int = 64) -> ImmersedTorus:
    """The usual (theta, phi) parametrisation on a 2pi-square; not conformal."""
    grid = TorusGrid(ModuliPoint(0.0, 1.0, 2 * math.pi), n, n)
    theta, phi = grid.positions()
    rho = R + r * np.cos(theta)
    F = np.stack([rho * np.cos(phi), rho * np.sin(phi), r * np.sin(theta)])
    return ImmersedTorus.conformal_grid(grid, F, name="revolution_angles")


def inverted_clifford(n: int = 128, center=(0.3, 0.1, -0.2, 0.25)) -> ImmersedTorus:
    """Clifford torus composed with the inversion in the unit sphere about center.

    Inversions are conformal and preserve W of closed surfaces, so W = 2 pi^2
    while the induced conformal factor is far from constant.
    """
    base = clifford_torus(n)
    a = np.asarray(center, dtype=float).reshape(4, 1, 1)
    d = base.F - a
    F = a + d / (d * d).sum(0)
    return ImmersedTorus.conformal_grid(base.grid, F, name="inverted_clifford")


BUILTINS = {
    "clifford": lambda n=128: clifford_torus(n),
    "flat_product": lambda n=64: flat_product_torus(2.0, n),
    "revolution_sqrt2": lambda n=128: revolution_conformal(math.sqrt(2.0), 1.0, n),
    "revolution_2": lambda n=128: revolution_conformal(2.0, 1.0, n),
    "inverted_clifford": lambda n=128: inverted_clifford(n),
}

EXACT_ENERGY = {
    "clifford": 2 * math.pi**2,
    "flat_product": 2.5 * math.pi**2,
    "revolution_sqrt2": 2 * math.pi**2,
    "revolution_2": 4 * math.pi**2 / math.sqrt(3.0),
    "inverted_clifford": 2 * math.pi**2,
}


@dataclass(frozen=True)
class LowerBoundReport:
    W: float
    bounds: list
    certificate: Certificate
    geometry: GeometryReport
    holds: bool

    def to_dict(self) -> dict:
        return {
            "W": self.W,
            "bounds": [{"rule": r, "value": v} for r, v in self.bounds],
            "certificate": self.certificate.to_dict(),
            "geometry": self.geometry.to_dict(),
            "holds": self.holds,
        }


def verify_lower_bounds(t: ImmersedTorus, p: float = 2.0, n: int = 128) -> LowerBoundReport:
    """Compare W(F) against every lower bound the pipeline produces for its induced metric."""
    W = willmore_energy(t)
    rep = geometry_report(induced_metric(t, n), p)
    bounds = willmore_lower_bounds(rep)
    cert = certify_report(rep)
    tol = BOUND_RTOL * W
    holds = all(W >= v - tol for _, v in bounds) and W >= cert.lower_bound - tol
    return LowerBoundReport(W, bounds, cert, rep, holds)
