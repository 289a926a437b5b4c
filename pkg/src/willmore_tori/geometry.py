"""Intrinsic quantities of a conformal metric g = e^{2u} g0 on a flat torus."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .fields import ScalarField, TorusGrid, field_from_function, integrate, laplacian_values
from .moduli import ModuliPoint, classify_region, flat_systole, flat_V
from .systole import SystoleResult, graph_systole


@dataclass(frozen=True)
class ConformalTorusMetric:
    u: ScalarField

    @property
    def grid(self) -> TorusGrid:
        return self.u.grid

    @property
    def moduli(self) -> ModuliPoint:
        return self.u.grid.moduli

    @property
    def values(self) -> np.ndarray:
        return self.u.values

    def density(self) -> np.ndarray:
        """Area density e^{2u} relative to the flat metric."""
        return np.exp(2.0 * self.u.values)

    def shifted(self, c: float) -> "ConformalTorusMetric":
        """The rescaled metric e^{2c} g."""
        return ConformalTorusMetric(self.u + c)

    @classmethod
    def flat(cls, moduli: ModuliPoint, n1: int = 64, n2: int | None = None) -> "ConformalTorusMetric":
        grid = TorusGrid(moduli, n1, n1 if n2 is None else n2)
        return cls(grid.constant(0.0))

    @classmethod
    def from_function(cls, grid: TorusGrid, fn) -> "ConformalTorusMetric":
        return cls(field_from_function(grid, fn))


def _check_p(p: float) -> float:
    p = float(p)
    if not p > 1.0:
        raise ValueError("p must exceed 1")
    return p


def gaussian_curvature(metric: ConformalTorusMetric) -> ScalarField:
    """K_g = e^{-2u} Delta_{g0} u with the nonnegative Laplacian."""
    u = metric.values
    return metric.u.with_values(np.exp(-2.0 * u) * laplacian_values(u, metric.grid))


def area(metric: ConformalTorusMetric) -> float:
    return float(metric.density().sum() * metric.grid.cell_area)


def oscillation(metric: ConformalTorusMetric) -> float:
    u = metric.values
    return float(u.max() - u.min())


def _lp_functional(k: np.ndarray, dens: np.ndarray, cell: float, p: float, total_area: float) -> float:
    norm = (np.sum(np.abs(k) ** p * dens) * cell) ** (1.0 / p)
    return float(norm * total_area ** (1.0 - 1.0 / p))


def curvature_functionals(metric: ConformalTorusMetric, p: float = 2.0,
                          curvature: ScalarField | None = None) -> tuple[float, float, float, float]:
    """(K1, Kp, Kp_plus, Kp_minus) with K_p(f) = ||f||_{L^p(g)} * area(g)^{1 - 1/p}."""
    p = _check_p(p)
    k = (gaussian_curvature(metric) if curvature is None else curvature).values
    dens = metric.density()
    cell = metric.grid.cell_area
    a = float(dens.sum() * cell)
    k1 = float(np.sum(np.abs(k) * dens) * cell)
    kp = _lp_functional(k, dens, cell, p, a)
    kp_plus = _lp_functional(np.maximum(k, 0.0), dens, cell, p, a)
    kp_minus = _lp_functional(np.minimum(k, 0.0), dens, cell, p, a)
    return k1, kp, kp_plus, kp_minus


def systole(metric: ConformalTorusMetric) -> SystoleResult:
    """Graph surrogate for the length of the shortest noncontractible loop.

    The graph value is the length of an actual loop, hence never below the true
    systole; the true systole is at least graph / (1 + result.tolerance).
    """
    return graph_systole(metric.values, metric.grid)


def conformal_systole(metric: ConformalTorusMetric) -> float:
    return systole(metric).length


@dataclass(frozen=True)
class GeometryReport:
    area_g: float
    area_g0: float
    sys_g: float
    sys_g0: float
    V_g: float
    V_g0: float
    osc_u: float
    K1: float
    Kp: float
    Kp_plus: float
    Kp_minus: float
    p: float
    gauss_bonnet_residual: float
    x: float
    y: float
    tol_sys: float
    region: str

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def table(self) -> str:
        width = max(len(k) for k in self.to_dict())
        lines = []
        for k, v in self.to_dict().items():
            val = f"{v:.10g}" if isinstance(v, float) else str(v)
            lines.append(f"{k:<{width}}  {val}")
        return "\n".join(lines)


def report(metric: ConformalTorusMetric, p: float = 2.0) -> GeometryReport:
    p = _check_p(p)
    k = gaussian_curvature(metric)
    k1, kp, kpp, kpm = curvature_functionals(metric, p, curvature=k)
    a = area(metric)
    sysr = systole(metric)
    m = metric.moduli
    gb = integrate(k, metric.u.with_values(metric.density()))
    return GeometryReport(
        area_g=a,
        area_g0=m.flat_area,
        sys_g=sysr.length,
        sys_g0=flat_systole(m),
        V_g=a / sysr.length**2,
        V_g0=flat_V(m),
        osc_u=oscillation(metric),
        K1=k1,
        Kp=kp,
        Kp_plus=kpp,
        Kp_minus=kpm,
        p=p,
        gauss_bonnet_residual=gb,
        x=m.x,
        y=m.y,
        tol_sys=sysr.tolerance,
        region=classify_region(m).value,
    )


def dirichlet_pairing(metric: ConformalTorusMetric) -> float:
    """int u K_g darea_g, which equals the Dirichlet energy int |grad u|^2 darea_g0 >= 0."""
    k = gaussian_curvature(metric).values
    return float(np.sum(metric.values * k * metric.density()) * metric.grid.cell_area)
