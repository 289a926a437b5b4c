"""Oscillation bounds for conformal metrics on tori and certified Willmore lower bounds."""

from .bounds import (
    Certificate,
    Q_bound,
    S_bound,
    certify,
    certify_report,
    disk_max_bound,
    disk_min_bound,
    mid_bound_check,
    osc_bound_check,
    sigma,
    tau,
    willmore_lower_bounds,
)
from .fields import ScalarField, TorusGrid, read_field, write_field
from .geometry import ConformalTorusMetric, GeometryReport, gaussian_curvature, report
from .moduli import Lattice, ModuliPoint, ModuliRegion, classify_region, reduce

__version__ = "0.1.0"

__all__ = [
    "Certificate", "ConformalTorusMetric", "GeometryReport", "Lattice", "ModuliPoint", "ModuliRegion",
    "Q_bound", "S_bound", "ScalarField", "TorusGrid", "certify", "certify_report", "classify_region",
    "disk_max_bound", "disk_min_bound", "gaussian_curvature", "mid_bound_check", "osc_bound_check",
    "read_field", "reduce", "report", "sigma", "tau", "willmore_lower_bounds", "write_field",
]
