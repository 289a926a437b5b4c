"""Lattices in the plane and the fundamental domain of conformal classes of tori.

A flat torus R^2/L is conformally equivalent to exactly one R^2/Gamma_xy with
Gamma_xy generated by (1, 0) and (x, y), 0 <= x <= 1/2, x^2 + y^2 >= 1, y > 0.
Mirror images are identified, so x is folded into [0, 1/2].
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

EPS_MOD = 1e-9
"""Reduction tolerance: points with x^2 + y^2 in [1 - EPS_MOD, 1] count as on the unit circle."""

_MAX_REDUCTION_STEPS = 10_000


class DegenerateLatticeError(ValueError):
    pass


@dataclass(frozen=True)
class Lattice:
    v1: tuple[float, float]
    v2: tuple[float, float]

    def __post_init__(self):
        v1 = tuple(float(c) for c in self.v1)
        v2 = tuple(float(c) for c in self.v2)
        if len(v1) != 2 or len(v2) != 2:
            raise ValueError("lattice generators must be 2-vectors")
        object.__setattr__(self, "v1", v1)
        object.__setattr__(self, "v2", v2)

    @property
    def det(self) -> float:
        return self.v1[0] * self.v2[1] - self.v1[1] * self.v2[0]

    def basis(self) -> np.ndarray:
        """Generators as the columns of a 2x2 matrix."""
        return np.array([[self.v1[0], self.v2[0]], [self.v1[1], self.v2[1]]])


@dataclass(frozen=True)
class ModuliPoint:
    """A reduced conformal class (x, y) together with the length of the first generator."""

    x: float
    y: float
    scale: float = 1.0

    def __post_init__(self):
        for name in ("x", "y", "scale"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if self.y <= 0:
            raise ValueError("y must be positive")
        if not (-EPS_MOD <= self.x <= 0.5 + EPS_MOD):
            raise ValueError(f"x={self.x} outside [0, 1/2]")
        if self.x * self.x + self.y * self.y < 1.0 - EPS_MOD:
            raise ValueError(f"(x, y)=({self.x}, {self.y}) lies inside the unit circle")

    @property
    def generators(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.array([self.scale, 0.0]),
            np.array([self.scale * self.x, self.scale * self.y]),
        )

    @property
    def flat_area(self) -> float:
        return self.scale * self.scale * self.y

    def lattice(self) -> Lattice:
        a, b = self.generators
        return Lattice(tuple(a), tuple(b))

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "scale": self.scale}

    @classmethod
    def from_dict(cls, d: dict) -> "ModuliPoint":
        return cls(float(d["x"]), float(d["y"]), float(d.get("scale", 1.0)))


class ModuliRegion(str, enum.Enum):
    LI_YAU = "li_yau"
    MONTIEL_ROS = "montiel_ros"
    GENERAL = "general"


def reduce(lattice: Lattice) -> ModuliPoint:
    """Gauss-reduce a lattice basis and return its point in the fundamental domain.

    The returned (x, y, scale) is such that the input lattice is a rotation
    (possibly composed with a reflection) of scale * Gamma_xy.
    """
    a = complex(*lattice.v1)
    b = complex(*lattice.v2)
    if abs(lattice.det) <= 1e-12 * abs(a) * abs(b) or a == 0 or b == 0:
        raise DegenerateLatticeError("degenerate lattice")

    for _ in range(_MAX_REDUCTION_STEPS):
        if abs(b) < abs(a):
            a, b = b, a
        m = round((b * a.conjugate()).real / (abs(a) ** 2))
        if m == 0:
            break
        b = b - m * a
    else:  # pragma: no cover - Gauss reduction terminates on non-degenerate input
        raise DegenerateLatticeError("degenerate lattice")
    if abs(b) < abs(a):
        a, b = b, a

    z = b / a
    if z.imag < 0:
        z = -z
    x, y = abs(z.real), z.imag
    # |Re z| <= 1/2 holds after reduction up to rounding
    x = min(x, 0.5)
    if x * x + y * y < 1.0:
        # on-circle point pushed inside by rounding; project back
        y = math.sqrt(max(1.0 - x * x, 0.0))
    return ModuliPoint(x, y, abs(a))


def flat_systole(m: ModuliPoint) -> float:
    """Length of the shortest nonzero vector of scale * Gamma_xy, which is scale for reduced points."""
    return m.scale


def flat_V(m: ModuliPoint) -> float:
    """area / sys^2 of the flat torus; equals y."""
    return m.flat_area / flat_systole(m) ** 2


def in_montiel_ros_disk(x: float, y: float) -> bool:
    return (x - 0.5) ** 2 + (y - 1.0) ** 2 <= 0.25


def classify_region(m: ModuliPoint) -> ModuliRegion:
    if m.y <= 1.0:
        return ModuliRegion.LI_YAU
    if in_montiel_ros_disk(m.x, m.y):
        return ModuliRegion.MONTIEL_ROS
    return ModuliRegion.GENERAL
