"""Periodic scalar fields on a lattice torus and their spectral calculus.

Sample (i, j) sits at w = (i/n1) * scale * (1, 0) + (j/n2) * scale * (x, y).
The FFT index k1 (along the first generator) is the integer q, and k2 is p, so
mode (p, q) carries the frequency vector xi = (q, (p - q x) / y) / scale and the
plane wave exp(2 pi i <xi, w>).

The Laplacian uses the geometers' sign: Delta = -div grad, so it multiplies
mode (p, q) by +4 pi^2 |xi|^2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .moduli import ModuliPoint

MIN_SAMPLES = 8


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class TorusGrid:
    moduli: ModuliPoint
    n1: int
    n2: int

    def __post_init__(self):
        if int(self.n1) < MIN_SAMPLES or int(self.n2) < MIN_SAMPLES:
            raise ValueError(f"grid needs at least {MIN_SAMPLES} samples per direction")
        object.__setattr__(self, "n1", int(self.n1))
        object.__setattr__(self, "n2", int(self.n2))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n1, self.n2)

    @property
    def cell_area(self) -> float:
        return self.moduli.flat_area / (self.n1 * self.n2)

    @property
    def area(self) -> float:
        return self.moduli.flat_area

    def positions(self) -> tuple[np.ndarray, np.ndarray]:
        """Physical coordinates (w1, w2) of every sample, each of shape (n1, n2)."""
        m = self.moduli
        s = np.arange(self.n1)[:, None] / self.n1
        t = np.arange(self.n2)[None, :] / self.n2
        w1 = m.scale * (s + m.x * t)
        w2 = m.scale * m.y * t + 0.0 * s
        return w1, w2

    def fractional(self) -> tuple[np.ndarray, np.ndarray]:
        """Lattice coordinates (s, t) in [0, 1) of every sample."""
        s = np.arange(self.n1)[:, None] / self.n1 + np.zeros((1, self.n2))
        t = np.arange(self.n2)[None, :] / self.n2 + np.zeros((self.n1, 1))
        return s, t

    @cached_property
    def mode_indices(self) -> tuple[np.ndarray, np.ndarray]:
        """Integer (q, p) for every FFT slot, broadcastable to (n1, n2)."""
        q = np.rint(np.fft.fftfreq(self.n1) * self.n1)[:, None]
        p = np.rint(np.fft.fftfreq(self.n2) * self.n2)[None, :]
        return q, p

    @cached_property
    def wavevectors(self) -> tuple[np.ndarray, np.ndarray]:
        m = self.moduli
        q, p = self.mode_indices
        xi1 = q / m.scale + 0.0 * p
        xi2 = (p - m.x * q) / (m.y * m.scale)
        return xi1, xi2

    @cached_property
    def _derivative_wavevectors(self) -> tuple[np.ndarray, np.ndarray]:
        # Nyquist modes have no real odd derivative; drop them
        xi1, xi2 = self.wavevectors
        mask = np.ones(self.shape, dtype=bool)
        if self.n1 % 2 == 0:
            mask[self.n1 // 2, :] = False
        if self.n2 % 2 == 0:
            mask[:, self.n2 // 2] = False
        return xi1 * mask, xi2 * mask

    def field(self, values) -> "ScalarField":
        return ScalarField(self, values)

    def constant(self, c: float) -> "ScalarField":
        return ScalarField(self, np.full(self.shape, float(c)))


@dataclass(frozen=True)
class ScalarField:
    grid: TorusGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.size != self.grid.n1 * self.grid.n2:
            raise ValueError(f"expected {self.grid.n1 * self.grid.n2} samples, got {v.size}")
        v = v.reshape(self.grid.shape)
        if not np.all(np.isfinite(v)):
            raise ValueError("field samples must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def samples(self) -> np.ndarray:
        """Row-major flat view of the samples."""
        return self.values.ravel()

    def with_values(self, values) -> "ScalarField":
        return ScalarField(self.grid, values)

    def __add__(self, other):
        if isinstance(other, ScalarField):
            _check_same_grid(self, other)
            return self.with_values(self.values + other.values)
        return self.with_values(self.values + other)

    def __mul__(self, other):
        if isinstance(other, ScalarField):
            _check_same_grid(self, other)
            return self.with_values(self.values * other.values)
        return self.with_values(self.values * other)

    __rmul__ = __mul__
    __radd__ = __add__

    def __neg__(self):
        return self.with_values(-self.values)

    def __sub__(self, other):
        return self + (-other)

    def mean(self) -> float:
        return float(self.values.mean())


@dataclass(frozen=True)
class FourierSpectrum:
    """Complex coefficients c[q, p] with f(w) = sum c[q, p] exp(2 pi i <xi_pq, w>)."""

    grid: TorusGrid
    coefficients: np.ndarray = field(repr=False)

    def coefficient(self, p: int, q: int) -> complex:
        return complex(self.coefficients[q % self.grid.n1, p % self.grid.n2])

    def cos_sin(self, p: int, q: int) -> tuple[float, float]:
        """Real amplitudes (A, B) of cos and sin of 2 pi <xi_pq, w>.

        For (p, q) != (0, 0) the pair (p, q) and (-p, -q) combine into a single
        real mode, so A = 2 Re c and B = -2 Im c (the Nyquist slot aside).
        """
        c = self.coefficient(p, q)
        if (p, q) == (0, 0):
            return c.real, 0.0
        return 2.0 * c.real, -2.0 * c.imag

    @property
    def mean(self) -> float:
        return float(self.coefficients[0, 0].real)

    def power(self) -> float:
        """Sum of squared coefficient magnitudes; equals the mean of the squared samples."""
        return float(np.sum(np.abs(self.coefficients) ** 2))


def _check_same_grid(a: ScalarField, b: ScalarField) -> None:
    if a.grid != b.grid:
        raise GridMismatchError("fields live on different grids")


def dft(f: ScalarField) -> FourierSpectrum:
    return FourierSpectrum(f.grid, np.fft.fft2(f.values) / f.values.size)


def idft(spectrum: FourierSpectrum) -> ScalarField:
    c = spectrum.coefficients
    return ScalarField(spectrum.grid, np.fft.ifft2(c * c.size).real)


def laplacian_values(values: np.ndarray, grid: TorusGrid) -> np.ndarray:
    xi1, xi2 = grid.wavevectors
    mult = 4.0 * math.pi**2 * (xi1 * xi1 + xi2 * xi2)
    return np.fft.ifft2(mult * np.fft.fft2(values)).real


def laplacian(f: ScalarField) -> ScalarField:
    """Flat Laplacian with nonnegative spectrum: Delta cos(2 pi <xi, w>) = 4 pi^2 |xi|^2 cos(...)."""
    return f.with_values(laplacian_values(f.values, f.grid))


def derivative_values(values: np.ndarray, grid: TorusGrid, order: tuple[int, int]) -> np.ndarray:
    """Spectral partial derivative d^a/dw1^a d^b/dw2^b in physical coordinates."""
    a, b = order
    if a + b == 0:
        return np.array(values, dtype=float)
    xi1, xi2 = grid._derivative_wavevectors if (a + b) % 2 else grid.wavevectors
    mult = (2j * math.pi * xi1) ** a * (2j * math.pi * xi2) ** b
    return np.fft.ifft2(mult * np.fft.fft2(values)).real


def gradient(f: ScalarField) -> tuple[ScalarField, ScalarField]:
    return (
        f.with_values(derivative_values(f.values, f.grid, (1, 0))),
        f.with_values(derivative_values(f.values, f.grid, (0, 1))),
    )


def grad_norm(f: ScalarField) -> ScalarField:
    d1, d2 = gradient(f)
    return f.with_values(np.hypot(d1.values, d2.values))


def integrate(f: ScalarField, weight: ScalarField | None = None) -> float:
    """Rectangle rule over the torus; exact for trigonometric polynomials the grid resolves."""
    if weight is None:
        return float(np.sum(f.values) * f.grid.cell_area)
    _check_same_grid(f, weight)
    return float(np.sum(f.values * weight.values) * f.grid.cell_area)


def field_from_function(grid: TorusGrid, fn) -> ScalarField:
    """Sample fn(w1, w2) at the grid positions."""
    w1, w2 = grid.positions()
    return ScalarField(grid, np.broadcast_to(fn(w1, w2), grid.shape))


def resample(f: ScalarField, n1: int, n2: int) -> ScalarField:
    """Trigonometric interpolation onto another grid of the same torus (spectral zero padding/truncation)."""
    grid = TorusGrid(f.grid.moduli, n1, n2)
    c = np.fft.fftshift(np.fft.fft2(f.values) / f.values.size)
    out = np.zeros((n1, n2), dtype=complex)
    m1, m2 = min(n1, f.grid.n1), min(n2, f.grid.n2)
    src = c[
        f.grid.n1 // 2 - m1 // 2 : f.grid.n1 // 2 - m1 // 2 + m1,
        f.grid.n2 // 2 - m2 // 2 : f.grid.n2 // 2 - m2 // 2 + m2,
    ]
    out[n1 // 2 - m1 // 2 : n1 // 2 - m1 // 2 + m1, n2 // 2 - m2 // 2 : n2 // 2 - m2 // 2 + m2] = src
    vals = np.fft.ifft2(np.fft.ifftshift(out) * n1 * n2).real
    return ScalarField(grid, vals)


# -- file format -------------------------------------------------------------

def field_to_dict(f: ScalarField) -> dict:
    return {
        "lattice": f.grid.moduli.to_dict(),
        "grid": [f.grid.n1, f.grid.n2],
        "u": [float(v) for v in f.samples],
    }


def field_from_dict(d: dict) -> ScalarField:
    try:
        moduli = ModuliPoint.from_dict(d["lattice"])
        n1, n2 = (int(n) for n in d["grid"])
        u = np.asarray(d["u"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed field file: {exc}") from exc
    if not np.all(np.isfinite(u)):
        raise ValueError("field file contains non-finite samples")
    return ScalarField(TorusGrid(moduli, n1, n2), u)


def write_field(f: ScalarField, path) -> None:
    Path(path).write_text(json.dumps(field_to_dict(f)))


def read_field(path) -> ScalarField:
    # json accepts NaN/Infinity literals; reject them explicitly
    def _reject(token):
        raise ValueError(f"non-finite entry {token!r} in field file")

    d = json.loads(Path(path).read_text(), parse_constant=_reject)
    return field_from_dict(d)
