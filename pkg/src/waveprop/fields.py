"""Periodic grid fields and Fourier multiplier references.

Fields live on uniform periodic boxes in one to three dimensions.  The
reference propagator is diagonal in the discrete Fourier basis, so
round-trip FFT exactness makes the discrete model self-consistent: the
kernel-averaging routes in pde.py are compared against these multipliers.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GridField",
    "SpectralOperator",
    "derivative_symbol",
    "wave_symbol",
    "klein_gordon_symbol",
    "damped_symbol",
    "spectral_wave_reference",
    "gaussian_bump",
    "effective_support_radius",
    "relative_l2_gap",
    "assert_no_wrap",
]


@dataclass(eq=False)
class GridField:
    """Complex samples on a uniform periodic box."""

    values: np.ndarray
    lengths: tuple[float, ...]
    origins: tuple[float, ...] | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if not 1 <= self.values.ndim <= 3:
            raise ValueError("fields must have one, two, or three axes")
        self.lengths = tuple(float(x) for x in np.atleast_1d(self.lengths))
        if len(self.lengths) != self.values.ndim:
            raise ValueError("one box length per axis required")
        if any(x <= 0 for x in self.lengths):
            raise ValueError("box lengths must be positive")
        if self.origins is None:
            self.origins = (0.0,) * self.values.ndim
        self.origins = tuple(float(x) for x in np.atleast_1d(self.origins))
        if len(self.origins) != self.values.ndim:
            raise ValueError("one origin per axis required")

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    def spacing(self, axis: int) -> float:
        return self.lengths[axis] / self.shape[axis]

    def axis_coordinates(self, axis: int) -> np.ndarray:
        return self.origins[axis] + self.spacing(axis) * np.arange(self.shape[axis])

    def wavenumbers(self, axis: int) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.shape[axis], d=self.spacing(axis))

    def fft(self) -> np.ndarray:
        return np.fft.fftn(self.values)

    def like(self, values: np.ndarray) -> "GridField":
        return GridField(values, self.lengths, self.origins)

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


@dataclass(eq=False)
class SpectralOperator:
    """Fourier multiplier on a fixed grid shape."""

    symbol: np.ndarray

    def apply(self, field: GridField) -> GridField:
        if self.symbol.shape != field.shape:
            raise ValueError("symbol shape does not match the field")
        return field.like(np.fft.ifftn(self.symbol * field.fft()))


def _k_grids(field: GridField) -> list[np.ndarray]:
    shape = field.shape
    out = []
    for axis in range(field.dim):
        k = field.wavenumbers(axis)
        view = [None] * field.dim
        view[axis] = slice(None)
        out.append(k[tuple(view)] * np.ones(shape))
    return out


def derivative_symbol(field: GridField, axis: int) -> SpectralOperator:
    """Multiplier of d/dx_axis: purely imaginary, odd in frequency."""
    return SpectralOperator(1j * _k_grids(field)[axis])


def _k_squared(field: GridField) -> np.ndarray:
    total = np.zeros(field.shape)
    for kg in _k_grids(field):
        total += kg.real ** 2
    return total


def wave_symbol(field: GridField) -> SpectralOperator:
    """|k|: the propagator multiplier becomes cos(t |k|)."""
    return SpectralOperator(np.sqrt(_k_squared(field)).astype(complex))


def klein_gordon_symbol(field: GridField, a: float) -> SpectralOperator:
    """sqrt(|k|^2 + a^2) for the mass-a dispersive wave."""
    return SpectralOperator(np.sqrt(_k_squared(field) + a * a).astype(complex))


def damped_symbol(field: GridField, a: float) -> SpectralOperator:
    """sqrt(|k|^2 - a^2); imaginary below the cutoff, where cos -> cosh."""
    return SpectralOperator(np.sqrt((_k_squared(field) - a * a).astype(complex)))


def spectral_wave_reference(field: GridField, t: float, symbol: SpectralOperator | None = None) -> GridField:
    """cos(t * symbol) applied in the Fourier basis; the oracle for grids."""
    op = wave_symbol(field) if symbol is None else symbol
    if op.symbol.shape != field.shape:
        raise ValueError("symbol shape does not match the field")
    multiplier = np.cos(t * op.symbol)
    return field.like(np.fft.ifftn(multiplier * field.fft()))


def gaussian_bump(shape, lengths, center, sigma: float, origins=None, amplitude: float = 1.0) -> GridField:
    """Gaussian bump exp(-|x-center|^2 / (2 sigma^2)) sampled on the box."""
    shape = tuple(np.atleast_1d(shape).astype(int))
    template = GridField(np.zeros(shape, dtype=complex), lengths, origins)
    center = np.atleast_1d(center).astype(float)
    r2 = np.zeros(shape)
    for axis in range(template.dim):
        x = template.axis_coordinates(axis) - center[axis]
        # nearest periodic image
        x = (x + template.lengths[axis] / 2.0) % template.lengths[axis] - template.lengths[axis] / 2.0
        view = [None] * template.dim
        view[axis] = slice(None)
        r2 = r2 + (x[tuple(view)] ** 2) * np.ones(shape)
    template.values = amplitude * np.exp(-r2 / (2.0 * sigma * sigma)).astype(complex)
    return template


def effective_support_radius(sigma: float, floor: float = 1e-12) -> float:
    """Radius past which the Gaussian bump falls below floor (relative)."""
    return sigma * math.sqrt(2.0 * math.log(1.0 / floor))


def relative_l2_gap(a: GridField | np.ndarray, b: GridField | np.ndarray) -> float:
    va = a.values if isinstance(a, GridField) else np.asarray(a)
    vb = b.values if isinstance(b, GridField) else np.asarray(b)
    return float(np.linalg.norm(va - vb) / max(np.linalg.norm(vb), 1e-300))


def assert_no_wrap(field: GridField, t: float, support_radius: float | None = None) -> None:
    """Warn when translated samples could wrap around the periodic box.

    Needs |t| + support radius < box/2.  When no radius is supplied it is
    estimated from the smallest ball around the field's peak containing
    all samples above 1e-12 of the maximum.
    """
    if support_radius is None:
        mag = np.abs(field.values)
        peak = mag.max()
        if peak == 0.0:
            return
        idx = np.unravel_index(int(mag.argmax()), field.shape)
        mask = mag > 1e-12 * peak
        r2 = np.zeros(field.shape)
        for axis in range(field.dim):
            x = field.axis_coordinates(axis) - field.axis_coordinates(axis)[idx[axis]]
            x = (x + field.lengths[axis] / 2.0) % field.lengths[axis] - field.lengths[axis] / 2.0
            view = [None] * field.dim
            view[axis] = slice(None)
            r2 = r2 + (x[tuple(view)] ** 2) * np.ones(field.shape)
        if not mask.any():
            return
        support_radius = float(np.sqrt(r2[mask].max()))
        if support_radius > 0.45 * min(field.lengths):
            return  # field fills the box (e.g. constants); wrap is meaningless
    if abs(t) + support_radius >= min(field.lengths) / 2.0:
        warnings.warn(
            f"|t| + support radius = {abs(t) + support_radius:.3f} exceeds half the box "
            f"({min(field.lengths) / 2.0:.3f}); periodic images will pollute the result",
            stacklevel=2,
        )
