"""Grids, complex scalar fields, and the centered Fourier-transform pair.

Conventions, fixed package-wide:

* The transverse plane is discretized on an ``nx x ny`` lattice with pixel
  pitch ``(dx, dy)``.  The origin r = 0 sits at pixel ``(nx//2, ny//2)``.
* Arrays are indexed ``[ix, iy]``; the first axis is x.
* Forward transform (physics sign):
      F(q) = sum_r f(r) exp(-i q.r) dx dy
  with the q = 0 bin at the centered index.  Angular frequencies are
      q_m = 2 pi m / (N d),  m in [-N/2, N/2).
* Inverse transform:
      f(r) = (2 pi)^-2 sum_q F(q) exp(+i q.r) dq_x dq_y
  so that inverse(forward(f)) == f up to round-off and Parseval reads
      sum |f|^2 dx dy = sum |F|^2 dq_x dq_y / (2 pi)^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GridSpec",
    "ComplexField",
    "SpectralField",
    "forward_ft",
    "inverse_ft",
    "sample_bilinear",
]


@dataclass(frozen=True)
class GridSpec:
    """Geometry of the discretized transverse plane.

    nx, ny are even pixel counts (>= 8); dx, dy the pixel pitch in meters.
    """

    nx: int
    ny: int
    dx: float
    dy: float

    def __post_init__(self):
        for name, n in (("nx", self.nx), ("ny", self.ny)):
            if not isinstance(n, (int, np.integer)) or n < 8 or n % 2 != 0:
                raise ValueError(f"{name} must be an even integer >= 8, got {n!r}")
        for name, d in (("dx", self.dx), ("dy", self.dy)):
            if not (np.isfinite(d) and d > 0):
                raise ValueError(f"{name} must be positive and finite, got {d!r}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def extent(self) -> tuple[float, float]:
        """Physical side lengths (nx*dx, ny*dy) in meters."""
        return (self.nx * self.dx, self.ny * self.dy)

    def x_axis(self) -> np.ndarray:
        """x coordinates of pixel centers; x = 0 at index nx//2."""
        return (np.arange(self.nx) - self.nx // 2) * self.dx

    def y_axis(self) -> np.ndarray:
        return (np.arange(self.ny) - self.ny // 2) * self.dy

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinate arrays X, Y of shape (nx, ny)."""
        return np.meshgrid(self.x_axis(), self.y_axis(), indexing="ij")

    def qx_axis(self) -> np.ndarray:
        """Centered angular spatial frequencies along x, q = 0 at index nx//2."""
        return 2.0 * np.pi * (np.arange(self.nx) - self.nx // 2) / (self.nx * self.dx)

    def qy_axis(self) -> np.ndarray:
        return 2.0 * np.pi * (np.arange(self.ny) - self.ny // 2) / (self.ny * self.dy)

    def q_meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.qx_axis(), self.qy_axis(), indexing="ij")

    @property
    def dqx(self) -> float:
        return 2.0 * np.pi / (self.nx * self.dx)

    @property
    def dqy(self) -> float:
        return 2.0 * np.pi / (self.ny * self.dy)

    @property
    def q_nyquist(self) -> float:
        """Smaller of the two Nyquist angular frequencies pi/dx, pi/dy."""
        return min(np.pi / self.dx, np.pi / self.dy)


def _frozen_complex(values: np.ndarray, shape: tuple[int, int], what: str) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128, copy=True)
    if arr.shape != shape:
        raise ValueError(f"{what} shape {arr.shape} does not match grid shape {shape}")
    bad = ~np.isfinite(arr)
    if bad.any():
        ix, iy = np.argwhere(bad)[0]
        raise ValueError(f"{what} contains a non-finite value at index ({ix}, {iy})")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ComplexField:
    """Complex field amplitude sampled on a GridSpec.

    Immutable after construction; all operations on fields are pure.
    """

    grid: GridSpec
    amplitude: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(
            self, "amplitude", _frozen_complex(self.amplitude, self.grid.shape, "field amplitude")
        )

    def intensity(self) -> np.ndarray:
        return np.abs(self.amplitude) ** 2

    def energy(self) -> float:
        """L2 energy sum |psi|^2 dx dy."""
        return float(np.sum(self.intensity()) * self.grid.dx * self.grid.dy)

    def with_amplitude(self, amplitude: np.ndarray) -> "ComplexField":
        return ComplexField(self.grid, amplitude)


@dataclass(frozen=True)
class SpectralField:
    """q-space representation; amplitude[ix, iy] at (qx_axis[ix], qy_axis[iy])."""

    grid: GridSpec
    amplitude: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(
            self, "amplitude", _frozen_complex(self.amplitude, self.grid.shape, "spectral amplitude")
        )

    @property
    def qx(self) -> np.ndarray:
        return self.grid.qx_axis()

    @property
    def qy(self) -> np.ndarray:
        return self.grid.qy_axis()

    def magnitude(self) -> np.ndarray:
        return np.abs(self.amplitude)

    def energy(self) -> float:
        """Spectral-side Parseval energy sum |F|^2 dq_x dq_y / (2 pi)^2."""
        return float(
            np.sum(np.abs(self.amplitude) ** 2) * self.grid.dqx * self.grid.dqy / (2.0 * np.pi) ** 2
        )


def forward_ft(fld: ComplexField) -> SpectralField:
    """Centered discrete Fourier transform, F(q) = sum psi exp(-i q.r) dx dy."""
    g = fld.grid
    amp = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(fld.amplitude))) * (g.dx * g.dy)
    return SpectralField(g, amp)


def inverse_ft(spec: SpectralField) -> ComplexField:
    """Exact inverse of forward_ft up to round-off."""
    g = spec.grid
    if spec.amplitude.shape != g.shape:
        raise ValueError(
            f"spectral amplitude shape {spec.amplitude.shape} does not match grid {g.shape}"
        )
    amp = np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(spec.amplitude))) / (g.dx * g.dy)
    return ComplexField(g, amp)


def rotate_quarter(fld: ComplexField) -> ComplexField:
    """Rotate a field by +90 degrees about the grid origin (center pixel).

    Exact lattice permutation (x, y) -> (-y, x) with periodic wrap; requires a
    square grid with equal pitch.
    """
    g = fld.grid
    if g.nx != g.ny or g.dx != g.dy:
        raise ValueError("quarter-turn rotation requires a square grid with dx == dy")
    rows, cols = np.meshgrid(np.arange(g.nx), np.arange(g.ny), indexing="ij")
    return ComplexField(g, fld.amplitude[cols, (g.nx - rows) % g.nx])


def sample_bilinear(values: np.ndarray, grid: GridSpec, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Bilinear interpolation of a gridded array at physical points (xs, ys).

    Periodic in both axes, consistent with the package's periodic boundary
    model.  Works for real or complex arrays.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    fx = xs / grid.dx + grid.nx // 2
    fy = ys / grid.dy + grid.ny // 2
    ix0 = np.floor(fx).astype(np.int64)
    iy0 = np.floor(fy).astype(np.int64)
    tx = fx - ix0
    ty = fy - iy0
    ix0 %= grid.nx
    iy0 %= grid.ny
    ix1 = (ix0 + 1) % grid.nx
    iy1 = (iy0 + 1) % grid.ny
    return (
        values[ix0, iy0] * (1 - tx) * (1 - ty)
        + values[ix1, iy0] * tx * (1 - ty)
        + values[ix0, iy1] * (1 - tx) * ty
        + values[ix1, iy1] * tx * ty
    )
