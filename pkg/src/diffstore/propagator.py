"""The storage propagator in four interchangeable realizations.

A field stored for time t in a diffusive medium with transverse wavevector
offset k_perp evolves, in q-space, by the multiplicative filter

    G(q) = exp(-D t |q - k_perp|^2),

i.e. a Gaussian band-pass centered at k_perp with 1/e half-width (bandwidth)
1/sqrt(2 D t).  The realizations:

* ``store_spectral`` -- the closed-form spectral filter (main pipeline);
* ``store_fd``       -- explicit finite differences on the gauged diffusion
                        equation  du/dt = D (lap - 2 i k.grad - |k|^2) u;
* ``store_green``    -- direct real-space convolution with the sampled kernel
                        exp(+i k.dr) exp(-|dr|^2 / 4 D t) / (4 pi D t),
                        applied as two 1-D circulant products (the kernel is
                        separable); boundaries are periodic, handled by
                        summing the nearest kernel images;
* ``two_point_solution`` -- the analytic two-delta-source solution, used as a
                        ratio oracle only (unnormalized).

All propagators are pure functions of immutable inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .fields import ComplexField, GridSpec, SpectralField, forward_ft, inverse_ft

__all__ = [
    "StorageParams",
    "FilterProfile",
    "kperp_from_angles",
    "bandwidth",
    "filter_profile",
    "check_grid_supports",
    "store_spectral",
    "store_fd",
    "store_green",
    "two_point_solution",
    "phase_difference",
]

MAX_BETA = 0.1  # small-angle regime bound, radians
FD_STABILITY = 0.2  # D dt / min(dx,dy)^2 upper bound for the explicit scheme
MAX_FD_STEPS = 5_000_000


@dataclass(frozen=True)
class StorageParams:
    """Physical storage knobs (all SI).

    D: diffusion coefficient [m^2/s]; t: storage time [s];
    alpha: angle of k_perp from the x-axis [rad];
    beta: angular deviation between control and probe [rad];
    lambda_c: control wavelength [m].
    """

    D: float
    t: float
    alpha: float = 0.0
    beta: float = 0.0
    lambda_c: float = 795e-9

    def __post_init__(self):
        if not (np.isfinite(self.D) and self.D > 0):
            raise ValueError(f"D must be positive, got {self.D!r}")
        if not (np.isfinite(self.t) and self.t >= 0):
            raise ValueError(f"t must be >= 0, got {self.t!r}")
        if not (np.isfinite(self.beta) and 0 <= self.beta < MAX_BETA):
            raise ValueError(
                f"beta must lie in [0, {MAX_BETA}) rad (small-angle regime), got {self.beta!r}"
            )
        if not (np.isfinite(self.alpha)):
            raise ValueError(f"alpha must be finite, got {self.alpha!r}")
        if not (np.isfinite(self.lambda_c) and self.lambda_c > 0):
            raise ValueError(f"lambda_c must be positive, got {self.lambda_c!r}")

    @property
    def k_control(self) -> float:
        """Control-beam wavenumber 2 pi / lambda_c [1/m]."""
        return 2.0 * np.pi / self.lambda_c

    def replace(self, **kwargs) -> "StorageParams":
        values = dict(D=self.D, t=self.t, alpha=self.alpha, beta=self.beta,
                      lambda_c=self.lambda_c)
        values.update(kwargs)
        return StorageParams(**values)


def kperp_from_angles(params: StorageParams) -> np.ndarray:
    """Transverse wavevector offset beta * (2 pi / lambda_c) * (cos a, sin a)."""
    k = params.beta * params.k_control
    return np.array([k * np.cos(params.alpha), k * np.sin(params.alpha)])


def bandwidth(params: StorageParams) -> float:
    """Filter bandwidth 1 / sqrt(2 D t); rejects t = 0 (identity store)."""
    if params.t <= 0:
        raise ValueError("bandwidth is undefined for t = 0 (the spectral store is the identity)")
    return 1.0 / math.sqrt(2.0 * params.D * params.t)


@dataclass(frozen=True)
class FilterProfile:
    """Transmissivity exp(-D t |q - k_perp|^2) sampled on the q-lattice.

    The analytic maximum (1 at q = k_perp) is attained on the lattice only
    when k_perp falls on a q-bin; the sampled peak sits at the nearest bin.
    Far tails may underflow to 0 in float64.
    """

    grid: GridSpec
    transmissivity: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.transmissivity, dtype=float, copy=True)
        if arr.shape != self.grid.shape:
            raise ValueError("transmissivity shape does not match grid")
        if not np.isfinite(arr).all():
            raise ValueError("transmissivity must be finite")
        if arr.min() < 0 or arr.max() > 1 + 1e-12:
            raise ValueError("transmissivity must lie in [0, 1]")
        arr.setflags(write=False)
        object.__setattr__(self, "transmissivity", arr)


def filter_profile(params: StorageParams, grid: GridSpec) -> FilterProfile:
    QX, QY = grid.q_meshgrid()
    kx, ky = kperp_from_angles(params)
    trans = np.exp(-params.D * params.t * ((QX - kx) ** 2 + (QY - ky) ** 2))
    return FilterProfile(grid, trans)


def check_grid_supports(params: StorageParams, grid: GridSpec) -> None:
    """Reject grids whose Nyquist band cannot hold the shifted filter.

    Requires pi/dx (and pi/dy) > |k_perp| + 3 / sqrt(2 D t).
    """
    if params.t <= 0:
        return
    k = float(np.hypot(*kperp_from_angles(params)))
    required = k + 3.0 * bandwidth(params)
    if grid.q_nyquist <= required:
        needed_pitch = np.pi / required
        raise ValueError(
            f"grid Nyquist {grid.q_nyquist:.4g} 1/m does not cover |k_perp| + 3 bandwidths "
            f"= {required:.4g} 1/m; pixel pitch must be below {needed_pitch:.4g} m"
        )


def store_spectral(fld: ComplexField, params: StorageParams) -> ComplexField:
    """Spectral closed form: inverse_ft(G(q) * forward_ft(input)).

    t = 0 returns the input bit-identically.
    """
    if params.t == 0:
        return fld
    check_grid_supports(params, fld.grid)
    spec = forward_ft(fld)
    trans = filter_profile(params, fld.grid).transmissivity
    return inverse_ft(SpectralField(fld.grid, spec.amplitude * trans))


@numba.njit(cache=True)
def _fd_evolve(u, n_steps, Ddt, inv_dx2, inv_dy2, inv_2dx, inv_2dy, kx, ky, k2):
    nx, ny = u.shape
    v = np.empty_like(u)
    for _ in range(n_steps):
        for i in range(nx):
            im = i - 1 if i > 0 else nx - 1
            ip = i + 1 if i < nx - 1 else 0
            for j in range(ny):
                jm = j - 1 if j > 0 else ny - 1
                jp = j + 1 if j < ny - 1 else 0
                lap = (u[ip, j] + u[im, j] - 2.0 * u[i, j]) * inv_dx2 + (
                    u[i, jp] + u[i, jm] - 2.0 * u[i, j]
                ) * inv_dy2
                grad = (
                    kx * (u[ip, j] - u[im, j]) * inv_2dx
                    + ky * (u[i, jp] - u[i, jm]) * inv_2dy
                )
                v[i, j] = u[i, j] + Ddt * (lap - 2.0j * grad - k2 * u[i, j])
        u, v = v, u
    return u


def store_fd(fld: ComplexField, params: StorageParams, dt_max: float = math.inf) -> ComplexField:
    """Explicit finite-difference integration of the gauged diffusion equation.

    Second-order central differences in space, forward Euler in time with
    D dt / min(dx, dy)^2 <= 0.2 and dt <= dt_max.  Periodic boundaries.
    """
    if not (dt_max > 0):
        raise ValueError(f"dt_max must be positive, got {dt_max!r}")
    if params.t == 0:
        return fld
    check_grid_supports(params, fld.grid)
    g = fld.grid
    dt_stable = FD_STABILITY * min(g.dx, g.dy) ** 2 / params.D
    dt = min(dt_stable, dt_max, params.t)
    n_steps = math.ceil(params.t / dt)
    if n_steps > MAX_FD_STEPS:
        raise ValueError(
            f"stability bound unsatisfiable in practice: dt_max = {dt_max!r} needs "
            f"{n_steps} steps (> {MAX_FD_STEPS})"
        )
    dt = params.t / n_steps
    kx, ky = kperp_from_angles(params)

    u = _fd_evolve(
        fld.amplitude.copy(),
        n_steps,
        params.D * dt,
        1.0 / g.dx**2,
        1.0 / g.dy**2,
        0.5 / g.dx,
        0.5 / g.dy,
        kx,
        ky,
        kx**2 + ky**2,
    )
    return ComplexField(g, u)


def _green_kernel_1d(n: int, d: float, k: float, four_dt: float, length: float) -> np.ndarray:
    """Sampled 1-D factor of the separable kernel, periodized over +/- one image.

    The phase sign (+i k dr) is the one consistent with the package's forward
    transform exp(-i q.r): it reproduces the spectral filter exactly.
    """
    offsets = (np.arange(n) - n // 2) * d
    ker = np.zeros(n, dtype=np.complex128)
    for image in (-length, 0.0, length):
        dr = offsets + image
        ker += np.exp(1j * k * dr - dr**2 / four_dt)
    return ker * d / math.sqrt(math.pi * four_dt)


def _circulant(kernel_centered: np.ndarray) -> np.ndarray:
    """Circulant matrix C[i, j] = kernel(displacement i - j), centered layout."""
    n = kernel_centered.size
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :] + n // 2) % n
    return kernel_centered[idx]


def store_green(fld: ComplexField, params: StorageParams) -> ComplexField:
    """Direct real-space convolution with the sampled storage kernel.

    The kernel exp(+i k.dr) exp(-|dr|^2/(4 D t)) / (4 pi D t) is separable, so
    the periodic convolution is applied as one circulant matrix product per
    axis -- no Fourier transform is involved.  t = 0 is an identity shortcut.
    """
    if params.t == 0:
        return fld
    check_grid_supports(params, fld.grid)
    g = fld.grid
    kx, ky = kperp_from_angles(params)
    four_dt = 4.0 * params.D * params.t
    cx = _circulant(_green_kernel_1d(g.nx, g.dx, kx, four_dt, g.nx * g.dx))
    cy = _circulant(_green_kernel_1d(g.ny, g.dy, ky, four_dt, g.ny * g.dy))
    out = cx @ fld.amplitude @ cy.T
    return ComplexField(g, out)


def two_point_solution(r1, r2, r, params: StorageParams) -> complex:
    """Unnormalized analytic field of two delta sources after storage.

    exp(-i k.(r-r1) - |r-r1|^2/(4Dt)) + exp(-i k.(r-r2) - |r-r2|^2/(4Dt)).
    Intended for ratio and zero-location checks only.
    """
    if params.t <= 0:
        raise ValueError("two_point_solution requires t > 0")
    kvec = kperp_from_angles(params)
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    r = np.asarray(r, dtype=float)
    four_dt = 4.0 * params.D * params.t
    total = 0.0 + 0.0j
    for src in (r1, r2):
        dr = r - src
        total += np.exp(-1j * float(kvec @ dr) - float(dr @ dr) / four_dt)
    return complex(total)


def phase_difference(r1, r2, params: StorageParams) -> float:
    """Retrieved phase difference k_perp.(r1 - r2), wrapped to (-pi, pi]."""
    kvec = kperp_from_angles(params)
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    phi = float(kvec @ (r1 - r2))
    wrapped = math.remainder(phi, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped
