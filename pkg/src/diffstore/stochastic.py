"""Monte-Carlo walker oracle for the storage propagator.

Walkers realize the spin-wave interference picture: each walker starts at a
pixel drawn with probability proportional to |psi|, carries the local phase
of the input plus the wavevector-offset phase exp(-i k.r0), takes a single
Gaussian step of variance 2 D t per axis (the diffusion propagator is closed
under composition, so one step is exact for the underlying PDE), picks up
exp(+i k.rf) at its destination, and is splatted bilinearly onto the grid.
The deposited field converges to ``store_spectral`` as n -> infinity with the
usual 1/sqrt(n) statistical error.

Randomness is consumed identically for every k_perp (the offset enters only
through deterministic phase factors), so runs with the same seed are gauge
images of each other walker by walker.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import ComplexField, GridSpec
from .propagator import StorageParams, kperp_from_angles, store_spectral

__all__ = ["WalkerEnsemble", "walk", "deposit", "mc_store", "mc_convergence", "child_seed"]

MIN_WALKERS = 10_000  # below this the deposited field is statistically meaningless


@dataclass(frozen=True)
class WalkerEnsemble:
    """Walkers after the diffusion step, ready for deposition."""

    n_walkers: int
    origins: np.ndarray = field(repr=False)  # (n, 2) start positions [m]
    positions: np.ndarray = field(repr=False)  # (n, 2) final positions [m]
    weights: np.ndarray = field(repr=False)  # (n,) complex amplitudes
    seed: int
    params: StorageParams

    def __post_init__(self):
        if self.n_walkers < 1:
            raise ValueError("n_walkers must be >= 1")
        if not np.isfinite(self.weights).all():
            raise ValueError("walker weights must be finite")


def walk(fld: ComplexField, params: StorageParams, n_walkers: int, seed: int) -> WalkerEnsemble:
    """Sample, phase, and displace walkers for one storage run."""
    if n_walkers < MIN_WALKERS:
        raise ValueError(f"n_walkers must be >= {MIN_WALKERS} for meaningful statistics")
    g = fld.grid
    mag = np.abs(fld.amplitude).ravel()
    total = mag.sum()
    if total == 0:
        raise ValueError("input field is identically zero; no sampling measure")

    rng = np.random.default_rng(seed)
    flat = rng.choice(mag.size, size=n_walkers, p=mag / total)
    sigma = np.sqrt(2.0 * params.D * params.t)
    steps = rng.normal(0.0, sigma, size=(n_walkers, 2)) if sigma > 0 else np.zeros((n_walkers, 2))

    ix, iy = np.divmod(flat, g.ny)
    origins = np.column_stack(((ix - g.nx // 2) * g.dx, (iy - g.ny // 2) * g.dy))
    positions = origins + steps

    amp0 = fld.amplitude.ravel()[flat]
    mag0 = np.abs(amp0)
    unit_phase = np.where(mag0 > 0, amp0 / np.where(mag0 > 0, mag0, 1.0), 1.0)
    kx, ky = kperp_from_angles(params)
    gauge = np.exp(-1j * (kx * origins[:, 0] + ky * origins[:, 1])) * np.exp(
        1j * (kx * positions[:, 0] + ky * positions[:, 1])
    )
    weights = (total / n_walkers) * unit_phase * gauge
    return WalkerEnsemble(n_walkers, origins, positions, weights, seed, params)


def deposit(ensemble: WalkerEnsemble, grid: GridSpec) -> ComplexField:
    """Bilinear splat of walker weights onto the grid, periodic boundaries."""
    fx = ensemble.positions[:, 0] / grid.dx + grid.nx // 2
    fy = ensemble.positions[:, 1] / grid.dy + grid.ny // 2
    ix0 = np.floor(fx).astype(np.int64)
    iy0 = np.floor(fy).astype(np.int64)
    tx = fx - ix0
    ty = fy - iy0
    ix0 %= grid.nx
    iy0 %= grid.ny
    ix1 = (ix0 + 1) % grid.nx
    iy1 = (iy0 + 1) % grid.ny

    w = ensemble.weights
    idx = np.concatenate(
        (ix0 * grid.ny + iy0, ix1 * grid.ny + iy0, ix0 * grid.ny + iy1, ix1 * grid.ny + iy1)
    )
    vals = np.concatenate(
        (w * (1 - tx) * (1 - ty), w * tx * (1 - ty), w * (1 - tx) * ty, w * tx * ty)
    )
    size = grid.nx * grid.ny
    acc = np.bincount(idx, weights=vals.real, minlength=size) + 1j * np.bincount(
        idx, weights=vals.imag, minlength=size
    )
    return ComplexField(grid, acc.reshape(grid.nx, grid.ny))


def mc_store(fld: ComplexField, params: StorageParams, n_walkers: int, seed: int) -> ComplexField:
    """Monte-Carlo estimate of the stored field; converges to store_spectral."""
    return deposit(walk(fld, params, n_walkers, seed), fld.grid)


def _rel_l2(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


def child_seed(seed: int, index: int) -> int:
    """Deterministic per-run seed derivation used by the convergence table."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def mc_convergence(
    fld: ComplexField, params: StorageParams, n_list: list[int], seed: int
) -> list[tuple[int, float]]:
    """Relative L2 error of mc_store against store_spectral for each n.

    Each row uses an independent, deterministically derived seed, so the
    whole table is reproducible from (inputs, seed).  Errors follow the
    1/sqrt(n) Monte-Carlo law (log-log slope close to -1/2).
    """
    if len(n_list) == 0:
        raise ValueError("n_list must be non-empty")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly ascending")
    reference = store_spectral(fld, params).amplitude
    rows = []
    for i, n in enumerate(n_list):
        estimate = mc_store(fld, params, int(n), seed=child_seed(seed, i))
        rows.append((int(n), _rel_l2(estimate.amplitude, reference)))
    return rows
