"""Deterministic generators for the input fields used by the storage pipeline.

Pattern conventions:

* DoublePetal: two Gaussian spots, amplitude exp(-|r - c|^2 / (2 w^2)), so the
  waist ``w`` is the 1/e-intensity radius of a petal.  The petal centers sit at
  +/- (separation/2) * (cos theta, sin theta); theta is the orientation of the
  separation axis measured from the +x axis, so theta = pi/2 puts the petals on
  the y-axis.
* GridPattern / Letter: binary masks smoothed by a one-pixel Gaussian edge.
* LGMode: standard Laguerre-Gaussian profile
      (sqrt(2) r / w)^|l| L_p^|l|(2 r^2 / w^2) exp(-r^2 / w^2) exp(i l phi).

Every generated field is peak-normalized to 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.ndimage import gaussian_filter
from scipy.special import eval_genlaguerre

from .fields import ComplexField, GridSpec, forward_ft, sample_bilinear

__all__ = [
    "DoublePetal",
    "GridPattern",
    "Letter",
    "LGMode",
    "PatternSpec",
    "generate",
    "footprint_radius",
    "lg_spectrum_check",
    "supported_glyphs",
]

MAX_RADIAL_INDEX = 5
MAX_AZIMUTHAL_INDEX = 10

# 5x7 bitmap font, rows top to bottom.
_FONT_5X7 = {
    "A": (".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "C": (".####", "#....", "#....", "#....", "#....", "#....", ".####"),
    "E": ("#####", "#....", "#....", "####.", "#....", "#....", "#####"),
    "F": ("#####", "#....", "#....", "####.", "#....", "#....", "#...."),
    "H": ("#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "I": ("#####", "..#..", "..#..", "..#..", "..#..", "..#..", "#####"),
    "L": ("#....", "#....", "#....", "#....", "#....", "#....", "#####"),
    "M": ("#...#", "##.##", "#.#.#", "#...#", "#...#", "#...#", "#...#"),
    "N": ("#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#", "#...#"),
    "O": (".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "P": ("####.", "#...#", "#...#", "####.", "#....", "#....", "#...."),
    "T": ("#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."),
    "U": ("#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "X": ("#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#"),
    "Z": ("#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"),
}


def supported_glyphs() -> str:
    return "".join(sorted(_FONT_5X7))


def _positive(name: str, value: float) -> None:
    if not (np.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class DoublePetal:
    waist: float
    separation: float
    theta: float = 0.0

    def __post_init__(self):
        _positive("waist", self.waist)
        _positive("separation", self.separation)
        if not np.isfinite(self.theta):
            raise ValueError("theta must be finite")


@dataclass(frozen=True)
class GridPattern:
    bar_spacing: float
    bar_width: float
    n_bars: int = 4

    def __post_init__(self):
        _positive("bar_spacing", self.bar_spacing)
        _positive("bar_width", self.bar_width)
        if self.n_bars < 1:
            raise ValueError(f"n_bars must be >= 1, got {self.n_bars}")


@dataclass(frozen=True)
class Letter:
    glyph: str
    height: float

    def __post_init__(self):
        if self.glyph not in _FONT_5X7:
            raise ValueError(
                f"unsupported glyph {self.glyph!r}; supported set: {supported_glyphs()}"
            )
        _positive("height", self.height)


@dataclass(frozen=True)
class LGMode:
    p: int
    l: int
    waist: float

    def __post_init__(self):
        if not 0 <= self.p <= MAX_RADIAL_INDEX:
            raise ValueError(f"radial index p must be in [0, {MAX_RADIAL_INDEX}], got {self.p}")
        if abs(self.l) > MAX_AZIMUTHAL_INDEX:
            raise ValueError(
                f"|azimuthal index| must be <= {MAX_AZIMUTHAL_INDEX}, got {self.l}"
            )
        _positive("waist", self.waist)


PatternSpec = Union[DoublePetal, GridPattern, Letter, LGMode]


def footprint_radius(spec: PatternSpec) -> float:
    """Half-extent of the pattern, used for grid-margin checks.

    Gaussian-tailed patterns are bounded at 2.5 waists (amplitude ~4% there);
    together with the 4-sigma diffusion margin this keeps periodic wrap
    leakage far below 1e-6 of the field energy.
    """
    if isinstance(spec, DoublePetal):
        return 0.5 * spec.separation + 2.5 * spec.waist
    if isinstance(spec, GridPattern):
        half_span = 0.5 * (spec.n_bars - 1) * spec.bar_spacing + 0.5 * spec.bar_width
        return np.sqrt(2.0) * half_span
    if isinstance(spec, Letter):
        cell = spec.height / 7.0
        return 0.5 * np.hypot(spec.height, 5.0 * cell)
    if isinstance(spec, LGMode):
        ring = spec.waist * np.sqrt(0.5 * abs(spec.l) + 2.0 * spec.p + 1.0)
        return ring + 2.5 * spec.waist
    raise TypeError(f"unknown pattern spec {type(spec).__name__}")


def _check_fits(spec: PatternSpec, grid: GridSpec) -> None:
    extent = min(grid.extent)
    for name in ("waist", "separation", "bar_spacing", "bar_width", "height"):
        value = getattr(spec, name, None)
        if value is not None and value >= extent:
            raise ValueError(f"{name} = {value} m does not fit the grid extent {extent} m")
    if 2.0 * footprint_radius(spec) > max(grid.extent) * np.sqrt(2.0):
        raise ValueError("pattern footprint exceeds the grid")


def _smooth_edges(mask: np.ndarray) -> np.ndarray:
    # One-pixel Gaussian edge; wrap mode keeps centered masks exactly symmetric.
    return gaussian_filter(mask, sigma=1.0, mode="wrap")


def _lg_radial(p: int, l: int, waist: float, r: np.ndarray) -> np.ndarray:
    rho = np.sqrt(2.0) * r / waist
    return rho ** abs(l) * eval_genlaguerre(p, abs(l), rho**2) * np.exp(-(r / waist) ** 2)


def generate(spec: PatternSpec, grid: GridSpec) -> ComplexField:
    """Render a pattern onto the grid; peak |amplitude| is normalized to 1."""
    _check_fits(spec, grid)
    X, Y = grid.meshgrid()

    if isinstance(spec, DoublePetal):
        cx = 0.5 * spec.separation * np.cos(spec.theta)
        cy = 0.5 * spec.separation * np.sin(spec.theta)
        two_w2 = 2.0 * spec.waist**2
        amp = np.exp(-((X - cx) ** 2 + (Y - cy) ** 2) / two_w2) + np.exp(
            -((X + cx) ** 2 + (Y + cy) ** 2) / two_w2
        )
    elif isinstance(spec, GridPattern):
        centers = (np.arange(spec.n_bars) - 0.5 * (spec.n_bars - 1)) * spec.bar_spacing
        mask_x = np.zeros(grid.shape)
        mask_y = np.zeros(grid.shape)
        half = 0.5 * spec.bar_width
        for c in centers:
            mask_x = np.maximum(mask_x, (np.abs(X - c) <= half).astype(float))
            mask_y = np.maximum(mask_y, (np.abs(Y - c) <= half).astype(float))
        amp = _smooth_edges(np.maximum(mask_x, mask_y))
    elif isinstance(spec, Letter):
        rows = _FONT_5X7[spec.glyph]
        cell = spec.height / 7.0
        col = np.floor((X + 2.5 * cell) / cell)
        row = np.floor((0.5 * spec.height - Y) / cell)
        mask = np.zeros(grid.shape)
        inside = (col >= 0) & (col < 5) & (row >= 0) & (row < 7)
        ci = col[inside].astype(int)
        ri = row[inside].astype(int)
        bitmap = np.array([[ch == "#" for ch in line] for line in rows])
        mask[inside] = bitmap[ri, ci]
        amp = _smooth_edges(mask)
    elif isinstance(spec, LGMode):
        r = np.hypot(X, Y)
        amp = _lg_radial(spec.p, spec.l, spec.waist, r) * np.exp(1j * spec.l * np.arctan2(Y, X))
    else:
        raise TypeError(f"unknown pattern spec {type(spec).__name__}")

    amp = np.asarray(amp, dtype=np.complex128)
    peak = np.abs(amp).max()
    if peak == 0:
        raise ValueError("generated pattern is identically zero on this grid")
    return ComplexField(grid, amp / peak)


def _ring_samples(values: np.ndarray, grid: GridSpec, radius: float, in_q_space: bool,
                  n_angles: int = 720) -> tuple[np.ndarray, np.ndarray]:
    angles = np.linspace(0.0, 2.0 * np.pi, n_angles, endpoint=False)
    if in_q_space:
        # q-lattice points map onto the pixel lattice: q = m * dq <-> x = m * dx.
        xs = radius * np.cos(angles) / grid.dqx * grid.dx
        ys = radius * np.sin(angles) / grid.dqy * grid.dy
    else:
        xs = radius * np.cos(angles)
        ys = radius * np.sin(angles)
    return angles, sample_bilinear(values, grid, xs, ys)


def _ring_peak_radius(mag: np.ndarray, grid: GridSpec, radii: np.ndarray, in_q_space: bool) -> float:
    """Radius maximizing the azimuthally averaged magnitude."""
    means = np.empty(radii.size)
    for i, rad in enumerate(radii):
        _, vals = _ring_samples(mag, grid, rad, in_q_space, n_angles=360)
        means[i] = np.mean(np.abs(vals))
    return float(radii[np.argmax(means)])


def _winding_number(ring_values: np.ndarray) -> int:
    steps = np.angle(np.roll(ring_values, -1) / ring_values)
    return int(np.round(np.sum(steps) / (2.0 * np.pi)))


def lg_spectrum_check(p: int, l: int, waist: float, grid: GridSpec) -> tuple[int, float]:
    """Measure the spectral phase winding and spiral offset of an LG mode.

    Returns ``(winding, spiral_offset)`` where ``winding`` is the topological
    charge of the Fourier-space phase profile (expected: l) and
    ``spiral_offset`` is the mean phase offset between the spectral and
    real-space ring profiles divided by the signed charge l -- the azimuthal
    rotation of the spiral per unit charge.  Its magnitude is pi/2 and its
    sign is odd in l; the overall handedness follows the package's FT
    convention.  For l = 0 the offset is reported as 0 by convention.
    """
    fld = generate(LGMode(p=p, l=l, waist=waist), grid)
    if l == 0:
        return 0, 0.0  # no spiral; offset undefined, reported as 0 by convention
    spec = forward_ft(fld)

    q_radii = np.arange(1, grid.nx // 2 - 1) * grid.dqx
    q_ring = _ring_peak_radius(spec.magnitude(), grid, q_radii, in_q_space=True)
    if q_ring < 3.0 * grid.dqx:
        raise ValueError(
            f"spectral ring radius {q_ring:.3g} 1/m is under-resolved "
            f"(< 3 bins of {grid.dqx:.3g} 1/m)"
        )

    _, spec_ring = _ring_samples(spec.amplitude, grid, q_ring, in_q_space=True)
    winding = _winding_number(spec_ring)

    r_radii = np.arange(1, grid.nx // 2 - 1) * grid.dx
    r_ring = _ring_peak_radius(np.abs(fld.amplitude), grid, r_radii, in_q_space=False)
    _, real_ring = _ring_samples(fld.amplitude, grid, r_ring, in_q_space=False)

    rotors = spec_ring * np.conj(real_ring)
    rotors = rotors / np.abs(rotors)
    mean_phase_offset = float(np.angle(np.sum(rotors)))
    return winding, mean_phase_offset / l
