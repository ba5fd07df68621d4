"""File formats: raw complex-field rasters and 16-bit PGM intensity images.

Raw field format: one JSON header line ``{"nx":..,"ny":..,"dx":..,"dy":..}``
followed by nx*ny little-endian float64 (re, im) pairs, row-major over the
``[ix, iy]`` array layout (row index = ix).

PGM export: binary P5, maxval 65535 (two bytes per sample, most significant
byte first per the Netpbm spec).  Intensity is normalized to its maximum;
rows run top to bottom with +y at the top, columns left to right along +x.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .fields import ComplexField, GridSpec

__all__ = ["write_field", "read_field", "write_pgm"]


def write_field(path: str | Path, fld: ComplexField) -> None:
    g = fld.grid
    header = json.dumps({"nx": g.nx, "ny": g.ny, "dx": g.dx, "dy": g.dy})
    interleaved = np.empty((g.nx, g.ny, 2), dtype="<f8")
    interleaved[..., 0] = fld.amplitude.real
    interleaved[..., 1] = fld.amplitude.imag
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii") + b"\n")
        fh.write(interleaved.tobytes(order="C"))


def read_field(path: str | Path) -> ComplexField:
    with open(path, "rb") as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line.decode("ascii"))
            grid = GridSpec(int(header["nx"]), int(header["ny"]),
                            float(header["dx"]), float(header["dy"]))
        except (ValueError, KeyError) as exc:
            raise ValueError(f"{path}: malformed field header: {exc}") from exc
        raw = np.frombuffer(fh.read(), dtype="<f8")
    expected = grid.nx * grid.ny * 2
    if raw.size != expected:
        raise ValueError(f"{path}: expected {expected} float64 values, found {raw.size}")
    pairs = raw.reshape(grid.nx, grid.ny, 2)
    return ComplexField(grid, pairs[..., 0] + 1j * pairs[..., 1])


def write_pgm(path: str | Path, image: np.ndarray) -> None:
    """Write a nonnegative 2-D array (indexed [ix, iy]) as a 16-bit PGM."""
    img = np.asarray(image, dtype=float)
    if img.ndim != 2:
        raise ValueError("PGM export expects a 2-D array")
    if img.size and img.max() > 0:
        img = img / img.max()
    # [ix, iy] -> rows top to bottom = y descending, columns = x ascending.
    rows = np.flip(img.T, axis=0)
    data = np.round(rows * 65535.0).astype(">u2")
    nx = img.shape[0]
    ny = img.shape[1]
    with open(path, "wb") as fh:
        fh.write(f"P5\n{nx} {ny}\n65535\n".encode("ascii"))
        fh.write(data.tobytes(order="C"))
