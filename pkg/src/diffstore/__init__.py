"""Spatial-frequency filtering of optical fields stored in diffusive media.

Core pipeline: generate an input field, apply the storage propagator (a
Gaussian band-pass in q-space whose center is set by the control/probe
angular deviation), and analyze the retrieved field.
"""

from .fields import (
    ComplexField,
    GridSpec,
    SpectralField,
    forward_ft,
    inverse_ft,
    rotate_quarter,
    sample_bilinear,
)
from .fieldio import read_field, write_field, write_pgm
from .patterns import (
    DoublePetal,
    GridPattern,
    Letter,
    LGMode,
    PatternSpec,
    generate,
    lg_spectrum_check,
)
from .propagator import (
    FilterProfile,
    StorageParams,
    bandwidth,
    filter_profile,
    kperp_from_angles,
    phase_difference,
    store_fd,
    store_green,
    store_spectral,
    two_point_solution,
)
from .stochastic import WalkerEnsemble, deposit, mc_convergence, mc_store, walk
from .analysis import (
    DefectResult,
    Metrics,
    Recommendation,
    SfAxisResult,
    SweepResult,
    axis_band_energies,
    defect_angle,
    dominant_sf_axis,
    psnr,
    recommend_kperp,
    sf_spectrum,
    sweep_beta,
    visibility,
)

__version__ = "0.1.0"

__all__ = [
    "ComplexField",
    "GridSpec",
    "SpectralField",
    "forward_ft",
    "inverse_ft",
    "rotate_quarter",
    "sample_bilinear",
    "read_field",
    "write_field",
    "write_pgm",
    "DoublePetal",
    "GridPattern",
    "Letter",
    "LGMode",
    "PatternSpec",
    "generate",
    "lg_spectrum_check",
    "FilterProfile",
    "StorageParams",
    "bandwidth",
    "filter_profile",
    "kperp_from_angles",
    "phase_difference",
    "store_fd",
    "store_green",
    "store_spectral",
    "two_point_solution",
    "WalkerEnsemble",
    "walk",
    "deposit",
    "mc_convergence",
    "mc_store",
    "axis_band_energies",
    "DefectResult",
    "Metrics",
    "Recommendation",
    "SfAxisResult",
    "SweepResult",
    "defect_angle",
    "dominant_sf_axis",
    "psnr",
    "recommend_kperp",
    "sf_spectrum",
    "sweep_beta",
    "visibility",
]
