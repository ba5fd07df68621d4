import numpy as np
import pytest

from diffstore import ComplexField, GridSpec


def rel_l2(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


@pytest.fixture
def grid64() -> GridSpec:
    return GridSpec(64, 64, 4e-6, 4e-6)


@pytest.fixture
def grid128() -> GridSpec:
    return GridSpec(128, 128, 8e-6, 8e-6)


@pytest.fixture
def default_grid() -> GridSpec:
    return GridSpec(512, 512, 4e-6, 4e-6)


def random_field(grid: GridSpec, seed: int, real: bool = False) -> ComplexField:
    rng = np.random.default_rng(seed)
    amp = rng.standard_normal(grid.shape)
    if not real:
        amp = amp + 1j * rng.standard_normal(grid.shape)
    return ComplexField(grid, amp)
