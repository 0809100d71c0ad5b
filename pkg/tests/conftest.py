from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from squareflow.grid import Grid2D, ScalarField, VectorField


@pytest.fixture
def grid16() -> Grid2D:
    return Grid2D(16, 16)


@pytest.fixture
def grid32() -> Grid2D:
    return Grid2D(32, 32)


def random_scalar(grid: Grid2D, seed: int) -> ScalarField:
    rng = np.random.default_rng(seed)
    return ScalarField(grid, rng.standard_normal(grid.node_shape))


def random_vector(grid: Grid2D, seed: int) -> VectorField:
    rng = np.random.default_rng(seed)
    return VectorField.from_arrays(
        grid, rng.standard_normal(grid.node_shape), rng.standard_normal(grid.node_shape)
    )


def smooth_random_vector(grid: Grid2D, seed: int, modes: int = 4) -> VectorField:
    """Random low-mode sine series per component (no-slip)."""
    rng = np.random.default_rng(seed)
    X, Y = grid.mesh()
    comps = []
    for _ in range(2):
        v = np.zeros(grid.node_shape)
        for i in range(1, modes + 1):
            for j in range(1, modes + 1):
                v += rng.standard_normal() / (i * i + j * j) * np.sin(i * np.pi * X) * np.sin(
                    j * np.pi * Y
                )
        comps.append(v)
    return VectorField.from_arrays(grid, comps[0], comps[1])


def l2(field: ScalarField) -> float:
    from squareflow.grid import inner_product

    return float(np.sqrt(inner_product(field, field)))


def vec_l2(u: VectorField) -> float:
    from squareflow.grid import inner_product

    return float(np.sqrt(inner_product(u.u1, u.u1) + inner_product(u.u2, u.u2)))


def max_diff(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)))
