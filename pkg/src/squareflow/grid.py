"""Uniform node-based grid on the unit square and the fields living on it.

Index convention: nodal values are stored row-major with shape
``(ny + 1, nx + 1)``, i.e. ``values[j, i]`` is the value at
``(x, y) = (i * hx, j * hy)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

__all__ = [
    "Grid2D",
    "ScalarField",
    "VectorField",
    "BoundaryData",
    "inner_product",
    "trapezoid_weights",
    "apply_dirichlet",
]


@dataclass(frozen=True)
class Grid2D:
    """Uniform grid with ``nx * ny`` cells, nodes at ``(i*hx, j*hy)``."""

    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 8 or self.ny < 8:
            raise ValueError(f"grid must have nx, ny >= 8, got ({self.nx}, {self.ny})")

    @property
    def hx(self) -> float:
        return 1.0 / self.nx

    @property
    def hy(self) -> float:
        return 1.0 / self.ny

    @property
    def node_shape(self) -> tuple[int, int]:
        return (self.ny + 1, self.nx + 1)

    @property
    def n_nodes(self) -> int:
        return (self.nx + 1) * (self.ny + 1)

    def x_nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.nx + 1)

    def y_nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.ny + 1)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Nodal coordinate arrays ``X, Y`` of shape ``node_shape``.

        The arrays are cached per grid and marked read-only.
        """
        return _mesh_arrays(self)


@lru_cache(maxsize=32)
def _mesh_arrays(grid: Grid2D) -> tuple[np.ndarray, np.ndarray]:
    X, Y = np.meshgrid(grid.x_nodes(), grid.y_nodes())
    X.flags.writeable = False
    Y.flags.writeable = False
    return X, Y


@lru_cache(maxsize=32)
def trapezoid_weights(grid: Grid2D) -> np.ndarray:
    """Nodal quadrature weights of the 2D trapezoidal rule (sum to 1)."""
    wx = np.full(grid.nx + 1, grid.hx)
    wx[0] = wx[-1] = 0.5 * grid.hx
    wy = np.full(grid.ny + 1, grid.hy)
    wy[0] = wy[-1] = 0.5 * grid.hy
    return np.outer(wy, wx)


@dataclass
class ScalarField:
    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != self.grid.node_shape:
            raise ValueError(
                f"values shape {self.values.shape} does not match grid nodes {self.grid.node_shape}"
            )

    @classmethod
    def zeros(cls, grid: Grid2D) -> "ScalarField":
        return cls(grid, np.zeros(grid.node_shape))

    @classmethod
    def from_function(cls, grid: Grid2D, fn: Callable) -> "ScalarField":
        X, Y = grid.mesh()
        return cls(grid, np.asarray(fn(X, Y), dtype=np.float64) + np.zeros(grid.node_shape))

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())

    def mean(self) -> float:
        """Trapezoidal mean over the unit square."""
        return float(np.sum(trapezoid_weights(self.grid) * self.values))


@dataclass
class VectorField:
    u1: ScalarField
    u2: ScalarField

    def __post_init__(self):
        if self.u1.grid != self.u2.grid:
            raise ValueError("vector field components live on different grids")

    @property
    def grid(self) -> Grid2D:
        return self.u1.grid

    @classmethod
    def zeros(cls, grid: Grid2D) -> "VectorField":
        return cls(ScalarField.zeros(grid), ScalarField.zeros(grid))

    @classmethod
    def from_functions(cls, grid: Grid2D, f1: Callable, f2: Callable) -> "VectorField":
        return cls(ScalarField.from_function(grid, f1), ScalarField.from_function(grid, f2))

    @classmethod
    def from_arrays(cls, grid: Grid2D, v1: np.ndarray, v2: np.ndarray) -> "VectorField":
        return cls(ScalarField(grid, v1), ScalarField(grid, v2))

    def copy(self) -> "VectorField":
        return VectorField(self.u1.copy(), self.u2.copy())


@dataclass
class BoundaryData:
    """Per-side nodal values on the four sides of the square.

    ``left``/``right`` are indexed by j (length ny+1), ``bottom``/``top`` by
    i (length nx+1).  Corner nodes appear in both adjacent sides; consumers
    that need a single corner value use the side-priority order
    (left, right, bottom, top), horizontal sides applied last.
    """

    grid: Grid2D
    left: np.ndarray
    right: np.ndarray
    bottom: np.ndarray
    top: np.ndarray
    kind: str = "dirichlet"  # "dirichlet" | "neumann"

    def __post_init__(self):
        ny1, nx1 = self.grid.node_shape
        for name in ("left", "right", "bottom", "top"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            setattr(self, name, arr)
            want = ny1 if name in ("left", "right") else nx1
            if arr.shape != (want,):
                raise ValueError(f"{name} side must have {want} nodes, got {arr.shape}")
        if self.kind not in ("dirichlet", "neumann"):
            raise ValueError(f"unknown boundary kind {self.kind!r}")

    @classmethod
    def zeros(cls, grid: Grid2D, kind: str = "dirichlet") -> "BoundaryData":
        return cls(
            grid,
            np.zeros(grid.ny + 1),
            np.zeros(grid.ny + 1),
            np.zeros(grid.nx + 1),
            np.zeros(grid.nx + 1),
            kind=kind,
        )

    @classmethod
    def dirichlet_trace(cls, p: ScalarField) -> "BoundaryData":
        v = p.values
        return cls(p.grid, v[:, 0].copy(), v[:, -1].copy(), v[0, :].copy(), v[-1, :].copy())

    @classmethod
    def normal_trace(cls, u: VectorField) -> "BoundaryData":
        """Outward normal component n.u on each side, as Neumann-kind data."""
        v1, v2 = u.u1.values, u.u2.values
        return cls(
            u.grid,
            -v1[:, 0],
            v1[:, -1],
            -v2[0, :],
            v2[-1, :],
            kind="neumann",
        )

    def boundary_integral(self) -> float:
        """Trapezoidal integral over the perimeter (corners halved per side)."""
        out = 0.0
        for arr, h in (
            (self.left, self.grid.hy),
            (self.right, self.grid.hy),
            (self.bottom, self.grid.hx),
            (self.top, self.grid.hx),
        ):
            out += h * (np.sum(arr) - 0.5 * (arr[0] + arr[-1]))
        return float(out)

    def shifted(self, c: float) -> "BoundaryData":
        return BoundaryData(
            self.grid, self.left - c, self.right - c, self.bottom - c, self.top - c, kind=self.kind
        )

    def scaled(self, a: float) -> "BoundaryData":
        return BoundaryData(
            self.grid, a * self.left, a * self.right, a * self.bottom, a * self.top, kind=self.kind
        )


def apply_dirichlet(values: np.ndarray, bd: BoundaryData) -> None:
    """Write Dirichlet side values into a nodal array in place.

    Sides are applied in the order left, right, bottom, top, so the
    horizontal sides own the corner nodes.
    """
    values[:, 0] = bd.left
    values[:, -1] = bd.right
    values[0, :] = bd.bottom
    values[-1, :] = bd.top


def inner_product(a: ScalarField, b: ScalarField) -> float:
    """Trapezoidal approximation of the L2 inner product over the square."""
    if a.grid != b.grid:
        raise ValueError("inner_product requires fields on the same grid")
    return float(np.sum(trapezoid_weights(a.grid) * a.values * b.values))
