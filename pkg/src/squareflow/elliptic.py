"""Direct elliptic solvers for the two problems the scheme needs per step.

* Dirichlet Helmholtz/Poisson solve, diagonalized by the DST-I on interior
  nodes.
* Neumann Poisson solve for the ghost-reflected 5-point Laplacian,
  diagonalized by the DCT-I on all nodes, with explicit compatibility
  projection and zero-mean gauge.

Both are exact to round-off for their discrete systems, so solver error
never contaminates measured scheme constants.  A dense direct-factorization
oracle assembles the identical systems for cross-checking in tests
(grids <= 32 only).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.fft import dctn, dstn, idctn, idstn

from .grid import BoundaryData, Grid2D, ScalarField, apply_dirichlet, trapezoid_weights

__all__ = [
    "DirichletPlan",
    "NeumannPlan",
    "dirichlet_plan",
    "neumann_plan",
    "solve_dirichlet_helmholtz",
    "solve_neumann_poisson",
    "NeumannSolveResult",
    "dense_oracle_solve",
    "DENSE_ORACLE_MAX_N",
]

DENSE_ORACLE_MAX_N = 32


def _mode_eigenvalues(n: int, h: float, with_zero: bool) -> np.ndarray:
    """1D eigenvalues (2/h^2)(1 - cos(k pi / n)) of the -d2 operator."""
    k = np.arange(0, n + 1) if with_zero else np.arange(1, n)
    return (2.0 / h**2) * (1.0 - np.cos(k * np.pi / n))


@dataclass(frozen=True)
class DirichletPlan:
    """Interior sine-transform diagonalization data for a grid."""

    grid: Grid2D

    @property
    def eigenvalues(self) -> np.ndarray:
        lx = _mode_eigenvalues(self.grid.nx, self.grid.hx, with_zero=False)
        ly = _mode_eigenvalues(self.grid.ny, self.grid.hy, with_zero=False)
        return ly[:, None] + lx[None, :]


@dataclass(frozen=True)
class NeumannPlan:
    """Full-node cosine-transform diagonalization data for a grid."""

    grid: Grid2D

    @property
    def eigenvalues(self) -> np.ndarray:
        lx = _mode_eigenvalues(self.grid.nx, self.grid.hx, with_zero=True)
        ly = _mode_eigenvalues(self.grid.ny, self.grid.hy, with_zero=True)
        return ly[:, None] + lx[None, :]


@lru_cache(maxsize=32)
def dirichlet_plan(grid: Grid2D) -> DirichletPlan:
    return DirichletPlan(grid)


@lru_cache(maxsize=32)
def neumann_plan(grid: Grid2D) -> NeumannPlan:
    return NeumannPlan(grid)


def _lifted_interior_rhs(
    grid: Grid2D, rhs: np.ndarray, g: BoundaryData, coeff: float
) -> np.ndarray:
    """Move Dirichlet boundary values into the interior right-hand side."""
    out = rhs[1:-1, 1:-1].copy()
    out[:, 0] += coeff / grid.hx**2 * g.left[1:-1]
    out[:, -1] += coeff / grid.hx**2 * g.right[1:-1]
    out[0, :] += coeff / grid.hy**2 * g.bottom[1:-1]
    out[-1, :] += coeff / grid.hy**2 * g.top[1:-1]
    return out


def solve_dirichlet_helmholtz(
    plan: DirichletPlan, alpha: float, rhs: ScalarField, g: BoundaryData
) -> ScalarField:
    """Solve (I - alpha*lap)v = rhs (alpha > 0) or -lap v = rhs (alpha = 0).

    v equals g on the boundary nodes; the interior system uses the 5-point
    Laplacian and is solved exactly via the DST-I.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    grid = plan.grid
    if rhs.grid != grid or g.grid != grid:
        raise ValueError("rhs/boundary data grid does not match the plan")
    sigma, a = (0.0, 1.0) if alpha == 0.0 else (1.0, alpha)
    b = _lifted_interior_rhs(grid, rhs.values, g, a)
    coeffs = dstn(b, type=1)
    coeffs /= sigma + a * plan.eigenvalues
    v = np.empty(grid.node_shape)
    v[1:-1, 1:-1] = idstn(coeffs, type=1)
    apply_dirichlet(v, g)
    return ScalarField(grid, v)


class NeumannSolveResult(NamedTuple):
    p: ScalarField
    compat_shift: float  # constant subtracted from the rhs to make it solvable


def _neumann_effective_rhs(grid: Grid2D, rhs: np.ndarray, g: BoundaryData) -> np.ndarray:
    """Fold outward-normal data into boundary rows via ghost reflection.

    Ghost nodes satisfy e.g. p[-1,j] = p[1,j] + 2*hx*g_left[j] so that the
    centered normal derivative matches n.grad p = g; the g terms move to the
    right-hand side as -2g/h.
    """
    out = rhs.copy()
    out[:, 0] -= 2.0 / grid.hx * g.left
    out[:, -1] -= 2.0 / grid.hx * g.right
    out[0, :] -= 2.0 / grid.hy * g.bottom
    out[-1, :] -= 2.0 / grid.hy * g.top
    return out


def solve_neumann_poisson(
    plan: NeumannPlan, rhs: ScalarField, g: BoundaryData
) -> NeumannSolveResult:
    """Solve lap p = rhs with n.grad p = g, zero-mean gauge.

    The trapezoid-weighted mean of the effective right-hand side (which
    equals integral(rhs) - boundary integral(g)) is subtracted before the
    cosine-transform solve; its value is returned so callers can monitor
    discrete compatibility.  The constant mode of the solution is set to
    zero, which makes the trapezoidal mean of p exactly zero.
    """
    grid = plan.grid
    if rhs.grid != grid or g.grid != grid:
        raise ValueError("rhs/boundary data grid does not match the plan")
    b = _neumann_effective_rhs(grid, rhs.values, g)
    shift = float(np.sum(trapezoid_weights(grid) * b))  # |Omega| = 1
    b -= shift
    coeffs = dctn(b, type=1)
    mu = plan.eigenvalues
    mu_safe = mu.copy()
    mu_safe[0, 0] = 1.0
    coeffs = -coeffs / mu_safe
    coeffs[0, 0] = 0.0
    return NeumannSolveResult(ScalarField(grid, idctn(coeffs, type=1)), shift)


# --- dense oracle -----------------------------------------------------------


def _node_index(grid: Grid2D):
    nx1 = grid.nx + 1

    def idx(i: int, j: int) -> int:
        return j * nx1 + i

    return idx


def _assemble_reflected_laplacian(grid: Grid2D) -> np.ndarray:
    """Ghost-reflected 5-point Laplacian over all nodes, as a dense matrix."""
    nx, ny = grid.nx, grid.ny
    n = grid.n_nodes
    idx = _node_index(grid)
    cx, cy = 1.0 / grid.hx**2, 1.0 / grid.hy**2
    a = np.zeros((n, n))
    for j in range(ny + 1):
        for i in range(nx + 1):
            r = idx(i, j)
            a[r, r] -= 2.0 * (cx + cy)
            if i == 0:
                a[r, idx(1, j)] += 2.0 * cx
            elif i == nx:
                a[r, idx(nx - 1, j)] += 2.0 * cx
            else:
                a[r, idx(i - 1, j)] += cx
                a[r, idx(i + 1, j)] += cx
            if j == 0:
                a[r, idx(i, 1)] += 2.0 * cy
            elif j == ny:
                a[r, idx(i, ny - 1)] += 2.0 * cy
            else:
                a[r, idx(i, j - 1)] += cy
                a[r, idx(i, j + 1)] += cy
    return a


def _dense_dirichlet(grid: Grid2D, alpha: float, rhs: np.ndarray, g: BoundaryData) -> ScalarField:
    nx, ny = grid.nx, grid.ny
    sigma, a_coef = (0.0, 1.0) if alpha == 0.0 else (1.0, alpha)
    m = (nx - 1) * (ny - 1)
    cx, cy = a_coef / grid.hx**2, a_coef / grid.hy**2

    def idx(i: int, j: int) -> int:  # interior numbering, i,j from 1
        return (j - 1) * (nx - 1) + (i - 1)

    mat = np.zeros((m, m))
    b = np.zeros(m)
    for j in range(1, ny):
        for i in range(1, nx):
            r = idx(i, j)
            mat[r, r] = sigma + 2.0 * (cx + cy)
            b[r] = rhs[j, i]
            for di, dj, c in ((-1, 0, cx), (1, 0, cx), (0, -1, cy), (0, 1, cy)):
                ii, jj = i + di, j + dj
                if 1 <= ii <= nx - 1 and 1 <= jj <= ny - 1:
                    mat[r, idx(ii, jj)] = -c
                else:
                    if ii == 0:
                        b[r] += c * g.left[jj]
                    elif ii == nx:
                        b[r] += c * g.right[jj]
                    elif jj == 0:
                        b[r] += c * g.bottom[ii]
                    else:
                        b[r] += c * g.top[ii]
    sol = np.linalg.solve(mat, b)
    v = np.empty(grid.node_shape)
    v[1:-1, 1:-1] = sol.reshape(ny - 1, nx - 1)
    apply_dirichlet(v, g)
    return ScalarField(grid, v)


def _dense_neumann(grid: Grid2D, rhs: np.ndarray, g: BoundaryData) -> NeumannSolveResult:
    a = _assemble_reflected_laplacian(grid)
    b = _neumann_effective_rhs(grid, rhs, g).ravel()
    w = trapezoid_weights(grid).ravel()
    # Left null vector of the (nonsymmetric) reflected operator is the
    # trapezoid weight vector; project for solvability.
    shift = float(w @ b / np.sum(w))
    b = b - shift
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    sol -= w @ sol / np.sum(w)
    return NeumannSolveResult(ScalarField(grid, sol.reshape(grid.node_shape)), shift)


def dense_oracle_solve(
    grid: Grid2D, rhs: ScalarField, g: BoundaryData, alpha: float = 0.0
):
    """Dense direct solve of the identical discrete system (tests only).

    Dispatches on ``g.kind``: Dirichlet data selects the Helmholtz/Poisson
    solve (returns a ScalarField), Neumann data the singular Poisson solve
    (returns a NeumannSolveResult).
    """
    if grid.nx > DENSE_ORACLE_MAX_N or grid.ny > DENSE_ORACLE_MAX_N:
        raise ValueError(f"dense oracle limited to grids <= {DENSE_ORACLE_MAX_N}")
    if rhs.grid != grid or g.grid != grid:
        raise ValueError("rhs/boundary data grid mismatch")
    if g.kind == "dirichlet":
        return _dense_dirichlet(grid, alpha, rhs.values, g)
    return _dense_neumann(grid, rhs.values, g)
