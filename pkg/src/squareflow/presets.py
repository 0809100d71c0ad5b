"""Initial-condition, forcing, and boundary presets, all with closed forms.

Time derivatives of boundary data and of the prescribed divergence are
evaluated from the closed-form expressions, never by differencing.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import BoundaryData, Grid2D, ScalarField, VectorField

__all__ = [
    "manufactured_velocity",
    "manufactured_pressure",
    "manufactured_forcing_fn",
    "make_initial_condition",
    "make_forcing_fn",
    "BoundaryForcing",
    "make_boundary_forcing",
    "stream_function_field",
]

_PI = np.pi


# --- manufactured solution ---------------------------------------------------
# u = psi(t) * (sin^2(pi x) sin(2 pi y), -sin(2 pi x) sin^2(pi y)),
# p = psi(t) * cos(pi x) cos(pi y),  psi(t) = 1 + t/2.
# Divergence-free and no-slip on the unit square for every t.


def _psi(t: float) -> float:
    return 1.0 + 0.5 * t


def _base(X, Y):
    b1 = np.sin(_PI * X) ** 2 * np.sin(2 * _PI * Y)
    b2 = -np.sin(2 * _PI * X) * np.sin(_PI * Y) ** 2
    return b1, b2


def manufactured_velocity(grid: Grid2D, t: float) -> VectorField:
    X, Y = grid.mesh()
    b1, b2 = _base(X, Y)
    return VectorField.from_arrays(grid, _psi(t) * b1, _psi(t) * b2)


def manufactured_pressure(grid: Grid2D, t: float) -> ScalarField:
    X, Y = grid.mesh()
    return ScalarField(grid, _psi(t) * np.cos(_PI * X) * np.cos(_PI * Y))


def manufactured_forcing_fn(nu: float) -> Callable:
    """f = du/dt + (u.grad)u + grad p - nu lap u for the fields above.

    Time enters only through psi(t), so the spatial arrays are computed once
    per grid shape and reused across quadrature nodes and steps.
    """
    cache: dict = {}

    def fn(X, Y, t):
        key = X.shape
        if key not in cache:
            b1, b2 = _base(X, Y)
            db1x = _PI * np.sin(2 * _PI * X) * np.sin(2 * _PI * Y)
            db1y = 2 * _PI * np.sin(_PI * X) ** 2 * np.cos(2 * _PI * Y)
            db2x = -2 * _PI * np.cos(2 * _PI * X) * np.sin(_PI * Y) ** 2
            db2y = -_PI * np.sin(2 * _PI * X) * np.sin(2 * _PI * Y)
            lb1 = 2 * _PI**2 * np.sin(2 * _PI * Y) * (np.cos(2 * _PI * X) - 2 * np.sin(_PI * X) ** 2)
            lb2 = 2 * _PI**2 * np.sin(2 * _PI * X) * (2 * np.sin(_PI * Y) ** 2 - np.cos(2 * _PI * Y))
            px = -_PI * np.sin(_PI * X) * np.cos(_PI * Y)
            py = -_PI * np.cos(_PI * X) * np.sin(_PI * Y)
            cache[key] = (b1, b2, b1 * db1x + b2 * db1y, b1 * db2x + b2 * db2y, px, py, lb1, lb2)
        b1, b2, conv1, conv2, px, py, lb1, lb2 = cache[key]
        p = _psi(t)
        f1 = 0.5 * b1 + p * p * conv1 + p * px - nu * p * lb1
        f2 = 0.5 * b2 + p * p * conv2 + p * py - nu * p * lb2
        return f1, f2

    return fn


# --- initial conditions -------------------------------------------------------


def stream_function_field(grid: Grid2D, amplitude: float = 1.0) -> VectorField:
    """Perp-gradient of psi = amplitude * sin^2(pi x) sin^2(pi y).

    No-slip on all sides because psi and grad psi vanish on the boundary.
    """
    X, Y = grid.mesh()
    sx2, sy2 = np.sin(_PI * X) ** 2, np.sin(_PI * Y) ** 2
    u1 = -amplitude * sx2 * _PI * np.sin(2 * _PI * Y)
    u2 = amplitude * _PI * np.sin(2 * _PI * X) * sy2
    return VectorField.from_arrays(grid, u1, u2)


def _divergence_seed(grid: Grid2D, amplitude: float) -> VectorField:
    """u = (A/pi sin(pi x) sin^2(pi y), 0): div u = A cos(pi x) sin^2(pi y).

    The sin^2(pi y) taper meets no-slip on the horizontal sides; it
    modulates the seeded divergence but keeps cos(pi x) the slowest
    Neumann mode present.
    """
    X, Y = grid.mesh()
    u1 = amplitude / _PI * np.sin(_PI * X) * np.sin(_PI * Y) ** 2
    return VectorField.from_arrays(grid, u1, np.zeros_like(u1))


def make_initial_condition(grid: Grid2D, preset: str, params: dict) -> VectorField:
    if preset == "zero":
        return VectorField.zeros(grid)
    if preset == "stream":
        u = stream_function_field(grid, params.get("amplitude", 1.0))
        if params.get("normalize") == "h1":
            from .operators import norms

            h1 = norms(u).h1_semi
            if h1 > 0:
                u = VectorField.from_arrays(grid, u.u1.values / h1, u.u2.values / h1)
        return u
    if preset == "div-seed":
        return _divergence_seed(grid, params.get("amplitude", 1e-3))
    if preset == "manufactured":
        return manufactured_velocity(grid, 0.0)
    raise ValueError(f"unknown initial-condition preset {preset!r}")


def make_forcing_fn(preset: str, params: dict, nu: float) -> Callable | None:
    if preset == "zero":
        return None
    if preset == "manufactured":
        return manufactured_forcing_fn(nu)
    raise ValueError(f"unknown forcing preset {preset!r}")


# --- boundary conditions ------------------------------------------------------


@dataclass
class BoundaryForcing:
    """Velocity boundary data g(t) plus the inhomogeneous-pressure inputs.

    ``homogeneous`` marks the pure no-slip case (the time stepper then skips
    the inhomogeneous pressure entirely).
    """

    grid: Grid2D
    homogeneous: bool
    velocity: Callable  # t -> (BoundaryData for u1, BoundaryData for u2)
    h: Callable | None = None       # t -> ScalarField, prescribed divergence
    dt_h: Callable | None = None    # t -> ScalarField
    dt_normal_g: Callable | None = None  # t -> BoundaryData (d/dt of n.g)


def make_boundary_forcing(grid: Grid2D, preset: str, params: dict) -> BoundaryForcing:
    zero_pair = (BoundaryData.zeros(grid), BoundaryData.zeros(grid))
    if preset == "homogeneous":
        return BoundaryForcing(grid, True, lambda t: zero_pair)
    if preset == "lid":
        speed = params.get("speed", 1.0)
        g1 = BoundaryData.zeros(grid)
        g1.top[:] = speed
        pair = (g1, BoundaryData.zeros(grid))
        return BoundaryForcing(
            grid,
            False,
            lambda t: pair,
            dt_normal_g=lambda t: BoundaryData.zeros(grid, "neumann"),
        )
    if preset == "divergence-ramp":
        amp = params.get("amplitude", 1e-3)
        X, _ = grid.mesh()
        cos_x = amp * np.cos(_PI * X)
        return BoundaryForcing(
            grid,
            False,
            lambda t: zero_pair,
            h=lambda t: ScalarField(grid, t * cos_x),
            dt_h=lambda t: ScalarField(grid, cos_x.copy()),
            dt_normal_g=lambda t: BoundaryData.zeros(grid, "neumann"),
        )
    raise ValueError(f"unknown boundary preset {preset!r}")
