"""Second-order finite-difference operators on nodal fields.

All first derivatives use centered differences at interior nodes and
3-point one-sided differences on the boundary; second derivatives use the
5-point Laplacian inside and 4-point one-sided stencils in the boundary
normal direction.  Stencils are exact on quadratics.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .grid import BoundaryData, Grid2D, ScalarField, VectorField, inner_product

__all__ = [
    "gradient",
    "divergence",
    "laplacian",
    "advect",
    "vorticity",
    "stokes_neumann_data",
    "norms",
    "interior_laplacian_norm_sq",
    "FieldNorms",
]


def gradient(p: ScalarField) -> VectorField:
    k = backend.kernels()
    g = p.grid
    return VectorField.from_arrays(
        g, k.gradient_x(p.values, g.hx), k.gradient_y(p.values, g.hy)
    )


def divergence(u: VectorField) -> ScalarField:
    k = backend.kernels()
    g = u.grid
    return ScalarField(
        g, k.gradient_x(u.u1.values, g.hx) + k.gradient_y(u.u2.values, g.hy)
    )


def laplacian(p: ScalarField) -> ScalarField:
    k = backend.kernels()
    g = p.grid
    return ScalarField(g, k.laplacian(p.values, g.hx, g.hy))


def advect(u: VectorField) -> VectorField:
    """(u.grad)u evaluated at every node."""
    k = backend.kernels()
    g = u.grid
    v1, v2 = u.u1.values, u.u2.values
    return VectorField.from_arrays(
        g,
        k.advect(v1, v2, v1, g.hx, g.hy),
        k.advect(v1, v2, v2, g.hx, g.hy),
    )


def vorticity(u: VectorField) -> ScalarField:
    """omega = dx(u2) - dy(u1)."""
    k = backend.kernels()
    g = u.grid
    return ScalarField(
        g, k.gradient_x(u.u2.values, g.hx) - k.gradient_y(u.u1.values, g.hy)
    )


def stokes_neumann_data(u: VectorField, mean_correct: bool = True) -> BoundaryData:
    """Outward-normal trace n.(lap - grad div)u on the four sides.

    Uses the planar identity (lap - grad div)u = perp-grad(omega), which
    reduces the trace to a tangential derivative of the vorticity along each
    side: left/right sides get +/- d(omega)/dy, bottom/top get -/+
    d(omega)/dx.  Corner nodes have no normal direction; they copy the value
    of the adjacent node on the same side.  The result is shifted to have an
    exactly zero trapezoidal boundary integral (the continuum data is
    compatible by construction).
    """
    g = u.grid
    w = vorticity(u).values
    hx, hy = g.hx, g.hy

    def tangential(vals: np.ndarray, h: float) -> np.ndarray:
        out = np.empty_like(vals)
        out[1:-1] = (vals[2:] - vals[:-2]) / (2.0 * h)
        out[0] = out[1]
        out[-1] = out[-2]
        return out

    left = tangential(w[:, 0], hy)       # n = (-1, 0): n.perp-grad(omega) = +d_y omega
    right = -tangential(w[:, -1], hy)    # n = (+1, 0): -d_y omega
    bottom = -tangential(w[0, :], hx)    # n = (0, -1): -d_x omega
    top = tangential(w[-1, :], hx)       # n = (0, +1): +d_x omega

    data = BoundaryData(g, left, right, bottom, top, kind="neumann")
    if mean_correct:
        data = data.shifted(data.boundary_integral() / 4.0)
    return data


@dataclass(frozen=True)
class FieldNorms:
    l2: float
    h1_semi: float
    max_div: float


def norms(u: VectorField) -> FieldNorms:
    """Discrete L2 norm, H1 seminorm, and max |div u| of a vector field."""
    l2_sq = inner_product(u.u1, u.u1) + inner_product(u.u2, u.u2)
    h1_sq = 0.0
    for comp in (u.u1, u.u2):
        grad = gradient(comp)
        h1_sq += inner_product(grad.u1, grad.u1) + inner_product(grad.u2, grad.u2)
    div = divergence(u)
    return FieldNorms(
        l2=float(np.sqrt(l2_sq)),
        h1_semi=float(np.sqrt(h1_sq)),
        max_div=float(np.max(np.abs(div.values))),
    )


def interior_laplacian_norm_sq(u: VectorField) -> float:
    """Trapezoidal norm of lap(u) restricted to interior nodes.

    The one-sided boundary values of the discrete Laplacian are noisy and
    excluded from every ||lap u||^2 diagnostic.
    """
    total = 0.0
    for comp in (u.u1, u.u2):
        lap = laplacian(comp)
        lap.values[0, :] = 0.0
        lap.values[-1, :] = 0.0
        lap.values[:, 0] = 0.0
        lap.values[:, -1] = 0.0
        total += inner_product(lap, lap)
    return float(total)
