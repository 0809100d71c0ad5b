"""Pure-numpy stencil kernels (fallback backend).

Expressions are kept term-for-term identical to the numba backend so both
produce bit-identical output.
"""
from __future__ import annotations

import numpy as np


def gradient_x(v: np.ndarray, hx: float) -> np.ndarray:
    """d/dx: centered interior, 3-point one-sided on the x-boundaries."""
    out = np.empty_like(v)
    out[:, 1:-1] = (v[:, 2:] - v[:, :-2]) / (2.0 * hx)
    out[:, 0] = (-3.0 * v[:, 0] + 4.0 * v[:, 1] - v[:, 2]) / (2.0 * hx)
    out[:, -1] = (3.0 * v[:, -1] - 4.0 * v[:, -2] + v[:, -3]) / (2.0 * hx)
    return out


def gradient_y(v: np.ndarray, hy: float) -> np.ndarray:
    """d/dy: centered interior, 3-point one-sided on the y-boundaries."""
    out = np.empty_like(v)
    out[1:-1, :] = (v[2:, :] - v[:-2, :]) / (2.0 * hy)
    out[0, :] = (-3.0 * v[0, :] + 4.0 * v[1, :] - v[2, :]) / (2.0 * hy)
    out[-1, :] = (3.0 * v[-1, :] - 4.0 * v[-2, :] + v[-3, :]) / (2.0 * hy)
    return out


def _second_x(v: np.ndarray, hx: float) -> np.ndarray:
    out = np.empty_like(v)
    hx2 = hx * hx
    out[:, 1:-1] = (v[:, 2:] - 2.0 * v[:, 1:-1] + v[:, :-2]) / hx2
    out[:, 0] = (2.0 * v[:, 0] - 5.0 * v[:, 1] + 4.0 * v[:, 2] - v[:, 3]) / hx2
    out[:, -1] = (2.0 * v[:, -1] - 5.0 * v[:, -2] + 4.0 * v[:, -3] - v[:, -4]) / hx2
    return out


def _second_y(v: np.ndarray, hy: float) -> np.ndarray:
    out = np.empty_like(v)
    hy2 = hy * hy
    out[1:-1, :] = (v[2:, :] - 2.0 * v[1:-1, :] + v[:-2, :]) / hy2
    out[0, :] = (2.0 * v[0, :] - 5.0 * v[1, :] + 4.0 * v[2, :] - v[3, :]) / hy2
    out[-1, :] = (2.0 * v[-1, :] - 5.0 * v[-2, :] + 4.0 * v[-3, :] - v[-4, :]) / hy2
    return out


def laplacian(v: np.ndarray, hx: float, hy: float) -> np.ndarray:
    """5-point interior; 4-point one-sided second derivative at boundaries."""
    return _second_x(v, hx) + _second_y(v, hy)


def advect(u1: np.ndarray, u2: np.ndarray, v: np.ndarray, hx: float, hy: float) -> np.ndarray:
    """(u.grad) v with the gradient stencils above."""
    return u1 * gradient_x(v, hx) + u2 * gradient_y(v, hy)
