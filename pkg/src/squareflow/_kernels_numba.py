"""Numba-compiled stencil kernels (default backend when numba is available).

Arithmetic matches _kernels_numpy term for term so the two backends agree
bit-for-bit.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def gradient_x(v: np.ndarray, hx: float) -> np.ndarray:
    ny1, nx1 = v.shape
    out = np.empty_like(v)
    for j in range(ny1):
        out[j, 0] = (-3.0 * v[j, 0] + 4.0 * v[j, 1] - v[j, 2]) / (2.0 * hx)
        for i in range(1, nx1 - 1):
            out[j, i] = (v[j, i + 1] - v[j, i - 1]) / (2.0 * hx)
        out[j, nx1 - 1] = (3.0 * v[j, nx1 - 1] - 4.0 * v[j, nx1 - 2] + v[j, nx1 - 3]) / (2.0 * hx)
    return out


@njit(cache=True)
def gradient_y(v: np.ndarray, hy: float) -> np.ndarray:
    ny1, nx1 = v.shape
    out = np.empty_like(v)
    for i in range(nx1):
        out[0, i] = (-3.0 * v[0, i] + 4.0 * v[1, i] - v[2, i]) / (2.0 * hy)
        out[ny1 - 1, i] = (3.0 * v[ny1 - 1, i] - 4.0 * v[ny1 - 2, i] + v[ny1 - 3, i]) / (2.0 * hy)
    for j in range(1, ny1 - 1):
        for i in range(nx1):
            out[j, i] = (v[j + 1, i] - v[j - 1, i]) / (2.0 * hy)
    return out


@njit(cache=True)
def laplacian(v: np.ndarray, hx: float, hy: float) -> np.ndarray:
    ny1, nx1 = v.shape
    out = np.empty_like(v)
    hx2 = hx * hx
    hy2 = hy * hy
    for j in range(ny1):
        for i in range(nx1):
            if i == 0:
                dxx = (2.0 * v[j, 0] - 5.0 * v[j, 1] + 4.0 * v[j, 2] - v[j, 3]) / hx2
            elif i == nx1 - 1:
                dxx = (2.0 * v[j, nx1 - 1] - 5.0 * v[j, nx1 - 2] + 4.0 * v[j, nx1 - 3] - v[j, nx1 - 4]) / hx2
            else:
                dxx = (v[j, i + 1] - 2.0 * v[j, i] + v[j, i - 1]) / hx2
            if j == 0:
                dyy = (2.0 * v[0, i] - 5.0 * v[1, i] + 4.0 * v[2, i] - v[3, i]) / hy2
            elif j == ny1 - 1:
                dyy = (2.0 * v[ny1 - 1, i] - 5.0 * v[ny1 - 2, i] + 4.0 * v[ny1 - 3, i] - v[ny1 - 4, i]) / hy2
            else:
                dyy = (v[j + 1, i] - 2.0 * v[j, i] + v[j - 1, i]) / hy2
            out[j, i] = dxx + dyy
    return out


@njit(cache=True)
def advect(u1: np.ndarray, u2: np.ndarray, v: np.ndarray, hx: float, hy: float) -> np.ndarray:
    gx = gradient_x(v, hx)
    gy = gradient_y(v, hy)
    ny1, nx1 = v.shape
    out = np.empty_like(v)
    for j in range(ny1):
        for i in range(nx1):
            out[j, i] = u1[j, i] * gx[j, i] + u2[j, i] * gy[j, i]
    return out
