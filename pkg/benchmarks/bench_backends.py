"""Timing comparison of the numba and numpy stencil backends.

Usage: python benchmarks/bench_backends.py [n]

Times the three hot kernels and one full scheme step on an n x n grid
(default 128) under each backend and prints a small table.  The same
comparison can be forced process-wide through SQUAREFLOW_BACKEND.
"""
from __future__ import annotations

import sys
import time

import numpy as np

from squareflow import backend
from squareflow.grid import Grid2D
from squareflow.presets import stream_function_field
from squareflow.stepper import SimConfig, SimState, step


def time_call(fn, repeats=50):
    fn()  # warm-up (includes jit compilation on the numba path)
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def bench(n: int) -> None:
    grid = Grid2D(n, n)
    rng = np.random.default_rng(0)
    v = rng.standard_normal(grid.node_shape)
    u1 = rng.standard_normal(grid.node_shape)
    u2 = rng.standard_normal(grid.node_shape)

    u0 = stream_function_field(grid, 0.5)
    cfg = SimConfig(nx=n, ny=n, nu=0.5, dt=1e-3)

    rows = {}
    for name in backend.available_backends():
        backend.select_backend(name)
        k = backend.kernels()
        rows[name] = {
            "gradient_x": time_call(lambda: k.gradient_x(v, grid.hx)),
            "laplacian": time_call(lambda: k.laplacian(v, grid.hx, grid.hy)),
            "advect": time_call(lambda: k.advect(u1, u2, v, grid.hx, grid.hy)),
            "full step": time_call(lambda: step(SimState(u0, 0.0, 0), cfg), repeats=10),
        }

    names = list(rows)
    print(f"grid {n}x{n}, seconds per call")
    header = f"{'kernel':<12}" + "".join(f"{b:>12}" for b in names)
    both = {"numba", "numpy"} <= set(names)
    if both:
        header += f"{'numpy/numba':>13}"
    print(header)
    for kernel in ("gradient_x", "laplacian", "advect", "full step"):
        line = f"{kernel:<12}" + "".join(f"{rows[b][kernel]:>12.2e}" for b in names)
        if both:
            line += f"{rows['numpy'][kernel] / rows['numba'][kernel]:>12.1f}x"
        print(line)


if __name__ == "__main__":
    bench(int(sys.argv[1]) if len(sys.argv) > 1 else 128)
