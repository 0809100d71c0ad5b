"""Stencil-kernel backend selection.

The hot finite-difference kernels exist twice: a numba-compiled version and
a pure-numpy fallback.  The active backend is chosen at import time from the
``SQUAREFLOW_BACKEND`` environment variable (``numba``, ``numpy``, or unset
for auto = numba when importable) and can be switched at runtime with
:func:`select_backend`, e.g. for the backend benchmark.
"""
from __future__ import annotations

import os
import warnings

from . import _kernels_numpy

_BACKENDS = {"numpy": _kernels_numpy}

try:
    from . import _kernels_numba

    _BACKENDS["numba"] = _kernels_numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _kernels_numba = None

_active = None


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def select_backend(name: str) -> str:
    """Activate a kernel backend by name; returns the name actually used."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}, available: {available_backends()}")
    _active = name
    return _active


def active_backend() -> str:
    return _active


def kernels():
    """The module implementing the active backend's kernels."""
    return _BACKENDS[_active]


def _init_from_env() -> None:
    global _active
    requested = os.environ.get("SQUAREFLOW_BACKEND", "").strip().lower()
    if requested in _BACKENDS:
        _active = requested
    elif requested:
        warnings.warn(
            f"SQUAREFLOW_BACKEND={requested!r} not available, falling back to numpy",
            stacklevel=1,
        )
        _active = "numpy"
    else:
        _active = "numba" if "numba" in _BACKENDS else "numpy"


_init_from_env()
