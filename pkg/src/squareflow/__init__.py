"""Incompressible Navier-Stokes on the unit square with explicit pressure
decomposition and diffusive divergence control."""

__version__ = "0.1.0"

from .grid import BoundaryData, Grid2D, ScalarField, VectorField, inner_product  # noqa: F401
from .stepper import SimConfig, SimState, StepDiagnostics, run, step  # noqa: F401
