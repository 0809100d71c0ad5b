"""First-order time stepping: implicit viscosity, explicit pressure and
convection.

Each step solves one Dirichlet Helmholtz problem per velocity component.
The explicit pressure gradient combines the Euler part (gradient projection
of forcing minus convection), the Stokes part in its projected form
(I - P)lap(u) - grad(div u), and, for time-dependent boundary flux or
prescribed divergence, the inhomogeneous part.  Diagnostics report the
Neumann-solve Stokes pressure norms so the per-step ratio matches the
pressure-domination experiments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np

from .elliptic import dirichlet_plan, neumann_plan, solve_dirichlet_helmholtz, solve_neumann_poisson
from .grid import (
    BoundaryData,
    Grid2D,
    ScalarField,
    VectorField,
    apply_dirichlet,
    inner_product,
    trapezoid_weights,
)
from .operators import advect, divergence, gradient, laplacian, stokes_neumann_data
from .presets import BoundaryForcing, make_boundary_forcing, make_forcing_fn, make_initial_condition
from .pressure import (
    helmholtz_decompose,
    inhomogeneous_pressure,
    projection_plan,
    stokes_gradient_projected,
)

__all__ = [
    "SimConfig",
    "SimState",
    "StepDiagnostics",
    "ForcingSampler",
    "average_forcing",
    "step",
    "step_nonhomogeneous",
    "run",
    "RunResult",
    "RunOutcome",
    "Snapshot",
    "BLOWUP_GRAD_SQ",
]

BLOWUP_GRAD_SQ = 1e12


@lru_cache(maxsize=8)
def _gauss_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


@dataclass
class SimConfig:
    nx: int = 64
    ny: int = 64
    nu: float = 1.0
    dt: float = 1e-3
    t_end: float = 1.0
    ic: dict = field(default_factory=lambda: {"preset": "zero"})
    forcing: dict = field(default_factory=lambda: {"preset": "zero"})
    bc: dict = field(default_factory=lambda: {"preset": "homogeneous"})
    snapshot_every: int = 0
    seed: int = 0

    def validate(self) -> None:
        if self.nx < 8 or self.ny < 8:
            raise ValueError("nx and ny must be >= 8")
        if self.nu <= 0:
            raise ValueError("nu must be > 0")
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if self.t_end < 0:
            raise ValueError("t_end must be >= 0")
        if self.snapshot_every < 0:
            raise ValueError("snapshot_every must be >= 0")

    def grid(self) -> Grid2D:
        return Grid2D(self.nx, self.ny)


@dataclass
class SimState:
    u: VectorField
    t: float
    n: int


@dataclass
class StepDiagnostics:
    """Norms of the state u^k plus the pressure norms of the explicit data
    that produced it (for k = 0, the pressures of the initial state)."""

    step: int
    t: float
    u_sq: float
    grad_u_sq: float
    lap_u_sq: float
    div_u_sq: float
    grad_ps_sq: float
    grad_pe_sq: float
    stokes_ratio: float
    compat_corr: float

    @property
    def energy(self) -> float:
        return 0.5 * self.u_sq

    def is_finite(self) -> bool:
        return all(
            math.isfinite(v)
            for v in (
                self.u_sq,
                self.grad_u_sq,
                self.lap_u_sq,
                self.div_u_sq,
                self.grad_ps_sq,
                self.grad_pe_sq,
                self.stokes_ratio,
                self.compat_corr,
            )
        )


@dataclass
class ForcingSampler:
    """Body force f(x, y, t), averaged over each step interval by
    Gauss-Legendre quadrature of the given order."""

    fn: Callable  # (X, Y, t) -> (F1, F2)
    order: int = 3

    def interval_average(self, grid: Grid2D, t0: float, dt: float) -> VectorField:
        nodes, weights = _gauss_rule(self.order)
        X, Y = grid.mesh()
        f1 = np.zeros(grid.node_shape)
        f2 = np.zeros(grid.node_shape)
        for q, w in zip(nodes, weights):
            tq = t0 + 0.5 * dt * (q + 1.0)
            a1, a2 = self.fn(X, Y, tq)
            f1 += 0.5 * w * a1
            f2 += 0.5 * w * a2
        return VectorField.from_arrays(grid, f1, f2)


def average_forcing(sampler: ForcingSampler, grid: Grid2D, n: int, dt: float) -> VectorField:
    """f^n: the mean of f over [n dt, (n+1) dt]."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    return sampler.interval_average(grid, n * dt, dt)


class _StateView(NamedTuple):
    """Per-state derived fields shared between the update and diagnostics."""

    u: VectorField
    lap: VectorField
    div: ScalarField
    u_sq: float
    grad_u_sq: float
    lap_u_sq: float
    div_u_sq: float


def _analyze(u: VectorField) -> _StateView:
    grid = u.grid
    w = trapezoid_weights(grid)
    lap = VectorField(laplacian(u.u1), laplacian(u.u2))
    div = divergence(u)
    u_sq = float(np.sum(w * (u.u1.values**2 + u.u2.values**2)))
    grad_sq = 0.0
    for comp in (u.u1, u.u2):
        g = gradient(comp)
        grad_sq += float(np.sum(w * (g.u1.values**2 + g.u2.values**2)))
    lap_int = float(
        np.sum(
            w[1:-1, 1:-1]
            * (lap.u1.values[1:-1, 1:-1] ** 2 + lap.u2.values[1:-1, 1:-1] ** 2)
        )
    )
    div_sq = float(np.sum(w * div.values**2))
    return _StateView(u, lap, div, u_sq, grad_sq, lap_int, div_sq)


class _StepData(NamedTuple):
    adv: VectorField
    grad_pe: VectorField
    grad_ps_scheme: VectorField
    grad_pgh: VectorField | None
    p_euler: ScalarField
    p_stokes: ScalarField
    p_inhom: ScalarField | None
    grad_ps_sq: float
    grad_pe_sq: float
    stokes_ratio: float
    compat_corr: float


def _explicit_pressure_data(
    view: _StateView,
    f_n: VectorField | None,
    nu: float,
    h_data: tuple[ScalarField, ScalarField] | None,
    dt_ng: BoundaryData | None,
) -> _StepData:
    grid = view.u.grid
    w = trapezoid_weights(grid)
    adv = advect(view.u)

    if f_n is None:
        a = VectorField.from_arrays(grid, -adv.u1.values, -adv.u2.values)
    else:
        a = VectorField.from_arrays(
            grid, f_n.u1.values - adv.u1.values, f_n.u2.values - adv.u2.values
        )
    p_e = helmholtz_decompose(a, projection_plan(grid)).phi
    grad_pe = gradient(p_e)
    grad_pe_sq = float(np.sum(w * (grad_pe.u1.values**2 + grad_pe.u2.values**2)))

    # Neumann-solve Stokes pressure: diagnostic norms and snapshot field.
    nres = solve_neumann_poisson(
        neumann_plan(grid), ScalarField.zeros(grid), stokes_neumann_data(view.u)
    )
    grad_ps = gradient(nres.p)
    grad_ps_sq = float(np.sum(w * (grad_ps.u1.values**2 + grad_ps.u2.values**2)))
    ratio = grad_ps_sq / view.lap_u_sq if view.lap_u_sq > 0 else 0.0
    compat = abs(nres.compat_shift)

    # Projected form drives the scheme.
    grad_ps_scheme = stokes_gradient_projected(
        view.u, lap=view.lap, div=view.div, plan=projection_plan(grid)
    )

    grad_pgh = None
    p_gh = None
    if h_data is not None or dt_ng is not None:
        h_field, dt_h_field = h_data if h_data is not None else (
            ScalarField.zeros(grid),
            ScalarField.zeros(grid),
        )
        if dt_ng is None:
            dt_ng = BoundaryData.zeros(grid, "neumann")
        pres = inhomogeneous_pressure(dt_h_field, h_field, dt_ng, nu, neumann_plan(grid))
        p_gh = pres.p
        grad_pgh = gradient(p_gh)
        compat = max(compat, abs(pres.compat_shift))

    return _StepData(
        adv=adv,
        grad_pe=grad_pe,
        grad_ps_scheme=grad_ps_scheme,
        grad_pgh=grad_pgh,
        p_euler=p_e,
        p_stokes=nres.p,
        p_inhom=p_gh,
        grad_ps_sq=grad_ps_sq,
        grad_pe_sq=grad_pe_sq,
        stokes_ratio=ratio,
        compat_corr=compat,
    )


def _advance(
    state: SimState,
    cfg: SimConfig,
    f_n: VectorField | None,
    data: _StepData,
    g_next: tuple[BoundaryData, BoundaryData],
) -> SimState:
    grid = state.u.grid
    nu, dt = cfg.nu, cfg.dt
    plan = dirichlet_plan(grid)
    new = []
    for k in (0, 1):
        comp = (state.u.u1, state.u.u2)[k]
        explicit = (
            -(data.adv.u1, data.adv.u2)[k].values
            - (data.grad_pe.u1, data.grad_pe.u2)[k].values
            - nu * (data.grad_ps_scheme.u1, data.grad_ps_scheme.u2)[k].values
        )
        if f_n is not None:
            explicit = explicit + (f_n.u1, f_n.u2)[k].values
        if data.grad_pgh is not None:
            explicit = explicit - (data.grad_pgh.u1, data.grad_pgh.u2)[k].values
        rhs = ScalarField(grid, comp.values + dt * explicit)
        new.append(solve_dirichlet_helmholtz(plan, nu * dt, rhs, g_next[k]))
    return SimState(VectorField(new[0], new[1]), (state.n + 1) * dt, state.n + 1)


def _diagnostics(state: SimState, view: _StateView, data: _StepData) -> StepDiagnostics:
    return StepDiagnostics(
        step=state.n,
        t=state.t,
        u_sq=view.u_sq,
        grad_u_sq=view.grad_u_sq,
        lap_u_sq=view.lap_u_sq,
        div_u_sq=view.div_u_sq,
        grad_ps_sq=data.grad_ps_sq,
        grad_pe_sq=data.grad_pe_sq,
        stokes_ratio=data.stokes_ratio,
        compat_corr=data.compat_corr,
    )


def step(
    state: SimState, cfg: SimConfig, f_n: VectorField | None = None
) -> tuple[SimState, StepDiagnostics]:
    """One homogeneous (no-slip) step u^n -> u^{n+1}."""
    grid = state.u.grid
    view = _analyze(state.u)
    data = _explicit_pressure_data(view, f_n, cfg.nu, None, None)
    zeros = (BoundaryData.zeros(grid), BoundaryData.zeros(grid))
    new_state = _advance(state, cfg, f_n, data, zeros)
    return new_state, _diagnostics(new_state, _analyze(new_state.u), data)


def step_nonhomogeneous(
    state: SimState,
    cfg: SimConfig,
    f_n: VectorField | None,
    h_data: tuple[ScalarField, ScalarField] | None,
    g_next: tuple[BoundaryData, BoundaryData],
    dt_ng: BoundaryData | None,
) -> tuple[SimState, StepDiagnostics]:
    """One step with boundary velocity g(t_{n+1}) and optional prescribed
    divergence data (h, dt h) at t_n."""
    view = _analyze(state.u)
    data = _explicit_pressure_data(view, f_n, cfg.nu, h_data, dt_ng)
    new_state = _advance(state, cfg, f_n, data, g_next)
    return new_state, _diagnostics(new_state, _analyze(new_state.u), data)


@dataclass
class Snapshot:
    step: int
    t: float
    u: VectorField
    p_total: ScalarField


@dataclass
class RunOutcome:
    status: str  # "completed" | "blew-up"
    blowup_step: int | None = None


@dataclass
class RunResult:
    series: list[StepDiagnostics]
    snapshots: list[Snapshot]
    outcome: RunOutcome
    final_state: SimState


def _n_steps(t_end: float, dt: float) -> int:
    if t_end <= 0:
        return 0
    n = t_end / dt
    if abs(n - round(n)) < 1e-9 * max(1.0, n):
        return int(round(n))
    return int(math.ceil(n))


def _total_pressure(data: _StepData, nu: float) -> ScalarField:
    vals = data.p_euler.values + nu * data.p_stokes.values
    if data.p_inhom is not None:
        vals = vals + data.p_inhom.values
    return ScalarField(data.p_euler.grid, vals)


def run(cfg: SimConfig, bc: BoundaryForcing | None = None) -> RunResult:
    """Run the scheme to t_end (or blow-up), collecting per-step diagnostics.

    Deterministic for a fixed config: identical configs give bit-identical
    series.  Aborts with a blow-up outcome when diagnostics go non-finite or
    ||grad u||^2 exceeds BLOWUP_GRAD_SQ.
    """
    cfg.validate()
    grid = cfg.grid()
    if bc is None:
        bc = make_boundary_forcing(grid, cfg.bc.get("preset", "homogeneous"), cfg.bc)
    fn = make_forcing_fn(cfg.forcing.get("preset", "zero"), cfg.forcing, cfg.nu)
    sampler = ForcingSampler(fn, order=int(cfg.forcing.get("order", 3))) if fn else None

    u0 = make_initial_condition(grid, cfg.ic.get("preset", "zero"), cfg.ic)
    g0 = bc.velocity(0.0)
    apply_dirichlet(u0.u1.values, g0[0])
    apply_dirichlet(u0.u2.values, g0[1])
    state = SimState(u0, 0.0, 0)

    nonhomogeneous = not bc.homogeneous
    n_steps = _n_steps(cfg.t_end, cfg.dt)

    def pressure_inputs(t: float):
        if not nonhomogeneous or bc.h is None:
            return None
        return (bc.h(t), bc.dt_h(t))

    def boundary_rate(t: float):
        if nonhomogeneous and bc.dt_normal_g is not None:
            return bc.dt_normal_g(t)
        return None

    series: list[StepDiagnostics] = []
    snapshots: list[Snapshot] = []
    view = _analyze(state.u)
    f_n = average_forcing(sampler, grid, 0, cfg.dt) if sampler else None
    data = _explicit_pressure_data(view, f_n, cfg.nu, pressure_inputs(0.0), boundary_rate(0.0))
    series.append(_diagnostics(state, view, data))
    if cfg.snapshot_every > 0:
        snapshots.append(Snapshot(0, 0.0, state.u.copy(), _total_pressure(data, cfg.nu)))

    outcome = RunOutcome("completed")
    for k in range(n_steps):
        if k > 0:
            f_n = average_forcing(sampler, grid, k, cfg.dt) if sampler else None
            data = _explicit_pressure_data(
                view, f_n, cfg.nu, pressure_inputs(state.t), boundary_rate(state.t)
            )
        g_next = bc.velocity((k + 1) * cfg.dt) if nonhomogeneous else bc.velocity(0.0)
        state = _advance(state, cfg, f_n, data, g_next)
        view = _analyze(state.u)
        diag = _diagnostics(state, view, data)
        series.append(diag)
        if not diag.is_finite() or diag.grad_u_sq > BLOWUP_GRAD_SQ:
            outcome = RunOutcome("blew-up", blowup_step=state.n)
            break
        if cfg.snapshot_every > 0 and state.n % cfg.snapshot_every == 0:
            f_s = average_forcing(sampler, grid, state.n, cfg.dt) if sampler else None
            data_s = _explicit_pressure_data(
                view, f_s, cfg.nu, pressure_inputs(state.t), boundary_rate(state.t)
            )
            snapshots.append(
                Snapshot(state.n, state.t, state.u.copy(), _total_pressure(data_s, cfg.nu))
            )

    return RunResult(series, snapshots, outcome, state)
