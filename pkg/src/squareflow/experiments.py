"""Scripted studies confronting the solver with its design claims:
pressure domination, unconditional stability, divergence decay,
Neumann-to-Dirichlet ratios, manufactured-solution convergence, and the
driven cavity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterator

import numpy as np
from scipy.optimize import lsq_linear

from .elliptic import neumann_plan, solve_neumann_poisson
from .grid import BoundaryData, Grid2D, ScalarField, VectorField, inner_product, trapezoid_weights
from .operators import divergence, gradient
from .presets import BoundaryForcing, manufactured_velocity
from .pressure import inhomogeneous_pressure, stokes_pressure
from .stepper import (
    SimConfig,
    SimState,
    StepDiagnostics,
    run,
    step_nonhomogeneous,
)

__all__ = [
    "SampleSpec",
    "sample_fields",
    "FitResult",
    "verify_stokes_estimate",
    "SweepRow",
    "stability_sweep",
    "DecayResult",
    "divergence_decay",
    "ConvergenceResult",
    "convergence_study",
    "CavityResult",
    "lid_driven_cavity",
    "lid_boundary_forcing",
    "ProbeResult",
    "probe_neumann_to_dirichlet",
    "strip_ratio",
]


# --- sample families ----------------------------------------------------------


@dataclass(frozen=True)
class SampleSpec:
    """Random velocity-sample family for the pressure-domination study.

    Families:
      * ``stream-function``: u = perp-grad(psi) with psi a windowed random
        cosine series; divergence-free with u and grad(psi) vanishing on the
        boundary.
      * ``random-sine-series``: independent sine series per component;
        no-slip but not divergence-free.
      * ``interior-bump``: random coefficients times a bump supported well
        away from the boundary.
    Amplitudes follow the power law (1 + i^2 + j^2)^(-amplitude_decay).
    """

    family: str = "stream-function"
    n_samples: int = 200
    n_modes: int = 4
    amplitude_decay: float = 2.0
    seed: int = 0

    @property
    def divergence_free(self) -> bool:
        return self.family == "stream-function"

    def __post_init__(self):
        if self.family not in ("stream-function", "random-sine-series", "interior-bump"):
            raise ValueError(f"unknown sample family {self.family!r}")


def _zero_boundary(arr: np.ndarray) -> np.ndarray:
    # the closed forms vanish on the boundary; remove float-pi residue so
    # samples meet the exact no-slip invariant
    arr[0, :] = 0.0
    arr[-1, :] = 0.0
    arr[:, 0] = 0.0
    arr[:, -1] = 0.0
    return arr


def _stream_sample(grid: Grid2D, amps: np.ndarray, decay: float) -> VectorField:
    X, Y = grid.mesh()
    sx2, sy2 = np.sin(np.pi * X) ** 2, np.sin(np.pi * Y) ** 2
    dwx = np.pi * np.sin(2 * np.pi * X)  # d/dx of sin^2(pi x)
    dwy = np.pi * np.sin(2 * np.pi * Y)
    m = amps.shape[0]
    T = np.zeros(grid.node_shape)
    Tx = np.zeros(grid.node_shape)
    Ty = np.zeros(grid.node_shape)
    for i in range(m):
        for j in range(m):
            a = amps[i, j] / (1.0 + i * i + j * j) ** decay
            cx, cy = np.cos(i * np.pi * X), np.cos(j * np.pi * Y)
            T += a * cx * cy
            Tx += -a * i * np.pi * np.sin(i * np.pi * X) * cy
            Ty += -a * j * np.pi * cx * np.sin(j * np.pi * Y)
    # psi = sin^2(pi x) sin^2(pi y) T;  u = (-d psi/dy, d psi/dx)
    psi_x = dwx * sy2 * T + sx2 * sy2 * Tx
    psi_y = sx2 * dwy * T + sx2 * sy2 * Ty
    return VectorField.from_arrays(grid, _zero_boundary(-psi_y), _zero_boundary(psi_x))


def _sine_sample(grid: Grid2D, amps: np.ndarray, decay: float) -> VectorField:
    X, Y = grid.mesh()
    m = amps.shape[1]
    comps = []
    for k in (0, 1):
        v = np.zeros(grid.node_shape)
        for i in range(1, m + 1):
            for j in range(1, m + 1):
                a = amps[k, i - 1, j - 1] / (1.0 + i * i + j * j) ** decay
                v += a * np.sin(i * np.pi * X) * np.sin(j * np.pi * Y)
        comps.append(_zero_boundary(v))
    return VectorField.from_arrays(grid, comps[0], comps[1])


def _bump_sample(grid: Grid2D, coeffs: np.ndarray) -> VectorField:
    X, Y = grid.mesh()
    r2 = ((X - 0.5) ** 2 + (Y - 0.5) ** 2) / 0.22**2
    with np.errstate(divide="ignore", over="ignore"):
        bump = np.where(r2 < 1.0, np.exp(1.0 - 1.0 / np.maximum(1e-12, 1.0 - r2)), 0.0)
    c1, c2, kx, ky = coeffs
    mod = np.cos(kx * np.pi * X) * np.cos(ky * np.pi * Y)
    return VectorField.from_arrays(grid, c1 * bump * mod, c2 * bump * mod)


def sample_fields(spec: SampleSpec, grid: Grid2D) -> Iterator[VectorField]:
    rng = np.random.default_rng(spec.seed)
    for _ in range(spec.n_samples):
        if spec.family == "stream-function":
            yield _stream_sample(grid, rng.standard_normal((spec.n_modes, spec.n_modes)), spec.amplitude_decay)
        elif spec.family == "random-sine-series":
            yield _sine_sample(grid, rng.standard_normal((2, spec.n_modes, spec.n_modes)), spec.amplitude_decay)
        else:
            yield _bump_sample(grid, np.append(rng.standard_normal(2), rng.integers(1, 4, 2)))


# --- pressure-domination study ------------------------------------------------


@dataclass
class FitResult:
    beta_hat: float
    c_hat: float
    max_ratio: float
    sample_count: int
    grid_n: tuple[int, int]
    skipped_degenerate: int = 0
    samples: list = field(default_factory=list)  # (grad_ps_sq, lap_u_sq, grad_u_sq, ratio, div_free)


def verify_stokes_estimate(spec: SampleSpec, grid: Grid2D) -> FitResult:
    """Sample the family, collect pressure-domination triples, and fit
    ||grad p_S||^2 ~ beta ||lap u||^2 + C ||grad u||^2 with beta in [0, 1],
    C >= 0.  max_ratio is reported over the divergence-free samples only.
    """
    rows = []
    skipped = 0
    for u in sample_fields(spec, grid):
        res = stokes_pressure(u, neumann_plan(grid))
        if res.lap_u_sq == 0.0:
            skipped += 1
            continue
        ratio = res.grad_ps_sq / res.lap_u_sq
        rows.append((res.grad_ps_sq, res.lap_u_sq, res.grad_u_sq, ratio, spec.divergence_free))
    a = np.array([[r[1], r[2]] for r in rows])
    b = np.array([r[0] for r in rows])
    fit = lsq_linear(a, b, bounds=([0.0, 0.0], [1.0, np.inf]))
    div_free_ratios = [r[3] for r in rows if r[4]]
    return FitResult(
        beta_hat=float(fit.x[0]),
        c_hat=float(fit.x[1]),
        max_ratio=float(max(div_free_ratios)) if div_free_ratios else float("nan"),
        sample_count=len(rows),
        grid_n=(grid.nx, grid.ny),
        skipped_degenerate=skipped,
        samples=rows,
    )


# --- stability sweep ----------------------------------------------------------


@dataclass
class SweepRow:
    nu: float
    dt: float
    steps: int
    sup_grad_u_sq: float
    sum_lap_u_sq_dt: float
    blew_up: bool
    blowup_step: int | None


def stability_sweep(base_cfg: SimConfig, dt_list: list[float]) -> list[SweepRow]:
    """Run the fixed (u0, f, nu) problem at each dt and record the bounded
    quantities sup ||grad u^k||^2 and sum ||lap u^k||^2 dt."""
    rows = []
    for dt in dt_list:
        cfg = replace(base_cfg, dt=float(dt))
        result = run(cfg)
        rows.append(
            SweepRow(
                nu=cfg.nu,
                dt=float(dt),
                steps=len(result.series) - 1,
                sup_grad_u_sq=max(d.grad_u_sq for d in result.series),
                sum_lap_u_sq_dt=sum(d.lap_u_sq for d in result.series) * dt,
                blew_up=result.outcome.status == "blew-up",
                blowup_step=result.outcome.blowup_step,
            )
        )
    return rows


# --- divergence decay ---------------------------------------------------------


@dataclass
class DecayResult:
    rate_hat: float
    amplitude: float
    nu: float
    dt: float
    window: tuple[float, float]
    times: np.ndarray
    div_norms: np.ndarray
    series: list[StepDiagnostics]


def divergence_decay(
    amplitude: float,
    grid: Grid2D,
    nu: float,
    dt: float,
    t_end: float = 0.5,
    window: tuple[float, float] = (0.05, 0.5),
) -> DecayResult:
    """Seed div u0 = amplitude cos(pi x) (tapered by sin^2(pi y) for
    no-slip), run force-free, and fit the exponential decay rate of
    ||div u|| over the time window."""
    cfg = SimConfig(
        nx=grid.nx,
        ny=grid.ny,
        nu=nu,
        dt=dt,
        t_end=t_end,
        ic={"preset": "div-seed", "amplitude": amplitude},
    )
    result = run(cfg)
    times = np.array([d.t for d in result.series])
    div_norms = np.sqrt(np.array([d.div_u_sq for d in result.series]))
    mask = (times >= window[0]) & (times <= window[1])
    if np.all(div_norms[mask] < 1e-14):
        rate = 0.0
    else:
        rate = -float(np.polyfit(times[mask], np.log(div_norms[mask]), 1)[0])
    return DecayResult(rate, amplitude, nu, dt, window, times, div_norms, result.series)


# --- manufactured-solution convergence -----------------------------------------


def _velocity_error(u: VectorField, t: float) -> float:
    exact = manufactured_velocity(u.grid, t)
    d1 = ScalarField(u.grid, u.u1.values - exact.u1.values)
    d2 = ScalarField(u.grid, u.u2.values - exact.u2.values)
    return float(np.sqrt(inner_product(d1, d1) + inner_product(d2, d2)))


def _diff_norm(a: VectorField, b: VectorField) -> float:
    d1 = ScalarField(a.grid, a.u1.values - b.u1.values)
    d2 = ScalarField(a.grid, a.u2.values - b.u2.values)
    return float(np.sqrt(inner_product(d1, d1) + inner_product(d2, d2)))


@dataclass
class ConvergenceResult:
    spatial_grids: list[int]
    spatial_errors: list[float]
    spatial_order: float
    temporal_dts: list[float]
    temporal_errors: list[float]
    temporal_order: float
    temporal_diff_norms: list[float]


def convergence_study(
    grid_list: list[int],
    dt_list: list[float],
    nu: float = 0.5,
    dt_spatial: float = 1e-5,
    n_temporal: int = 128,
    t_end: float = 0.25,
) -> ConvergenceResult:
    """Manufactured-solution verification.

    Spatial order: least-squares slope of log(error) against log(h) over the
    h-refinement sequence at tiny dt, errors measured against the exact
    solution.  Temporal order: Richardson estimate from norms of differences
    between solutions at consecutive dt at fixed fine grid; the differences
    cancel the common spatial error, which otherwise masks the O(dt) term
    through sign cancellation near dt ~ 1e-3.
    """

    def final_state(n: int, dt: float) -> SimState:
        cfg = SimConfig(
            nx=n,
            ny=n,
            nu=nu,
            dt=dt,
            t_end=t_end,
            ic={"preset": "manufactured"},
            forcing={"preset": "manufactured"},
        )
        result = run(cfg)
        if result.outcome.status != "completed":
            raise RuntimeError(f"manufactured run blew up at n={n}, dt={dt}")
        return result.final_state

    spatial_errors = []
    for n in grid_list:
        st = final_state(n, dt_spatial)
        spatial_errors.append(_velocity_error(st.u, st.t))
    hs = np.log([1.0 / n for n in grid_list])
    spatial_order = float(np.polyfit(hs, np.log(spatial_errors), 1)[0])

    temporal_states = [final_state(n_temporal, dt) for dt in dt_list]
    temporal_errors = [_velocity_error(st.u, st.t) for st in temporal_states]
    diffs = [
        _diff_norm(temporal_states[k].u, temporal_states[k + 1].u)
        for k in range(len(temporal_states) - 1)
    ]
    dlog = np.log([float(d) for d in dt_list])
    if len(diffs) >= 2:
        temporal_order = float(np.polyfit(dlog[:-1], np.log(diffs), 1)[0])
    else:
        temporal_order = float("nan")
    return ConvergenceResult(
        spatial_grids=list(grid_list),
        spatial_errors=spatial_errors,
        spatial_order=spatial_order,
        temporal_dts=[float(d) for d in dt_list],
        temporal_errors=temporal_errors,
        temporal_order=temporal_order,
        temporal_diff_norms=diffs,
    )


# --- lid-driven cavity ----------------------------------------------------------


def lid_boundary_forcing(grid: Grid2D, speed: float, profile: str = "uniform") -> BoundaryForcing:
    """Tangential lid data (n.g = 0, h = 0).

    ``uniform`` moves the whole lid at constant speed (discontinuous at the
    top corners); ``regularized`` uses speed * 16 x^2 (1-x)^2, the standard
    corner-compatible variant.
    """
    x = grid.x_nodes()
    if profile == "uniform":
        prof = np.full_like(x, speed)
    elif profile == "regularized":
        prof = speed * 16.0 * x**2 * (1.0 - x) ** 2
    else:
        raise ValueError(f"unknown lid profile {profile!r}")
    g1 = BoundaryData.zeros(grid)
    g1.top[:] = prof
    pair = (g1, BoundaryData.zeros(grid))
    return BoundaryForcing(
        grid,
        False,
        lambda t: pair,
        dt_normal_g=lambda t: BoundaryData.zeros(grid, "neumann"),
    )


@dataclass
class CavityResult:
    converged: bool
    steps: int
    t_final: float
    energy: float
    max_abs_div: float
    max_abs_p_inhom: float
    centerline_y: np.ndarray  # y nodes
    u1_centerline: np.ndarray  # u1 along x = 1/2
    centerline_x: np.ndarray  # x nodes
    u2_centerline: np.ndarray  # u2 along y = 1/2
    series: list[StepDiagnostics]
    final_u: VectorField


def lid_driven_cavity(
    speed: float,
    nu: float,
    grid: Grid2D,
    dt: float,
    t_end: float,
    profile: str = "uniform",
    steady_tol: float = 1e-6,
) -> CavityResult:
    """March the lid-driven cavity to approximate steadiness
    (||u^{n+1} - u^n|| / dt <= steady_tol) or t_end."""
    bc = lid_boundary_forcing(grid, speed, profile)
    cfg = SimConfig(nx=grid.nx, ny=grid.ny, nu=nu, dt=dt, t_end=t_end, bc={"preset": "lid"})
    u0 = VectorField.zeros(grid)
    g0 = bc.velocity(0.0)
    u0.u1.values[-1, :] = g0[0].top
    state = SimState(u0, 0.0, 0)
    series: list[StepDiagnostics] = []
    converged = False
    n_steps = int(round(t_end / dt))
    # With tangential data the inhomogeneous pressure vanishes identically.
    zero = ScalarField.zeros(grid)
    pres = inhomogeneous_pressure(zero, zero, BoundaryData.zeros(grid, "neumann"), nu)
    max_p_inhom = float(np.max(np.abs(pres.p.values)))
    for _ in range(n_steps):
        prev = state.u
        state, diag = step_nonhomogeneous(state, cfg, None, None, bc.velocity(state.t + dt), bc.dt_normal_g(state.t))
        series.append(diag)
        if not diag.is_finite():
            break
        residual = _diff_norm(state.u, prev) / dt
        if residual <= steady_tol:
            converged = True
            break
    div = divergence(state.u)
    mid_i = grid.nx // 2
    mid_j = grid.ny // 2
    return CavityResult(
        converged=converged,
        steps=state.n,
        t_final=state.t,
        energy=series[-1].energy if series else 0.0,
        max_abs_div=float(np.max(np.abs(div.values))),
        max_abs_p_inhom=max_p_inhom,
        centerline_y=grid.y_nodes().copy(),
        u1_centerline=state.u.u1.values[:, mid_i].copy(),
        centerline_x=grid.x_nodes().copy(),
        u2_centerline=state.u.u2.values[mid_j, :].copy(),
        series=series,
        final_u=state.u,
    )


# --- Neumann-to-Dirichlet probe --------------------------------------------------


def _strip_mask(grid: Grid2D, s: float) -> tuple[np.ndarray, np.ndarray]:
    """Boundary-strip mask {dist <= s} minus corner wedges, plus the index
    (0..3 for left/right/bottom/top) of the nearest side per node.

    Ties are broken by the fixed side order left, right, bottom, top.
    Corner wedges are sup-norm balls of radius 2h (2 max(hx, hy)).
    """
    X, Y = grid.mesh()
    dists = np.stack([X, 1.0 - X, Y, 1.0 - Y])
    phi = dists.min(axis=0)
    side = dists.argmin(axis=0)
    mask = phi <= s
    wedge = 2.0 * max(grid.hx, grid.hy)
    for cx in (0.0, 1.0):
        for cy in (0.0, 1.0):
            mask &= np.maximum(np.abs(X - cx), np.abs(Y - cy)) >= wedge
    return mask, side


def strip_ratio(grad: VectorField, grid: Grid2D, s: float) -> float:
    """Ratio of the full to the normal-part gradient energy in the boundary
    strip of width s (corner wedges excluded, normal taken per nearest
    side)."""
    mask, side = _strip_mask(grid, s)
    w = trapezoid_weights(grid)
    gx, gy = grad.u1.values, grad.u2.values
    full = np.sum(w[mask] * (gx[mask] ** 2 + gy[mask] ** 2))
    normal_sq = np.where(side < 2, gx**2, gy**2)
    normal = np.sum(w[mask] * normal_sq[mask])
    return float(full / normal)


@dataclass
class ProbeResult:
    s: float
    grid_n: tuple[int, int]
    ratios: list[float]
    max_ratio: float
    mean_ratio: float


def probe_neumann_to_dirichlet(
    s: float, samples: int, grid: Grid2D, seed: int = 0, n_modes: int = 6
) -> ProbeResult:
    """Empirical strip bound for harmonic functions: generate random smooth
    zero-mean Neumann data, solve for the discrete harmonic field, and
    report the max over samples of gradient / normal-gradient strip energy.

    The boundary-data coefficients depend only on (seed, sample index), so
    ratios are comparable across grids.
    """
    if not (2.0 * max(grid.hx, grid.hy) < s < 0.25):
        raise ValueError(f"strip width s={s} must lie in (2h, 0.25)")
    rng = np.random.default_rng(seed)
    plan = neumann_plan(grid)
    xs, ys = grid.x_nodes(), grid.y_nodes()
    ratios = []
    for _ in range(samples):
        coeffs = rng.standard_normal((4, n_modes, 2))
        sides = []
        for si, tau in enumerate((ys, ys, xs, xs)):
            vals = np.zeros_like(tau)
            for k in range(1, n_modes + 1):
                a, b = coeffs[si, k - 1] / k**2
                vals += a * np.cos(k * np.pi * tau) + b * np.sin(k * np.pi * tau)
            sides.append(vals)
        data = BoundaryData(grid, *sides, kind="neumann")
        data = data.shifted(data.boundary_integral() / 4.0)
        p = solve_neumann_poisson(plan, ScalarField.zeros(grid), data).p
        ratios.append(strip_ratio(gradient(p), grid, s))
    return ProbeResult(
        s=s,
        grid_n=(grid.nx, grid.ny),
        ratios=ratios,
        max_ratio=float(np.max(ratios)),
        mean_ratio=float(np.mean(ratios)),
    )
