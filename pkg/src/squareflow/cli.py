"""Command-line entry point.

Subcommands: run, sweep-stability, verify-stokes, decay, converge, cavity,
probe-n2d.  Every subcommand takes a JSON config and an --out directory and
leaves behind its CSV/JSON outputs plus a manifest with checksums.

Exit codes: 0 success, 2 config error, 3 blow-up, 1 other failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, config_to_dict, parse_config
from .elliptic import neumann_plan
from .experiments import (
    SampleSpec,
    convergence_study,
    divergence_decay,
    lid_driven_cavity,
    probe_neumann_to_dirichlet,
    stability_sweep,
    verify_stokes_estimate,
)
from .grid import Grid2D, ScalarField
from .io import RunManifest, atomic_write_text, write_diagnostics, write_rows_csv, write_snapshot
from .pressure import euler_pressure, stokes_pressure
from .stepper import run as run_simulation

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_BLOWUP = 3


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _write_summary(payload: dict, path: Path) -> Path:
    return atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _finish(manifest: RunManifest, out: Path, produced: list[Path]) -> None:
    for p in produced:
        manifest.add_file(p, out)
    manifest.write(out)


def _cmd_run(cfg, args, manifest: RunManifest, out: Path) -> int:
    result = run_simulation(cfg)
    produced = [write_diagnostics(result.series, out / "diagnostics.csv")]
    snap_meta = {}
    for snap in result.snapshots:
        paths, max_w = write_snapshot(snap.u, snap.p_total, snap.step, out / "snapshots")
        produced.extend(paths)
        snap_meta[str(snap.step)] = {"t": snap.t, "max_abs_vorticity": max_w}
    manifest.extras["snapshots"] = snap_meta
    if result.outcome.status == "blew-up":
        manifest.outcome = {"status": "blew-up", "step": result.outcome.blowup_step}
        _finish(manifest, out, produced)
        return EXIT_BLOWUP
    _finish(manifest, out, produced)
    return EXIT_OK


def _cmd_sweep(cfg, args, manifest: RunManifest, out: Path) -> int:
    rows = stability_sweep(cfg, args.dts)
    produced = [
        write_rows_csv(
            "nu,dt,steps,sup_grad_u_sq,sum_lap_u_sq_dt,blew_up,blowup_step",
            [
                (r.nu, r.dt, r.steps, r.sup_grad_u_sq, r.sum_lap_u_sq_dt, r.blew_up,
                 -1 if r.blowup_step is None else r.blowup_step)
                for r in rows
            ],
            out / "stability_sweep.csv",
        )
    ]
    sups = [r.sup_grad_u_sq for r in rows]
    summary = {
        "nu": cfg.nu,
        "dts": args.dts,
        "sup_grad_u_sq": sups,
        "sum_lap_u_sq_dt": [r.sum_lap_u_sq_dt for r in rows],
        "sup_variation": (max(sups) - min(sups)) / min(sups) if min(sups) > 0 else 0.0,
        "any_blowup": any(r.blew_up for r in rows),
    }
    produced.append(_write_summary(summary, out / "stability_summary.json"))
    if summary["any_blowup"]:
        manifest.outcome = {
            "status": "blew-up",
            "step": next(r.blowup_step for r in rows if r.blew_up),
        }
        _finish(manifest, out, produced)
        return EXIT_BLOWUP
    _finish(manifest, out, produced)
    return EXIT_OK


def _cmd_verify_stokes(cfg, args, manifest: RunManifest, out: Path) -> int:
    grid = cfg.grid()
    spec = SampleSpec(
        family=args.family,
        n_samples=args.samples,
        n_modes=args.modes,
        amplitude_decay=args.decay,
        seed=args.seed if args.seed is not None else cfg.seed,
    )
    fit = verify_stokes_estimate(spec, grid)
    produced = [
        write_rows_csv(
            "sample,grad_ps_sq,lap_u_sq,grad_u_sq,ratio,div_free",
            [(k, *row) for k, row in enumerate(fit.samples)],
            out / "stokes_samples.csv",
        ),
        _write_summary(
            {
                "family": spec.family,
                "seed": spec.seed,
                "n_modes": spec.n_modes,
                "amplitude_decay": spec.amplitude_decay,
                "grid": list(fit.grid_n),
                "sample_count": fit.sample_count,
                "skipped_degenerate": fit.skipped_degenerate,
                "beta_hat": fit.beta_hat,
                "c_hat": fit.c_hat,
                "max_ratio": fit.max_ratio,
                "ratio_bound": 1.0 + 10.0 * grid.hx**2,
            },
            out / "stokes_summary.json",
        ),
    ]
    _finish(manifest, out, produced)
    return EXIT_OK


def _cmd_decay(cfg, args, manifest: RunManifest, out: Path) -> int:
    amplitude = cfg.ic.get("amplitude", 1e-3) if cfg.ic.get("preset") == "div-seed" else 1e-3
    result = divergence_decay(amplitude, cfg.grid(), cfg.nu, cfg.dt, t_end=cfg.t_end)
    produced = [
        write_diagnostics(result.series, out / "diagnostics.csv"),
        _write_summary(
            {
                "rate_hat": result.rate_hat,
                "expected_rate": cfg.nu * float(np.pi) ** 2,
                "nu": cfg.nu,
                "dt": cfg.dt,
                "amplitude": amplitude,
                "window": list(result.window),
                "grid": [cfg.nx, cfg.ny],
            },
            out / "decay_summary.json",
        ),
    ]
    _finish(manifest, out, produced)
    return EXIT_OK


def _cmd_converge(cfg, args, manifest: RunManifest, out: Path) -> int:
    result = convergence_study(
        args.grids,
        args.dts,
        nu=cfg.nu,
        dt_spatial=args.dt_spatial,
        n_temporal=args.n_temporal,
    )
    rows = [("spatial", n, e) for n, e in zip(result.spatial_grids, result.spatial_errors)]
    rows += [("temporal", dt, e) for dt, e in zip(result.temporal_dts, result.temporal_errors)]
    rows += [
        ("temporal-diff", result.temporal_dts[k], d)
        for k, d in enumerate(result.temporal_diff_norms)
    ]
    produced = [
        write_rows_csv("kind,param,value", rows, out / "convergence.csv"),
        _write_summary(
            {
                "spatial_grids": result.spatial_grids,
                "spatial_errors": result.spatial_errors,
                "spatial_order": result.spatial_order,
                "temporal_dts": result.temporal_dts,
                "temporal_errors": result.temporal_errors,
                "temporal_diff_norms": result.temporal_diff_norms,
                "temporal_order": result.temporal_order,
                "nu": cfg.nu,
                "dt_spatial": args.dt_spatial,
                "n_temporal": args.n_temporal,
            },
            out / "convergence_summary.json",
        ),
    ]
    _finish(manifest, out, produced)
    return EXIT_OK


def _cmd_cavity(cfg, args, manifest: RunManifest, out: Path) -> int:
    grid = cfg.grid()
    speed = cfg.bc.get("speed", 1.0) if cfg.bc.get("preset") == "lid" else 1.0
    profile = cfg.bc.get("profile", "uniform") if cfg.bc.get("preset") == "lid" else "uniform"
    result = lid_driven_cavity(
        speed, cfg.nu, grid, cfg.dt, cfg.t_end, profile=profile, steady_tol=args.steady_tol
    )
    produced = [write_diagnostics(result.series, out / "diagnostics.csv")]
    profile_rows = [("u1_vertical_centerline", y, v) for y, v in zip(result.centerline_y, result.u1_centerline)]
    profile_rows += [("u2_horizontal_centerline", x, v) for x, v in zip(result.centerline_x, result.u2_centerline)]
    produced.append(write_rows_csv("kind,coord,value", profile_rows, out / "cavity_profiles.csv"))
    p_total = ScalarField(
        grid,
        euler_pressure(result.final_u).values
        + cfg.nu * stokes_pressure(result.final_u, neumann_plan(grid)).p.values,
    )
    paths, max_w = write_snapshot(result.final_u, p_total, result.steps, out / "snapshots")
    produced.extend(paths)
    manifest.extras["snapshots"] = {
        str(result.steps): {"t": result.t_final, "max_abs_vorticity": max_w}
    }
    produced.append(
        _write_summary(
            {
                "converged": result.converged,
                "steps": result.steps,
                "t_final": result.t_final,
                "energy": result.energy,
                "max_abs_div": result.max_abs_div,
                "max_abs_p_inhom": result.max_abs_p_inhom,
                "speed": speed,
                "profile": profile,
                "nu": cfg.nu,
                "steady_tol": args.steady_tol,
            },
            out / "cavity_summary.json",
        )
    )
    _finish(manifest, out, produced)
    return EXIT_OK


def _cmd_probe(cfg, args, manifest: RunManifest, out: Path) -> int:
    grid = cfg.grid()
    result = probe_neumann_to_dirichlet(
        args.s, args.samples, grid, seed=args.seed if args.seed is not None else cfg.seed
    )
    produced = [
        write_rows_csv(
            "sample,ratio",
            list(enumerate(result.ratios)),
            out / "n2d_ratios.csv",
        ),
        _write_summary(
            {
                "s": result.s,
                "grid": list(result.grid_n),
                "samples": len(result.ratios),
                "max_ratio": result.max_ratio,
                "mean_ratio": result.mean_ratio,
            },
            out / "n2d_summary.json",
        ),
    ]
    _finish(manifest, out, produced)
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "sweep-stability": _cmd_sweep,
    "verify-stokes": _cmd_verify_stokes,
    "decay": _cmd_decay,
    "converge": _cmd_converge,
    "cavity": _cmd_cavity,
    "probe-n2d": _cmd_probe,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="squareflow", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, **extra):
        p = sub.add_parser(name)
        p.add_argument("config", help="path to JSON run configuration")
        p.add_argument("--out", default="out", help="output directory (default: out)")
        return p

    add("run")
    p = add("sweep-stability")
    p.add_argument("--dts", type=_float_list, required=True, help="comma-separated time steps")
    p = add("verify-stokes")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    p.add_argument("--family", default="stream-function")
    p.add_argument("--modes", type=int, default=4)
    p.add_argument("--decay", type=float, default=2.0)
    add("decay")
    p = add("converge")
    p.add_argument("--grids", type=_int_list, default=[16, 32, 64])
    p.add_argument("--dts", type=_float_list, default=[4e-3, 2e-3, 1e-3])
    p.add_argument("--dt-spatial", type=float, default=1e-5, dest="dt_spatial")
    p.add_argument("--n-temporal", type=int, default=128, dest="n_temporal")
    p = add("cavity")
    p.add_argument("--steady-tol", type=float, default=1e-6, dest="steady_tol")
    p = add("probe-n2d")
    p.add_argument("--s", type=float, default=0.1, help="boundary-strip width")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    invocation = {"subcommand": args.command}
    invocation.update(
        {
            k: v
            for k, v in vars(args).items()
            if k not in ("command", "config", "out") and v is not None
        }
    )
    manifest = RunManifest(
        config=config_to_dict(cfg),
        invocation=invocation,
        version=__version__,
        started_at=RunManifest.now(),
    )
    try:
        return _COMMANDS[args.command](cfg, args, manifest, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
