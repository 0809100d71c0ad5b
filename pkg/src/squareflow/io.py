"""On-disk formats: diagnostics CSV, nodal-field CSV, vorticity PGM, and the
run manifest.  All schemas are documented in FORMATS.md.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .grid import ScalarField, VectorField
from .operators import vorticity
from .stepper import StepDiagnostics

__all__ = [
    "write_diagnostics",
    "write_field_csv",
    "write_vorticity_pgm",
    "write_snapshot",
    "write_rows_csv",
    "RunManifest",
    "sha256_file",
    "atomic_write_bytes",
]

DIAGNOSTICS_HEADER = (
    "step,t,energy,grad_u_sq,lap_u_sq,div_u_sq,grad_ps_sq,grad_pe_sq,stokes_ratio,compat_corr"
)


def atomic_write_bytes(path: str | Path, payload: bytes) -> Path:
    """Write via a temp file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def atomic_write_text(path: str | Path, text: str) -> Path:
    return atomic_write_bytes(path, text.encode())


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_diagnostics(series: list[StepDiagnostics], path: str | Path) -> Path:
    """One row per diagnostics record, %.12e floats, LF line endings."""
    lines = [DIAGNOSTICS_HEADER]
    for d in series:
        lines.append(
            "%d,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e"
            % (
                d.step,
                d.t,
                d.energy,
                d.grad_u_sq,
                d.lap_u_sq,
                d.div_u_sq,
                d.grad_ps_sq,
                d.grad_pe_sq,
                d.stokes_ratio,
                d.compat_corr,
            )
        )
    return atomic_write_text(path, "\n".join(lines) + "\n")


def write_rows_csv(header: str, rows: list[tuple], path: str | Path) -> Path:
    """Generic CSV: %.12e for floats, plain repr for ints/strings, LF."""

    def fmt(v) -> str:
        if isinstance(v, bool):
            return "1" if v else "0"
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        if isinstance(v, (float, np.floating)):
            return "%.12e" % v
        return str(v)

    lines = [header] + [",".join(fmt(v) for v in row) for row in rows]
    return atomic_write_text(path, "\n".join(lines) + "\n")


def write_field_csv(values: np.ndarray, path: str | Path) -> Path:
    """Nodal grid as CSV, one j-row per line, row-major, %.12e."""
    lines = [",".join("%.12e" % v for v in row) for row in values]
    return atomic_write_text(path, "\n".join(lines) + "\n")


def write_vorticity_pgm(u: VectorField, path: str | Path) -> tuple[Path, float]:
    """Binary PGM (P5, 8-bit) of the vorticity, linearly mapped over
    [-max|omega|, +max|omega|] (all-128 when omega vanishes).  Image rows
    run top of the domain first.  Returns the path and max|omega|.
    """
    w = vorticity(u).values
    m = float(np.max(np.abs(w)))
    if m == 0.0:
        pixels = np.full(w.shape, 128, dtype=np.uint8)
    else:
        pixels = np.clip(np.floor((w + m) / (2.0 * m) * 255.0 + 0.5), 0, 255).astype(np.uint8)
    pixels = pixels[::-1, :]  # j = ny first
    ny1, nx1 = pixels.shape
    header = f"P5\n{nx1} {ny1}\n255\n".encode()
    return atomic_write_bytes(path, header + pixels.tobytes()), m


def write_snapshot(
    u: VectorField, p_total: ScalarField, step: int, out_dir: str | Path
) -> tuple[list[Path], float]:
    """Write u1_<step>.csv, u2_<step>.csv, p_<step>.csv and
    vorticity_<step>.pgm; returns the paths and max|omega|."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [
        write_field_csv(u.u1.values, out / f"u1_{step}.csv"),
        write_field_csv(u.u2.values, out / f"u2_{step}.csv"),
        write_field_csv(p_total.values, out / f"p_{step}.csv"),
    ]
    pgm_path, max_w = write_vorticity_pgm(u, out / f"vorticity_{step}.pgm")
    paths.append(pgm_path)
    return paths, max_w


@dataclass
class RunManifest:
    """Atomic end-of-run record: config echo, outcome, and checksums of
    every output file in the run directory."""

    config: dict
    invocation: dict
    version: str
    started_at: str
    outcome: dict = field(default_factory=lambda: {"status": "completed"})
    extras: dict = field(default_factory=dict)
    files: list = field(default_factory=list)
    finished_at: str = ""

    @staticmethod
    def now() -> str:
        return datetime.now(timezone.utc).isoformat()

    def add_file(self, path: str | Path, base: str | Path) -> None:
        path = Path(path)
        self.files.append(
            {
                "name": str(path.relative_to(base)),
                "sha256": sha256_file(path),
                "bytes": path.stat().st_size,
            }
        )

    def write(self, out_dir: str | Path) -> Path:
        self.finished_at = self.now()
        self.files.sort(key=lambda f: f["name"])
        payload = json.dumps(
            {
                "config": self.config,
                "invocation": self.invocation,
                "version": self.version,
                "started_at": self.started_at,
                "finished_at": self.finished_at,
                "outcome": self.outcome,
                "extras": self.extras,
                "files": self.files,
            },
            indent=2,
            sort_keys=True,
        )
        return atomic_write_text(Path(out_dir) / "manifest.json", payload + "\n")

    @staticmethod
    def verify(out_dir: str | Path) -> bool:
        """Recompute checksums of every listed file; True when all match."""
        out = Path(out_dir)
        manifest = json.loads((out / "manifest.json").read_text())
        for entry in manifest["files"]:
            target = out / entry["name"]
            if not target.is_file() or sha256_file(target) != entry["sha256"]:
                return False
        return True
