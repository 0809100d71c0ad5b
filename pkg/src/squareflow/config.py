"""JSON run-configuration parsing and validation."""
from __future__ import annotations

import json
from pathlib import Path

from .stepper import SimConfig

__all__ = ["ConfigError", "parse_config", "parse_config_dict", "config_to_dict"]

_IC_PRESETS = {
    "zero": (),
    "stream": ("amplitude", "normalize"),
    "div-seed": ("amplitude",),
    "manufactured": (),
}
_FORCING_PRESETS = {"zero": (), "manufactured": ("order",)}
_BC_PRESETS = {
    "homogeneous": (),
    "lid": ("speed", "profile"),
    "divergence-ramp": ("amplitude",),
}


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending key path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


def _require_number(obj, path, positive=False, nonnegative=False) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ConfigError(path, f"expected a number, got {type(obj).__name__}")
    v = float(obj)
    if positive and v <= 0:
        raise ConfigError(path, "must be > 0")
    if nonnegative and v < 0:
        raise ConfigError(path, "must be >= 0")
    return v


def _require_int(obj, path, minimum=None) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise ConfigError(path, f"expected an integer, got {type(obj).__name__}")
    if minimum is not None and obj < minimum:
        raise ConfigError(path, f"must be >= {minimum}")
    return obj


def _check_unknown(obj: dict, known: tuple, path: str) -> None:
    unknown = sorted(set(obj) - set(known))
    if unknown:
        where = path or "config"
        raise ConfigError(where, f"unknown keys: {', '.join(unknown)}")


def _parse_preset(obj, path: str, table: dict, default: str) -> dict:
    if obj is None:
        return {"preset": default}
    if not isinstance(obj, dict):
        raise ConfigError(path, "expected an object")
    preset = obj.get("preset", default)
    if preset not in table:
        raise ConfigError(
            f"{path}.preset", f"unknown preset {preset!r}, expected one of {sorted(table)}"
        )
    _check_unknown(obj, ("preset",) + table[preset], path)
    out = {"preset": preset}
    for key in table[preset]:
        if key in obj:
            val = obj[key]
            if key in ("amplitude", "speed"):
                val = _require_number(val, f"{path}.{key}")
            elif key == "order":
                val = _require_int(val, f"{path}.{key}", minimum=1)
            elif key == "normalize":
                if val not in ("h1",):
                    raise ConfigError(f"{path}.{key}", "expected 'h1'")
            elif key == "profile":
                if val not in ("uniform", "regularized"):
                    raise ConfigError(f"{path}.{key}", "expected 'uniform' or 'regularized'")
            out[key] = val
    return out


def parse_config_dict(raw: dict) -> SimConfig:
    if not isinstance(raw, dict):
        raise ConfigError("", "top-level config must be a JSON object")
    _check_unknown(
        raw,
        ("grid", "nu", "dt", "t_end", "ic", "forcing", "bc", "snapshot_every", "seed"),
        "",
    )
    nx = ny = 64
    if "grid" in raw:
        grid = raw["grid"]
        if not isinstance(grid, dict):
            raise ConfigError("grid", "expected an object")
        _check_unknown(grid, ("nx", "ny"), "grid")
        nx = _require_int(grid.get("nx", 64), "grid.nx", minimum=8)
        ny = _require_int(grid.get("ny", 64), "grid.ny", minimum=8)
    cfg = SimConfig(
        nx=nx,
        ny=ny,
        nu=_require_number(raw.get("nu", 1.0), "nu", positive=True),
        dt=_require_number(raw.get("dt", 1e-3), "dt", positive=True),
        t_end=_require_number(raw.get("t_end", 1.0), "t_end", nonnegative=True),
        ic=_parse_preset(raw.get("ic"), "ic", _IC_PRESETS, "zero"),
        forcing=_parse_preset(raw.get("forcing"), "forcing", _FORCING_PRESETS, "zero"),
        bc=_parse_preset(raw.get("bc"), "bc", _BC_PRESETS, "homogeneous"),
        snapshot_every=_require_int(raw.get("snapshot_every", 0), "snapshot_every", minimum=0),
        seed=_require_int(raw.get("seed", 0), "seed"),
    )
    cfg.validate()
    return cfg


def parse_config(path: str | Path) -> SimConfig:
    """Load and validate a JSON config file; all keys optional, unknown keys
    rejected with their paths."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError("", f"config file not found: {p}")
    try:
        raw = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"malformed JSON: {exc}") from exc
    return parse_config_dict(raw)


def config_to_dict(cfg: SimConfig) -> dict:
    """Canonical dict echo of a config; parse_config_dict round-trips it."""
    return {
        "grid": {"nx": cfg.nx, "ny": cfg.ny},
        "nu": cfg.nu,
        "dt": cfg.dt,
        "t_end": cfg.t_end,
        "ic": dict(cfg.ic),
        "forcing": dict(cfg.forcing),
        "bc": dict(cfg.bc),
        "snapshot_every": cfg.snapshot_every,
        "seed": cfg.seed,
    }
