import json

import numpy as np
import pytest

from squareflow.config import ConfigError, config_to_dict, parse_config, parse_config_dict
from squareflow.grid import Grid2D, ScalarField, VectorField
from squareflow.io import (
    DIAGNOSTICS_HEADER,
    RunManifest,
    sha256_file,
    write_diagnostics,
    write_field_csv,
    write_snapshot,
    write_vorticity_pgm,
)
from squareflow.stepper import SimConfig, StepDiagnostics


def make_diag(step, t, **overrides):
    base = dict(
        step=step,
        t=t,
        u_sq=0.0,
        grad_u_sq=0.0,
        lap_u_sq=0.0,
        div_u_sq=0.0,
        grad_ps_sq=0.0,
        grad_pe_sq=0.0,
        stokes_ratio=0.0,
        compat_corr=0.0,
    )
    base.update(overrides)
    return StepDiagnostics(**base)


# --- config -------------------------------------------------------------------


def test_empty_config_gives_defaults(tmp_path):
    path = tmp_path / "c.json"
    path.write_text("{}")
    cfg = parse_config(path)
    assert cfg == SimConfig()
    assert (cfg.nu, cfg.dt, cfg.t_end, cfg.nx, cfg.ny) == (1.0, 1e-3, 1.0, 64, 64)
    assert cfg.ic == {"preset": "zero"}


def test_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(tmp_path / "nope.json")


def test_config_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{nope")
    with pytest.raises(ConfigError, match="malformed"):
        parse_config(path)


def test_config_negative_nu_names_key():
    with pytest.raises(ConfigError, match="nu: must be > 0"):
        parse_config_dict({"nu": -1})


def test_config_unknown_keys_listed():
    with pytest.raises(ConfigError, match="unknown keys: bar, foo"):
        parse_config_dict({"foo": 1, "bar": 2})
    with pytest.raises(ConfigError, match="ic: unknown keys: wvlen"):
        parse_config_dict({"ic": {"preset": "stream", "wvlen": 3}})


def test_config_bad_types_and_presets():
    with pytest.raises(ConfigError, match="grid.nx"):
        parse_config_dict({"grid": {"nx": "many"}})
    with pytest.raises(ConfigError, match="bc.preset"):
        parse_config_dict({"bc": {"preset": "windy"}})
    with pytest.raises(ConfigError, match="grid.nx: must be >= 8"):
        parse_config_dict({"grid": {"nx": 4}})


def test_lid_config_round_trips_canonically():
    raw = {
        "grid": {"nx": 64, "ny": 64},
        "dt": 1e-3,
        "nu": 0.1,
        "bc": {"preset": "lid", "speed": 1.0},
    }
    cfg = parse_config_dict(raw)
    echo = config_to_dict(cfg)
    blob1 = json.dumps(echo, sort_keys=True)
    cfg2 = parse_config_dict(json.loads(blob1))
    blob2 = json.dumps(config_to_dict(cfg2), sort_keys=True)
    assert blob1 == blob2
    assert cfg2 == cfg


# --- diagnostics CSV ------------------------------------------------------------


def test_diagnostics_header_and_empty_series(tmp_path):
    path = write_diagnostics([], tmp_path / "d.csv")
    content = path.read_bytes()
    assert content == (DIAGNOSTICS_HEADER + "\n").encode()
    assert b"\r" not in content


def test_diagnostics_zero_rows(tmp_path):
    series = [make_diag(k, k * 1e-3) for k in range(3)]
    path = write_diagnostics(series, tmp_path / "d.csv")
    lines = path.read_text().splitlines()
    assert len(lines) == 4
    cols = lines[2].split(",")
    assert cols[0] == "1"
    assert float(cols[1]) == 1e-3
    assert all(float(c) == 0.0 for c in cols[2:])


def test_diagnostics_refit_matches_rate(tmp_path):
    # rows written to CSV reproduce a decay rate when re-fit independently
    rate = 9.5
    series = [
        make_diag(k, k * 1e-2, div_u_sq=(np.exp(-rate * k * 1e-2)) ** 2) for k in range(60)
    ]
    path = write_diagnostics(series, tmp_path / "d.csv")
    raw = np.genfromtxt(path, delimiter=",", names=True)
    refit = -np.polyfit(raw["t"], 0.5 * np.log(raw["div_u_sq"]), 1)[0]
    assert refit == pytest.approx(rate, rel=1e-9)


# --- snapshots -------------------------------------------------------------------


def test_field_csv_layout(tmp_path):
    g = Grid2D(8, 8)
    vals = np.arange(81, dtype=float).reshape(9, 9)
    path = write_field_csv(vals, tmp_path / "f.csv")
    lines = path.read_text().splitlines()
    assert len(lines) == 9
    assert [float(v) for v in lines[0].split(",")] == list(range(9))


def test_pgm_zero_field_is_mid_gray(tmp_path):
    g = Grid2D(8, 8)
    path, max_w = write_vorticity_pgm(VectorField.zeros(g), tmp_path / "w.pgm")
    assert max_w == 0.0
    blob = path.read_bytes()
    assert blob.startswith(b"P5\n9 9\n255\n")
    pixels = blob.split(b"255\n", 1)[1]
    assert set(pixels) == {128}


def test_pgm_rigid_rotation_constant(tmp_path):
    g = Grid2D(8, 8)
    X, Y = g.mesh()
    u = VectorField.from_arrays(g, -Y, X.copy())  # omega = 2 everywhere
    path, max_w = write_vorticity_pgm(u, tmp_path / "w.pgm")
    assert max_w == pytest.approx(2.0, rel=1e-12)
    pixels = path.read_bytes().split(b"255\n", 1)[1]
    assert set(pixels) == {255}


def test_write_snapshot_files(tmp_path):
    g = Grid2D(8, 8)
    u = VectorField.zeros(g)
    paths, max_w = write_snapshot(u, ScalarField.zeros(g), 12, tmp_path)
    names = sorted(p.name for p in paths)
    assert names == ["p_12.csv", "u1_12.csv", "u2_12.csv", "vorticity_12.pgm"]


# --- manifest --------------------------------------------------------------------


def test_manifest_checksums_verify(tmp_path):
    (tmp_path / "a.csv").write_text("x\n1\n")
    manifest = RunManifest(
        config={}, invocation={"subcommand": "run"}, version="0.0", started_at=RunManifest.now()
    )
    manifest.add_file(tmp_path / "a.csv", tmp_path)
    manifest.write(tmp_path)
    assert RunManifest.verify(tmp_path)
    (tmp_path / "a.csv").write_text("tampered\n")
    assert not RunManifest.verify(tmp_path)


def test_manifest_lists_every_output(tmp_path):
    (tmp_path / "a.csv").write_text("1")
    (tmp_path / "b.csv").write_text("2")
    manifest = RunManifest(config={}, invocation={}, version="0.0", started_at=RunManifest.now())
    manifest.add_file(tmp_path / "a.csv", tmp_path)
    manifest.add_file(tmp_path / "b.csv", tmp_path)
    manifest.write(tmp_path)
    data = json.loads((tmp_path / "manifest.json").read_text())
    assert [f["name"] for f in data["files"]] == ["a.csv", "b.csv"]
    assert all(len(f["sha256"]) == 64 for f in data["files"])
