import json
from pathlib import Path

import numpy as np
import pytest

from squareflow.cli import EXIT_BLOWUP, EXIT_CONFIG, EXIT_OK, main
from squareflow.io import RunManifest


def write_cfg(tmp_path, name, payload) -> str:
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def test_run_missing_config(tmp_path, capsys):
    code = main(["run", str(tmp_path / "missing.json")])
    assert code == EXIT_CONFIG
    assert "config" in capsys.readouterr().err


def test_run_invalid_config(tmp_path):
    cfg = write_cfg(tmp_path, "c.json", {"nu": -1})
    assert main(["run", cfg, "--out", str(tmp_path / "o")]) == EXIT_CONFIG


def test_run_zero_config_outputs(tmp_path):
    cfg = write_cfg(
        tmp_path, "c.json", {"grid": {"nx": 16, "ny": 16}, "t_end": 0.002, "dt": 1e-3}
    )
    out = tmp_path / "o"
    assert main(["run", cfg, "--out", str(out)]) == EXIT_OK
    assert (out / "diagnostics.csv").is_file()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["outcome"] == {"status": "completed"}
    assert RunManifest.verify(out)


def test_run_snapshots_written(tmp_path):
    cfg = write_cfg(
        tmp_path,
        "c.json",
        {
            "grid": {"nx": 16, "ny": 16},
            "t_end": 0.002,
            "dt": 1e-3,
            "snapshot_every": 1,
            "ic": {"preset": "stream", "amplitude": 0.2},
        },
    )
    out = tmp_path / "o"
    assert main(["run", cfg, "--out", str(out)]) == EXIT_OK
    names = {p.name for p in (out / "snapshots").iterdir()}
    assert {"u1_0.csv", "u2_0.csv", "p_0.csv", "vorticity_0.pgm"} <= names
    manifest = json.loads((out / "manifest.json").read_text())
    listed = {f["name"] for f in manifest["files"]}
    assert "snapshots/u1_0.csv" in listed
    assert "snapshots" in manifest["extras"]


def test_sweep_stability_cli(tmp_path):
    cfg = write_cfg(
        tmp_path,
        "c.json",
        {"grid": {"nx": 16, "ny": 16}, "t_end": 0.01, "ic": {"preset": "stream"}},
    )
    out = tmp_path / "o"
    assert main(["sweep-stability", cfg, "--dts", "1e-3,1e-2", "--out", str(out)]) == EXIT_OK
    rows = (out / "stability_sweep.csv").read_text().splitlines()
    assert len(rows) == 3
    summary = json.loads((out / "stability_summary.json").read_text())
    assert not summary["any_blowup"]
    assert len(summary["sup_grad_u_sq"]) == 2


def test_verify_stokes_cli(tmp_path):
    cfg = write_cfg(tmp_path, "c.json", {"grid": {"nx": 16, "ny": 16}})
    out = tmp_path / "o"
    assert main(["verify-stokes", cfg, "--samples", "12", "--seed", "3", "--out", str(out)]) == EXIT_OK
    summary = json.loads((out / "stokes_summary.json").read_text())
    assert summary["sample_count"] == 12
    assert 0 <= summary["beta_hat"] <= 1
    lines = (out / "stokes_samples.csv").read_text().splitlines()
    assert len(lines) == 13


def test_probe_cli(tmp_path):
    cfg = write_cfg(tmp_path, "c.json", {"grid": {"nx": 32, "ny": 32}})
    out = tmp_path / "o"
    assert main(["probe-n2d", cfg, "--s", "0.12", "--samples", "5", "--out", str(out)]) == EXIT_OK
    summary = json.loads((out / "n2d_summary.json").read_text())
    assert np.isfinite(summary["max_ratio"])


def test_decay_cli(tmp_path):
    cfg = write_cfg(
        tmp_path,
        "c.json",
        {
            "grid": {"nx": 16, "ny": 16},
            "dt": 2e-3,
            "t_end": 0.2,
            "ic": {"preset": "div-seed", "amplitude": 1e-3},
        },
    )
    out = tmp_path / "o"
    assert main(["decay", cfg, "--out", str(out)]) == EXIT_OK
    summary = json.loads((out / "decay_summary.json").read_text())
    assert summary["rate_hat"] > 0


def test_cavity_cli(tmp_path):
    cfg = write_cfg(
        tmp_path,
        "c.json",
        {
            "grid": {"nx": 16, "ny": 16},
            "nu": 0.1,
            "dt": 5e-3,
            "t_end": 0.05,
            "bc": {"preset": "lid", "speed": 1.0, "profile": "regularized"},
        },
    )
    out = tmp_path / "o"
    assert main(["cavity", cfg, "--out", str(out)]) == EXIT_OK
    summary = json.loads((out / "cavity_summary.json").read_text())
    assert summary["max_abs_p_inhom"] == 0.0
    assert (out / "cavity_profiles.csv").is_file()
    assert RunManifest.verify(out)


def test_converge_cli_quick(tmp_path):
    cfg = write_cfg(tmp_path, "c.json", {"nu": 0.5})
    out = tmp_path / "o"
    code = main(
        [
            "converge",
            cfg,
            "--grids",
            "16,32",
            "--dts",
            "8e-3,4e-3,2e-3",
            "--dt-spatial",
            "4e-4",
            "--n-temporal",
            "16",
            "--out",
            str(out),
        ]
    )
    assert code == EXIT_OK
    summary = json.loads((out / "convergence_summary.json").read_text())
    assert summary["spatial_order"] == pytest.approx(2.0, abs=0.5)


def test_cli_byte_identical_reruns(tmp_path):
    payload = {
        "grid": {"nx": 16, "ny": 16},
        "t_end": 0.01,
        "dt": 1e-3,
        "ic": {"preset": "stream", "amplitude": 0.4},
    }
    cfg = write_cfg(tmp_path, "c.json", payload)
    outs = []
    for tag in ("a", "b"):
        out = tmp_path / tag
        assert main(["run", cfg, "--out", str(out)]) == EXIT_OK
        outs.append((out / "diagnostics.csv").read_bytes())
    assert outs[0] == outs[1]
