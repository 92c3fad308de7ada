"""End-to-end command line checks: run, sweep, gradcheck, exit codes, files."""

import json
import os

import numpy as np
import pytest

from aerolink.cli import main
from aerolink.optimizer import TerminationReason
from aerolink.scenario import build_default_scenario, scenario_to_config


def _write_config(path, n_uavs=4, n_si=3, seed=3, **optimizer):
    cfg = scenario_to_config(build_default_scenario(seed=seed, n_uavs=n_uavs,
                                                    n_si=n_si))
    optimizer.setdefault("epsilon", 200.0)
    optimizer.setdefault("max_iterations", 20)
    cfg["optimizer"] = optimizer
    path.write_text(json.dumps(cfg), encoding="utf-8")
    return cfg


def _read_csv(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


# ---------------------------------------------------------------------- run


def test_run_writes_the_three_artifacts(tmp_path):
    cfg_path = tmp_path / "config.json"
    _write_config(cfg_path)
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg_path), "--out", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir()) == [
        "history.csv", "summary.json", "trajectory.json"]

    header, rows = _read_csv(out / "history.csv")
    assert header[:3] == ["iteration", "R_bits_per_s", "lambda2"]
    assert header[3:6] == ["uav1_x", "uav1_y", "uav1_z"]
    assert "uav4_power_w" in header
    assert header[-1] == "min_interference_margin_w"
    assert [r[0] for r in rows] == [str(k) for k in range(len(rows))]

    summary = json.loads((out / "summary.json").read_text())
    assert summary["termination"] in {t.value for t in TerminationReason}
    assert summary["iterations"] == len(rows) - 1
    assert summary["final_flow_bits_per_s"] == float(rows[-1][1])
    assert summary["initial_flow_bits_per_s"] == float(rows[0][1])
    assert summary["seed"] == 3
    assert summary["interference_ok"] is True

    traj = json.loads((out / "trajectory.json").read_text())
    assert traj["mask"] == "xyz"
    assert len(traj["uav_positions_m"]) == len(rows)
    assert len(traj["si_m"]) == 3
    assert np.asarray(traj["uav_positions_m"][0]).shape == (4, 3)


def test_run_outputs_use_lf_and_no_leftover_temps(tmp_path):
    cfg_path = tmp_path / "config.json"
    _write_config(cfg_path, max_iterations=5)
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg_path), "--out", str(out)]) == 0
    raw = (out / "history.csv").read_bytes()
    assert b"\r" not in raw
    assert raw.endswith(b"\n")
    assert not [p for p in out.iterdir() if p.name.endswith(".tmp")]


def test_rerun_is_byte_identical(tmp_path):
    cfg_path = tmp_path / "config.json"
    _write_config(cfg_path)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--config", str(cfg_path), "--out", str(a)]) == 0
    assert main(["run", "--config", str(cfg_path), "--out", str(b)]) == 0
    for name in ("history.csv", "trajectory.json", "summary.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_history_floats_round_trip_exactly(tmp_path):
    cfg_path = tmp_path / "config.json"
    _write_config(cfg_path, max_iterations=6)
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg_path), "--out", str(out)]) == 0
    _, rows = _read_csv(out / "history.csv")
    for row in rows[:2]:
        for cell in row[1:]:
            x = float(cell)
            assert f"{x:.17g}" == cell


def test_bad_config_exits_one_and_writes_nothing(tmp_path):
    bad = tmp_path / "config.json"
    bad.write_text("{not json", encoding="utf-8")
    out = tmp_path / "out"
    assert main(["run", "--config", str(bad), "--out", str(out)]) == 1
    assert not out.exists()

    missing = tmp_path / "nope.json"
    assert main(["run", "--config", str(missing), "--out", str(out)]) == 1
    assert not out.exists()

    cfg = scenario_to_config(build_default_scenario(n_uavs=3, n_si=2))
    del cfg["channel"]
    incomplete = tmp_path / "incomplete.json"
    incomplete.write_text(json.dumps(cfg), encoding="utf-8")
    assert main(["run", "--config", str(incomplete), "--out", str(out)]) == 1
    assert not out.exists()


def test_seed_override_redraws_counted_sources(tmp_path):
    cfg = scenario_to_config(build_default_scenario(n_uavs=3, n_si=2))
    cfg["nodes"]["sis"] = {"count": 2, "region_m": {"x": [0.0, 200.0],
                                                    "y": [-100.0, 100.0]}}
    cfg["optimizer"] = {"epsilon": 200.0, "max_iterations": 10}
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(cfg), encoding="utf-8")

    outs = []
    for tag, seed in (("s5", 5), ("s5b", 5), ("s9", 9)):
        out = tmp_path / tag
        assert main(["run", "--config", str(cfg_path), "--out", str(out),
                     "--seed", str(seed)]) == 0
        outs.append(json.loads((out / "summary.json").read_text()))
    assert outs[0] == outs[1]
    assert outs[0]["seed"] == 5 and outs[2]["seed"] == 9
    assert outs[0]["final_flow_bits_per_s"] != outs[2]["final_flow_bits_per_s"]


def test_mask_override_freezes_the_left_out_axis(tmp_path):
    cfg_path = tmp_path / "config.json"
    _write_config(cfg_path, max_iterations=8)
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg_path), "--out", str(out),
                 "--mask", "xz"]) == 0
    summary = json.loads((out / "summary.json").read_text())
    traj = json.loads((out / "trajectory.json").read_text())
    assert summary["mask"] == traj["mask"] == "xz"
    pos = np.asarray(traj["uav_positions_m"])
    assert np.array_equal(pos[:, :, 1], np.tile(pos[0, :, 1], (pos.shape[0], 1)))
    assert not np.array_equal(pos[:, :, 0], np.tile(pos[0, :, 0], (pos.shape[0], 1)))


# -------------------------------------------------------------------- sweep


def test_sweep_grid_and_replay(tmp_path):
    cfg_path = tmp_path / "config.json"
    cfg = _write_config(cfg_path, max_iterations=10)
    sweep_path = tmp_path / "sweep.json"
    sweep_path.write_text(json.dumps({
        "variable": "interference_threshold_dbm",
        "values": [-40.0, -30.0],
        "masks": ["xy", "xyz"],
    }), encoding="utf-8")
    out = tmp_path / "out"
    assert main(["sweep", "--config", str(cfg_path), "--sweep", str(sweep_path),
                 "--out", str(out)]) == 0
    header, rows = _read_csv(out / "sweep.csv")
    assert header == ["sweep_value", "axis_mask", "final_flow_bits_per_s",
                      "iterations", "terminated"]
    assert [(r[0], r[1]) for r in rows] == [
        ("-40", "xy"), ("-40", "xyz"), ("-30", "xy"), ("-30", "xyz")]
    assert all(r[4] in {t.value for t in TerminationReason} for r in rows)

    # one grid point replayed through `run` lands on the same flow bit for bit
    cfg["powers"]["i_max_dbm"] = [-40.0] * 3
    replay_cfg = tmp_path / "replay.json"
    replay_cfg.write_text(json.dumps(cfg), encoding="utf-8")
    rout = tmp_path / "rout"
    assert main(["run", "--config", str(replay_cfg), "--out", str(rout),
                 "--mask", "xy"]) == 0
    summary = json.loads((rout / "summary.json").read_text())
    assert summary["final_flow_bits_per_s"] == float(rows[0][2])
    assert summary["iterations"] == int(rows[0][3])


def test_parallel_sweep_matches_serial(tmp_path):
    cfg_path = tmp_path / "config.json"
    _write_config(cfg_path, max_iterations=6)
    sweep_path = tmp_path / "sweep.json"
    sweep_path.write_text(json.dumps({
        "variable": "ue_altitude_m", "values": [50.0, 150.0],
    }), encoding="utf-8")
    serial, parallel = tmp_path / "serial", tmp_path / "parallel"
    assert main(["sweep", "--config", str(cfg_path), "--sweep", str(sweep_path),
                 "--out", str(serial)]) == 0
    assert main(["sweep", "--config", str(cfg_path), "--sweep", str(sweep_path),
                 "--out", str(parallel), "--jobs", "2"]) == 0
    assert (serial / "sweep.csv").read_bytes() == (parallel / "sweep.csv").read_bytes()


def test_sweep_spec_validation(tmp_path):
    cfg_path = tmp_path / "config.json"
    _write_config(cfg_path)
    out = tmp_path / "out"

    def attempt(spec):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(spec), encoding="utf-8")
        return main(["sweep", "--config", str(cfg_path), "--sweep", str(path),
                     "--out", str(out)])

    assert attempt({"variable": "carrier_hz", "values": [1.0]}) == 1
    assert attempt({"variable": "ue_altitude_m", "values": []}) == 1
    assert attempt({"variable": "ue_altitude_m", "values": [0.0, 100.0, 50.0]}) == 1
    assert attempt({"variable": "ue_altitude_m", "values": [0.0, 50.0],
                    "masks": ["zz"]}) == 1
    assert not out.exists()


# ---------------------------------------------------------------- gradcheck


def test_gradcheck_passes_in_the_default_mode(tmp_path, capsys):
    cfg_path = tmp_path / "config.json"
    _write_config(cfg_path)
    assert main(["gradcheck", "--config", str(cfg_path)]) == 0
    out = capsys.readouterr().out
    lines = [ln for ln in out.splitlines() if ln.strip()]
    assert lines[0].split() == ["uav", "axis", "analytic", "finite-diff", "rel_err"]
    assert len(lines) == 1 + 4 * 3 + 1  # header, one per coordinate, verdict
    assert lines[-1].startswith("OK: max relative error")


def test_gradcheck_flags_the_normalized_heuristic(tmp_path, capsys):
    cfg_path = tmp_path / "config.json"
    _write_config(cfg_path, laplacian_mode="normalized-weighted")
    assert main(["gradcheck", "--config", str(cfg_path)]) == 3
    err = capsys.readouterr().err
    assert "FAIL" in err and "exceeds" in err
