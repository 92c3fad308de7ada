"""Command line front end: run, sweep, gradcheck.

``aerolink run`` executes one alternating optimization and writes
history.csv, trajectory.json and summary.json into the output directory.
``aerolink sweep`` repeats runs over a swept scenario variable and axis
masks, writing sweep.csv.  ``aerolink gradcheck`` compares analytic and
finite-difference connectivity gradients and fails loudly on disagreement.

Exit codes: 0 success, 1 unusable config, 2 runtime failure, 3 gradient
check exceedance.  All files are written atomically (temp file + rename)
after the computation finishes, so a crashed run leaves no partial output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import scenario as scen
from .channel import FadingModel
from .optimizer import OptimizerConfig, RunHistory, run
from .spectral import LaplacianMode
from .trajectory import AxisMask, GradientMode, TrajectoryConfig, lambda2_gradient

GRADCHECK_TOL = 1.0e-4


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _write_text(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_json(path: str, obj) -> None:
    _write_text(path, json.dumps(obj, indent=2) + "\n")


# -- config plumbing ----------------------------------------------------


def _load_config(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _optimizer_config(cfg: dict, mask: str | None = None) -> OptimizerConfig:
    opt = dict(cfg.get("optimizer", {}))
    traj = dict(opt.get("trajectory", {}))
    if mask is not None:
        traj["mask"] = mask
    fading_cfg = opt.get("fading", {"kind": "unit"})
    fading = FadingModel(kind=fading_cfg.get("kind", "unit"),
                         seed=int(fading_cfg.get("seed", 0)))
    mode = LaplacianMode(opt.get("laplacian_mode",
                                 LaplacianMode.COMBINATORIAL_WEIGHTED.value))
    gmode = GradientMode(traj.get("gradient_mode", GradientMode.ANALYTIC.value))
    tconf = TrajectoryConfig(
        dt=float(traj.get("dt", 1.0)),
        mask=AxisMask.from_string(traj.get("mask", "xyz")),
        gradient_mode=gmode,
        backtracking=bool(traj.get("backtracking", True)),
        max_backtracks=int(traj.get("max_backtracks", 20)),
        max_step_m=float(traj.get("max_step_m", 5.0)),
        min_altitude_m=float(traj.get("min_altitude_m", 1.0)),
        fd_step_m=float(traj.get("fd_step_m", 1.0e-3)),
    )
    return OptimizerConfig(
        epsilon=float(opt.get("epsilon", 1.0)),
        max_iterations=int(opt.get("max_iterations", 500)),
        trajectory=tconf,
        laplacian_mode=mode,
        fading=fading,
    )


def _scenario_from_args(cfg: dict, seed: int | None) -> scen.Scenario:
    if seed is not None:
        cfg = dict(cfg)
        cfg["seed"] = int(seed)
    return scen.scenario_from_config(cfg)


# -- run ----------------------------------------------------------------


def _history_csv(history: RunHistory, n_uavs: int) -> str:
    cols = ["iteration", "R_bits_per_s", "lambda2"]
    for k in range(1, n_uavs + 1):
        cols += [f"uav{k}_x", f"uav{k}_y", f"uav{k}_z"]
    cols += [f"uav{k}_power_w" for k in range(1, n_uavs + 1)]
    cols.append("min_interference_margin_w")
    lines = [",".join(cols)]
    for rec in history.records:
        row = [str(rec.iteration), _fmt(rec.flow_bits_per_s), _fmt(rec.lambda2)]
        for k in range(n_uavs):
            row += [_fmt(v) for v in rec.uav_positions[k]]
        row += [_fmt(p) for p in rec.powers_w[1:n_uavs + 1]]
        row.append(_fmt(rec.min_interference_margin_w))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _trajectory_json(history: RunHistory, scenario: scen.Scenario, mask: AxisMask) -> dict:
    return {
        "schema-version": scen.SCHEMA_VERSION,
        "mask": mask.value,
        "bs_m": scenario.positions[scenario.source].tolist(),
        "ue_m": scenario.positions[scenario.destination].tolist(),
        "si_m": scenario.positions[list(scenario.si_indices)].tolist(),
        "iterations": [rec.iteration for rec in history.records],
        "uav_positions_m": [rec.uav_positions.tolist() for rec in history.records],
    }


def _summary_json(history: RunHistory, scenario: scen.Scenario,
                  config: OptimizerConfig) -> dict:
    first, last = history.records[0], history.records[-1]
    return {
        "schema-version": scen.SCHEMA_VERSION,
        "seed": scenario.seed,
        "mask": config.trajectory.mask.value,
        "epsilon_bits_per_s": config.epsilon,
        "iterations": last.iteration,
        "termination": history.termination.value,
        "initial_flow_bits_per_s": first.flow_bits_per_s,
        "final_flow_bits_per_s": last.flow_bits_per_s,
        "final_lambda2": last.lambda2,
        "interference_ok": last.interference_ok,
    }


def cmd_run(config_path: str, out_dir: str,
            seed: int | None = None, mask: str | None = None) -> int:
    try:
        cfg = _load_config(config_path)
        scenario = _scenario_from_args(cfg, seed)
        config = _optimizer_config(cfg, mask)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        history = run(scenario, config)
        os.makedirs(out_dir, exist_ok=True)
        _write_text(os.path.join(out_dir, "history.csv"),
                    _history_csv(history, scenario.n_uavs))
        _write_json(os.path.join(out_dir, "trajectory.json"),
                    _trajectory_json(history, scenario, config.trajectory.mask))
        _write_json(os.path.join(out_dir, "summary.json"),
                    _summary_json(history, scenario, config))
    except Exception as exc:  # noqa: BLE001 - boundary: report and signal failure
        print(f"run failed: {exc}", file=sys.stderr)
        return 2
    return 0


# -- sweep --------------------------------------------------------------

_SWEEP_VARIABLES = ("interference_threshold_dbm", "ue_altitude_m")

_SWEEP_DEFAULTS = {
    "interference_threshold_dbm": [float(v) for v in range(-50, -9, 5)],
    "ue_altitude_m": [float(v) for v in range(0, 501, 50)],
}


def _apply_sweep_value(scenario: scen.Scenario, variable: str, value: float):
    if variable == "interference_threshold_dbm":
        return scenario.with_i_max_dbm(float(value))
    if variable == "ue_altitude_m":
        return scenario.with_ue_altitude(float(value))
    raise ValueError(f"unknown sweep variable {variable!r}; "
                     f"expected one of {', '.join(_SWEEP_VARIABLES)}")


def _sweep_point(args):
    cfg, seed, variable, value, mask = args
    scenario = _apply_sweep_value(_scenario_from_args(cfg, seed), variable, value)
    config = _optimizer_config(cfg, mask)
    history = run(scenario, config)
    return {
        "sweep_value": float(value),
        "axis_mask": mask,
        "final_flow_bits_per_s": history.records[-1].flow_bits_per_s,
        "iterations": history.records[-1].iteration,
        "terminated": history.termination.value,
    }


def cmd_sweep(config_path: str, sweep_path: str, out_dir: str,
              seed: int | None = None, jobs: int = 1) -> int:
    try:
        cfg = _load_config(config_path)
        spec = _load_config(sweep_path)
        variable = spec["variable"]
        if variable not in _SWEEP_VARIABLES:
            raise ValueError(f"unknown sweep variable {variable!r}; "
                             f"expected one of {', '.join(_SWEEP_VARIABLES)}")
        values = [float(v) for v in spec.get("values", _SWEEP_DEFAULTS[variable])]
        masks = [AxisMask.from_string(m).value for m in spec.get("masks", ["xyz"])]
        if not values:
            raise ValueError("sweep values list is empty")
        diffs = np.diff(values)
        if len(values) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError("sweep values must be strictly monotone")
        # validate scenario and masks up front so a bad sweep emits nothing
        _scenario_from_args(cfg, seed)
        _optimizer_config(cfg, masks[0])
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    points = [(cfg, seed, variable, value, mask) for value in values for mask in masks]
    try:
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                rows = list(pool.map(_sweep_point, points))
        else:
            rows = [_sweep_point(p) for p in points]
        lines = ["sweep_value,axis_mask,final_flow_bits_per_s,iterations,terminated"]
        for r in rows:
            lines.append(",".join([
                _fmt(r["sweep_value"]), r["axis_mask"],
                _fmt(r["final_flow_bits_per_s"]),
                str(r["iterations"]), r["terminated"],
            ]))
        os.makedirs(out_dir, exist_ok=True)
        _write_text(os.path.join(out_dir, "sweep.csv"), "\n".join(lines) + "\n")
    except Exception as exc:  # noqa: BLE001 - boundary: report and signal failure
        print(f"sweep failed: {exc}", file=sys.stderr)
        return 2
    return 0


# -- gradcheck ----------------------------------------------------------


def gradcheck_rows(scenario: scen.Scenario, config: OptimizerConfig) -> list:
    """Per-coordinate analytic vs finite-difference gradient comparison."""
    analytic = lambda2_gradient(scenario, config.fading,
                                laplacian_mode=config.laplacian_mode,
                                gradient_mode=GradientMode.ANALYTIC).d_lambda2
    fd = lambda2_gradient(scenario, config.fading,
                          laplacian_mode=config.laplacian_mode,
                          gradient_mode=GradientMode.FINITE_DIFFERENCE,
                          fd_step_m=config.trajectory.fd_step_m).d_lambda2
    scale = max(float(np.abs(analytic).max()), float(np.abs(fd).max()), 1.0e-300)
    rows = []
    for uidx, node in enumerate(scenario.uav_indices):
        for axis, name in enumerate("xyz"):
            a, f = float(analytic[uidx, axis]), float(fd[uidx, axis])
            rel = abs(a - f) / max(abs(a), abs(f), 1.0e-9 * scale)
            rows.append({"uav": node, "axis": name,
                         "analytic": a, "fd": f, "rel_err": rel})
    return rows


def cmd_gradcheck(config_path: str, seed: int | None = None,
                  mask: str | None = None) -> int:
    try:
        cfg = _load_config(config_path)
        scenario = _scenario_from_args(cfg, seed)
        config = _optimizer_config(cfg, mask)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        rows = gradcheck_rows(scenario, config)
    except Exception as exc:  # noqa: BLE001 - boundary: report and signal failure
        print(f"gradcheck failed: {exc}", file=sys.stderr)
        return 2
    print(f"{'uav':>4} {'axis':>4} {'analytic':>24} {'finite-diff':>24} {'rel_err':>12}")
    worst = None
    for r in rows:
        print(f"{r['uav']:>4} {r['axis']:>4} {r['analytic']:>24.16e} "
              f"{r['fd']:>24.16e} {r['rel_err']:>12.3e}")
        if worst is None or r["rel_err"] > worst["rel_err"]:
            worst = r
    if worst and worst["rel_err"] > GRADCHECK_TOL:
        print(f"FAIL: uav {worst['uav']} axis {worst['axis']} relative error "
              f"{worst['rel_err']:.3e} exceeds {GRADCHECK_TOL:.0e}", file=sys.stderr)
        return 3
    print(f"OK: max relative error "
          f"{max(r['rel_err'] for r in rows):.3e} <= {GRADCHECK_TOL:.0e}")
    return 0


# -- entry point --------------------------------------------------------


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="aerolink",
        description="UAV relay chain optimization: trajectories, powers, flow")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="one optimization run")
    p_run.add_argument("--config", required=True, help="scenario config JSON")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--seed", type=int, default=None, help="override config seed")
    p_run.add_argument("--mask", default=None, choices=["xy", "xz", "yz", "xyz"],
                       help="axis mask override")

    p_sweep = sub.add_parser("sweep", help="grid of runs over one swept variable")
    p_sweep.add_argument("--config", required=True, help="scenario config JSON")
    p_sweep.add_argument("--sweep", required=True, help="sweep spec JSON")
    p_sweep.add_argument("--out", required=True, help="output directory")
    p_sweep.add_argument("--seed", type=int, default=None, help="override config seed")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel workers")

    p_grad = sub.add_parser("gradcheck", help="analytic vs finite-difference gradients")
    p_grad.add_argument("--config", required=True, help="scenario config JSON")
    p_grad.add_argument("--seed", type=int, default=None, help="override config seed")
    p_grad.add_argument("--mask", default=None, choices=["xy", "xz", "yz", "xyz"],
                        help="axis mask override (affects reporting only)")

    args = parser.parse_args(argv)
    if args.command == "run":
        return cmd_run(args.config, args.out, args.seed, args.mask)
    if args.command == "sweep":
        return cmd_sweep(args.config, args.sweep, args.out, args.seed, args.jobs)
    return cmd_gradcheck(args.config, args.seed, args.mask)


if __name__ == "__main__":
    sys.exit(main())
