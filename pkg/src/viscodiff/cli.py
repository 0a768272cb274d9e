"""Command-line entry point.

    viscodiff simulate <config> [--out DIR]
    viscodiff hysteresis <config> [--out DIR]
    viscodiff sweep <config> --param NAME --values V1,V2,... [--out DIR]

Exit codes: 0 ok, 2 configuration error, 3 solver failure, 4 I/O error.
``VISCODIFF_THREADS`` caps the number of concurrent sweep members.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import galerkin, hysteresis as hy, output
from .config import HysteresisConfig, SimulationConfig, parse_config
from .energy import RegularSolution
from .errors import ConfigError

log = logging.getLogger("viscodiff")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4
SWEEP_PARAMS = ("beta", "n", "dt", "tau", "A", "gamma", "epsilon")


def cmd_simulate(config: SimulationConfig, out_dir, stem="trajectory") -> int:
    traj = galerkin.run(config)
    out_dir = Path(out_dir)
    path = out_dir / f"{stem}.csv"
    output.write_trajectory_csv(path, traj, config.modes)
    if traj.failed:
        log.error("solver failed: %s (partial output in %s)", traj.message, path)
        return EXIT_SOLVER
    fin = traj.final.diagnostics
    print(f"wrote {path}: {len(traj.samples)} samples, free energy {fin.free_energy:.6g}, "
          f"energy residual {fin.energy_residual:.3e}")
    return EXIT_OK


def _tau_suffix(tau):
    return f"_tau{output.fmt(tau)}"


def hysteresis_runs(config: HysteresisConfig):
    """(suffix, s grid, w, y, closed-form y, loop) for each run the config describes."""
    s = hy.breakpoint_grid(config.periods, config.steps_per_period)
    cf = hy.closed_form_play(config.A, config.gamma, config.K, s)
    if config.mode == "quasistatic":
        traj = hy.play_trajectory(config.A, config.gamma, config.K, s)
        loop = hy.hysteresis_loop(traj)
        yield "", s, loop.w, loop.y, cf, loop
        return
    for tau in config.tau:
        traj = hy.viscous_trajectory(config.A, config.gamma, config.K, config.beta, tau, s)
        loop = hy.hysteresis_loop(traj)
        yield (_tau_suffix(tau) if len(config.tau) > 1 else ""), s, loop.w, loop.y, cf, loop


def cmd_hysteresis(config: HysteresisConfig, out_dir) -> int:
    out_dir = Path(out_dir)
    for suffix, s, w, y, cf, loop in hysteresis_runs(config):
        series_csv = out_dir / f"hysteresis_series{suffix}.csv"
        loop_csv = out_dir / f"hysteresis_loop{suffix}.csv"
        output.write_csv(series_csv, ["s", "w", "y", "y_closed_form"], zip(s, w, y, cf))
        output.write_csv(loop_csv, ["w", "y"], zip(w, y))
        output.write_text(out_dir / f"hysteresis_series{suffix}.svg", output.line_plot(
            [("w", s, w), ("y", s, y)], title="driver and output", xlabel="s", ylabel="value"))
        output.write_text(out_dir / f"hysteresis_loop{suffix}.svg", output.line_plot(
            [("loop", w, y)], title="hysteresis loop", xlabel="w", ylabel="y"))
        sup = float(np.max(np.abs(y - cf)))
        print(f"wrote {series_csv.name}, {loop_csv.name} and SVGs: loop area {loop.area:.6g}, "
              f"sup |y - play| {sup:.3e}")
    return EXIT_OK


# --- sweeps ---------------------------------------------------------------------

SUMMARY_HEADER = ["value", "status", "final_free_energy", "max_abs_energy_residual",
                  "l2_change_from_previous", "max_dpsi_gap", "loop_area", "sup_distance_to_play",
                  "wall_time_s"]


def _sweep_member(config, param, value, run_dir):
    t0 = time.perf_counter()
    row = dict.fromkeys(SUMMARY_HEADER, float("nan"))
    row["value"] = value
    row["status"] = "ok"
    final_a = None
    try:
        cfg = config.with_param(param, value)
        run_dir.mkdir(parents=True, exist_ok=True)
        if isinstance(cfg, SimulationConfig):
            traj = galerkin.run(cfg)
            output.write_trajectory_csv(run_dir / "trajectory.csv", traj, cfg.modes)
            if traj.samples:
                row["final_free_energy"] = traj.final.diagnostics.free_energy
                row["max_abs_energy_residual"] = float(np.max(np.abs(traj.column("energy_residual"))))
                final_a = traj.final.a
            if traj.failed:
                row["status"] = "failed: " + traj.message
            if cfg.model == "regularized_log":
                model = cfg.build_model()
                ref = RegularSolution(model.k, model.chi)
                r = np.linspace(0.2, 0.8, 601)
                row["max_dpsi_gap"] = float(np.max(np.abs(model.dpsi(r) - ref.dpsi(r))))
        else:
            code = cmd_hysteresis(cfg, run_dir)
            (_, s, w, y, cf, loop), = list(hysteresis_runs(cfg))
            row["loop_area"] = loop.area
            row["sup_distance_to_play"] = float(np.max(np.abs(y - cf)))
            if code:
                row["status"] = f"failed: exit {code}"
    except (ConfigError, ArithmeticError, RuntimeError, ValueError) as exc:
        row["status"] = f"failed: {exc}"
    row["wall_time_s"] = time.perf_counter() - t0
    return row, final_a


def sweep_threads():
    raw = os.environ.get("VISCODIFF_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"VISCODIFF_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"VISCODIFF_THREADS must be a positive integer, got {raw!r}")
    return n


def cmd_sweep(config, param, values, out_dir) -> int:
    if param not in SWEEP_PARAMS:
        raise ConfigError(f"sweep parameter must be one of {', '.join(SWEEP_PARAMS)}", key=param)
    for v in values:
        config.with_param(param, v)  # reject invalid combinations before any run starts
    out_dir = Path(out_dir)
    dirs = [out_dir / f"sweep_{param}" / f"run_{i:03d}" for i in range(len(values))]
    workers = min(sweep_threads(), len(values))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_sweep_member, config, param, v, d) for v, d in zip(values, dirs)]
            results = [f.result() for f in futures]
    else:
        results = [_sweep_member(config, param, v, d) for v, d in zip(values, dirs)]
    prev = None
    for row, a in results:
        if a is not None and prev is not None:
            m = max(a.size, prev.size)
            row["l2_change_from_previous"] = float(np.linalg.norm(np.pad(a, (0, m - a.size))
                                                                  - np.pad(prev, (0, m - prev.size))))
        prev = a
    path = out_dir / f"sweep_{param}.csv"
    output.write_csv(path, SUMMARY_HEADER, ([row[k] for k in SUMMARY_HEADER] for row, _ in results))
    failed = [row for row, _ in results if row["status"] != "ok"]
    print(f"wrote {path}: {len(results)} runs, {len(failed)} failed")
    return EXIT_SOLVER if failed else EXIT_OK


# --- argument handling ----------------------------------------------------------

def _parse_values(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--values must be a comma-separated list of numbers, got {text!r}") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="output directory (created if missing)")
    common.add_argument("--seedless", action="store_true",
                        help="reserved: nothing here uses random numbers, so the flag is rejected")
    common.add_argument("-v", "--verbose", action="store_true")
    parser = argparse.ArgumentParser(prog="viscodiff", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("simulate", parents=[common], help="Galerkin run of the viscous diffusion problem")
    p.add_argument("config")
    p = sub.add_parser("hysteresis", parents=[common], help="play-operator / viscous threshold experiment")
    p.add_argument("config")
    p = sub.add_parser("sweep", parents=[common], help="run a config over several values of one parameter")
    p.add_argument("config")
    p.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    p.add_argument("--values", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.seedless:
        print("error: --seedless is reserved; every computation here is already deterministic",
              file=sys.stderr)
        return EXIT_CONFIG
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        config = parse_config(text)
        out_dir = Path(args.out)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            print(f"error: cannot create output directory: {exc}", file=sys.stderr)
            return EXIT_IO
        if args.command == "simulate":
            if not isinstance(config, SimulationConfig):
                raise ConfigError("simulate needs a [simulate] section")
            return cmd_simulate(config, out_dir)
        if args.command == "hysteresis":
            if not isinstance(config, HysteresisConfig):
                raise ConfigError("hysteresis needs a [hysteresis] section")
            return cmd_hysteresis(config, out_dir)
        return cmd_sweep(config, args.param, _parse_values(args.values), out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
