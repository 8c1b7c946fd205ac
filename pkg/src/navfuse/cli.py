"""Command-line entry point.

Subcommands:
  run     one scenario x mode cell, N trials
  suite   full 3-scenario x 3-mode grid, Table-style report
  replay  re-verify a telemetry CSV against the command invariants
  lut     print the effective fusion table
"""

from __future__ import annotations

import argparse
import sys

from . import _kernels
from .config import (ConfigError, RunConfig, apply_overrides, build_world,
                     fusion_table, load_config, trial_params)
from .fusion import CONFLICT_CELLS, PipelineMode
from .harness import (aggregate, render_report, run_grid, run_trial,
                      trial_seed, verify_telemetry, write_outputs)


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML run configuration file")
    p.add_argument("--scenario", choices=["S1", "S2", "S3"], help="scenario id")
    p.add_argument("--mode", choices=[m.value for m in PipelineMode], help="pipeline mode")
    p.add_argument("--trials", type=int, help="trials per cell")
    p.add_argument("--seed", type=int, help="global seed")
    p.add_argument("--out", help="output directory")
    p.add_argument("--noise-sigma", type=float, dest="noise_sigma", help="range noise sigma, mm")
    p.add_argument("--vt", type=float, dest="v_t", help="target forward speed, m/s")
    p.add_argument("--yawt", type=float, dest="yaw_t", help="target yaw rate, deg/s")
    p.add_argument("--eta", type=float, help="steering discretization threshold")
    p.add_argument("--tmax", type=float, dest="t_max", help="trial timeout, s")


def _config_from_args(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    return apply_overrides(cfg, scenario=args.scenario, mode=args.mode,
                           trials=args.trials, seed=args.seed, out=args.out,
                           noise_sigma=args.noise_sigma, v_t=args.v_t,
                           yaw_t=args.yaw_t, eta=args.eta, t_max=args.t_max)


def cmd_run(args) -> int:
    cfg = _config_from_args(args)
    mode = PipelineMode(cfg.mode)
    world = build_world(cfg)
    params = trial_params(cfg)
    records = []
    for i in range(cfg.trials):
        seed = trial_seed(cfg.seed, cfg.scenario, mode, i)
        rec = run_trial(world, mode, seed, params, scenario=cfg.scenario, index=i)
        records.append(rec)
        section = rec.failed_section.value if rec.failed_section else "-"
        print(f"trial {i}: {rec.outcome.value:<9} ticks={rec.ticks:<5} "
              f"failed_section={section}")
    matrix = aggregate(records)
    text, _ = render_report(matrix, scenarios=(cfg.scenario,))
    print(text, end="")
    write_outputs(cfg.out, matrix, records, params, scenarios=(cfg.scenario,))
    print(f"outputs written to {cfg.out}/")
    return 0


def cmd_suite(args) -> int:
    cfg = _config_from_args(args)
    if cfg.scenario == "custom":
        print("error: suite runs the built-in scenario grid", file=sys.stderr)
        return 2
    scenarios = ("S1", "S2", "S3")
    worlds = {s: build_world(cfg, scenario=s) for s in scenarios}
    params = trial_params(cfg)
    records = run_grid(worlds, list(PipelineMode), cfg.trials, cfg.seed, params)
    matrix = aggregate(records)
    text, _ = render_report(matrix, scenarios)
    print(text, end="")
    write_outputs(cfg.out, matrix, records, params, scenarios)
    print(f"outputs written to {cfg.out}/ ({len(records)} trials, backend={_kernels.BACKEND})")
    return 0


def cmd_replay(args) -> int:
    try:
        with open(args.file, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    problems = verify_telemetry(text)
    if problems:
        for p in problems:
            print(f"{args.file}: {p}", file=sys.stderr)
        return 1
    print(f"{args.file}: ok")
    return 0


def cmd_lut(args) -> int:
    cfg = load_config(args.config) if args.config else RunConfig()
    table = fusion_table(cfg)
    print(f"{'steering':<10}{'zone':<12}{'agree':<7}{'yaw':<10}conflict")
    for sc, zone, agree, yaw in table.rows():
        mark = "S" if (sc, zone) in CONFLICT_CELLS else ""
        print(f"{sc.value:<10}{zone:<12}{agree:<7}{yaw * cfg.yaw_t:+7.1f}   {mark}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="navfuse",
                                     description="depth+vision fused corridor navigation simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario x mode cell")
    _add_common_flags(p_run)
    p_run.set_defaults(fn=cmd_run)

    p_suite = sub.add_parser("suite", help="run the full scenario x mode grid")
    _add_common_flags(p_suite)
    p_suite.set_defaults(fn=cmd_suite)

    p_replay = sub.add_parser("replay", help="verify a telemetry CSV")
    p_replay.add_argument("file")
    p_replay.set_defaults(fn=cmd_replay)

    p_lut = sub.add_parser("lut", help="print the effective fusion table")
    p_lut.add_argument("--config", help="TOML run configuration file")
    p_lut.set_defaults(fn=cmd_lut)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
