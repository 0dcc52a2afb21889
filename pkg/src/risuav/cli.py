"""Command-line interface: generate / optimize / experiment / oracle.

Exit codes: 0 success, 1 configuration or usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import _kernels
from .channel import ChannelBuilder, ChannelMode
from .geometry import Position3
from .harness import (
    ConfigError,
    ExperimentConfig,
    default_config,
    load_config,
    run_experiment,
    run_trial,
)
from .placement import grid_oracle, optimize_cu, optimize_d2d
from .scenario import GenerationError, generate_scenario
from .throughput import REPORT_CSV_HEADER, net_throughput, total_cu, total_d2d


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="risuav", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, trials=False):
        p.add_argument("--config", type=Path, help="experiment config file")
        p.add_argument("--seed", type=int, help="trial seed (base seed for experiments)")
        p.add_argument("--mode", choices=["expected", "sampled"], help="channel mode")
        p.add_argument("--out", type=Path, help="output file or directory")
        if trials:
            p.add_argument("--trials", type=int, help="number of trials")

    p_gen = sub.add_parser("generate", help="emit a scenario as JSON")
    common(p_gen)

    p_opt = sub.add_parser("optimize", help="run one trial and print the placements")
    common(p_opt)

    p_exp = sub.add_parser("experiment", help="run the full sweep experiment")
    common(p_exp, trials=True)
    p_exp.add_argument("--workers", type=int, default=1, help="parallel trial workers")

    p_orc = sub.add_parser("oracle", help="cross-check the optimizers against a grid search")
    common(p_orc)
    p_orc.add_argument("--resolution", type=float, default=5.0, help="grid spacing in meters")
    return parser


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config is not None else default_config()
    if args.seed is not None:
        cfg = replace(cfg, base_seed=args.seed)
    if args.mode is not None:
        cfg = replace(cfg, mode=ChannelMode(args.mode))
    if getattr(args, "trials", None) is not None:
        if args.trials < 1:
            raise ConfigError("--trials must be >= 1")
        cfg = replace(cfg, trials=args.trials)
    if args.out is not None and args.command == "experiment":
        cfg = replace(cfg, out_dir=args.out)
    return cfg


def _cmd_generate(args) -> int:
    cfg = _load(args)
    scn = generate_scenario(cfg.generation, cfg.base_seed)
    text = scn.to_json() + "\n"
    if args.out is not None:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote scenario to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_optimize(args) -> int:
    cfg = _load(args)
    seed = cfg.base_seed
    out = run_trial(cfg, seed)
    scn = generate_scenario(cfg.generation, seed)
    print(
        f"backend={_kernels.backend_name()} seed={seed} mode={cfg.mode.value} "
        f"M={scn.num_pairs} N={scn.num_cus} obstacles={len(scn.obstacles)} "
        f"K={scn.radio.rician_k:g}"
    )
    res_d, res_c, res_j = out.d2d_result, out.cu_result, out.joint_result
    print(
        f"r_D: x={res_d.position.x:.6f} y={res_d.position.y:.6f} "
        f"D_D2D={res_d.objective:.6f} iters={res_d.iterations} stop={res_d.stop_reason.value}"
    )
    print(
        f"r_C: x={res_c.position.x:.6f} y={res_c.position.y:.6f} "
        f"D_CU={res_c.objective:.6f} iters={res_c.iterations} stop={res_c.stop_reason.value}"
    )
    print(
        f"s:   x={res_j.position.x:.6f} y={res_j.position.y:.6f} "
        f"T={res_j.objective:.6g} probes={res_j.iterations}"
    )
    print(REPORT_CSV_HEADER)
    builder = ChannelBuilder(scn, cfg.mode, seed)
    for row in out.rows:
        pos = Position3(row.x, row.y, scn.uav_height)
        report = net_throughput(pos, builder.at(pos), scn)
        print(report.csv_row(seed, row.scheme.value, scn, pos))
    return 0


def _cmd_experiment(args) -> int:
    cfg = _load(args)
    result = run_experiment(cfg, workers=max(1, args.workers))
    print(f"wrote {result.rows_csv}")
    print(f"wrote {result.summary_csv}")
    print(f"wrote {result.traces_dir}/ ({len(list(result.traces_dir.iterdir()))} trace files)")
    return 0


def _cmd_oracle(args) -> int:
    cfg = _load(args)
    seed = cfg.base_seed
    scn = generate_scenario(cfg.generation, seed)
    builder = ChannelBuilder(scn, cfg.mode, seed)
    x_lo, x_hi, y_lo, y_hi = scn.region
    center = Position3((x_lo + x_hi) / 2.0, (y_lo + y_hi) / 2.0, scn.uav_height)
    state = builder.at(center)
    bounds = (
        Position3(x_lo, y_lo, scn.uav_height),
        Position3(x_hi, y_hi, scn.uav_height),
    )
    res_d = optimize_d2d(scn, state, cfg.optimizer)
    grid_d_pos, grid_d = grid_oracle(
        lambda p: total_d2d(p, builder.at(p), scn), bounds, args.resolution
    )
    res_c = optimize_cu(scn, state, cfg.optimizer)
    grid_c_pos, grid_c = grid_oracle(
        lambda p: total_cu(p, builder.at(p), scn), bounds, args.resolution
    )
    print(f"grid resolution: {args.resolution:g} m, seed={seed}")
    for name, res, gpos, gval in (
        ("D2D", res_d, grid_d_pos, grid_d),
        ("CU ", res_c, grid_c_pos, grid_c),
    ):
        gap = (gval - res.objective) / gval if gval else 0.0
        print(
            f"{name} optimizer={res.objective:.6f} at ({res.position.x:.2f}, "
            f"{res.position.y:.2f})  grid={gval:.6f} at ({gpos.x:.2f}, {gpos.y:.2f})  "
            f"rel_gap={gap:.3e}"
        )
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "optimize": _cmd_optimize,
    "experiment": _cmd_experiment,
    "oracle": _cmd_oracle,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"risuav: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"risuav: config error: {exc}", file=sys.stderr)
        return 1
    except (GenerationError, ValueError, OSError) as exc:
        print(f"risuav: error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 2


if __name__ == "__main__":
    sys.exit(main())
