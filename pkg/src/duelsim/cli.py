"""Command-line front end.

Subcommands::

    duelsim run       --seed N | --tp-file F   --out DIR [--plot-data DIR]
    duelsim replay    --tp-file F              --out DIR [--plot-data DIR]
    duelsim batch     [--reps N] [--seed N]    --out FILE.json
    duelsim calibrate [--low X --high X] [--tolerance T] [--reps N] [--seed N] --out FILE.json
    duelsim sweep     [--grid a,b,...] [--reps N] [--seed N] --out FILE.csv

All accept ``--config FILE`` (JSON scenario) and ``--periods N``. Without
``--config`` the shipped default scenario is used. Exit codes: 0 success,
1 validation or bracket error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .config import ConfigError, ScenarioConfig, config_hash, default_config, load_config
from .core import ParameterError, run_cycle
from .experiments import (
    BatchSpec,
    BracketError,
    CalibrationSpec,
    WinStats,
    centered_grid,
    census_from_outcomes,
    exponent_sweep,
    find_balanced_exponent,
    run_batch,
)
from .output import (
    calibration_dict,
    census_dict,
    summary_dict,
    win_stats_dict,
    write_json,
    write_plot_data,
    write_sweep_csv,
    write_trajectory_csv,
)
from .tp import SequenceExhaustedError, TpProvider, TpValidationError, load_tp_file

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; 2 is reserved for I/O here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _int_arg(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def _grid_arg(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="duelsim", description="Defender/challenger competition simulator")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON scenario file (default: shipped scenario)")
    common.add_argument("--periods", type=_int_arg, help="override the number of periods")
    common.add_argument("--out", type=Path, required=True, help="output directory (run/replay) or file")
    common.add_argument("--workers", type=_int_arg, default=None, help="worker processes for replications")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, help_text in (("run", "simulate one contest"), ("replay", "re-run a contest from a TP file")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--seed", type=_int_arg, help="TP seed")
        p.add_argument("--tp-file", type=Path, help="exogenous TP file, one value per line")
        p.add_argument("--plot-data", type=Path, help="directory for shares.dat and tp.dat (default: --out)")

    p = sub.add_parser("batch", parents=[common], help="win statistics and shape census over many runs")
    p.add_argument("--reps", type=_int_arg)
    p.add_argument("--seed", type=_int_arg, help="base seed; run i uses seed + i")

    p = sub.add_parser("calibrate", parents=[common], help="find the balanced challenger exponent")
    p.add_argument("--low", type=float, help="bracket low end (default: H exponent)")
    p.add_argument("--high", type=float, help="bracket high end (default: H exponent + 2)")
    p.add_argument("--tolerance", type=float)
    p.add_argument("--reps", type=_int_arg, help="replications per evaluation")
    p.add_argument("--seed", type=_int_arg, help="base seed")

    p = sub.add_parser("sweep", parents=[common], help="win rate across challenger exponents")
    p.add_argument("--grid", type=_grid_arg, help="comma-separated exponents (default: centered grid from config)")
    p.add_argument("--reps", type=_int_arg)
    p.add_argument("--seed", type=_int_arg, help="base seed")
    return parser


def _resolve_config(args) -> ScenarioConfig:
    config = load_config(args.config) if args.config else default_config()
    if args.periods is not None:
        try:
            params = dataclasses.replace(config.params, periods=args.periods)
        except ParameterError as exc:
            raise ConfigError("periods", str(exc).split(": ", 1)[-1]) from None
        config = dataclasses.replace(config, params=params)
    return config


def _tp_provider(args, config: ScenarioConfig) -> TpProvider:
    seed = getattr(args, "seed", None)
    tp_file = getattr(args, "tp_file", None)
    if args.command == "replay" and tp_file is None:
        raise UsageError("replay needs --tp-file")
    if seed is not None and tp_file is not None:
        raise UsageError("give either --seed or --tp-file, not both")
    if seed is None and tp_file is None:
        seed, tp_file = config.tp_seed, config.tp_file
        if seed is None and tp_file is None:
            raise UsageError("no TP source: pass --seed or --tp-file (or set tp.seed / tp.file)")
    if tp_file is not None:
        return load_tp_file(tp_file)
    return TpProvider.seeded(seed)


def cmd_run(args, config: ScenarioConfig) -> int:
    provider = _tp_provider(args, config)
    if provider.mode == "exogenous":
        config = dataclasses.replace(config, tp_seed=None, tp_file=provider.origin)
    else:
        config = dataclasses.replace(config, tp_seed=provider.seed, tp_file=None)
    try:
        trajectory = run_cycle(config.params, provider)
    except SequenceExhaustedError as exc:
        raise SequenceExhaustedError(f"{provider.describe()}: {exc}") from None
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(trajectory, out / "trajectory.csv")
    write_json(summary_dict(trajectory, config_hash(config)), out / "summary.json")
    write_plot_data(trajectory, args.plot_data or out)
    print(f"winner: {trajectory.outcome.winner} (final H share {trajectory.outcome.final_share_h:.6g})")
    return EXIT_OK


def cmd_batch(args, config: ScenarioConfig) -> int:
    reps = args.reps if args.reps is not None else config.batch.reps
    seed = args.seed if args.seed is not None else config.batch.base_seed
    config = dataclasses.replace(config, batch=dataclasses.replace(config.batch, reps=reps, base_seed=seed))
    outcomes = run_batch(BatchSpec(config.params, reps, seed), args.workers)
    stats = WinStats.from_outcomes(outcomes)
    document = {
        "config_hash": config_hash(config),
        "base_seed": seed,
        "win_stats": win_stats_dict(stats),
        "shape_census": census_dict(census_from_outcomes(outcomes)),
    }
    _parent(args.out)
    write_json(document, args.out)
    print(f"M win rate {stats.m_win_rate:.4f} +/- {stats.standard_error:.4f}, undecided {stats.undecided}/{reps}")
    return EXIT_OK


def cmd_calibrate(args, config: ScenarioConfig) -> int:
    c = config.calibration
    low, high = config.bracket()
    overrides = {
        "m_exp_low": args.low if args.low is not None else low,
        "m_exp_high": args.high if args.high is not None else high,
        "tolerance": args.tolerance if args.tolerance is not None else c.tolerance,
        "reps_per_eval": args.reps if args.reps is not None else c.reps_per_eval,
        "base_seed": args.seed if args.seed is not None else c.base_seed,
    }
    c = dataclasses.replace(c, **overrides)
    config = dataclasses.replace(config, calibration=c)
    spec = CalibrationSpec(
        config.params, c.m_exp_low, c.m_exp_high, c.target, c.tolerance,
        c.reps_per_eval, c.max_iterations, c.base_seed,
    )
    result = find_balanced_exponent(spec, args.workers)
    document = {"config_hash": config_hash(config), **calibration_dict(result)}
    _parent(args.out)
    write_json(document, args.out)
    status = "converged" if result.converged else "NOT converged"
    print(f"balanced M exponent {result.balanced_m_exp!r} "
          f"(M win rate {result.achieved_stats.m_win_rate:.4f}, {status})")
    return EXIT_OK


def cmd_sweep(args, config: ScenarioConfig) -> int:
    s = config.sweep
    grid = args.grid if args.grid is not None else centered_grid(config.sweep_center(), s.half_width, s.points)
    reps = args.reps if args.reps is not None else s.reps
    seed = args.seed if args.seed is not None else s.base_seed
    rows = exponent_sweep(config.params, grid, reps, seed, args.workers)
    _parent(args.out)
    write_sweep_csv(rows, args.out)
    for m_exp, stats in rows:
        print(f"{m_exp:10.6g}  {stats.m_win_rate:.4f}")
    return EXIT_OK


def _parent(path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)


COMMANDS = {"run": cmd_run, "replay": cmd_run, "batch": cmd_batch, "calibrate": cmd_calibrate, "sweep": cmd_sweep}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _resolve_config(args)
        return COMMANDS[args.command](args, config)
    except (ConfigError, ParameterError, BracketError, TpValidationError,
            SequenceExhaustedError, UsageError, ValueError, TypeError) as exc:
        print(f"duelsim {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"duelsim {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
