"""Command-line front end.

Subcommands: ``run`` (Monte-Carlo experiment from a config file),
``complexity`` (closed-form multiplication counts), ``scene`` (covariance
export), ``pd`` (detection probabilities).  Exit codes: 0 success, 1 config
or usage error, 2 runtime error.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import matio, metrics
from .config import ConfigError, load_experiment, load_scenario
from .harness import emit_csv, run_experiment, validate_config
from .scene import RadarScenario, assemble_covariance


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stapsim",
        description="space-time adaptive processing simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a Monte-Carlo experiment from a config file")
    run.add_argument("--config", required=True, help="experiment config file")
    run.add_argument("--seed", type=int, help="override the base seed")
    run.add_argument("--out", type=Path, help="override the output directory")
    run.add_argument("--trials", type=int, help="override the trial count")
    run.add_argument("--workers", type=int, help="override the worker thread count")
    run.add_argument(
        "--no-figures", action="store_true", help="skip PNG rendering, CSV only"
    )
    run.set_defaults(func=_cmd_run)

    comp = sub.add_parser("complexity", help="print per-snapshot multiplication counts")
    comp.add_argument("--M", type=int, required=True, help="full dimension")
    comp.add_argument("--D", type=int, help="reduced rank")
    comp.add_argument("--B", type=int, help="number of basis sets")
    comp.set_defaults(func=_cmd_complexity)

    scene = sub.add_parser("scene", help="export the interference covariance matrices")
    scene.add_argument("--config", help="scenario config file (defaults built in)")
    scene.add_argument("--out", type=Path, required=True, help="output directory")
    scene.set_defaults(func=_cmd_scene)

    pd = sub.add_parser("pd", help="evaluate detection probabilities")
    pd.add_argument("--pfa", type=float, required=True, help="false-alarm probability")
    pd.add_argument("--rho", type=float, help="square root of peak output SINR")
    pd.add_argument(
        "--rho-grid",
        nargs=3,
        metavar=("MIN", "MAX", "COUNT"),
        help="evaluate on a linear rho grid",
    )
    pd.set_defaults(func=_cmd_pd)
    return parser


def _cmd_run(args) -> int:
    config = load_experiment(args.config)
    if args.seed is not None:
        config.base_seed = args.seed
    if args.out is not None:
        config.output_dir = args.out
    if args.trials is not None:
        if args.trials < 1:
            raise ConfigError("--trials must be at least 1")
        config.num_trials = args.trials
    if args.workers is not None:
        if args.workers < 1:
            raise ConfigError("--workers must be at least 1")
        config.workers = args.workers
    try:
        validate_config(config)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    result = run_experiment(config)
    paths = emit_csv(result, config.output_dir)
    if not args.no_figures:
        from .report import render_figures

        paths.extend(render_figures(result, config.output_dir))

    print(f"optimum SINR: {result.optimum_sinr_db:.2f} dB")
    for name in result.algorithms:
        print(
            f"{name}: final mean SINR {result.final_sinr_db[name]:.2f} dB "
            f"({result.final_sinr_db[name] - result.optimum_sinr_db:+.2f} dB vs optimum)"
        )
    for report in result.complexity:
        line = f"{report.algorithm}: {report.multiplications} multiplications/snapshot"
        if report.note:
            line += f"  [{report.note}]"
        print(line)
    print(f"completed {result.num_trials} trials in {result.duration_seconds:.1f} s")
    for path in paths:
        print(f"wrote {path}")
    return 0


def _cmd_complexity(args) -> int:
    if args.D is not None and args.B is not None:
        reports = metrics.complexity_table(args.M, args.D, args.B)
    elif args.D is not None:
        reports = [metrics.complexity_count(n, args.M) for n in ("full-rank-sg", "full-rank-rls")]
        reports += [
            metrics.complexity_count(n, args.M, args.D) for n in ("mswf-sg", "mswf-rls", "avf")
        ]
    else:
        reports = [metrics.complexity_count(n, args.M) for n in ("full-rank-sg", "full-rank-rls")]
        print("note: pass --D (and --B) for the reduced-rank algorithms")
    dims = f"M={args.M}" + (f", D={args.D}" if args.D is not None else "") + (
        f", B={args.B}" if args.B is not None else ""
    )
    print(f"multiplications per snapshot at {dims}")
    for report in reports:
        print(f"  {report.algorithm:<14} {report.multiplications}")
        if report.note:
            print(f"      note: {report.note}")
    return 0


def _cmd_scene(args) -> int:
    scenario = load_scenario(args.config) if args.config else RadarScenario()
    cov = assemble_covariance(scenario)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for stem, matrix in (
        ("clutter", cov.clutter),
        ("jammer", cov.jammer),
        ("noise", cov.noise),
        ("total", cov.total),
    ):
        path = out / f"{stem}.bin"
        matio.write_complex_matrix(path, matrix)
        print(f"wrote {path} ({matrix.shape[0]}x{matrix.shape[1]})")
    return 0


def _cmd_pd(args) -> int:
    beta = metrics.pfa_to_beta(args.pfa)
    print(f"P_FA = {args.pfa:.6e}  beta = {beta:.6f}")
    if args.rho is None and args.rho_grid is None:
        raise ConfigError("pd requires --rho or --rho-grid")
    rhos = []
    if args.rho is not None:
        rhos.append(args.rho)
    if args.rho_grid is not None:
        low, high, count = float(args.rho_grid[0]), float(args.rho_grid[1]), int(args.rho_grid[2])
        if count < 1:
            raise ConfigError("--rho-grid COUNT must be positive")
        rhos.extend(np.linspace(low, high, count))
    for rho in rhos:
        point = metrics.detection_point(float(rho), args.pfa)
        print(f"rho = {point.rho:.6f}  P_D = {point.pd:.12e}")
    return 0


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except np.linalg.LinAlgError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - boundary between CLI and library
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(cli_main())
