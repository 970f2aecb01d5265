"""
main.py — Command-line entry point.

Run:
    python main.py run configs/advection_fes.env
    python main.py analyze runs/advection-fes-seed1/chain.tsv --observables c eta_1
    python main.py analyze runs/langevin-fes-seed3/chain.tsv --histogram alpha --bins 60
    python main.py analyze runs/advection-fes-seed1/chain.tsv --acf 200
    python main.py info configs/langevin_fes.env

Exit status: 0 on success, 1 on any toolkit error (one-line diagnostic on stderr,
full traceback in the log file), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from config import Config
from core.errors import FESError
from core.logging import setup_logging
from experiments import analyze, describe_config, parse_config, run_experiment
from experiments.runner import build_problem, build_sampler_config

logger = logging.getLogger("main")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fes",
        description="Function-space ensemble samplers for Bayesian inverse problems.",
    )
    parser.add_argument("--log-level", default=None, help="Console log level (default: FES_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run the experiment described by a config file")
    run.add_argument("config", help="Experiment file (key=value)")

    an = sub.add_parser("analyze", help="IAT / N_eff / SE table for chain files")
    an.add_argument("files", nargs="+", help="Chain files written by `run`")
    an.add_argument("--observables", nargs="+", default=None, help="Columns to analyze (default: all)")
    an.add_argument("--burn-in", type=float, default=None, help="Burn-in fraction (default: from the file)")
    an.add_argument("--histogram", default=None, metavar="NAME", help="Also export a histogram of NAME")
    an.add_argument("--bins", type=int, default=50)
    an.add_argument(
        "--acf", type=int, default=None, metavar="MAX_LAG", help="Also export the ACF of each observable up to MAX_LAG rows"
    )

    info = sub.add_parser("info", help="Print the resolved configuration")
    info.add_argument("config", help="Experiment file (key=value)")
    return parser


def _cmd_run(args: argparse.Namespace, settings: Config) -> None:
    result = run_experiment(parse_config(args.config), settings)
    print((result.output_dir / "summary.txt").read_text(encoding="utf-8"), end="")
    print(f"outputs: {result.output_dir}")


def _cmd_analyze(args: argparse.Namespace, settings: Config) -> None:
    print(analyze(args.files, args.observables, args.burn_in, args.histogram, args.bins, args.acf), end="")


def _cmd_info(args: argparse.Namespace, settings: Config) -> None:
    config = parse_config(args.config)
    problem = build_problem(config)
    sampler = build_sampler_config(config, problem, settings)
    sampler.check_against(problem.target().scalar_dim, problem.target().n_coefs)
    print(describe_config(config), end="")
    print(f"n_coefs={problem.target().n_coefs}")
    print(f"output_dir={config.output_dir(settings.OUTPUT_DIR)}")
    for key, value in settings.status().items():
        print(f"settings.{key}={value}")


COMMANDS = {"run": _cmd_run, "analyze": _cmd_analyze, "info": _cmd_info}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = Config()
    setup_logging(log_level=args.log_level or settings.LOG_LEVEL, log_file=settings.LOG_FILE or None)

    problems = settings.validate()
    if problems:
        print(f"error: invalid settings: {', '.join(problems)}", file=sys.stderr)
        return 1
    try:
        COMMANDS[args.command](args, settings)
    except FESError as e:
        # traceback to the log file only; the console gets the one-line diagnostic
        logger.debug("Command failed", extra={"command": args.command}, exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
