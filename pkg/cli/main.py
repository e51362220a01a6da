"""
Command-line entry point: ``memsgd run|stagewise|compare|ratefit``.

Exit codes: 0 success, 1 config or input error, 2 numerical failure,
3 invariant violation.
"""
import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from ..config.logging_config import setup_logger
from ..exceptions import ConfigurationError, InvariantViolationError, MemSGDException, NumericalError
from .commands import RateQuantity, cmd_compare, cmd_ratefit, cmd_run, cmd_stagewise
from .config_parser import load_config

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_INVARIANT = 3


def _add_common(parser: argparse.ArgumentParser, with_seed: bool = True) -> None:
    parser.add_argument("--out", type=Path, default=None, help="Output directory (default: [output] dir)")
    if with_seed:
        parser.add_argument("--seed", type=int, default=None, help="Override [engine] run_seed")
        parser.add_argument("--threads", type=int, default=None, help="Worker-pool size; never changes outputs")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ERROR")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="memsgd",
        description="Deterministic simulator for memory-based distributed SGD with sparse communication.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="Run one experiment and write metrics.csv")
    p_run.add_argument("config", type=Path)
    _add_common(p_run)

    p_stage = sub.add_parser("stagewise", help="Run stagewise learning and write stages.csv")
    p_stage.add_argument("config", type=Path)
    _add_common(p_stage)

    p_cmp = sub.add_parser("compare", help="Run several configs and write compare.csv")
    p_cmp.add_argument("configs", type=Path, nargs="+")
    _add_common(p_cmp)

    p_fit = sub.add_parser("ratefit", help="Fit log(quantity) against log(T) across metrics files")
    p_fit.add_argument("metrics", type=Path, nargs="+")
    p_fit.add_argument("--quantity", choices=RateQuantity.ALL, default=RateQuantity.SUBOPTIMALITY)
    p_fit.add_argument("--f-star", type=float, default=None, help="Optimal objective value")
    _add_common(p_fit, with_seed=False)
    return parser


def _load(path: Path, args: argparse.Namespace):
    config = load_config(path)
    if args.threads is not None and args.threads < 1:
        raise ConfigurationError(f"--threads must be >= 1, got {args.threads}")
    return config.with_engine_overrides(run_seed=args.seed, threads=args.threads)


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "run":
        paths = cmd_run(_load(args.config, args), args.out)
        print(paths["metrics"])
    elif args.command == "stagewise":
        paths = cmd_stagewise(_load(args.config, args), args.out)
        print(paths["stages"])
    elif args.command == "compare":
        configs = [(str(path), _load(path, args)) for path in args.configs]
        result = cmd_compare(configs, args.out, threads=args.threads or 1)
        print(f"{result.path}")
        print(f"identical={'true' if result.identical else 'false'}")
    else:
        fit = cmd_ratefit(args.metrics, quantity=args.quantity, f_star=args.f_star, out_dir=args.out)
        print(f"quantity={fit.quantity} slope={fit.slope:.6f} stderr={fit.stderr:.6f} runs={len(fit.points)}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments, run the command and map failures to exit codes.

    Args:
        argv: Arguments without the program name (sys.argv[1:] when None)

    Returns:
        Process exit code
    """
    args = build_parser().parse_args(None if argv is None else list(argv))
    log = setup_logger(log_level=args.log_level)
    try:
        return _dispatch(args)
    except InvariantViolationError as e:
        log.error(f"Invariant violation: {e}")
        return EXIT_INVARIANT
    except NumericalError as e:
        log.error(f"Numerical failure: {e}")
        return EXIT_NUMERICAL
    except MemSGDException as e:
        log.error(str(e))
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
