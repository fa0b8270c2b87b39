import argparse
import logging
import os
import sys
from typing import List, Optional

from dotenv import load_dotenv

from locred.base.exceptions import ConfigError, OutputError, SolverError
from locred.enrichment.state import RunStatus
from locred.runner.config import OUTPUT_DIR_ENV, load_config
from locred.runner.pipeline import ExperimentPipeline

EXIT_CONVERGED = 0
EXIT_OUTPUT = 1
EXIT_CONFIG = 2
EXIT_MAX_ITER = 3
EXIT_STAGNATED = 4
EXIT_SOLVER = 5

EXIT_CODES = {
    RunStatus.CONVERGED: EXIT_CONVERGED,
    RunStatus.MAX_ITER: EXIT_MAX_ITER,
    RunStatus.STAGNATED: EXIT_STAGNATED,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="locred",
        description="Online enrichment of a localized reduced basis for the 2D stationary heat equation.",
        epilog=(f"Exit status: 0 converged, {EXIT_CONFIG} configuration error, {EXIT_MAX_ITER} max_iter reached, "
                f"{EXIT_STAGNATED} stagnation, {EXIT_SOLVER} solver error, {EXIT_OUTPUT} output error. "
                f"{OUTPUT_DIR_ENV} sets the output directory unless the config file or a flag does."),
    )
    parser.add_argument("--config", metavar="PATH", help="config file (.yaml or key=value text)")
    parser.add_argument("--algorithm", choices=["residual_based", "globally_coupled", "both"])
    parser.add_argument("--n-squares", type=int, dest="n_squares")
    parser.add_argument("--max-iter", type=int, dest="max_iter")
    parser.add_argument("--tol-rel", type=float, dest="tol_rel")
    parser.add_argument("--tol-abs", type=float, dest="tol_abs")
    parser.add_argument("--output-dir", metavar="PATH", dest="output_dir")
    parser.add_argument("--threads", type=int, help="worker threads for the subdomain problems")
    return parser


def _echo(result) -> None:
    print("\n" + "=" * 50)
    print("LOCALIZED REDUCED BASIS ENRICHMENT RESULTS")
    print("=" * 50)
    print(result["summary"], end="")
    print(f"wall_time_seconds={result['pipeline_summary']['wall_time_seconds']}")
    print("=" * 50)


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    overrides = {key: value for key, value in vars(args).items() if key != "config" and value is not None}
    try:
        config = load_config(args.config, overrides=overrides, env=os.environ)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    logger = logging.getLogger("locred")
    try:
        result = ExperimentPipeline(config).execute()
    except ConfigError as e:
        logger.error(f"configuration error: {e}")
        return EXIT_CONFIG
    except SolverError as e:
        logger.error(f"solver error: {e}")
        return EXIT_SOLVER
    except OutputError as e:
        logger.error(f"output error: {e}")
        return EXIT_OUTPUT

    _echo(result)
    return EXIT_CODES[result["status"]]
