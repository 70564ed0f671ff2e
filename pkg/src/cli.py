"""
Command-line driver.

    burgers-tiles <validate|solve|oracle|opcheck> --config FILE [--out DIR] [--nx N] [--nt N]

Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 configuration
or convergence fault.
"""

import argparse
import sys
from typing import List, Optional

from loguru import logger

from .core.errors import BurgersTilesError, ConfigError, PastShockError
from .core.pipeline import TilesPipeline
from .models.domain import RunConfig
from .utils.config_loader import load_run_config
from .utils.log import configure_logging
from .utils.storage import RunStorage

EXIT_OK, EXIT_CHECK, EXIT_FAULT = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="burgers-tiles",
        description="Tile-by-tile classical solutions of the inviscid Burgers equation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("validate", "check the initial data clause by clause"),
        ("solve", "advance slabs and write snapshots plus the run report"),
        ("oracle", "compare the numerical solution with the characteristics solution"),
        ("opcheck", "sample the operator estimates on the central tile"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="Run configuration (JSON or YAML)")
        p.add_argument("--out", default=None, help="Output directory (overrides out_dir)")
        p.add_argument("--nx", type=int, default=None, help="Nodes per tile in x")
        p.add_argument("--nt", type=int, default=None, help="Nodes per tile in t")
        p.add_argument("--log-level", default=None, help="loguru level, e.g. DEBUG")
    return parser


def cmd_validate(config: RunConfig, storage: RunStorage) -> int:
    pipeline = TilesPipeline(config)
    report = pipeline.validate_data()
    storage.write_json("validation.json", report)
    return EXIT_OK if report.passed else EXIT_CHECK


def cmd_solve(config: RunConfig, storage: RunStorage) -> int:
    pipeline = TilesPipeline(config)
    report = pipeline.run_solve()
    storage.write_snapshots(pipeline.solution)
    storage.write_json("report.json", report)
    storage.write_json("timings.json", pipeline.timings)
    storage.write_log(pipeline.execution_log)
    if report.failure is not None:
        f = report.failure
        logger.error(f"{f.kind} at slab {f.slab_k}: {f.message}")
        return EXIT_FAULT
    return EXIT_OK if report.passed else EXIT_CHECK


def cmd_oracle(config: RunConfig, storage: RunStorage) -> int:
    pipeline = TilesPipeline(config)
    try:
        report = pipeline.compare_with_oracle()
    except PastShockError as e:
        logger.error(str(e))
        storage.write_json("oracle.json", {"error": str(e), "t_shock": e.t_shock})
        return EXIT_CHECK
    finally:
        storage.write_json("timings.json", pipeline.timings)
    if pipeline.solution.failure is not None:
        failure = pipeline.solution.failure.model_dump(mode="json")
        storage.write_json("oracle.json", {"failure": failure})
        return EXIT_FAULT
    storage.write_json("oracle.json", report)
    return EXIT_OK if report.passed else EXIT_CHECK


def cmd_opcheck(config: RunConfig, storage: RunStorage) -> int:
    pipeline = TilesPipeline(config)
    report = pipeline.check_operators()
    storage.write_json("opcheck.json", report)
    storage.write_json("timings.json", pipeline.timings)
    if not report.passed:
        logger.error(f"operator check failed; violating samples {report.bounds.violations}")
    return EXIT_OK if report.passed else EXIT_CHECK


COMMANDS = {
    "validate": cmd_validate,
    "solve": cmd_solve,
    "oracle": cmd_oracle,
    "opcheck": cmd_opcheck,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        config = load_run_config(args.config, {"nx": args.nx, "nt": args.nt, "out_dir": args.out})
        storage = RunStorage(config.out_dir)
        return COMMANDS[args.command](config, storage)
    except ConfigError as e:
        logger.error(f"configuration error: {e}")
        return EXIT_FAULT
    except BurgersTilesError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_FAULT


if __name__ == "__main__":
    sys.exit(main())
