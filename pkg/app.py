"""
Entry point of the Toeplitz conditioning experiments.

Parses the subcommand, merges the configuration and dispatches to the
modules under cli/commands.
"""

import logging
import sys

from cli.commands.checks import run_checks
from cli.commands.coeffs import run_coeffs
from cli.commands.figure1 import run_figure1
from cli.commands.table1 import run_table1
from cli.commands.table2 import run_table2
from cli.options import build_parser, resolve_config
from core.errors import ConfigError

logger = logging.getLogger(__name__)

COMMANDS = {
    "table1": run_table1,
    "table2": run_table2,
    "figure1": run_figure1,
    "checks": run_checks,
    "coeffs": run_coeffs,
}

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    try:
        cfg = resolve_config(args)
    except ConfigError as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_CONFIG

    logger.info(f"Running {args.command} with n_list={list(cfg.n_list)}, engine={cfg.engine}")
    try:
        return COMMANDS[args.command](cfg)
    except Exception as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
