"""
Command line entry point for catlift.
"""

import argparse
import logging
import sys
from typing import Optional, Sequence

from catlift import __version__
from catlift.cli import build_commands, inspect_commands, selftest_commands
from catlift.errors import CatliftError
from catlift.models.settings import get_settings

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catlift",
        description="Delta lenses, twisted coreflections and their factorisation system on finite categories",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    inspect_commands.register(subparsers)
    build_commands.register(subparsers)
    selftest_commands.register(subparsers)
    return parser


def catlift_error_handler(exc: CatliftError) -> int:
    """Report a domain error and map it to its exit code."""
    logger.error(f"{type(exc).__name__}: {exc}")
    return exc.exit_code


def general_exception_handler(exc: Exception) -> int:
    """Handler for unexpected errors."""
    logger.error(f"Unexpected error: {str(exc)}", exc_info=True)
    return 2


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse ``argv`` and run one command.

    Args:
        argv: Arguments without the program name; ``sys.argv[1:]`` when None

    Returns:
        0 on success, 1 when a checked property fails, 2 on usage or input errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    try:
        logging.getLogger().setLevel(get_settings().log_level)
        logger.info(f"Running {args.command}")
        code = args.handler(args)
    except CatliftError as exc:
        return catlift_error_handler(exc)
    except Exception as exc:
        return general_exception_handler(exc)
    logger.info(f"Finished {args.command} with exit code {code}")
    return code


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
