"""
Self-test command.
"""

import argparse
import logging

from catlift.cli import emit
from catlift.services.selftest_service import SUITES, SelftestService

logger = logging.getLogger(__name__)


def selftest(args: argparse.Namespace) -> int:
    """Run acceptance suites; exit 1 when any suite reports a failure."""
    reports = SelftestService(limit=args.limit).run(args.suite)
    emit(
        [
            {"suite": r.name, "ok": r.ok, "checked": r.checked, "skipped": r.skipped, "failures": r.failures[:5]}
            for r in reports
        ]
    )
    failed = [r.name for r in reports if not r.ok]
    if failed:
        logger.error(f"Failed suites: {', '.join(failed)}")
        return 1
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("selftest", help="run the acceptance suites")
    parser.add_argument("--suite", action="append", choices=SUITES, help="suite to run (repeatable)")
    parser.add_argument("--limit", type=int, help="instances per suite")
    parser.set_defaults(handler=selftest)
