"""
Main kdet command-line entry point.
"""

import argparse
import logging
import sys
from typing import List, Optional

from kdet import __version__
from kdet.commands import GROUPS, SIGNED_OPTIONS
from kdet.config import get_settings
from kdet.errors import KdetError
from kdet.logging_setup import configure_logging

logger = logging.getLogger("kdet.main")


def build_parser() -> argparse.ArgumentParser:
    """Top-level parser with one sub-command per verb."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the report as JSON")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized choices")
    common.add_argument("--log-level", default=None, help="override KDET_LOG_LEVEL")

    parser = argparse.ArgumentParser(
        prog="kdet",
        description="Determinant functors, relative K_0 and collapse certificates",
    )
    parser.add_argument("--version", action="version", version=f"kdet {__version__}")
    subparsers = parser.add_subparsers(dest="verb", metavar="VERB", required=True)
    for group in GROUPS:
        group.register(subparsers, common)
    return parser


def join_signed_values(argv: List[str]) -> List[str]:
    """Rewrite `--unit VALUE` as `--unit=VALUE` so argparse does not read -10/3 as a flag."""
    joined = []
    tokens = iter(argv)
    for token in tokens:
        value = next(tokens, None) if token in SIGNED_OPTIONS else None
        joined.append(token if value is None else f"{token}={value}")
    return joined


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    argv = join_signed_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    configure_logging(args.log_level)
    settings = get_settings()

    # Global exception handler
    try:
        report = args.handler(args)
    except KdetError as exc:
        logger.debug("%s failed", args.verb, exc_info=True)
        print(f"kdet {args.verb}: {exc}", file=sys.stderr)
        return exc.exit_code

    if args.json:
        print(report.model_dump_json(indent=settings.json_indent))
    else:
        print(report.to_text())
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
