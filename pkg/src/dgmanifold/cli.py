"""Command line entry point. Reads a document, runs one command through the GraphQL
schema, and writes the report.

Exit status is 0 when every check passes, 2 for an unreadable or invalid document,
3 when a mathematical check fails, and 4 when a windowed result is inconclusive.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import typing as t
from pathlib import Path

from .api import field_name
from .api import schema
from .commands import COMMANDS
from .report import FORMATS
from .report import render

logger = logging.getLogger(__name__)

EXIT_STATUS = {"pass": 0, "fail": 3, "inconclusive": 4}
QUERY = (
    "query($document: JSON!, $window: [Int!], $truncate_arity: Int,"
    " $truncate_order: Int, $todd_order: Int) {"
    " %s(document: $document, window: $window, truncate_arity: $truncate_arity,"
    " truncate_order: $truncate_order, todd_order: $todd_order) }"
)


def parse_window(value: str) -> list[int]:
    """Parse ``t0..t1``."""
    low, sep, high = value.partition("..")

    if not sep:
        raise argparse.ArgumentTypeError("expected t0..t1")

    try:
        return [int(low), int(high)]
    except ValueError:
        raise argparse.ArgumentTypeError("expected integer bounds") from None


def parse_args(argv: t.Sequence[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="dgmanifold",
        description="Exact computations on DG manifolds of positive amplitude.",
    )
    parser.add_argument("command", choices=list(COMMANDS))
    parser.add_argument(
        "document",
        nargs="?",
        default="-",
        help="Path to the JSON document, or '-' for stdin (default).",
    )
    parser.add_argument(
        "--window", type=parse_window, help="Degree window t0..t1, inclusive."
    )
    parser.add_argument("--truncate-arity", type=int)
    parser.add_argument("--truncate-order", type=int)
    parser.add_argument("--todd-order", type=int)
    parser.add_argument("--report-format", choices=FORMATS, default="json")
    parser.add_argument("--output", type=Path, help="Write the report here.")
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Log progress to stderr. Repeat for debug output.",
    )
    return parser.parse_args(argv)


def load_document(source: str) -> t.Any:
    if source == "-":
        return json.load(sys.stdin)

    with open(source, encoding="utf-8") as f:
        return json.load(f)


def execute(command: str, document: t.Any, args: argparse.Namespace) -> t.Any:
    """Run ``command`` through the schema. Returns the report, or the list of
    GraphQL errors.
    """
    result = schema.execute(
        QUERY % field_name(command),
        variables={
            "document": document,
            "window": args.window,
            "truncate_arity": args.truncate_arity,
            "truncate_order": args.truncate_order,
            "todd_order": args.todd_order,
        },
    )

    if result.errors:
        return result.errors

    assert result.data is not None
    return result.data[field_name(command)]


def main(argv: t.Sequence[str] | None = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(
        level=[logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)],
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        document = load_document(args.document)
    except (OSError, ValueError) as e:
        print(f"[error] {e}", file=sys.stderr)
        return 2

    report = execute(args.command, document, args)

    if isinstance(report, list):
        for error in report:
            print(f"[error] {error.message}", file=sys.stderr)

            if error.extensions:
                print(json.dumps(error.extensions, sort_keys=True), file=sys.stderr)

        return 2

    text = render(report, args.report_format)

    if args.output is not None:
        args.output.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)

    logger.info("%s: %s", args.command, report["status"])
    return EXIT_STATUS[report["status"]]


if __name__ == "__main__":
    sys.exit(main())
