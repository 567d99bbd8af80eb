import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from avgfid import __version__
from avgfid.config import Settings
from avgfid.documents import SpecSyntaxError, SpecValidationError
from core.errors import FidelityError
from estimators import MissingOptionError
from handlers.commands import COMMANDS, RunOptions
from utils.report import ReportDocument

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_PARSE = 2

LOG_LEVELS = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARNING": logging.WARNING,
    "ERROR": logging.ERROR,
    "CRITICAL": logging.CRITICAL,
}


def setup_logging(level: str = "INFO"):
    log_level = LOG_LEVELS.get(level.upper(), logging.INFO)
    # stdout carries reports
    logging.basicConfig(
        level=log_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%d-%m-%Y %H:%M:%S",
        stream=sys.stderr,
        force=True,
    )


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"seed must be non-negative, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="avgfid", description="Average gate fidelity of noisy qudit operations")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", choices=sorted(LOG_LEVELS), type=str.upper, help="overrides AVGFID_LOG_LEVEL")

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--out", help="write the report to this file instead of standard output")
    output.add_argument("--format", choices=("json", "text"), default="json", dest="output_format")
    output.add_argument("--timing", action="store_true", help="include wall-clock duration in the report")
    output.add_argument("--workers", type=_positive_int, help="threads for sampling (never changes results)")

    subparsers = parser.add_subparsers(dest="command", required=True)

    compute = subparsers.add_parser("compute", parents=[output], help="average gate fidelity of a channel against a gate")
    compute.add_argument("--channel", required=True)
    compute.add_argument("--gate", required=True)
    compute.add_argument("--method", required=True, choices=("exact", "mc", "experiment"))
    compute.add_argument("--basis", choices=("shiftclock", "pauli"), default="shiftclock")
    compute.add_argument("--samples", type=_positive_int)
    compute.add_argument("--shots", type=_positive_int)
    compute.add_argument("--repeats", type=_positive_int)
    compute.add_argument("--seed", type=_seed)

    twirl = subparsers.add_parser("twirl", parents=[output], help="depolarizing parameter of the Haar twirl")
    twirl.add_argument("--channel", required=True)
    twirl.add_argument("--unitaries", type=_positive_int)
    twirl.add_argument("--seed", type=_seed)

    validate = subparsers.add_parser("validate", parents=[output], help="parse a channel spec and check its invariants")
    validate.add_argument("--channel", required=True)

    return parser


def _options(args: argparse.Namespace, settings: Settings) -> RunOptions:
    return RunOptions(
        basis=getattr(args, "basis", "shiftclock"),
        samples=getattr(args, "samples", None),
        shots=getattr(args, "shots", None),
        repeats=getattr(args, "repeats", None),
        seed=getattr(args, "seed", None),
        unitaries=getattr(args, "unitaries", None),
        workers=args.workers or settings.workers,
        timing=args.timing,
    )


def _dispatch(args: argparse.Namespace, options: RunOptions) -> ReportDocument:
    handler = COMMANDS[args.command]
    if args.command == "compute":
        return handler(args.channel, args.gate, args.method, options)
    return handler(args.channel, options)


def _emit(report: ReportDocument, args: argparse.Namespace):
    text = report.render(args.output_format)
    if args.out:
        out_path = Path(args.out)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(text, encoding="utf-8")
        logger.info(f"Report written to {out_path}")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_PARSE

    try:
        settings = Settings()
    except ValidationError as e:
        setup_logging("INFO")
        logger.critical(f"Invalid AVGFID_* settings: {e}")
        return EXIT_PARSE

    setup_logging(args.log_level or settings.log_level)
    logger.info(f"avgfid {__version__}: {args.command}")

    try:
        report = _dispatch(args, _options(args, settings))
        _emit(report, args)
    except (SpecSyntaxError, MissingOptionError) as e:
        logger.error(str(e))
        return EXIT_PARSE
    except (SpecValidationError, FidelityError) as e:
        logger.error(f"Validation failed: {e}")
        return EXIT_INVALID
    except Exception as e:
        logger.critical(f"Unexpected error: {e}", exc_info=True)
        return EXIT_INVALID

    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
