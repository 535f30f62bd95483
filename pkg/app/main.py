import argparse
import logging
import sys
import time
from pathlib import Path
from typing import List, Optional

from models.enums import Command, OutputFormat
from services.result_writer import to_csv, to_json, write_atomic
from services.runner import RunResult, run_experiment

logger = logging.getLogger("gapinterp")


def _truncation(text: str) -> List[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"truncation must be a comma-separated list of integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("truncation list is empty")
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="path to the JSON experiment config")
    common.add_argument("--grid", type=int, help="quadrature grid size (power of two)")
    common.add_argument("--truncation", type=_truncation, help="truncation schedule, e.g. 25,50,100")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--out", type=Path, help="directory for result files")
    common.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.JSON.value,
                        help="which result files to write into --out")
    common.add_argument("--verbose", action="store_true", help="log iteration detail")

    parser = argparse.ArgumentParser(
        prog="gapinterp",
        description="Optimal and minimax-robust interpolation of stationary sequences with missing blocks")
    commands = parser.add_subparsers(dest="command", required=True)
    for command in Command:
        commands.add_parser(command.value, parents=[common])
    return parser


def write_outputs(result: RunResult, command: Command, out: Path, output_format: OutputFormat):
    stem = command.value.replace("-", "_")
    if output_format.writes_json:
        write_atomic(out / f"{stem}.json", to_json(result.record) + "\n")
    if output_format.writes_csv:
        for name, (header, rows) in result.tables.items():
            write_atomic(out / f"{stem}_{name}.csv", to_csv(header, rows))


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    command = Command(args.command)

    start_time = time.perf_counter()
    result = run_experiment(command, args.config, grid=args.grid, truncation=args.truncation, seed=args.seed)
    duration_ms = round((time.perf_counter() - start_time) * 1000, 3)
    logger.info("%s finished in %.3f ms with exit status %d", command.value, duration_ms, result.exit_status)

    if args.out is not None:
        write_outputs(result, command, args.out, OutputFormat(args.format))
    print(to_json(result.record))
    return result.exit_status


if __name__ == "__main__":
    sys.exit(main())
