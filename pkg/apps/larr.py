#!/usr/bin/env python3
"""
larr - Labeled Array Command Line

Inspect saved containers, validate files, run the synthetic reduction demo
and measure element-wise bandwidth.

Usage:
    # Structure of a saved DataArray or Dataset
    python apps/larr.py show run.json

    # Table of a 0-D or 1-D item
    python apps/larr.py table run.json --item c

    # Re-check every container invariant
    python apps/larr.py validate run.json

    # Synthetic reduction pipeline
    python apps/larr.py demo --pixels 100 --events 10000 --seed 7 --out demo_out

    # Memory bandwidth of element-wise add vs memcpy
    python apps/larr.py bench --size 10000000 --repeat 5

Global Arguments:
    --config PATH   YAML configuration file [default: config.yaml if present]
    --no-color      Disable ANSI styling (also LARR_NO_COLOR)
    --debug         Enable debug logging

Exit Codes:
    0   success
    2   validation failure
    64  usage error
    66  missing, unreadable or malformed input file
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, NoReturn, Optional

# Auto-load .env file
from dotenv import load_dotenv
load_dotenv()

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from apps.reduction_demo import ReductionDemo
from lib.bandwidth import DEFAULT_REPEAT, DEFAULT_SIZE, measure
from lib.render import render_structure, render_tables
from lib.terminal_utils import Colors, StatusDisplay, log, paint, set_color_enabled
from src.config import Config, ConfigError
from src.dataset import DataArray
from src.errors import FormatError, ItemNotFoundError, UnsupportedError, ValidationError
from src.serialization import load
from src.units import format_unit
from src.utils import format_bytes

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_USAGE = 64
EXIT_NO_INPUT = 66

# Add throughput must reach this fraction of memcpy
BANDWIDTH_TARGET = 1.0 / 3.0


class UsageError(Exception):
    """Raised when parsed arguments or settings cannot be used."""
    pass


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser that reports usage errors with exit code 64."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser() -> ArgumentParser:
    """Build the command-line parser."""
    parser = ArgumentParser(
        prog="larr",
        description="Labeled multi-dimensional arrays with units, variances and event data",
    )
    parser.add_argument("--config", type=str, default=None, help="YAML configuration file")
    parser.add_argument("--no-color", action="store_true", help="Disable ANSI styling")
    parser.add_argument("--debug", action="store_true", help="Enable debug logging")

    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    show = commands.add_parser("show", help="Print the structure of a saved container")
    show.add_argument("file", type=str)

    table = commands.add_parser("table", help="Print a table of 0-D or 1-D data")
    table.add_argument("file", type=str)
    table.add_argument("--item", type=str, default=None, help="Dataset item to display")

    validate = commands.add_parser("validate", help="Load a file and re-check all invariants")
    validate.add_argument("file", type=str)

    demo = commands.add_parser("demo", help="Run the synthetic reduction pipeline")
    demo.add_argument("--pixels", type=int, default=None, help="Number of pixels")
    demo.add_argument("--events", type=int, default=None, help="Approximate total events")
    demo.add_argument("--seed", type=int, default=None, help="Random seed")
    demo.add_argument("--out", type=str, default=None, help="Output directory")

    bench = commands.add_parser("bench", help="Measure element-wise add vs memcpy bandwidth")
    bench.add_argument("--size", type=int, default=DEFAULT_SIZE, help="Elements per array")
    bench.add_argument("--repeat", type=int, default=DEFAULT_REPEAT, help="Timed repetitions")

    return parser


def load_config(path: Optional[str]) -> Config:
    """Configuration from the given YAML file (or config.yaml) with env overrides."""
    if path is None:
        return Config.load_with_env("config.yaml")
    if not Path(path).exists():
        raise FileNotFoundError(f"Config file not found: {path}")
    return Config.load(path).apply_env()


def _load(path: str):
    x = load(path)
    logger.debug(f"loaded {type(x).__name__} from {path}")
    return x


def cmd_show(args: argparse.Namespace, config: Config) -> int:
    print(render_structure(_load(args.file)))
    return EXIT_OK


def cmd_table(args: argparse.Namespace, config: Config) -> int:
    x = _load(args.file)
    if isinstance(x, DataArray) and args.item is not None:
        raise UnsupportedError("--item applies to Dataset files only")
    print(render_tables(x, args.item, config.render.max_rows))
    return EXIT_OK


def cmd_validate(args: argparse.Namespace, config: Config) -> int:
    x = _load(args.file)
    problems = x.validate()
    if problems:
        raise ValidationError(problems, args.file)
    kind = type(x).__name__
    detail = f"{len(x)} items" if kind == "Dataset" else f"dims {list(x.dims)}"
    print(f"{paint('OK', Colors.GREEN)}: {args.file} ({kind}, {detail})")
    return EXIT_OK


def cmd_demo(args: argparse.Namespace, config: Config) -> int:
    overrides = {
        key: value
        for key, value in (
            ("pixels", args.pixels),
            ("events", args.events),
            ("seed", args.seed),
            ("out_dir", args.out),
        )
        if value is not None
    }
    demo_config = replace(config.demo, **overrides)
    errors = Config(render=config.render, demo=demo_config, log_level=config.log_level).validate()
    if errors:
        raise UsageError("; ".join(errors))

    result = ReductionDemo(demo_config, on_file=lambda p: log(f"saved {p}", "success")).run()

    display = StatusDisplay()
    display.add_header("Reduction demo")
    display.add_separator()
    display.add_field("pixels", str(demo_config.pixels))
    display.add_field("events", str(demo_config.events))
    display.add_field("seed", str(demo_config.seed))
    display.add_field("output", demo_config.out_dir)
    display.add_field("files written", str(len(result.files)))
    display.add_field("normalized unit", format_unit(result.normalized.unit))
    display.add_field("theta x tof", " x ".join(str(n) for n in result.theta_histogram.shape))
    display.render()
    return EXIT_OK


def cmd_bench(args: argparse.Namespace, config: Config) -> int:
    if args.size < 1 or args.repeat < 1:
        raise UsageError("--size and --repeat must be positive")
    report = measure(args.size, args.repeat)

    status = "ok" if report.ratio >= BANDWIDTH_TARGET else "below target"
    color = Colors.GREEN if report.ratio >= BANDWIDTH_TARGET else Colors.YELLOW
    display = StatusDisplay()
    display.add_header("Element-wise bandwidth (float64)")
    display.add_separator()
    display.add_field("elements", str(report.size))
    display.add_field("repeat", str(report.repeat))
    display.add_field("memcpy", f"{format_bytes(report.memcpy_throughput)}/s")
    display.add_field("add", f"{format_bytes(report.add_throughput)}/s")
    display.add_field("add / memcpy", f"{report.ratio:.3f} {paint(status, color)}")
    display.render()
    return EXIT_OK


COMMANDS = {
    "show": cmd_show,
    "table": cmd_table,
    "validate": cmd_validate,
    "demo": cmd_demo,
    "bench": cmd_bench,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)

    try:
        config = load_config(args.config)
    except (FileNotFoundError, ConfigError) as e:
        set_color_enabled(not args.no_color)
        log(f"Error: {e}", "error")
        return EXIT_NO_INPUT

    set_color_enabled(not (args.no_color or config.render.no_color))

    errors = config.validate()
    if errors:
        for error in errors:
            log(f"Config error: {error}", "error")
        return EXIT_USAGE

    level = logging.DEBUG if args.debug else getattr(logging, config.log_level)
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    )

    try:
        return COMMANDS[args.command](args, config)
    except ValidationError as e:
        log(f"Validation failed: {e.context or args.command}", "error")
        for problem in e.problems:
            print(f"  - {problem}", file=sys.stderr)
        return EXIT_INVALID
    except (FileNotFoundError, IsADirectoryError, PermissionError) as e:
        log(f"Cannot read {e.filename or args.command}: {e.strerror or e}", "error")
        return EXIT_NO_INPUT
    except (FormatError, UnicodeDecodeError) as e:
        log(f"Malformed file: {e}", "error")
        return EXIT_NO_INPUT
    except OSError as e:
        log(f"File error: {e}", "error")
        return EXIT_NO_INPUT
    except (UsageError, UnsupportedError, ItemNotFoundError) as e:
        log(f"Error: {e}", "error")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
