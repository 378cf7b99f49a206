"""Command line interface of the simple maxiset lab

```
simple-maxiset run <config.json> [--out DIR] [--seed N] [--threads N] [--svg] [-v]
simple-maxiset validate <config.json>
simple-maxiset kernels list
simple-maxiset zoo list
```

The exit code is 0 on success, 2 when a config or argument is invalid and 3 when an experiment fails at run time, for example on an inadmissible bandwidth.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import constants
from .errors import InvalidArgumentError, MaxisetError
from .maxiset_lab import MaxisetLab
from .registry import KERNELS, ZOO

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    """The argument parser with its sub commands"""
    parser = argparse.ArgumentParser(
        prog="simple-maxiset",
        description="Monte Carlo maxisets of kernel estimators under sup-norm loss",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {constants.VERSION}")
    commands = parser.add_subparsers(dest="command", required=True)

    # Add the run command
    run = commands.add_parser("run", help="run the experiments of a config file")
    run.add_argument("config", type=Path, help="the JSON config file")
    run.add_argument("--out", type=Path, default=None, help="output directory, overrides the config and environment")
    run.add_argument("--seed", type=int, default=None, help="overrides the seed of every experiment")
    run.add_argument("--threads", type=int, default=1, help="worker threads for the replications")
    run.add_argument("--svg", action="store_true", help="also write SVG plots")
    run.add_argument("-v", "--verbose", action="count", default=0, help="debug logging")

    # Add the validate command
    validate = commands.add_parser("validate", help="validate a config file without running it")
    validate.add_argument("config", type=Path, help="the JSON config file")

    # Add the listing commands
    for name, help_text in (("kernels", "registered kernels"), ("zoo", "registered test functions")):
        listing = commands.add_parser(name, help=help_text)
        listing.add_argument("action", choices=["list"])

    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.DEBUG if verbosity else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _run(args: argparse.Namespace) -> int:
    # Create the lab and run the experiments
    lab = MaxisetLab(args.out, threads=args.threads, svg=args.svg)
    responses = lab.run(args.config, seed=args.seed)

    # Print the result of each experiment
    for response in responses:
        stream = sys.stdout if response.success else sys.stderr
        print(response.message, file=stream)

    return max((response.exit_code for response in responses), default=constants.EXIT_OK)


def _validate(args: argparse.Namespace) -> int:
    _, experiments = MaxisetLab().load(args.config)

    for cfg in experiments:
        print(f"{cfg.label}: ok ({cfg.config_hash()[:12]})")

    return constants.EXIT_OK


def _listing(args: argparse.Namespace) -> int:
    registry = KERNELS if args.command == "kernels" else ZOO

    for usage, description in registry.describe():
        print(f"{usage:32} {description}")

    return constants.EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line and return the exit code

    Args:
        argv (Sequence[str] | None, optional): The arguments, defaults to sys.argv. Defaults to None.

    Returns:
        int: The exit code
    """
    parser = build_parser()

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits with 2 on usage errors and 0 on --help
        return int(e.code or 0)

    # Set up logging to stderr
    _configure_logging(getattr(args, "verbose", 0))

    # Dispatch the command, mapping errors to exit codes
    handlers = {"run": _run, "validate": _validate, "kernels": _listing, "zoo": _listing}

    try:
        return handlers[args.command](args)
    except InvalidArgumentError as e:
        print(f"error: {e}", file=sys.stderr)
        return constants.EXIT_VALIDATION
    except MaxisetError as e:
        print(f"error: {e}", file=sys.stderr)
        return constants.EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
