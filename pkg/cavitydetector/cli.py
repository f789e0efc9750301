"""Command-line interface for cavitydetector."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Optional, Sequence

from . import __version__
from .errors import CavityError, ConfigError
from .output import write_result
from .parser import apply_overrides, load_config, parse_config
from .presets import PRESETS, get_preset
from .scenarios import run_scenario

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICS = 3


def create_parser() -> argparse.ArgumentParser:
    """Create CLI argument parser."""
    parser = argparse.ArgumentParser(
        description="cavitydetector - detectors crossing cylindrical optical cavities",
        prog="cavitydetector",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--verbose",
        action="store_true",
        help="Log progress (INFO)",
    )
    parser.add_argument(
        "--debug",
        action="store_true",
        help="Log everything (DEBUG)",
    )

    subparsers = parser.add_subparsers(dest="command", help="Commands")

    # Run command
    run_parser = subparsers.add_parser("run", help="Run a scenario")
    source = run_parser.add_mutually_exclusive_group(required=True)
    source.add_argument(
        "--config",
        help="Path to an INI run configuration",
    )
    source.add_argument(
        "--preset",
        choices=sorted(PRESETS),
        help="Built-in configuration for a reference parameter set",
    )
    run_parser.add_argument(
        "--out",
        help="Output file (default: the config's output, else stdout)",
    )
    run_parser.add_argument(
        "--format",
        choices=["csv", "json"],
        help="Output format (default: csv)",
    )
    run_parser.add_argument(
        "--cutoff-l",
        type=int,
        help="Radial cutoff N_l",
    )
    run_parser.add_argument(
        "--cutoff-n",
        type=int,
        help="Longitudinal cutoff N_n",
    )
    run_parser.add_argument(
        "--tol",
        type=float,
        help="Relative quadrature tolerance (default: $CAVITY_QUAD_TOL or 1e-8)",
    )
    run_parser.add_argument(
        "--workers",
        type=int,
        help="Worker processes for accelerated grids (default: $CAVITY_WORKERS or 1)",
    )

    # Presets command
    subparsers.add_parser("presets", help="List built-in presets")

    # Show-preset command
    show_parser = subparsers.add_parser("show-preset", help="Print a preset's configuration")
    show_parser.add_argument("name", help="Preset name")

    return parser


def configure_logging(verbose: bool = False, debug: bool = False) -> None:
    """Configure the root logger on stderr; flags win over $CAVITY_LOG_LEVEL."""
    if debug:
        level = logging.DEBUG
    elif verbose:
        level = logging.INFO
    else:
        name = (os.getenv("CAVITY_LOG_LEVEL") or "WARNING").upper()
        level = getattr(logging, name, None)
        if not isinstance(level, int):
            level = logging.WARNING
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def handle_run(args) -> int:
    """Handle run command."""
    if args.preset:
        logger.info(f"Using preset {args.preset}")
        config = parse_config(get_preset(args.preset).text)
    else:
        config = load_config(args.config)
    config = apply_overrides(
        config,
        cutoff_l=args.cutoff_l,
        cutoff_n=args.cutoff_n,
        tolerance=args.tol,
        workers=args.workers,
        output_format=args.format,
        output=args.out,
    )
    result = run_scenario(config)
    write_result(config, result, path=config.output)
    return EXIT_OK


def handle_presets(args) -> int:
    """Handle presets command."""
    width = max(len(name) for name in PRESETS)
    for name, preset in PRESETS.items():
        print(f"{name:<{width}}  {preset.description}")
    return EXIT_OK


def handle_show_preset(args) -> int:
    """Handle show-preset command."""
    sys.stdout.write(get_preset(args.name).text)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point."""
    parser = create_parser()
    args = parser.parse_args(argv)
    configure_logging(verbose=args.verbose, debug=args.debug)

    handlers = {
        "run": handle_run,
        "presets": handle_presets,
        "show-preset": handle_show_preset,
    }
    handler = handlers.get(args.command)
    if handler is None:
        parser.print_help()
        return EXIT_CONFIG

    try:
        return handler(args)
    except ConfigError as e:
        logger.debug("Configuration error", exc_info=True)
        print(f"cavitydetector: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except CavityError as e:
        # QuadratureError names the failing (l, n) cell.
        logger.debug("Numerical failure", exc_info=True)
        print(f"cavitydetector: {e}", file=sys.stderr)
        return EXIT_NUMERICS


if __name__ == "__main__":
    sys.exit(main())
