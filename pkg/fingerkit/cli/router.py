"""Command-line parser: global flags plus one subparser per command."""
import argparse

from fingerkit import __version__
from fingerkit.cli.commands import COMMANDS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fingerkit",
        description="Kinematics and grasp-force toolkit for the Hoeckens underactuated finger",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="YAML or JSON run configuration")
    parser.add_argument("--out", help="output directory (overrides output_dir)")
    parser.add_argument("--svg", action="store_true", help="also write SVG figures")
    parser.add_argument("--no-cache", action="store_true", help="neither read nor write the scan cache")
    parser.add_argument("--deterministic-svg", action="store_true", help="omit the timestamp from SVG output")
    parser.add_argument("--cache-dir", help="scan cache directory (overrides cache_dir)")

    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    for command in COMMANDS:
        command.register(subparsers)
    return parser
