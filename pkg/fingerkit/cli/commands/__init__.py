"""Subcommand modules; each exposes NAME, register() and run()."""
from fingerkit.cli.commands import amplification, force, hoeckens_path, scan, trajectory

COMMANDS = (hoeckens_path, scan, trajectory, force, amplification)
