"""Allows `python -m fingerkit`."""
import sys

from fingerkit.main import main

sys.exit(main())
