"""Process-level settings."""
import os
from pathlib import Path
from dotenv import load_dotenv

from fingerkit import __version__

# Load environment variables from .env (if present)
load_dotenv()

TOOL_VERSION = __version__

# Logging configuration
LOG_DIR = Path(os.getenv("FINGERKIT_LOG_DIR", "logs"))
LOG_LEVEL = os.getenv("FINGERKIT_LOG_LEVEL", "INFO").upper()

# Scan cache location (SQLite file lives inside it)
CACHE_DIR = Path(os.getenv("FINGERKIT_CACHE_DIR", ".fingerkit_cache"))
CACHE_DB_NAME = "scan_cache.db"

# Degeneracy tolerance for geometric tests (mm)
EPS_GEO = 1e-9


def cache_database_url(cache_dir: Path = None) -> str:
    """SQLite URL of the scan cache inside `cache_dir`."""
    directory = Path(cache_dir) if cache_dir is not None else CACHE_DIR
    return f"sqlite:///{(directory / CACHE_DB_NAME).as_posix()}"
