"""Pytest configuration and fixtures."""
import os
import tempfile

# Point logs and the scan cache at a scratch directory before importing the package
_SCRATCH = tempfile.mkdtemp(prefix="fingerkit-tests-")
os.environ["FINGERKIT_LOG_DIR"] = os.path.join(_SCRATCH, "logs")
os.environ["FINGERKIT_CACHE_DIR"] = os.path.join(_SCRATCH, "cache")
os.environ.setdefault("FINGERKIT_LOG_LEVEL", "WARNING")

import pytest

from fingerkit.schemas import FingerConfig, HoeckensParams, ScanSpec, SpringParams
from fingerkit.services import optimize
from fingerkit.services.cache import SCAN_CACHE


@pytest.fixture
def hoeckens_params():
    return HoeckensParams()


@pytest.fixture
def finger():
    return FingerConfig()


@pytest.fixture
def springs():
    return SpringParams()


@pytest.fixture(scope="session")
def default_scan():
    """Full 151 x 151 scan with the default spec, shared by the whole session."""
    return optimize.scan(ScanSpec())


@pytest.fixture
def cache_dir(tmp_path):
    return tmp_path / "cache"


@pytest.fixture(autouse=True)
def clear_scan_cache():
    """Each test starts with an empty in-memory scan cache."""
    SCAN_CACHE.clear()
    yield
    SCAN_CACHE.clear()
