"""In-memory cache for design scans, in front of the SQLite scan cache."""
from typing import Optional, Tuple

from fingerkit import crud
from fingerkit.core.database import session_scope
from fingerkit.core.logging_config import logger
from fingerkit.schemas import ScanSpec
from fingerkit.services.optimize import ScanResult, scan

SCAN_CACHE = {}

# Purpose:
# A default scan is 22801 cells; repeated runs with the same ScanSpec should not redo it.
#
# How It Works:
# - Keyed by the ScanSpec content hash (SHA-256 of its canonical JSON).
# - Memory hit: return the stored ScanResult.
# - Memory miss: look the hash up in the SQLite cache, rebuild the result, keep it in memory.
# - Full miss: run the scan, store it in both layers.
# - use_cache=False (--no-cache) skips both layers for reading and writing.
#
# Where it is used:
# - In the scan command.


def cached_scan(spec: ScanSpec, cache_dir=None, use_cache: bool = True) -> Tuple[ScanResult, bool]:
    """Returns (result, cache_hit)."""
    if not use_cache:
        logger.info("Scan cache bypassed")
        return scan(spec), False

    spec_hash = spec.content_hash()
    result: Optional[ScanResult] = SCAN_CACHE.get(spec_hash)
    if result is not None:
        logger.info(f"Scan cache hit (memory): {spec_hash[:12]}")
        return result, True

    with session_scope(cache_dir) as db:
        record = crud.get_scan_by_hash(db, spec_hash)
        if record is not None:
            logger.info(f"Scan cache hit (database): {spec_hash[:12]}")
            result = crud.scan_result_from_record(record)
            SCAN_CACHE[spec_hash] = result
            return result, True

        logger.info(f"Scan cache miss: {spec_hash[:12]}")
        result = scan(spec)
        crud.create_scan(db, spec, result)
    SCAN_CACHE[spec_hash] = result
    return result, False
