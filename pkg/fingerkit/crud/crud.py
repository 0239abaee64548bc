"""Database CRUD operations for the scan cache."""
import numpy as np
from sqlalchemy.orm import Session

from fingerkit.core.config import TOOL_VERSION
from fingerkit.core.errors import SolverError
from fingerkit.core.logging_config import logger
from fingerkit.models import ScanCell, ScanRecord
from fingerkit.schemas import ScanSpec
from fingerkit.services.optimize import ScanResult


def get_scan_by_hash(db: Session, spec_hash: str):
    """Get a stored scan by its ScanSpec hash."""
    return db.query(ScanRecord).filter(ScanRecord.spec_hash == spec_hash).first()


def list_scans(db: Session, skip: int = 0, limit: int = 100):
    """Stored scans, newest first."""
    return db.query(ScanRecord).order_by(ScanRecord.id.desc()).offset(skip).limit(limit).all()


def create_scan(db: Session, spec: ScanSpec, result: ScanResult):
    """Store a scan and all of its cells."""
    logger.info(f"Storing scan {result.spec_hash[:12]} ({result.n_cells} cells)")
    record = ScanRecord(
        spec_hash=result.spec_hash,
        spec_json=spec.canonical_json(),
        tool_version=TOOL_VERSION,
        n_cells=result.n_cells,
        n_feasible=result.n_feasible,
    )
    record.cells = [
        ScanCell(
            l_ag=c.l_ag,
            l_dg=c.l_dg,
            feasible=c.feasible,
            delta_theta_max_deg=c.delta_theta_max_deg,
            min_transmission_deg=c.min_transmission_deg,
            reason=c.reason,
        )
        for c in result.cells()
    ]
    try:
        db.add(record)
        db.commit()
        db.refresh(record)
        logger.info(f"Scan stored (ID: {record.id})")
        return record
    except Exception as e:
        db.rollback()
        logger.error(f"Failed to store scan {result.spec_hash[:12]}: {e}")
        return None


def scan_result_from_record(record: ScanRecord) -> ScanResult:
    """Rebuild the in-memory grid from stored cells (row-major order)."""
    cells = record.cells
    l_ag_values = np.array(sorted({c.l_ag for c in cells}), dtype=float)
    l_dg_values = np.array(sorted({c.l_dg for c in cells}), dtype=float)
    shape = (l_ag_values.size, l_dg_values.size)
    if shape[0] * shape[1] != len(cells):
        raise SolverError(f"stored scan {record.spec_hash[:12]} is not a full grid")

    feasible = np.array([c.feasible for c in cells], dtype=bool).reshape(shape)
    delta = np.array([np.nan if c.delta_theta_max_deg is None else c.delta_theta_max_deg for c in cells]).reshape(shape)
    reasons = np.array([c.reason or "" for c in cells], dtype="<U13").reshape(shape)
    transmission = np.array([np.nan if c.min_transmission_deg is None else c.min_transmission_deg
                             for c in cells]).reshape(shape)
    return ScanResult(l_ag_values, l_dg_values, feasible, delta, reasons, transmission, record.spec_hash,
                      created_at=record.created_at)
