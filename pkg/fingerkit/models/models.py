"""SQLAlchemy database models for the scan cache."""
from sqlalchemy import Boolean, Column, DateTime, Float, ForeignKey, Integer, String, Text
from sqlalchemy.orm import relationship
from sqlalchemy.sql import func

from fingerkit.core.database import Base


# One stored design scan.
# Fields:
# 1. spec_hash: SHA-256 of the canonical ScanSpec JSON, unique, indexed
# 2. spec_json: the canonical JSON itself, kept so a row is self-describing
# 3. n_cells / n_feasible: grid size and number of feasible cells
class ScanRecord(Base):
    __tablename__ = "scan_records"
    id = Column(Integer, primary_key=True, index=True)
    spec_hash = Column(String(64), unique=True, index=True, nullable=False)
    spec_json = Column(Text, nullable=False)
    tool_version = Column(String, nullable=False)
    n_cells = Column(Integer, nullable=False)
    n_feasible = Column(Integer, nullable=False)
    created_at = Column(DateTime(timezone=True), server_default=func.now())

    cells = relationship("ScanCell", back_populates="scan", cascade="all, delete-orphan",
                         order_by="ScanCell.id")


# One grid cell of a stored scan, in row-major (L_AG, L_DG) order.
class ScanCell(Base):
    __tablename__ = "scan_cells"
    id = Column(Integer, primary_key=True)
    scan_id = Column(Integer, ForeignKey("scan_records.id"), index=True, nullable=False)
    l_ag = Column(Float, nullable=False)
    l_dg = Column(Float, nullable=False)
    feasible = Column(Boolean, nullable=False)
    delta_theta_max_deg = Column(Float, nullable=True)  # null when the cell never assembled
    min_transmission_deg = Column(Float, nullable=True)
    reason = Column(String, nullable=True)  # grashof / workspace / discontinuous

    scan = relationship("ScanRecord", back_populates="cells")
