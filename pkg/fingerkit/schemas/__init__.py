"""Pydantic schemas."""
from fingerkit.schemas.schemas import (
    SCHEMA_VERSION,
    HoeckensParams, FingerConfig, SpringParams, ScanSpec,
    HoeckensPathSettings, TrajectorySettings, ForceGrid,
    RunConfig, RunManifest,
)

__all__ = [
    "SCHEMA_VERSION",
    "HoeckensParams", "FingerConfig", "SpringParams", "ScanSpec",
    "HoeckensPathSettings", "TrajectorySettings", "ForceGrid",
    "RunConfig", "RunManifest",
]
