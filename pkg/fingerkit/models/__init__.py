"""Database models."""
from fingerkit.models.models import ScanCell, ScanRecord

__all__ = ["ScanRecord", "ScanCell"]
