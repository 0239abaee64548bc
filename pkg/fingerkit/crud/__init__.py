"""CRUD operations."""
from fingerkit.crud.crud import create_scan, get_scan_by_hash, list_scans, scan_result_from_record

__all__ = ["get_scan_by_hash", "list_scans", "create_scan", "scan_result_from_record"]
