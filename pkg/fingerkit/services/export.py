"""Artifact writers: CSV tables, SVG figures and the run manifest."""
import csv
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from fingerkit.core.logging_config import logger  # noqa: E402
from fingerkit.schemas import RunManifest  # noqa: E402
from fingerkit.services.force import ForceSurface  # noqa: E402
from fingerkit.services.geometry import Point2  # noqa: E402
from fingerkit.services.hoeckens import LinearBand  # noqa: E402
from fingerkit.services.mechanism import TRAJECTORY_COLUMNS, Trajectory  # noqa: E402
from fingerkit.services.optimize import OptimumReport, ScanResult  # noqa: E402

HOECKENS_COLUMNS = ("theta1_deg", "x_mm", "y_mm")
SCAN_COLUMNS = ("L_AG_mm", "L_DG_mm", "feasible", "delta_theta_max_deg", "reason")
FORCE_COLUMNS = ("P_press_W", "r_mm", "F_N_N")
SINGULAR_MARKER = "singular"
MANIFEST_NAME = "manifest.json"

# Fixed salt so SVG element ids do not change between runs
matplotlib.rcParams["svg.hashsalt"] = "fingerkit"


def fmt(value) -> str:
    """6 significant digits; strings and bools pass through."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if value is None:
        return ""
    return f"{float(value):.6g}"


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    logger.info(f"Wrote {path}")
    return path


def write_hoeckens_path_csv(path: Path, trace: List[Tuple[float, Point2]]) -> Path:
    return write_csv(path, HOECKENS_COLUMNS, ((t, p.x, p.y) for t, p in trace))


def write_scan_csv(path: Path, result: ScanResult) -> Path:
    rows = ((c.l_ag, c.l_dg, c.feasible, c.delta_theta_max_deg, c.reason or "") for c in result.cells())
    return write_csv(path, SCAN_COLUMNS, rows)


def write_trajectory_csv(path: Path, trajectory: Trajectory) -> Path:
    return write_csv(path, TRAJECTORY_COLUMNS, trajectory.rows())


def write_force_csv(path: Path, surface: ForceSurface) -> Path:
    def rows():
        for i, p in enumerate(surface.p_values_w):
            for j, r in enumerate(surface.r_values_mm):
                value = SINGULAR_MARKER if surface.singular[i, j] else surface.values.data[i, j]
                yield p, r, value
    return write_csv(path, FORCE_COLUMNS, rows())


def write_manifest(out_dir: Path, manifest: RunManifest) -> Path:
    path = Path(out_dir) / MANIFEST_NAME
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path


# --- SVG ---
def _save_svg(fig, path: Path, deterministic: bool) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    metadata = {"Date": None} if deterministic else None
    fig.savefig(path, format="svg", metadata=metadata)
    plt.close(fig)
    logger.info(f"Wrote {path}")
    return path


def plot_hoeckens_path(path: Path, trace: List[Tuple[float, Point2]], band: Optional[LinearBand],
                       deterministic: bool = False) -> Path:
    theta = np.array([t for t, _ in trace])
    x = np.array([p.x for _, p in trace])
    y = np.array([p.y for _, p in trace])
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.plot(x, y, linewidth=1.2, label="point D")
    if band is not None:
        inside = (theta >= band.theta_lo.degrees - 1e-9) & (theta <= band.theta_hi.degrees + 1e-9)
        ax.plot(x[inside], y[inside], linewidth=2.5,
                label=f"linear band {band.theta_lo.degrees:.2f}-{band.theta_hi.degrees:.2f} deg")
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("x (mm)")
    ax.set_ylabel("y (mm)")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return _save_svg(fig, path, deterministic)


def plot_scan_heatmap(path: Path, result: ScanResult, report: Optional[OptimumReport] = None,
                      deterministic: bool = False) -> Path:
    field = np.where(result.feasible, result.delta_deg, np.nan)
    fig, ax = plt.subplots(figsize=(7, 6))
    extent = (result.l_dg_values[0], result.l_dg_values[-1], result.l_ag_values[0], result.l_ag_values[-1])
    image = ax.imshow(field, origin="lower", extent=extent, aspect="auto", cmap="viridis")
    fig.colorbar(image, ax=ax, label="delta theta max (deg)")
    if np.isfinite(field).sum() > 3 and min(field.shape) > 1:
        ax.contour(result.l_dg_values, result.l_ag_values, field, levels=10, colors="k", linewidths=0.5)
    if report is not None:
        ax.plot(report.argmax.l_dg, report.argmax.l_ag, "r^", label="argmax")
        ax.plot(report.closest.l_dg, report.closest.l_ag, "wo", label=f"closest to {report.target_deg:g} deg")
        if report.reference is not None:
            ax.plot(report.reference.l_dg, report.reference.l_ag, "ks", label="reference")
        ax.legend(loc="upper right")
    ax.set_xlabel("L_DG (mm)")
    ax.set_ylabel("L_AG (mm)")
    fig.tight_layout()
    return _save_svg(fig, path, deterministic)


def plot_trajectory(path: Path, pushed: Trajectory, original: Trajectory, deterministic: bool = False) -> Path:
    fig, (ax_xy, ax_v) = plt.subplots(1, 2, figsize=(11, 5))
    ax_xy.plot(original.column("x_mm"), original.column("y_mm"), "--", label="original path")
    ax_xy.plot(pushed.column("x_mm"), pushed.column("y_mm"), label="actual path")
    ax_xy.set_aspect("equal", adjustable="datalim")
    ax_xy.set_xlabel("x (mm)")
    ax_xy.set_ylabel("y (mm)")
    ax_xy.grid(True, alpha=0.3)
    ax_xy.legend()
    ax_v.plot(pushed.column("t_s"), pushed.column("vx_mm_s"), label="vx")
    ax_v.plot(pushed.column("t_s"), pushed.column("vy_mm_s"), label="vy")
    ax_v.set_xlabel("t (s)")
    ax_v.set_ylabel("velocity (mm/s)")
    ax_v.grid(True, alpha=0.3)
    ax_v.legend()
    fig.tight_layout()
    return _save_svg(fig, path, deterministic)


def plot_force_surface(path: Path, surface: ForceSurface, deterministic: bool = False) -> Path:
    fig, ax = plt.subplots(figsize=(6, 5))
    field = surface.values.filled(np.nan)
    extent = (surface.r_values_mm[0], surface.r_values_mm[-1], surface.p_values_w[0], surface.p_values_w[-1])
    image = ax.imshow(field, origin="lower", extent=extent, aspect="auto", cmap="magma")
    fig.colorbar(image, ax=ax, label="F_N (N)")
    ax.set_title(f"theta1 = {surface.theta1_deg:g} deg")
    ax.set_xlabel("r (mm)")
    ax.set_ylabel("P_press (W)")
    fig.tight_layout()
    return _save_svg(fig, path, deterministic)
