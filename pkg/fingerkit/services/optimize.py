"""Exhaustive (L_AG, L_DG) design scan of the trigger four-bar.

The four-bar has a fixed pivot at A (the origin), link AG of length L_AG and the push
link GD of length L_DG whose far end rides on the Hoeckens point D. For every D on the
stroke trace, G is the lower intersection of the two circles; the push angle of DG
(from +y toward +x) is tracked and its range over the trace is the cell's output sweep.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from fingerkit.core.errors import DiscontinuousMotion, InfeasibleCell, InsufficientData
from fingerkit.core.logging_config import logger
from fingerkit.schemas import HoeckensParams, ScanSpec
from fingerkit.services.geometry import Angle, Point2, lower_intersection_from_origin, push_angles
from fingerkit.services.hoeckens import angle_grid, solve_many

# Sweeps above this are reported as discontinuous motion
DISCONTINUITY_LIMIT_DEG = 180.0
DG_SENSITIVITY_LIMIT = 60.0


class InfeasibilityReason(str, Enum):
    GRASHOF = "grashof"
    WORKSPACE = "workspace"
    DISCONTINUOUS = "discontinuous"


@dataclass(frozen=True)
class DTrace:
    """Ordered samples of point D driving the four-bar."""
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if self.x.size == 0 or self.x.shape != self.y.shape:
            raise ValueError("D trace must be a non-empty pair of equally sized arrays")

    @classmethod
    def from_points(cls, points: Sequence[Point2]) -> "DTrace":
        return cls(np.array([p.x for p in points], dtype=float), np.array([p.y for p in points], dtype=float))

    def __len__(self) -> int:
        return int(self.x.size)


def stroke_trace(params: HoeckensParams, sweep_deg: Tuple[float, float], step_deg: float) -> DTrace:
    """Hoeckens D path over the stroke, sampled like `hoeckens.trace`."""
    arr = solve_many(params, angle_grid(sweep_deg[0], sweep_deg[1], step_deg))
    return DTrace(arr.dx, arr.dy)


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    reason: Optional[InfeasibilityReason] = None
    sample_index: Optional[int] = None

    def describe(self) -> str:
        if self.feasible:
            return "feasible"
        return f"{self.reason.value} violated at D sample {self.sample_index}"


def check_feasibility(l_ag: float, l_dg: float, trace: DTrace, margin: float = 45.0) -> Feasibility:
    """Grashof assembly and the workspace limit G_y >= D_y - margin, checked sample by sample."""
    gx, gy, _, status = lower_intersection_from_origin(l_ag, l_dg, trace.x, trace.y)
    for k in range(len(trace)):
        if status[k] != 0:
            return Feasibility(False, InfeasibilityReason.GRASHOF, k)
        if gy[k] < trace.y[k] - margin:
            return Feasibility(False, InfeasibilityReason.WORKSPACE, k)
    return Feasibility(True)


def _push_angles_deg(l_ag: float, l_dg: float, trace: DTrace) -> np.ndarray:
    gx, gy, _, status = lower_intersection_from_origin(l_ag, l_dg, trace.x, trace.y)
    if np.any(status != 0):
        k = int(np.argmax(status != 0))
        raise InfeasibleCell(
            f"four-bar ({l_ag:g}, {l_dg:g}) does not assemble at D sample {k} "
            f"({trace.x[k]:.6g}, {trace.y[k]:.6g})")
    return np.degrees(push_angles(gx, gy, trace.x, trace.y))


def delta_theta_max(l_ag: float, l_dg: float, trace: DTrace) -> Angle:
    """Range (max - min) of the push angle over the trace.

    Raises DiscontinuousMotion above DISCONTINUITY_LIMIT_DEG, the same rule the scan applies.
    """
    theta = _push_angles_deg(l_ag, l_dg, trace)
    sweep = float(theta.max() - theta.min())
    if sweep > DISCONTINUITY_LIMIT_DEG:
        raise DiscontinuousMotion(f"four-bar ({l_ag:g}, {l_dg:g}) sweeps {sweep:.3f} deg, "
                                  f"above {DISCONTINUITY_LIMIT_DEG:g} deg")
    return Angle.from_degrees(sweep)


def min_transmission_angle(l_ag: float, l_dg: float, trace: DTrace) -> Angle:
    """Smallest angle between AG and DG at G over the trace, folded into [0, 90] deg."""
    _push_angles_deg(l_ag, l_dg, trace)
    d_sq = trace.x ** 2 + trace.y ** 2
    cos_mu = np.clip((l_ag ** 2 + l_dg ** 2 - d_sq) / (2.0 * l_ag * l_dg), -1.0, 1.0)
    mu = np.arccos(cos_mu)
    return Angle(float(np.min(np.minimum(mu, math.pi - mu))))


def axis_values(lo: float, hi: float, resolution: float) -> np.ndarray:
    count = int(math.floor((hi - lo) / resolution + 1e-9)) + 1
    return np.round(lo + resolution * np.arange(count), 9)


@dataclass(frozen=True)
class ScanCell:
    l_ag: float
    l_dg: float
    feasible: bool
    delta_theta_max_deg: Optional[float]
    reason: Optional[str]
    min_transmission_deg: Optional[float] = None


@dataclass(frozen=True)
class ScanResult:
    """Row-major grid: axis 0 is L_AG, axis 1 is L_DG."""
    l_ag_values: np.ndarray
    l_dg_values: np.ndarray
    feasible: np.ndarray
    delta_deg: np.ndarray           # NaN where the cell never assembled
    reasons: np.ndarray             # "" for feasible cells
    min_transmission_deg: np.ndarray
    spec_hash: str
    created_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))

    def __post_init__(self):
        for arr in (self.l_ag_values, self.l_dg_values, self.feasible, self.delta_deg,
                    self.reasons, self.min_transmission_deg):
            arr.setflags(write=False)

    @property
    def n_cells(self) -> int:
        return int(self.feasible.size)

    @property
    def n_feasible(self) -> int:
        return int(self.feasible.sum())

    def _index(self, l_ag: float, l_dg: float) -> Tuple[int, int]:
        i = np.flatnonzero(np.isclose(self.l_ag_values, l_ag, rtol=0.0, atol=1e-9))
        j = np.flatnonzero(np.isclose(self.l_dg_values, l_dg, rtol=0.0, atol=1e-9))
        if i.size == 0 or j.size == 0:
            raise KeyError(f"({l_ag}, {l_dg}) is not a grid node")
        return int(i[0]), int(j[0])

    def _cell_at(self, i: int, j: int) -> ScanCell:
        delta = self.delta_deg[i, j]
        transmission = self.min_transmission_deg[i, j]
        return ScanCell(
            l_ag=float(self.l_ag_values[i]),
            l_dg=float(self.l_dg_values[j]),
            feasible=bool(self.feasible[i, j]),
            delta_theta_max_deg=None if np.isnan(delta) else float(delta),
            reason=str(self.reasons[i, j]) or None,
            min_transmission_deg=None if np.isnan(transmission) else float(transmission),
        )

    def cell(self, l_ag: float, l_dg: float) -> ScanCell:
        return self._cell_at(*self._index(l_ag, l_dg))

    def cells(self) -> Iterator[ScanCell]:
        for i in range(self.l_ag_values.size):
            for j in range(self.l_dg_values.size):
                yield self._cell_at(i, j)

    def argmax(self) -> ScanCell:
        """Feasible cell with the largest sweep; ties go to the first in row-major order."""
        if not self.feasible.any():
            raise InsufficientData("scan has no feasible cell")
        masked = np.where(self.feasible, self.delta_deg, -np.inf)
        return self._cell_at(*np.unravel_index(int(np.argmax(masked)), masked.shape))

    def closest_to(self, target_deg: float) -> ScanCell:
        if not self.feasible.any():
            raise InsufficientData("scan has no feasible cell")
        gap = np.where(self.feasible, np.abs(self.delta_deg - target_deg), np.inf)
        return self._cell_at(*np.unravel_index(int(np.argmin(gap)), gap.shape))


@dataclass(frozen=True)
class OptimumReport:
    argmax: ScanCell
    closest: ScanCell
    target_deg: float
    reference: Optional[ScanCell]


def optimum_report(result: ScanResult, spec: ScanSpec) -> OptimumReport:
    try:
        reference = result.cell(*spec.reference_design)
    except KeyError:
        reference = None
    return OptimumReport(
        argmax=result.argmax(),
        closest=result.closest_to(spec.target_sweep_deg),
        target_deg=spec.target_sweep_deg,
        reference=reference,
    )


def _scan_row(l_ag: float, l_dg: np.ndarray, trace: DTrace, margin: float):
    """Evaluate one L_AG row against every L_DG at once; same rules as `check_feasibility`."""
    dx = trace.x[None, :]
    dy = trace.y[None, :]
    gx, gy, d, status = lower_intersection_from_origin(l_ag, l_dg[:, None], dx, dy)
    bad_grashof = status != 0
    bad_workspace = ~bad_grashof & (gy < dy - margin)
    bad = bad_grashof | bad_workspace
    first = np.argmax(bad, axis=1)
    rows = np.arange(l_dg.size)
    infeasible = bad.any(axis=1)

    reasons = np.full(l_dg.size, "", dtype="<U13")
    reasons[infeasible & bad_grashof[rows, first]] = InfeasibilityReason.GRASHOF.value
    reasons[infeasible & ~bad_grashof[rows, first]] = InfeasibilityReason.WORKSPACE.value

    assembles = ~bad_grashof.any(axis=1)
    theta = np.degrees(push_angles(gx, gy, dx, dy))
    with np.errstate(invalid="ignore"):
        delta = np.where(assembles, np.max(theta, axis=1) - np.min(theta, axis=1), np.nan)
        cos_mu = np.clip((l_ag ** 2 + l_dg[:, None] ** 2 - d ** 2) / (2.0 * l_ag * l_dg[:, None]), -1.0, 1.0)
        mu = np.degrees(np.arccos(cos_mu))
        transmission = np.where(assembles, np.min(np.minimum(mu, 180.0 - mu), axis=1), np.nan)

    feasible = ~infeasible
    discontinuous = feasible & (delta > DISCONTINUITY_LIMIT_DEG)
    reasons[discontinuous] = InfeasibilityReason.DISCONTINUOUS.value
    feasible &= ~discontinuous
    return feasible, delta, reasons, transmission


def scan(spec: ScanSpec) -> ScanResult:
    """Evaluate every (L_AG, L_DG) node of the ScanSpec grid."""
    l_ag_values = axis_values(*spec.l_ag_range, spec.resolution)
    l_dg_values = axis_values(*spec.l_dg_range, spec.resolution)
    trace = stroke_trace(spec.hoeckens, spec.sweep_deg, spec.trace_step_deg)
    logger.info(f"Scan started: {l_ag_values.size}x{l_dg_values.size} cells, {len(trace)} D samples")

    shape = (l_ag_values.size, l_dg_values.size)
    feasible = np.zeros(shape, dtype=bool)
    delta = np.full(shape, np.nan)
    reasons = np.full(shape, "", dtype="<U13")
    transmission = np.full(shape, np.nan)
    for i, l_ag in enumerate(l_ag_values):
        feasible[i], delta[i], reasons[i], transmission[i] = _scan_row(float(l_ag), l_dg_values, trace,
                                                                      spec.workspace_margin)

    result = ScanResult(l_ag_values, l_dg_values, feasible, delta, reasons, transmission, spec.content_hash())
    logger.info(f"Scan finished: {result.n_feasible}/{result.n_cells} feasible")
    return result


@dataclass(frozen=True)
class SensitivityReport:
    r: float
    slope_ag: float
    intercept_ag: float
    slope_dg_below_60: float
    marginal_ag: List[Tuple[float, float]]   # (L_AG, mean sweep)
    marginal_dg: List[Tuple[float, float]]   # (L_DG, mean sweep)

    def __post_init__(self):
        if abs(self.r) > 1.0 + 1e-12:
            raise ValueError(f"correlation out of range: {self.r}")


def _marginal(axis_values_: np.ndarray, delta: np.ndarray, feasible: np.ndarray, axis: int) -> List[Tuple[float, float]]:
    counts = feasible.sum(axis=axis)
    totals = np.where(feasible, delta, 0.0).sum(axis=axis)
    return [(float(v), float(t / c)) for v, t, c in zip(axis_values_, totals, counts) if c > 0]


def sensitivity(result: ScanResult) -> SensitivityReport:
    """Pooled AG statistics plus the DG < 60 mm marginal slope."""
    mask = result.feasible
    if mask.sum() < 2:
        raise InsufficientData(f"need at least 2 feasible cells, got {int(mask.sum())}")
    ag_grid = np.broadcast_to(result.l_ag_values[:, None], mask.shape)
    x = ag_grid[mask]
    y = result.delta_deg[mask]
    if np.unique(x).size < 2:
        raise InsufficientData("feasible cells span a single L_AG value")
    fit = stats.linregress(x, y)

    marginal_ag = _marginal(result.l_ag_values, result.delta_deg, mask, axis=1)
    marginal_dg = _marginal(result.l_dg_values, result.delta_deg.T, mask.T, axis=1)
    low = [(dg, mean) for dg, mean in marginal_dg if dg < DG_SENSITIVITY_LIMIT]
    if len(low) < 2:
        raise InsufficientData(f"need at least 2 feasible L_DG values below {DG_SENSITIVITY_LIMIT:g} mm, got {len(low)}")
    dg_fit = stats.linregress([p[0] for p in low], [p[1] for p in low])

    report = SensitivityReport(
        r=float(fit.rvalue),
        slope_ag=float(fit.slope),
        intercept_ag=float(fit.intercept),
        slope_dg_below_60=float(dg_fit.slope),
        marginal_ag=marginal_ag,
        marginal_dg=marginal_dg,
    )
    logger.debug(f"Sensitivity: r={report.r:.4f} slope_AG={report.slope_ag:.4f} "
                 f"slope_DG<60={report.slope_dg_below_60:.4f}")
    return report


def ag_increment(result: ScanResult, l_ag: float, l_dg: float, step: float = 30.0) -> float:
    """Change in sweep when L_AG grows by `step` at fixed L_DG (both cells must be feasible)."""
    start = result.cell(l_ag, l_dg)
    end = result.cell(l_ag + step, l_dg)
    for c in (start, end):
        if not c.feasible:
            raise InfeasibleCell(f"cell ({c.l_ag:g}, {c.l_dg:g}) is infeasible: {c.reason}")
    return end.delta_theta_max_deg - start.delta_theta_max_deg


def result_summary(result: ScanResult) -> Dict[str, int]:
    counts = {reason.value: int((result.reasons == reason.value).sum()) for reason in InfeasibilityReason}
    counts["feasible"] = result.n_feasible
    return counts
