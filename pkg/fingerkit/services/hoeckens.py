"""Offset Hoeckens linkage: closure solving and near-linear band extraction.

Frame: A at the origin, C at `params.pivot_c`. The crank AB turns by theta1 (x <-> cos,
y <-> sin); the rod through B slides in a chute pivoted at C and ends at D, |BD| = l_bd.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from fingerkit.core.config import EPS_GEO
from fingerkit.core.errors import ConfigurationError, EmptyBand, InvalidStep, RodTooShort, SingularConfiguration
from fingerkit.core.logging_config import logger
from fingerkit.schemas import HoeckensParams
from fingerkit.services.geometry import (
    Angle,
    Point2,
    perpendicular_offsets,
    total_least_squares_line,
)

# Coarse grid of the band search (deg)
BAND_COARSE_STEP_DEG = 0.5


@dataclass(frozen=True)
class HoeckensState:
    theta1: Angle
    theta2: Angle
    l_bc: float
    B: Point2
    D: Point2


@dataclass(frozen=True)
class LinearBand:
    theta_lo: Angle
    theta_hi: Angle
    max_deviation: float          # in units of l
    lateral_deviation: float      # peak-to-peak spread about fit_line, in units of l
    fit_point: Point2
    fit_direction: Point2
    samples: int

    @property
    def width_deg(self) -> float:
        return self.theta_hi.degrees - self.theta_lo.degrees


@dataclass(frozen=True)
class ClosureArrays:
    """Vectorised closure solution over a grid of crank angles (degrees)."""
    theta1_deg: np.ndarray
    bx: np.ndarray
    by: np.ndarray
    l_bc: np.ndarray
    theta2: np.ndarray
    dx: np.ndarray
    dy: np.ndarray


def angle_grid(lo_deg: float, hi_deg: float, step_deg: float) -> np.ndarray:
    """floor(range/step)+1 monotone samples starting at lo, snapped to 1e-9 deg.

    Snapping makes grids of different steps share bit-identical angles.
    """
    if not (step_deg > 0 and math.isfinite(step_deg)):
        raise InvalidStep(f"invalid step {step_deg}: must be finite and > 0")
    if not (math.isfinite(lo_deg) and math.isfinite(hi_deg)):
        raise InvalidStep(f"invalid range [{lo_deg}, {hi_deg}]: bounds must be finite")
    if hi_deg < lo_deg:
        raise InvalidStep(f"invalid range [{lo_deg}, {hi_deg}]")
    count = int(math.floor((hi_deg - lo_deg) / step_deg + 1e-9)) + 1
    return np.round(lo_deg + step_deg * np.arange(count), 9)


def solve_many(params: HoeckensParams, theta1_deg) -> ClosureArrays:
    theta_deg = np.atleast_1d(np.asarray(theta1_deg, dtype=float))
    theta = np.radians(theta_deg)
    c = params.pivot_c
    bx = params.l_ab * np.cos(theta)
    by = params.l_ab * np.sin(theta)
    vx = c.x - bx
    vy = c.y - by
    l_bc = np.hypot(vx, vy)

    singular = l_bc < EPS_GEO
    if singular.any():
        bad = theta_deg[np.argmax(singular)]
        raise SingularConfiguration(f"B coincides with C at theta1={bad:.6f} deg")
    too_short = l_bc >= params.l_bd
    if too_short.any():
        bad = theta_deg[np.argmax(too_short)]
        raise RodTooShort(f"rod BD ({params.l_bd} mm) does not reach past C at theta1={bad:.6f} deg")

    ux = vx / l_bc
    uy = vy / l_bc
    protrusion = params.l_bd - l_bc
    return ClosureArrays(
        theta1_deg=theta_deg,
        bx=bx,
        by=by,
        l_bc=l_bc,
        theta2=np.arctan2(uy, ux),
        dx=c.x + protrusion * ux,
        dy=c.y + protrusion * uy,
    )


def solve(params: HoeckensParams, theta1_deg: float) -> HoeckensState:
    """Closure of the linkage at one crank angle (degrees)."""
    arr = solve_many(params, [theta1_deg])
    return HoeckensState(
        theta1=Angle.from_degrees(theta1_deg),
        theta2=Angle(float(arr.theta2[0])),
        l_bc=float(arr.l_bc[0]),
        B=Point2(float(arr.bx[0]), float(arr.by[0])),
        D=Point2(float(arr.dx[0]), float(arr.dy[0])),
    )


def trace(params: HoeckensParams, theta_range: Tuple[float, float], step: float) -> List[Tuple[float, Point2]]:
    """Point-D path sampled over a crank range (degrees)."""
    grid = angle_grid(theta_range[0], theta_range[1], step)
    arr = solve_many(params, grid)
    return [(float(t), Point2(float(x), float(y))) for t, x, y in zip(grid, arr.dx, arr.dy)]


def rod_sweep(params: HoeckensParams, theta_range: Tuple[float, float], step: float = 0.01) -> float:
    """Total rotation (deg) of rod BD over a crank range."""
    arr = solve_many(params, angle_grid(theta_range[0], theta_range[1], step))
    unwrapped = np.unwrap(arr.theta2)
    return float(np.degrees(unwrapped.max() - unwrapped.min()))


def path_length(dx: np.ndarray, dy: np.ndarray) -> np.ndarray:
    """Cumulative arc length along a sampled path, starting at 0."""
    return np.concatenate([[0.0], np.cumsum(np.hypot(np.diff(dx), np.diff(dy)))])


def _chord_deviation(s: np.ndarray, theta: np.ndarray, i: int, j: int) -> float:
    seg = s[i:j + 1]
    th = theta[i:j + 1]
    chord = s[i] + (s[j] - s[i]) * (th - th[0]) / (th[-1] - th[0])
    return float(np.max(np.abs(seg - chord)))


def _coarse_search(s: np.ndarray, theta: np.ndarray, budget: float) -> Tuple[int, int]:
    """Widest (i, j) on the given samples with chord deviation <= budget; (-1, -1) if none."""
    n = s.size
    best = (-1, -1)
    for i in range(n - 2):
        js = np.arange(i + 2, n)
        ks = np.arange(i, n)
        frac = (theta[ks][None, :] - theta[i]) / (theta[js][:, None] - theta[i])
        chord = s[i] + (s[js][:, None] - s[i]) * frac
        dev = np.abs(s[ks][None, :] - chord)
        dev[ks[None, :] > js[:, None]] = 0.0
        ok = np.flatnonzero(dev.max(axis=1) <= budget)
        if ok.size:
            j = int(js[ok[-1]])
            if j - i > best[1] - best[0]:
                best = (i, j)
    return best


def _shrink(s: np.ndarray, theta: np.ndarray, i: int, j: int, budget: float, reach: int) -> Tuple[int, int]:
    """Smallest inward move of the endpoints that brings the interval within budget; (-1, -1) if none."""
    if _chord_deviation(s, theta, i, j) <= budget:
        return i, j
    for total in range(1, 2 * reach + 1):
        for a in range(total + 1):
            lo, hi = i + a, j - (total - a)
            if hi - lo >= 2 and _chord_deviation(s, theta, lo, hi) <= budget:
                return lo, hi
    return -1, -1


def _extend(s: np.ndarray, theta: np.ndarray, i: int, j: int, budget: float, reach: int) -> Tuple[int, int]:
    """Push each endpoint outward as far as the budget allows, alternating until stable."""
    n = s.size
    for _ in range(20):
        new_i = i
        for cand in range(max(0, i - reach), i):
            if j - cand >= 2 and _chord_deviation(s, theta, cand, j) <= budget:
                new_i = cand
                break
        new_j = j
        for cand in range(min(n - 1, j + reach), j, -1):
            if cand - new_i >= 2 and _chord_deviation(s, theta, new_i, cand) <= budget:
                new_j = cand
                break
        if (new_i, new_j) == (i, j):
            break
        i, j = new_i, new_j
    return i, j


def linear_band(params: HoeckensParams,
                theta_range: Tuple[float, float] = (0.0, 180.0),
                step: float = 0.01,
                budget: float = 0.0164) -> LinearBand:
    """Widest crank interval over which D advances linearly with theta1.

    D's displacement (arc length along its path) must stay within `budget` (units of l)
    of the straight chord joining the interval's end samples.
    """
    if not (budget >= 0 and math.isfinite(budget)):
        raise ConfigurationError(f"deviation budget must be finite and >= 0, got {budget}")
    theta = angle_grid(theta_range[0], theta_range[1], step)
    arr = solve_many(params, theta)
    unit = params.unit_length
    s = path_length(arr.dx, arr.dy) / unit
    if theta.size < 3:
        raise EmptyBand("fewer than 3 samples in the search window")

    stride = max(1, int(round(BAND_COARSE_STEP_DEG / step)))
    reach = 2 * stride
    coarse_idx = np.arange(0, theta.size, stride)
    ci, cj = _coarse_search(s[coarse_idx], theta[coarse_idx], budget)
    i = j = -1
    if ci >= 0:
        i, j = _shrink(s, theta, int(coarse_idx[ci]), int(coarse_idx[cj]), budget, reach)
    if i < 0:
        # seed from the first 3-sample window that fits
        mid = s[1:-1] - 0.5 * (s[:-2] + s[2:])
        seeds = np.flatnonzero(np.abs(mid) <= budget)
        if seeds.size == 0:
            raise EmptyBand(f"no interval of 3 samples stays within {budget} l of a line")
        i, j = int(seeds[0]), int(seeds[0]) + 2
    i, j = _extend(s, theta, i, j, budget, reach)

    max_dev = _chord_deviation(s, theta, i, j)
    point, direction = total_least_squares_line(arr.dx[i:j + 1], arr.dy[i:j + 1])
    offsets = perpendicular_offsets(arr.dx[i:j + 1], arr.dy[i:j + 1], point, direction)
    band = LinearBand(
        theta_lo=Angle.from_degrees(float(theta[i])),
        theta_hi=Angle.from_degrees(float(theta[j])),
        max_deviation=max_dev,
        lateral_deviation=float(offsets.max() - offsets.min()) / unit,
        fit_point=point,
        fit_direction=direction,
        samples=j - i + 1,
    )
    logger.debug(f"Linear band [{band.theta_lo.degrees:.2f}, {band.theta_hi.degrees:.2f}] deg, "
                 f"deviation {band.max_deviation:.5f} l")
    return band


def deviation_for_width(params: HoeckensParams, width_deg: float,
                        theta_range: Tuple[float, float] = (0.0, 180.0),
                        step: float = 0.01,
                        upper: float = 0.1,
                        iterations: int = 20) -> Tuple[float, LinearBand]:
    """Smallest budget (bisection) whose band is at least `width_deg` wide."""
    lo, hi = 0.0, upper
    best = linear_band(params, theta_range, step, hi)
    if best.width_deg < width_deg:
        raise EmptyBand(f"band never reaches {width_deg} deg below budget {upper} l")
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        try:
            band = linear_band(params, theta_range, step, mid)
        except EmptyBand:
            lo = mid
            continue
        if band.width_deg >= width_deg - 1e-9:
            hi, best = mid, band
        else:
            lo = mid
    return hi, best
