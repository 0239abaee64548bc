"""Composite finger: Hoeckens stroke, double parallelogram and the Q2-triggered four-bar.

Before the stopper Q2 engages, the double parallelogram keeps the distal phalange vertical
and the fingertip I is a pure translate of D. Once the push angle of link DG drops below
Q2 the phalange turns about D by `Q2 - push`, capped at the configured posture sweep.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from fingerkit.core.errors import (
    Contained,
    DegeneratePath,
    Disjoint,
    InsufficientData,
    InvalidStep,
    OutOfStroke,
    SolverError,
)
from fingerkit.core.logging_config import logger
from fingerkit.schemas import FingerConfig
from fingerkit.services.geometry import (
    Angle,
    CirclePair,
    Point2,
    circle_intersection,
    lower_intersection_from_origin,
    push_angle,
    push_angles,
    shoelace_area_xy,
)
from fingerkit.services.hoeckens import angle_grid, rod_sweep, solve, solve_many
from fingerkit.services.optimize import delta_theta_max, stroke_trace

# Bracketing grid for the full-deployment search (deg)
_DEPLOY_SEARCH_STEP = 0.25
_DEPLOY_SEARCH_SPAN = 180.0


class MotionStage(str, Enum):
    IDLE_VERTICAL = "IdleVertical"
    TRIGGERED = "Triggered"
    FULLY_DEPLOYED = "FullyDeployed"


class GraspMode(str, Enum):
    PARALLEL_PINCH = "parallel_pinch"
    TRANSITION = "transition"
    SCOOP = "scoop"


_STAGE_ORDER = {MotionStage.IDLE_VERTICAL: 0, MotionStage.TRIGGERED: 1, MotionStage.FULLY_DEPLOYED: 2}


def grasp_mode(stage: MotionStage) -> GraspMode:
    """Vertical phalange pinches in parallel; the deployed one scoops flat objects."""
    return {
        MotionStage.IDLE_VERTICAL: GraspMode.PARALLEL_PINCH,
        MotionStage.TRIGGERED: GraspMode.TRANSITION,
        MotionStage.FULLY_DEPLOYED: GraspMode.SCOOP,
    }[stage]


# --- four-bar chain ---
def push_angles_deg(config: FingerConfig, theta1_deg) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(D_x, D_y, push angle in deg) for each crank angle."""
    arr = solve_many(config.hoeckens, theta1_deg)
    gx, gy, _, status = lower_intersection_from_origin(config.l_ag, config.l_gd, arr.dx, arr.dy)
    if np.any(status != 0):
        k = int(np.argmax(status != 0))
        error = Disjoint if status[k] == 1 else Contained
        raise error(f"four-bar ({config.l_ag:g}, {config.l_gd:g}) does not assemble "
                    f"at theta1={arr.theta1_deg[k]:.6f} deg")
    return arr.dx, arr.dy, np.degrees(push_angles(gx, gy, arr.dx, arr.dy))


def _push_deg(config: FingerConfig, theta1_deg: float) -> float:
    return float(push_angles_deg(config, [theta1_deg])[2][0])


def _posture_from_push(config: FingerConfig, push_deg):
    return np.clip(config.stopper_q2_deg - push_deg, 0.0, config.delta_theta1_max_deg)


def _tip(config: FingerConfig, dx, dy, posture_deg):
    """Fingertip I for phalange rotation `posture_deg` (counter-clockwise) about D."""
    phi = np.radians(posture_deg)
    offset = config.tip_offset
    c, s = np.cos(phi), np.sin(phi)
    return dx + offset.x * c - offset.y * s, dy + offset.x * s + offset.y * c


# --- stroke events ---
@dataclass(frozen=True)
class StrokeEvents:
    theta_start: float
    theta_engage: float
    theta_full: float
    theta_end: float
    d_y_start: float
    rise_engage: float
    rise_full: float


def stroke(config: FingerConfig) -> StrokeEvents:
    """Crank angles of stroke start, Q2 engagement, full deployment and stroke end (deg)."""
    start, nominal_end = config.stroke_start_deg, config.stroke_end_deg
    q2 = config.stopper_q2_deg
    target_full = q2 - config.delta_theta1_max_deg

    def gap(theta: float, target: float) -> float:
        return _push_deg(config, theta) - target

    if gap(start, q2) <= 0.0:
        engage = start
    elif gap(nominal_end, q2) > 0.0:
        raise OutOfStroke(f"stopper Q2={q2:g} deg never engages between {start:g} and {nominal_end:g} deg")
    else:
        engage = brentq(gap, start, nominal_end, args=(q2,), xtol=1e-12)

    grid = angle_grid(engage, engage + _DEPLOY_SEARCH_SPAN, _DEPLOY_SEARCH_STEP)
    full = None
    for lo, hi in zip(grid[:-1], grid[1:]):
        try:
            g_hi = gap(float(hi), target_full)
        except SolverError:
            break
        if g_hi <= 0.0:
            g_lo = gap(float(lo), target_full)
            full = float(lo) if g_lo <= 0.0 else brentq(gap, float(lo), float(hi), args=(target_full,), xtol=1e-12)
            break
    if full is None:
        raise OutOfStroke(f"posture never reaches {config.delta_theta1_max_deg:g} deg after engagement")

    y_start = solve(config.hoeckens, start).D.y
    events = StrokeEvents(
        theta_start=start,
        theta_engage=float(engage),
        theta_full=float(full),
        theta_end=max(float(full), nominal_end),
        d_y_start=y_start,
        rise_engage=solve(config.hoeckens, engage).D.y - y_start,
        rise_full=solve(config.hoeckens, full).D.y - y_start,
    )
    logger.debug(f"Stroke: engage {events.theta_engage:.4f} deg, full {events.theta_full:.4f} deg")
    return events


def stage_for_theta(events: StrokeEvents, theta1_deg: float) -> MotionStage:
    if theta1_deg < events.theta_engage:
        return MotionStage.IDLE_VERTICAL
    if theta1_deg < events.theta_full:
        return MotionStage.TRIGGERED
    return MotionStage.FULLY_DEPLOYED


def stage_for_height(config: FingerConfig, h: float) -> MotionStage:
    if h > config.h_trigger:
        return MotionStage.IDLE_VERTICAL
    if h > config.h_min:
        return MotionStage.TRIGGERED
    return MotionStage.FULLY_DEPLOYED


# --- pressing height ---
def _height_from_rise(config: FingerConfig, events: StrokeEvents, rise: float) -> float:
    if rise <= events.rise_engage:
        return config.h_max - config.delta_h1 * rise / events.rise_engage if events.rise_engage > 0 else config.h_trigger
    if rise >= events.rise_full:
        return config.h_min
    frac = (rise - events.rise_engage) / (events.rise_full - events.rise_engage)
    return config.h_trigger - config.delta_h2 * frac


def _rise_from_height(config: FingerConfig, events: StrokeEvents, h: float) -> float:
    if h >= config.h_trigger:
        return events.rise_engage * (config.h_max - h) / config.delta_h1
    frac = (config.h_trigger - h) / config.delta_h2
    return events.rise_engage + frac * (events.rise_full - events.rise_engage)


def pressing_height(config: FingerConfig, theta1_deg: float, events: Optional[StrokeEvents] = None) -> float:
    """Actuator height h (mm) at a crank angle inside the stroke."""
    events = events or stroke(config)
    if not events.theta_start - 1e-9 <= theta1_deg <= events.theta_end + 1e-9:
        raise OutOfStroke(f"theta1={theta1_deg:g} deg outside the stroke "
                          f"[{events.theta_start:g}, {events.theta_end:g}]")
    rise = solve(config.hoeckens, theta1_deg).D.y - events.d_y_start
    return _height_from_rise(config, events, rise)


def theta_for_height(config: FingerConfig, h: float, events: Optional[StrokeEvents] = None) -> float:
    """Inverse of `pressing_height` on [theta_start, theta_full]."""
    if not config.h_min - 1e-9 <= h <= config.h_max + 1e-9:
        raise OutOfStroke(f"h={h:g} mm outside [{config.h_min:g}, {config.h_max:g}] mm")
    events = events or stroke(config)
    if h >= config.h_max:
        return events.theta_start
    if h <= config.h_min:
        return events.theta_full
    if h == config.h_trigger:
        return events.theta_engage
    target = events.d_y_start + _rise_from_height(config, events, h)
    return brentq(lambda t: solve(config.hoeckens, t).D.y - target,
                  events.theta_start, events.theta_full, xtol=1e-12)


def phalange_posture(config: FingerConfig, h: float) -> Tuple[Angle, MotionStage]:
    """Phalange tilt from vertical and motion stage at pressing height h."""
    events = stroke(config)
    theta = theta_for_height(config, h, events)
    posture = float(_posture_from_push(config, _push_deg(config, theta)))
    return Angle.from_degrees(posture), stage_for_height(config, h)


# --- full pose ---
@dataclass(frozen=True)
class FingerState:
    theta1: Angle
    B: Point2
    D: Point2
    D_prime: Point2
    G: Point2
    I_original: Point2
    I_pushed: Point2
    push: Angle
    posture: Angle
    stage: MotionStage


def finger_state(config: FingerConfig, theta1_deg: float, events: Optional[StrokeEvents] = None) -> FingerState:
    events = events or stroke(config)
    hk = solve(config.hoeckens, theta1_deg)
    G = circle_intersection(CirclePair(config.hoeckens.pivot_a, config.l_ag, hk.D, config.l_gd)).lower
    push = push_angle(G, hk.D)
    posture = float(_posture_from_push(config, push.degrees))
    aux = math.radians(config.aux_base_angle_deg)
    ae = Point2(config.hoeckens.l_ab * math.cos(aux), config.hoeckens.l_ab * math.sin(aux))
    ox, oy = _tip(config, hk.D.x, hk.D.y, 0.0)
    px, py = _tip(config, hk.D.x, hk.D.y, posture)
    return FingerState(
        theta1=hk.theta1,
        B=hk.B,
        D=hk.D,
        D_prime=hk.D + ae,
        G=G,
        I_original=Point2(float(ox), float(oy)),
        I_pushed=Point2(float(px), float(py)),
        push=push,
        posture=Angle.from_degrees(posture),
        stage=stage_for_theta(events, theta1_deg),
    )


@dataclass(frozen=True)
class Amplification:
    input_sweep: Angle
    output_sweep: Angle

    @property
    def ratio(self) -> float:
        return self.output_sweep.radians / self.input_sweep.radians


def rocker_amplification(config: FingerConfig, step_deg: float = 0.01) -> Amplification:
    """Rod BD rotation versus push-link rotation over the nominal stroke."""
    sweep = (config.stroke_start_deg, config.stroke_end_deg)
    input_deg = rod_sweep(config.hoeckens, sweep, step_deg)
    output = delta_theta_max(config.l_ag, config.l_gd, stroke_trace(config.hoeckens, sweep, step_deg))
    return Amplification(Angle.from_degrees(input_deg), output)


# --- trajectory ---
@dataclass(frozen=True)
class TrajectorySample:
    t: float
    theta1: Angle
    I: Point2
    v: Tuple[float, float]
    posture: Angle
    stage: MotionStage


TRAJECTORY_COLUMNS = ("t_s", "theta1_deg", "x_mm", "y_mm", "vx_mm_s", "vy_mm_s", "posture_deg", "stage")


@dataclass(frozen=True)
class Trajectory:
    samples: Tuple[TrajectorySample, ...]
    config_hash: str
    omega1_deg_s: float
    dt_s: float
    pushed: bool

    def __post_init__(self):
        times = [s.t for s in self.samples]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("trajectory times must be strictly increasing")
        order = [_STAGE_ORDER[s.stage] for s in self.samples]
        if any(b < a for a, b in zip(order, order[1:])):
            raise ValueError("stage sequence must not reverse within one press")

    def __len__(self) -> int:
        return len(self.samples)

    def column(self, name: str) -> np.ndarray:
        getters = {
            "t_s": lambda s: s.t,
            "theta1_deg": lambda s: s.theta1.degrees,
            "x_mm": lambda s: s.I.x,
            "y_mm": lambda s: s.I.y,
            "vx_mm_s": lambda s: s.v[0],
            "vy_mm_s": lambda s: s.v[1],
            "posture_deg": lambda s: s.posture.degrees,
        }
        return np.array([getters[name](s) for s in self.samples], dtype=float)

    def rows(self):
        for s in self.samples:
            yield (s.t, s.theta1.degrees, s.I.x, s.I.y, s.v[0], s.v[1], s.posture.degrees, s.stage.value)


def _time_grid(t_end: float, dt: float) -> np.ndarray:
    count = int(math.floor(t_end / dt + 1e-9)) + 1
    t = np.round(dt * np.arange(count), 9)
    if t_end - t[-1] > 1e-9:
        t = np.append(t, t_end)
    return t


def _first_failing_time(config: FingerConfig, t: np.ndarray, theta: np.ndarray) -> float:
    for tk, th in zip(t, theta):
        try:
            push_angles_deg(config, [th])
        except SolverError:
            return float(tk)
    return float(t[-1])


def simulate(config: FingerConfig, omega1: float, dt: float, pushed: bool = True) -> Trajectory:
    """Sample the fingertip at theta1 = theta_start + omega1 * t over the whole press.

    Positions are closed-form per sample; velocities are finite differences on the
    sample grid (second order inside, first order at the ends).
    """
    if not (omega1 > 0 and math.isfinite(omega1)):
        raise InvalidStep(f"invalid step: omega1 must be finite and > 0, got {omega1}")
    if not (dt > 0 and math.isfinite(dt)):
        raise InvalidStep(f"invalid step: dt must be finite and > 0, got {dt}")
    events = stroke(config)
    t = _time_grid((events.theta_end - events.theta_start) / omega1, dt)
    theta = events.theta_start + omega1 * t
    try:
        dx, dy, push = push_angles_deg(config, theta)
    except SolverError as exc:
        t_bad = _first_failing_time(config, t, theta)
        raise type(exc)(f"{exc.detail} (t={t_bad:.6f} s)") from exc

    posture = _posture_from_push(config, push) if pushed else np.zeros_like(push)
    x, y = _tip(config, dx, dy, posture)
    if t.size >= 2:
        vx = np.gradient(x, t)
        vy = np.gradient(y, t)
    else:
        vx = vy = np.zeros_like(x)

    samples = tuple(
        TrajectorySample(
            t=float(t[k]),
            theta1=Angle.from_degrees(float(theta[k])),
            I=Point2(float(x[k]), float(y[k])),
            v=(float(vx[k]), float(vy[k])),
            posture=Angle.from_degrees(float(posture[k])),
            stage=stage_for_theta(events, float(theta[k])),
        )
        for k in range(t.size)
    )
    logger.info(f"Simulated {len(samples)} samples over {t[-1]:.3f} s (pushed={pushed})")
    return Trajectory(samples, config.content_hash(), omega1, dt, pushed)


@dataclass(frozen=True)
class VelocityJump:
    t_s: float
    theta1_deg: float
    vx_before: float
    vx_after: float


def velocity_jump(trajectory: Trajectory) -> VelocityJump:
    """x-velocity step at the first sample past Q2 engagement."""
    stages = [s.stage for s in trajectory.samples]
    try:
        k = next(i for i, stage in enumerate(stages) if stage is not MotionStage.IDLE_VERTICAL)
    except StopIteration:
        raise InsufficientData("trajectory never leaves the vertical stage") from None
    vx = trajectory.column("vx_mm_s")
    n = len(trajectory)
    return VelocityJump(
        t_s=trajectory.samples[k].t,
        theta1_deg=trajectory.samples[k].theta1.degrees,
        vx_before=float(vx[max(k - 2, 0)]),
        vx_after=float(vx[min(k + 1, n - 1)]),
    )


def path_coincidence(config: FingerConfig, omega1: float = 10.0, dt: float = 0.01, tol: float = 1e-9) -> float:
    """Fingertip rise (mm) over which the pushed and original paths agree within `tol`."""
    pushed = simulate(config, omega1, dt, pushed=True)
    original = simulate(config, omega1, dt, pushed=False)
    px, py = pushed.column("x_mm"), pushed.column("y_mm")
    ox, oy = original.column("x_mm"), original.column("y_mm")
    apart = np.flatnonzero(np.hypot(px - ox, py - oy) > tol)
    last = (apart[0] - 1) if apart.size else px.size - 1
    if last < 0:
        return 0.0
    return float(oy[last] - oy[0])


def fingertip_path(config: FingerConfig, pushed: bool = True, step_deg: float = 0.1) -> Tuple[np.ndarray, np.ndarray]:
    """Fingertip samples over the whole press, ending exactly at the stroke end."""
    events = stroke(config)
    theta = angle_grid(events.theta_start, events.theta_end, step_deg)
    if events.theta_end - theta[-1] > 1e-9:
        theta = np.append(theta, events.theta_end)
    dx, dy, push = push_angles_deg(config, theta)
    posture = _posture_from_push(config, push) if pushed else np.zeros_like(push)
    return _tip(config, dx, dy, posture)


def workspace_area(config: FingerConfig, pushed: bool = True, step_deg: float = 0.1) -> float:
    """Shoelace area enclosed by the fingertip path, closed from its end back to its start."""
    x, y = fingertip_path(config, pushed, step_deg)
    distinct = np.unique(np.round(np.column_stack([x, y]), 9), axis=0)
    if distinct.shape[0] < 3:
        raise DegeneratePath(f"fingertip path has {distinct.shape[0]} distinct vertices")
    return shoelace_area_xy(x, y)
