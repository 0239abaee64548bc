"""Quasi-static grasp force from the instantaneous power balance.

    P_press = k1 * dtheta1 * w1  +  k2 * dx1 * v_x  +  F_N * (v_D + r * w2)

with v_D = w1 f'(theta1), w2 = w1 g'(theta1), v_x = w1 h'(theta1). Power is taken in W and
converted to N*mm/s; lengths are mm, angles rad, forces N.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy import stats

from fingerkit.core.errors import ConfigurationError, NearSingularity, SolverError, TransmissionSingularity
from fingerkit.core.logging_config import logger
from fingerkit.schemas import FingerConfig, SpringParams
from fingerkit.services.mechanism import push_angles_deg

FD_STEP_RAD = 1e-4
EPS_FORCE = 1e-6          # mm/rad
W_TO_NMM_S = 1000.0


@dataclass(frozen=True)
class ForceQuery:
    theta1_deg: float
    r: float               # contact distance from D along the phalange (mm)
    p_press_w: float
    omega1_deg_s: float = 10.0

    def __post_init__(self):
        if not (self.omega1_deg_s > 0 and math.isfinite(self.omega1_deg_s)):
            raise ConfigurationError(f"omega1 must be finite and > 0, got {self.omega1_deg_s}")
        if not (math.isfinite(self.p_press_w) and math.isfinite(self.theta1_deg)):
            raise ConfigurationError(f"non-finite query ({self.theta1_deg}, {self.p_press_w})")
        if not (self.r >= 0 and math.isfinite(self.r)):
            raise ConfigurationError(f"contact distance r must be finite and >= 0, got {self.r}")

    @property
    def omega1_rad_s(self) -> float:
        return math.radians(self.omega1_deg_s)


@dataclass(frozen=True)
class KinematicDerivatives:
    f_prime: float    # |dD/dtheta1|, mm/rad
    g_prime: float    # d(outward push-link rotation)/dtheta1
    h_prime: float    # dx1/dtheta1, mm/rad


def _closure(config: FingerConfig, springs: SpringParams, theta_deg: np.ndarray):
    """D, outward push-link rotation g (rad) and k2 spring length x1 (mm) per crank angle."""
    dx, dy, push = push_angles_deg(config, theta_deg)
    posture = np.radians(np.clip(config.stopper_q2_deg - push, 0.0, config.delta_theta1_max_deg))
    return dx, dy, -np.radians(push), _spring_length(springs, posture)


def _spring_length(springs: SpringParams, posture_rad) -> np.ndarray:
    """k2 length between the phalange anchor (turning with the posture) and the link-4 anchor."""
    ax, ay = springs.k2_phalange_anchor
    bx, by = springs.k2_block_anchor
    c, s = np.cos(posture_rad), np.sin(posture_rad)
    return np.hypot(ax * c - ay * s - bx, ax * s + ay * c - by)


_STENCILS = {
    2: (np.array([-1.0, 1.0]), np.array([-0.5, 0.5])),
    4: (np.array([-2.0, -1.0, 1.0, 2.0]), np.array([1.0, -8.0, 8.0, -1.0]) / 12.0),
}


def derivatives(config: FingerConfig, theta1_deg: float, springs: SpringParams = None,
                order: int = 2, delta: float = FD_STEP_RAD) -> KinematicDerivatives:
    """Central finite differences of the closure maps at theta1 (deg)."""
    if order not in _STENCILS:
        raise ConfigurationError(f"stencil order must be 2 or 4, got {order}")
    springs = springs or SpringParams()
    offsets, weights = _STENCILS[order]
    thetas = theta1_deg + np.degrees(offsets * delta)
    try:
        dx, dy, g, x1 = _closure(config, springs, thetas)
    except SolverError as exc:
        raise NearSingularity(f"closure fails within {delta:g} rad of theta1={theta1_deg:g} deg: {exc.detail}") from exc
    return KinematicDerivatives(
        f_prime=float(math.hypot(weights @ dx, weights @ dy) / delta),
        g_prime=float(weights @ g / delta),
        h_prime=float(weights @ x1 / delta),
    )


@dataclass(frozen=True)
class SpringState:
    deflection_rad: float    # k1 twist from the unloaded spring
    x1: float
    delta_x1: float          # k2 extension from its length at zero posture


def spring_state(config: FingerConfig, springs: SpringParams, theta1_deg: float) -> SpringState:
    deflection = math.radians(springs.k1_pretension_deg + theta1_deg - config.stroke_start_deg)
    x1 = float(_closure(config, springs, np.array([theta1_deg]))[3][0])
    rest = float(_spring_length(springs, 0.0))
    return SpringState(deflection, x1, x1 - rest)


def _spring_torque(springs: SpringParams, state: SpringState, d: KinematicDerivatives) -> float:
    """Spring load referred to the crank (N*mm)."""
    return springs.k1 * state.deflection_rad + springs.k2 * state.delta_x1 * d.h_prime


def grasp_force(config: FingerConfig, springs: SpringParams, q: ForceQuery) -> float:
    """Normal grasp force F_N (N) at contact distance r."""
    if q.r > config.phalange_length + 1e-9:
        raise ConfigurationError(f"contact distance r={q.r:g} mm beyond the phalange ({config.phalange_length:g} mm)")
    d = derivatives(config, q.theta1_deg, springs)
    state = spring_state(config, springs, q.theta1_deg)
    denominator = d.f_prime + q.r * d.g_prime
    if abs(denominator) <= EPS_FORCE:
        raise TransmissionSingularity(
            f"no force transmission at theta1={q.theta1_deg:g} deg, r={q.r:g} mm (f'+r*g'={denominator:.3e})")
    drive = q.p_press_w * W_TO_NMM_S / q.omega1_rad_s
    return (drive - _spring_torque(springs, state, d)) / denominator


@dataclass(frozen=True)
class PowerTerms:
    p_k1: float     # N*mm/s
    p_k2: float
    p_di: float

    @property
    def total_w(self) -> float:
        return (self.p_k1 + self.p_k2 + self.p_di) / W_TO_NMM_S


def power_terms(config: FingerConfig, springs: SpringParams, q: ForceQuery, f_n: float) -> PowerTerms:
    """Rebuild the three power contributions from a force."""
    w1 = q.omega1_rad_s
    d = derivatives(config, q.theta1_deg, springs)
    state = spring_state(config, springs, q.theta1_deg)
    return PowerTerms(
        p_k1=springs.k1 * state.deflection_rad * w1,
        p_k2=springs.k2 * state.delta_x1 * (w1 * d.h_prime),
        p_di=f_n * (w1 * d.f_prime) + f_n * q.r * (w1 * d.g_prime),
    )


def grid_nodes(lo: float, hi: float, n: int) -> np.ndarray:
    """n nodes on [lo, hi]; a (2n - 1)-node grid contains these exactly."""
    if n == 1:
        return np.array([lo], dtype=float)
    return np.array([lo + (hi - lo) * (k / (n - 1)) for k in range(n)], dtype=float)


@dataclass(frozen=True)
class ForceSurface:
    theta1_deg: float
    p_values_w: np.ndarray
    r_values_mm: np.ndarray
    values: np.ma.MaskedArray    # axis 0 P_press, axis 1 r; masked cells are singular

    @property
    def singular(self) -> np.ndarray:
        return np.ma.getmaskarray(self.values)

    def value(self, p_press_w: float, r: float) -> float:
        i = int(np.flatnonzero(self.p_values_w == p_press_w)[0])
        j = int(np.flatnonzero(self.r_values_mm == r)[0])
        if self.singular[i, j]:
            raise TransmissionSingularity(f"singular cell at P={p_press_w:g} W, r={r:g} mm")
        return float(self.values[i, j])


def force_surface(config: FingerConfig, springs: SpringParams, theta1_deg: float,
                  p_range: Tuple[float, float], r_range: Tuple[float, float],
                  grid: Tuple[int, int], omega1_deg_s: float = 10.0) -> ForceSurface:
    p_values = grid_nodes(*p_range, grid[0])
    r_values = grid_nodes(*r_range, grid[1])
    if r_values.max() > config.phalange_length + 1e-9 or r_values.min() < 0:
        raise ConfigurationError(f"r range {r_range} outside [0, {config.phalange_length:g}] mm")
    d = derivatives(config, theta1_deg, springs)
    state = spring_state(config, springs, theta1_deg)
    w1 = math.radians(omega1_deg_s)

    denominator = d.f_prime + r_values * d.g_prime
    singular_r = np.abs(denominator) <= EPS_FORCE
    safe = np.where(singular_r, 1.0, denominator)
    drive = p_values * W_TO_NMM_S / w1
    raw = (drive[:, None] - _spring_torque(springs, state, d)) / safe[None, :]
    mask = np.broadcast_to(singular_r[None, :], raw.shape)
    logger.debug(f"Force surface at {theta1_deg:g} deg: {int(mask.sum())} singular cells")
    return ForceSurface(theta1_deg, p_values, r_values, np.ma.MaskedArray(raw, mask=mask.copy()))


def dominates(upper: ForceSurface, lower: ForceSurface) -> bool:
    """True when `upper` exceeds `lower` at every shared non-singular node."""
    if not (np.array_equal(upper.p_values_w, lower.p_values_w) and np.array_equal(upper.r_values_mm, lower.r_values_mm)):
        raise ConfigurationError("surfaces are sampled on different grids")
    valid = ~(upper.singular | lower.singular)
    return bool(np.all(upper.values.data[valid] > lower.values.data[valid]))


def shape_correlation(a: ForceSurface, b: ForceSurface) -> float:
    """Pearson correlation of the two surfaces over shared non-singular nodes."""
    valid = ~(a.singular | b.singular)
    if valid.sum() < 2:
        return float("nan")
    return float(stats.pearsonr(a.values.data[valid], b.values.data[valid])[0])


def surfaces(config: FingerConfig, springs: SpringParams, theta1_list: Sequence[float],
             p_range, r_range, grid, omega1_deg_s: float = 10.0):
    if not theta1_list:
        raise ConfigurationError("theta1 list is empty")
    if not all(math.isfinite(t) for t in theta1_list):
        raise ConfigurationError(f"theta1 list must be finite, got {list(theta1_list)}")
    return [force_surface(config, springs, t, p_range, r_range, grid, omega1_deg_s) for t in theta1_list]
