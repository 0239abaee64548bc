"""Pydantic schemas for configuration ingestion and run manifests."""
import hashlib
import json
import math
from datetime import datetime
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from fingerkit.services.geometry import Point2

SCHEMA_VERSION = 1


class StrictModel(BaseModel):
    """Unknown keys and non-finite numbers are rejected everywhere in the configuration tree."""
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    def canonical_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))

    def content_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()


def _ordered_pair(value: Tuple[float, float], name: str) -> Tuple[float, float]:
    lo, hi = value
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise ValueError(f"{name} must be a finite (low, high) pair, got {value}")
    return value


# --- Hoeckens stage ---
class HoeckensParams(StrictModel):
    unit_length: float = Field(30.0, gt=0, description="unit length l (mm)")
    l_ab: Optional[float] = Field(None, gt=0, description="crank AB (mm), default l")
    l_ac: Optional[float] = Field(None, gt=0, description="base AC (mm), default 1.5 l")
    l_bd: Optional[float] = Field(None, gt=0, description="rod BD (mm), default 6 l")
    pivot_c_angle_deg: float = Field(0.0, description="direction of C seen from A")
    standard_proportions: bool = True

    @model_validator(mode="before")
    @classmethod
    def fill_proportional_lengths(cls, data: Any):
        if isinstance(data, dict):
            data = dict(data)
            unit = data.get("unit_length", 30.0)
            for key, factor in (("l_ab", 1.0), ("l_ac", 1.5), ("l_bd", 6.0)):
                if data.get(key) is None:
                    data[key] = factor * unit
        return data

    @model_validator(mode="after")
    def check_proportions(self):
        if self.standard_proportions:
            unit = self.unit_length
            for key, factor in (("l_ab", 1.0), ("l_ac", 1.5), ("l_bd", 6.0)):
                if not math.isclose(getattr(self, key), factor * unit, rel_tol=1e-12):
                    raise ValueError(f"{key} must equal {factor}·l when standard_proportions is set")
        return self

    @property
    def pivot_a(self) -> Point2:
        return Point2(0.0, 0.0)

    @property
    def pivot_c(self) -> Point2:
        angle = math.radians(self.pivot_c_angle_deg)
        return Point2(self.l_ac * math.cos(angle), self.l_ac * math.sin(angle))


# --- Composite finger (reference prototype defaults) ---
class FingerConfig(StrictModel):
    hoeckens: HoeckensParams = Field(default_factory=HoeckensParams)
    l_ag: float = Field(125.0, gt=0)
    l_gd: float = Field(50.0, gt=0)
    l_cd: float = Field(180.0, gt=0, description="rod length from the crank pin through C to D")
    stopper_q2_deg: float = Field(81.5, description="push angle at which Q2 meets the trigger surface")
    stopper_q3_deg: float = Field(60.0, gt=0, lt=180, description="apex angle of the stop block")
    delta_h1: float = Field(19.0, gt=0)
    delta_h2: float = Field(68.0, gt=0)
    delta_theta1_max_deg: float = Field(35.0, gt=0, description="posture sweep at full deployment")
    phalange_length: float = Field(55.0, ge=0)
    fingertip_offset: Optional[Tuple[float, float]] = Field(
        None, description="fingertip I relative to D in the phalange frame, default (0, -l_DI)")
    aux_base_angle_deg: float = 150.0
    h_max: float = 180.0
    stroke_start_deg: float = 68.51
    stroke_end_deg: float = 156.56

    @model_validator(mode="after")
    def check_consistency(self):
        if not self.delta_h1 < self.delta_h2:
            raise ValueError("delta_h1 must be smaller than delta_h2")
        if not math.isclose(self.l_cd, self.hoeckens.l_bd, rel_tol=1e-12):
            raise ValueError(f"l_cd ({self.l_cd}) must equal the Hoeckens rod length l_bd ({self.hoeckens.l_bd})")
        if not self.stroke_start_deg < self.stroke_end_deg:
            raise ValueError("stroke_start_deg must be smaller than stroke_end_deg")
        return self

    @property
    def tip_offset(self) -> Point2:
        if self.fingertip_offset is None:
            return Point2(0.0, -self.phalange_length)
        return Point2(*self.fingertip_offset)

    @property
    def h_trigger(self) -> float:
        return self.h_max - self.delta_h1

    @property
    def h_min(self) -> float:
        return self.h_max - self.delta_h1 - self.delta_h2


# --- Springs (force analysis only) ---
class SpringParams(StrictModel):
    k1: float = Field(50.0, ge=0, description="torsion stiffness (N·mm/rad)")
    k1_pretension_deg: float = Field(40.0, ge=0)
    k2: float = Field(0.5, ge=0, description="linear stiffness (N/mm)")
    k2_phalange_anchor: Tuple[float, float] = Field((0.0, -15.0), description="phalange frame, relative to D")
    k2_block_anchor: Tuple[float, float] = Field((-20.0, -15.0), description="parallel link 4, relative to D")

    @model_validator(mode="after")
    def check_anchors(self):
        if math.dist(self.k2_phalange_anchor, self.k2_block_anchor) <= 0:
            raise ValueError("k2 anchors must not coincide")
        return self


# --- Four-bar design scan ---
class ScanSpec(StrictModel):
    l_ag_range: Tuple[float, float] = (30.0, 180.0)
    l_dg_range: Tuple[float, float] = (30.0, 180.0)
    resolution: float = Field(1.0, gt=0)
    hoeckens: HoeckensParams = Field(default_factory=HoeckensParams)
    sweep_deg: Tuple[float, float] = (68.51, 156.56)
    trace_step_deg: float = Field(0.5, gt=0)
    workspace_margin: float = 45.0
    target_sweep_deg: float = 59.88
    reference_design: Tuple[float, float] = (125.0, 50.0)

    @field_validator("l_ag_range", "l_dg_range", "sweep_deg")
    @classmethod
    def check_pair(cls, value, info):
        return _ordered_pair(value, info.field_name)


# --- Per-command settings ---
class HoeckensPathSettings(StrictModel):
    range_deg: Tuple[float, float] = (0.0, 180.0)
    step_deg: float = 0.01
    deviation_budget: float = Field(0.0164, ge=0, description="in units of l")


class TrajectorySettings(StrictModel):
    omega1_deg_s: float = 10.0
    dt_s: float = 0.01
    pushed: bool = True


class ForceGrid(StrictModel):
    theta1_deg: List[float] = Field(default_factory=lambda: [80.0, 120.0])
    p_range_w: Tuple[float, float] = (0.5, 2.0)
    r_range_mm: Tuple[float, float] = (10.0, 55.0)
    grid: Tuple[int, int] = (16, 10)
    omega1_deg_s: float = Field(10.0, gt=0)

    @field_validator("p_range_w", "r_range_mm")
    @classmethod
    def check_pair(cls, value, info):
        return _ordered_pair(value, info.field_name)

    @field_validator("grid")
    @classmethod
    def check_grid(cls, value):
        if min(value) < 1:
            raise ValueError(f"grid needs at least one node per axis, got {value}")
        return value


class RunConfig(StrictModel):
    schema_version: int = SCHEMA_VERSION
    finger: FingerConfig = Field(default_factory=FingerConfig)
    springs: SpringParams = Field(default_factory=SpringParams)
    scan: ScanSpec = Field(default_factory=ScanSpec)
    hoeckens_path: HoeckensPathSettings = Field(default_factory=HoeckensPathSettings)
    trajectory: TrajectorySettings = Field(default_factory=TrajectorySettings)
    force: ForceGrid = Field(default_factory=ForceGrid)
    output_dir: str = "out"
    emit_svg: bool = False
    cache_dir: Optional[str] = None

    @field_validator("schema_version")
    @classmethod
    def check_schema_version(cls, value):
        if value != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {value} (expected {SCHEMA_VERSION})")
        return value


# --- Run manifest ---
class RunManifest(BaseModel):
    config_hash: str
    tool_version: str
    command: str
    argv: List[str] = Field(default_factory=list)
    input_paths: List[str] = Field(default_factory=list)
    output_paths: List[str] = Field(default_factory=list)
    wall_time_s: float
    cache_hit: Optional[bool] = None
    created_at: datetime
    config: Dict[str, Any]
