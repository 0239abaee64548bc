"""Planar geometric primitives shared by the linkage solvers.

Conventions:
- lengths in mm, coordinates in the mechanism frame with fixed pivot A at the origin
- angles are stored in radians and exposed in degrees (`Angle.degrees`)
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Tuple

import numpy as np

from fingerkit.core.config import EPS_GEO
from fingerkit.core.errors import (
    CoincidentCenters,
    Contained,
    DegenerateSegment,
    Disjoint,
    TooFewVertices,
)


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def __add__(self, other: "Point2") -> "Point2":
        return Point2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point2") -> "Point2":
        return Point2(self.x - other.x, self.y - other.y)

    def scaled(self, k: float) -> "Point2":
        return Point2(self.x * k, self.y * k)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def as_tuple(self) -> Tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True, order=True)
class Angle:
    """Plane angle. `radians` is the stored value."""
    radians: float

    @classmethod
    def from_degrees(cls, degrees: float) -> "Angle":
        return cls(math.radians(degrees))

    @property
    def degrees(self) -> float:
        return math.degrees(self.radians)

    def normalized_signed(self) -> "Angle":
        """Same direction, value in (-pi, pi]."""
        value = math.remainder(self.radians, 2.0 * math.pi)
        if value <= -math.pi:
            value += 2.0 * math.pi
        return Angle(value)

    def normalized_positive(self) -> "Angle":
        """Same direction, value in [0, 2*pi)."""
        value = self.radians % (2.0 * math.pi)
        return Angle(0.0 if value == 2.0 * math.pi else value)


@dataclass(frozen=True)
class CirclePair:
    center1: Point2
    r1: float
    center2: Point2
    r2: float

    def __post_init__(self):
        if not (self.r1 > 0 and self.r2 > 0):
            raise ValueError(f"radii must be positive, got r1={self.r1}, r2={self.r2}")

    def swapped(self) -> "CirclePair":
        return CirclePair(self.center2, self.r2, self.center1, self.r1)


class IntersectionKind(str, Enum):
    TWO_POINTS = "two_points"
    TANGENT = "tangent"


@dataclass(frozen=True)
class IntersectionResult:
    kind: IntersectionKind
    points: Tuple[Point2, ...]

    @property
    def lower(self) -> Point2:
        """The assembly branch used by the four-bar: the point with the smaller y."""
        return self.points[0]


def circle_intersection(pair: CirclePair) -> IntersectionResult:
    """Intersect two circles.

    Two-point results are ordered by (y, x), so the first point is the lower branch.
    """
    dx = pair.center2.x - pair.center1.x
    dy = pair.center2.y - pair.center1.y
    d = math.hypot(dx, dy)
    if d < EPS_GEO:
        raise CoincidentCenters(f"circle centers coincide (d={d:.3e} mm)")
    if d > pair.r1 + pair.r2 + EPS_GEO:
        raise Disjoint(f"circles are disjoint: d={d:.9g} > r1+r2={pair.r1 + pair.r2:.9g}")
    if d < abs(pair.r1 - pair.r2) - EPS_GEO:
        raise Contained(f"one circle contains the other: d={d:.9g} < |r1-r2|={abs(pair.r1 - pair.r2):.9g}")

    a = (pair.r1 ** 2 - pair.r2 ** 2 + d ** 2) / (2.0 * d)
    h_sq = pair.r1 ** 2 - a ** 2
    ux, uy = dx / d, dy / d
    base = Point2(pair.center1.x + a * ux, pair.center1.y + a * uy)

    tangent = (abs(d - (pair.r1 + pair.r2)) <= EPS_GEO
               or abs(d - abs(pair.r1 - pair.r2)) <= EPS_GEO
               or h_sq <= 0.0)
    if tangent:
        return IntersectionResult(IntersectionKind.TANGENT, (base,))

    h = math.sqrt(h_sq)
    p1 = Point2(base.x + h * uy, base.y - h * ux)
    p2 = Point2(base.x - h * uy, base.y + h * ux)
    ordered = tuple(sorted((p1, p2), key=lambda p: (p.y, p.x)))
    return IntersectionResult(IntersectionKind.TWO_POINTS, ordered)


def lower_intersection_from_origin(r1, r2, dx, dy):
    """Vectorised lower-branch intersection of |P| = r1 and |P - D| = r2.

    Arguments broadcast against each other. Returns (gx, gy, d, status) where status is
    0 for a valid point, 1 when the circles are disjoint (d > r1 + r2) and 2 when one
    contains the other (d < |r1 - r2|). Invalid entries hold NaN coordinates.
    """
    r1, r2, dx, dy = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (r1, r2, dx, dy)))
    d = np.hypot(dx, dy)
    status = np.zeros(d.shape, dtype=np.int8)
    status[d > r1 + r2 + EPS_GEO] = 1
    status[(status == 0) & (d < np.abs(r1 - r2) - EPS_GEO)] = 2
    ok = status == 0

    with np.errstate(invalid="ignore", divide="ignore"):
        a = (r1 ** 2 - r2 ** 2 + d ** 2) / (2.0 * d)
        h = np.sqrt(np.clip(r1 ** 2 - a ** 2, 0.0, None))
        ux, uy = dx / d, dy / d
        bx, by = a * ux, a * uy
        x1, y1 = bx + h * uy, by - h * ux
        x2, y2 = bx - h * uy, by + h * ux
    first = (y1 < y2) | ((y1 == y2) & (x1 <= x2))
    gx = np.where(ok, np.where(first, x1, x2), np.nan)
    gy = np.where(ok, np.where(first, y1, y2), np.nan)
    return gx, gy, d, status


def push_angle(G: Point2, D: Point2) -> Angle:
    """Orientation of link DG measured from +y toward +x, in (-180°, 180°]."""
    dx = D.x - G.x
    dy = D.y - G.y
    if math.hypot(dx, dy) < EPS_GEO:
        raise DegenerateSegment(f"G and D coincide at ({G.x:.9g}, {G.y:.9g})")
    return Angle(math.atan2(dx, dy)).normalized_signed()


def push_angles(gx, gy, dx, dy) -> np.ndarray:
    """Vectorised `push_angle` in radians."""
    return np.arctan2(np.asarray(dx) - np.asarray(gx), np.asarray(dy) - np.asarray(gy))


def shoelace_area(polygon: Sequence[Point2]) -> float:
    """Area of a simple polygon, closed implicitly from the last vertex to the first."""
    if len(polygon) < 3:
        raise TooFewVertices(f"polygon needs at least 3 vertices, got {len(polygon)}")
    xy = np.array([(p.x, p.y) for p in polygon], dtype=float)
    return shoelace_area_xy(xy[:, 0], xy[:, 1])


def shoelace_area_xy(x: np.ndarray, y: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3:
        raise TooFewVertices(f"polygon needs at least 3 vertices, got {x.size}")
    # shift to the first vertex to keep the cross products small
    x = x - x[0]
    y = y - y[0]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)))


def total_least_squares_line(x: np.ndarray, y: np.ndarray) -> Tuple[Point2, Point2]:
    """Best-fit line by perpendicular distance: (centroid, unit direction)."""
    pts = np.column_stack([np.asarray(x, dtype=float), np.asarray(y, dtype=float)])
    centroid = pts.mean(axis=0)
    _, _, vt = np.linalg.svd(pts - centroid, full_matrices=False)
    direction = vt[0]
    # fixed sign so the direction is reproducible
    if direction[1] < 0 or (direction[1] == 0 and direction[0] < 0):
        direction = -direction
    return Point2(float(centroid[0]), float(centroid[1])), Point2(float(direction[0]), float(direction[1]))


def perpendicular_offsets(x: np.ndarray, y: np.ndarray, point: Point2, direction: Point2) -> np.ndarray:
    """Signed perpendicular distance of each sample from a line."""
    return (np.asarray(x) - point.x) * direction.y - (np.asarray(y) - point.y) * direction.x
