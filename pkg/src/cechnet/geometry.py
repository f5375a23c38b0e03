"""Predicates on disks in the plane.

Every predicate takes an explicit :class:`Tolerance`.  Distances within
``eps`` of a tie are resolved deterministically: pairwise overlap is strict
(a tangent pair does not overlap), while point membership inside the common
intersection test is closed (``<= radius + eps``).
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence


class GeometryError(ValueError):
    pass


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Disk:
    center: Point2
    radius: float

    def __post_init__(self):
        if not (math.isfinite(self.center.x) and math.isfinite(self.center.y)):
            raise GeometryError(f"non-finite center {self.center}")
        if not math.isfinite(self.radius) or self.radius < 0:
            raise GeometryError(f"invalid radius {self.radius}")
        if not isinstance(self.center, Point2):
            object.__setattr__(self, "center", Point2(*self.center))

    @classmethod
    def at(cls, x: float, y: float, r: float) -> "Disk":
        return cls(Point2(float(x), float(y)), float(r))

    def with_radius(self, r: float) -> "Disk":
        return Disk(self.center, float(r))


@dataclass(frozen=True)
class Tolerance:
    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise GeometryError(f"tolerance must be positive, got {self.eps}")

    @classmethod
    def for_disks(cls, disks: Iterable[Disk], rel: float = 1e-9) -> "Tolerance":
        """Default tolerance: ``rel`` times the smallest positive radius."""
        radii = [d.radius for d in disks if d.radius > 0]
        return cls(rel * min(radii)) if radii else cls(rel)


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    COLINEAR = "colinear"


def distance(p: Point2, q: Point2) -> float:
    return math.hypot(p.x - q.x, p.y - q.y)


def _tol(tol, disks):
    return tol if tol is not None else Tolerance.for_disks(disks)


def disks_overlap(a: Disk, b: Disk, tol: Tolerance | None = None) -> bool:
    """True iff the center distance is strictly below the sum of radii.

    Distances within ``tol.eps`` of the sum count as non-overlapping.
    """
    tol = _tol(tol, (a, b))
    return distance(a.center, b.center) < a.radius + b.radius - tol.eps


def circle_intersection_points(a: Disk, b: Disk, tol: Tolerance | None = None) -> list[Point2]:
    """Points where the two boundary circles meet (0, 1 or 2 of them)."""
    tol = _tol(tol, (a, b))
    d = distance(a.center, b.center)
    if d <= tol.eps and abs(a.radius - b.radius) <= tol.eps:
        raise GeometryError("degenerate: coincident circles")
    if d <= tol.eps:
        return []  # concentric, different radii
    ra, rb = a.radius, b.radius
    if d > ra + rb + tol.eps or d < abs(ra - rb) - tol.eps:
        return []
    ux = (b.center.x - a.center.x) / d
    uy = (b.center.y - a.center.y) / d
    # distance from a's center to the chord, along the center line
    along = (d * d + ra * ra - rb * rb) / (2 * d)
    if abs(d - (ra + rb)) <= tol.eps or abs(d - abs(ra - rb)) <= tol.eps:
        return [Point2(a.center.x + along * ux, a.center.y + along * uy)]
    h = math.sqrt(max(ra * ra - along * along, 0.0))
    mx = a.center.x + along * ux
    my = a.center.y + along * uy
    return [Point2(mx - h * uy, my + h * ux), Point2(mx + h * uy, my - h * ux)]


def contains_point(disk: Disk, p: Point2, tol: Tolerance) -> bool:
    return distance(disk.center, p) <= disk.radius + tol.eps


def _dedupe(disks: Sequence[Disk], tol: Tolerance) -> list[Disk]:
    out: list[Disk] = []
    for d in disks:
        if not any(distance(d.center, o.center) <= tol.eps and abs(d.radius - o.radius) <= tol.eps
                   for o in out):
            out.append(d)
    return out


def common_intersection_nonempty(disks: Sequence[Disk], tol: Tolerance | None = None) -> bool:
    """Whether all closed disks share a point.

    The intersection of disks is convex and compact.  If it is non-empty then
    either it is one whole disk (whose center then lies in every disk) or its
    boundary has a corner where two boundary circles cross.  Checking the
    centers and all pairwise crossing points is therefore exact.
    """
    if len(disks) == 0:
        raise GeometryError("empty family")
    tol = _tol(tol, disks)
    family = _dedupe(disks, tol)
    if len(family) == 1:
        return True

    def in_all(p: Point2, skip=()) -> bool:
        return all(contains_point(d, p, tol) for i, d in enumerate(family) if i not in skip)

    for d in family:
        if in_all(d.center):
            return True
    for i, j in itertools.combinations(range(len(family)), 2):
        for p in circle_intersection_points(family[i], family[j], tol):
            if in_all(p, skip=(i, j)):
                return True
    return False


def side_of_edge(p: Point2, a: Point2, b: Point2, tol: Tolerance) -> Side:
    """Which side of the directed line a->b the point p lies on."""
    length = distance(a, b)
    if length == 0.0:
        raise GeometryError("degenerate edge")
    cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)
    if abs(cross) <= tol.eps * length:
        return Side.COLINEAR
    return Side.LEFT if cross > 0 else Side.RIGHT
