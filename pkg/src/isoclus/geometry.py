"""Exact-measure planar geometry for regions bounded by segments and circular arcs.

Areas come from Green's theorem (circular-segment contributions included in
closed form), perimeters from exact edge lengths.  Boolean operations are
restricted to purely polygonal regions; none of the constructions in this
package ever needs to clip an arc against an arc.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, UnsupportedOperationError
from .reports import BoundReport

# Absolute snap used when regions are compared edge-by-edge; well below every
# acceptance tolerance in the package.
EDGE_SNAP = 1e-9
ARC_RTOL = 1e-12


# ---------------------------------------------------------------------------
# points and rigid motions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite coordinates ({self.x}, {self.y})")

    def __add__(self, other: "Point2") -> "Point2":
        return Point2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point2") -> "Point2":
        return Point2(self.x - other.x, self.y - other.y)

    def scaled(self, factor: float) -> "Point2":
        return Point2(self.x * factor, self.y * factor)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def distance(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


ORIGIN = Point2(0.0, 0.0)


def cross(a: Point2, b: Point2) -> float:
    return a.x * b.y - a.y * b.x


def dot(a: Point2, b: Point2) -> float:
    return a.x * b.x + a.y * b.y


@dataclass(frozen=True)
class RigidMotion:
    """Rotation by ``theta`` about the origin followed by a translation."""

    theta: float
    translation: Point2 = ORIGIN

    def apply(self, p: Point2) -> Point2:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return Point2(
            c * p.x - s * p.y + self.translation.x,
            s * p.x + c * p.y + self.translation.y,
        )

    def compose(self, inner: "RigidMotion") -> "RigidMotion":
        """Motion equal to applying ``inner`` first, then ``self``."""
        moved = self.apply(inner.translation)
        return RigidMotion(self.theta + inner.theta, moved)

    def inverse(self) -> "RigidMotion":
        c, s = math.cos(self.theta), math.sin(self.theta)
        tx, ty = -self.translation.x, -self.translation.y
        return RigidMotion(-self.theta, Point2(c * tx + s * ty, -s * tx + c * ty))

    @staticmethod
    def identity() -> "RigidMotion":
        return RigidMotion(0.0, ORIGIN)


# ---------------------------------------------------------------------------
# edges
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    start: Point2
    end: Point2

    @property
    def length(self) -> float:
        return self.start.distance(self.end)

    def green_area(self) -> float:
        return 0.5 * cross(self.start, self.end)

    def reversed(self) -> "Segment":
        return Segment(self.end, self.start)

    def transformed(self, m: RigidMotion) -> "Segment":
        return Segment(m.apply(self.start), m.apply(self.end))

    def scaled(self, factor: float) -> "Segment":
        return Segment(self.start.scaled(factor), self.end.scaled(factor))

    def point_at(self, t: float) -> Point2:
        return Point2(
            self.start.x + t * (self.end.x - self.start.x),
            self.start.y + t * (self.end.y - self.start.y),
        )


@dataclass(frozen=True)
class Arc:
    """Circular arc from ``start`` to ``end`` around ``center``.

    ``sweep`` is the signed subtended angle in radians (positive =
    counterclockwise); |sweep| must stay below 2*pi, so a full circle is two
    half-circle arcs.
    """

    start: Point2
    end: Point2
    center: Point2
    sweep: float

    def __post_init__(self):
        r0 = self.start.distance(self.center)
        r1 = self.end.distance(self.center)
        if r0 <= 0.0 or abs(r0 - r1) > ARC_RTOL * max(r0, r1, 1.0) * 1e3:
            # 1e3 slack: endpoints produced by rotations carry a few ulp more
            # error than the 1e-12 target at unit scale.
            if abs(r0 - r1) > 1e-9 * max(r0, r1, 1.0):
                raise GeometryError(
                    f"arc endpoints not equidistant from center: {r0} vs {r1}"
                )
        if not 0.0 < abs(self.sweep) < 2.0 * math.pi:
            raise GeometryError(f"arc sweep must lie in (0, 2*pi), got {self.sweep}")
        a = self.start_angle
        q = Point2(
            self.center.x + r0 * math.cos(a + self.sweep),
            self.center.y + r0 * math.sin(a + self.sweep),
        )
        if q.distance(self.end) > 1e-9 * max(1.0, r0):
            raise GeometryError("arc sweep inconsistent with endpoints")

    @property
    def radius(self) -> float:
        return self.start.distance(self.center)

    @property
    def start_angle(self) -> float:
        return math.atan2(self.start.y - self.center.y, self.start.x - self.center.x)

    @property
    def length(self) -> float:
        return abs(self.sweep) * self.radius

    def green_area(self) -> float:
        r = self.radius
        a = self.start_angle
        b = a + self.sweep
        cx, cy = self.center.x, self.center.y
        return 0.5 * (
            r * r * self.sweep
            + r * (cx * (math.sin(b) - math.sin(a)) - cy * (math.cos(b) - math.cos(a)))
        )

    def reversed(self) -> "Arc":
        return Arc(self.end, self.start, self.center, -self.sweep)

    def transformed(self, m: RigidMotion) -> "Arc":
        return Arc(m.apply(self.start), m.apply(self.end), m.apply(self.center), self.sweep)

    def scaled(self, factor: float) -> "Arc":
        return Arc(
            self.start.scaled(factor),
            self.end.scaled(factor),
            self.center.scaled(factor),
            self.sweep,
        )

    def point_at(self, t: float) -> Point2:
        a = self.start_angle + t * self.sweep
        r = self.radius
        return Point2(self.center.x + r * math.cos(a), self.center.y + r * math.sin(a))


Edge = Segment | Arc


# ---------------------------------------------------------------------------
# regions
# ---------------------------------------------------------------------------


class Region:
    """Measurable planar set bounded by closed loops of segments and arcs.

    Outer loops run counterclockwise (positive signed area), holes clockwise;
    area is the plain sum of signed loop areas, so disjoint outer loops add and
    holes subtract.  Loops are kept as given, no repair is attempted.
    """

    __slots__ = ("loops", "_area", "_perimeter")

    def __init__(self, loops, validate: bool = True):
        self.loops: tuple[tuple[Edge, ...], ...] = tuple(tuple(lp) for lp in loops)
        if validate:
            self._validate()
        self._area = None
        self._perimeter = None

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def from_points(points, validate: bool = True) -> "Region":
        """Single polygonal loop through ``points`` (closed implicitly)."""
        pts = [p if isinstance(p, Point2) else Point2(*p) for p in points]
        if len(pts) < 3:
            raise GeometryError("polygon needs at least 3 vertices")
        edges = [Segment(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))]
        return Region([edges], validate=validate)

    @staticmethod
    def empty() -> "Region":
        return Region([], validate=False)

    # -- validation ----------------------------------------------------------

    def _validate(self):
        for li, loop in enumerate(self.loops):
            if not loop:
                raise GeometryError(f"loop {li} is empty")
            scale = max(1.0, *(max(abs(e.start.x), abs(e.start.y)) for e in loop))
            for k, edge in enumerate(loop):
                nxt = loop[(k + 1) % len(loop)]
                if edge.end.distance(nxt.start) > 1e-9 * scale:
                    raise GeometryError(
                        f"loop {li} not closed between edge {k} and {k + 1}"
                    )
                if isinstance(edge, Segment) and edge.length == 0.0:
                    raise GeometryError(f"loop {li} edge {k} has zero length")

    # -- measures --------------------------------------------------------------

    @property
    def area(self) -> float:
        if self._area is None:
            self._area = sum(self.loop_signed_area(i) for i in range(len(self.loops)))
        return self._area

    @property
    def perimeter(self) -> float:
        if self._perimeter is None:
            self._perimeter = sum(e.length for lp in self.loops for e in lp)
        return self._perimeter

    def loop_signed_area(self, i: int) -> float:
        return sum(e.green_area() for e in self.loops[i])

    @property
    def is_empty(self) -> bool:
        return not self.loops

    @property
    def is_polygonal(self) -> bool:
        return all(isinstance(e, Segment) for lp in self.loops for e in lp)

    def vertices(self):
        """Edge start points, loop by loop."""
        return [e.start for lp in self.loops for e in lp]

    def bounds(self) -> tuple[float, float, float, float]:
        if self.is_empty:
            raise GeometryError("empty region has no bounds")
        xs, ys = [], []
        for lp in self.loops:
            for e in lp:
                xs.extend((e.start.x, e.end.x))
                ys.extend((e.start.y, e.end.y))
                if isinstance(e, Arc):
                    # axis-extremal points of the arc, if inside its span
                    a0 = e.start_angle
                    r = e.radius
                    for quad in range(-8, 9):
                        ang = quad * math.pi / 2.0
                        t = (ang - a0) / e.sweep
                        if 0.0 < t < 1.0:
                            xs.append(e.center.x + r * math.cos(ang))
                            ys.append(e.center.y + r * math.sin(ang))
        return (min(xs), min(ys), max(xs), max(ys))

    # -- transforms ------------------------------------------------------------

    def transformed(self, m: RigidMotion) -> "Region":
        return Region(
            [[e.transformed(m) for e in lp] for lp in self.loops], validate=False
        )

    def translated(self, v: Point2) -> "Region":
        return self.transformed(RigidMotion(0.0, v))

    def scaled(self, factor: float) -> "Region":
        if factor <= 0:
            raise GeometryError("scale factor must be positive")
        return Region([[e.scaled(factor) for e in lp] for lp in self.loops], validate=False)

    # -- misc --------------------------------------------------------------

    def polyline_loops(self, max_seg: float | None = None):
        """Loops flattened to vertex arrays (arcs subdivided to ``max_seg``)."""
        out = []
        for lp in self.loops:
            pts: list[tuple[float, float]] = []
            for e in lp:
                if isinstance(e, Segment):
                    pts.append(e.start.as_tuple())
                else:
                    n = 32 if max_seg is None else max(2, math.ceil(e.length / max_seg))
                    for k in range(n):
                        pts.append(e.point_at(k / n).as_tuple())
            out.append(np.asarray(pts))
        return out

    def __repr__(self) -> str:  # pragma: no cover
        return f"Region(loops={len(self.loops)}, area={self.area:.6g})"


# ---------------------------------------------------------------------------
# shape factories
# ---------------------------------------------------------------------------


def square(side: float, center: Point2 = ORIGIN) -> Region:
    h = side / 2.0
    return Region.from_points(
        [
            Point2(center.x - h, center.y - h),
            Point2(center.x + h, center.y - h),
            Point2(center.x + h, center.y + h),
            Point2(center.x - h, center.y + h),
        ]
    )


def rectangle(width: float, height: float, center: Point2 = ORIGIN) -> Region:
    w, h = width / 2.0, height / 2.0
    return Region.from_points(
        [
            Point2(center.x - w, center.y - h),
            Point2(center.x + w, center.y - h),
            Point2(center.x + w, center.y + h),
            Point2(center.x - w, center.y + h),
        ]
    )


def regular_polygon(n: int, side: float, center: Point2 = ORIGIN, phase: float = 0.0) -> Region:
    """Regular n-gon with given side length; ``phase`` rotates the vertex ring."""
    if n < 3:
        raise GeometryError("need n >= 3")
    circum = side / (2.0 * math.sin(math.pi / n))
    pts = [
        Point2(
            center.x + circum * math.cos(phase + 2.0 * math.pi * k / n),
            center.y + circum * math.sin(phase + 2.0 * math.pi * k / n),
        )
        for k in range(n)
    ]
    return Region.from_points(pts)


def disk(radius: float, center: Point2 = ORIGIN) -> Region:
    east = Point2(center.x + radius, center.y)
    west = Point2(center.x - radius, center.y)
    return Region(
        [[Arc(east, west, center, math.pi), Arc(west, east, center, math.pi)]]
    )


def half_disk_over_unit_chord() -> Region:
    """Half-disk with unit diameter: chord on the x-axis, bulge above."""
    a, b = Point2(0.0, 0.0), Point2(1.0, 0.0)
    return Region([[Segment(a, b), Arc(b, a, Point2(0.5, 0.0), math.pi)]])


def frame(inner_side: float, outer_side: float, center: Point2 = ORIGIN) -> Region:
    """Square annulus between two concentric axis-aligned squares."""
    if not 0.0 < inner_side < outer_side:
        raise GeometryError("need 0 < inner_side < outer_side")
    outer = square(outer_side, center).loops[0]
    hi = inner_side / 2.0
    hole_pts = [
        Point2(center.x - hi, center.y - hi),
        Point2(center.x - hi, center.y + hi),
        Point2(center.x + hi, center.y + hi),
        Point2(center.x + hi, center.y - hi),
    ]  # clockwise
    hole = [Segment(hole_pts[i], hole_pts[(i + 1) % 4]) for i in range(4)]
    return Region([outer, hole])


# ---------------------------------------------------------------------------
# spec operations: measures
# ---------------------------------------------------------------------------


def area(r: Region) -> float:
    return r.area


def perimeter(r: Region) -> float:
    return r.perimeter


def diameter(r: Region) -> float:
    """Max pairwise distance over vertices (plus arc extremal samples)."""
    if r.is_empty:
        raise GeometryError("empty region has no diameter")
    pts = [v.as_tuple() for v in r.vertices()]
    for lp in r.loops:
        for e in lp:
            if isinstance(e, Arc):
                n = max(8, math.ceil(abs(e.sweep) / 1e-3))
                n = min(n, 8192)
                pts.extend(e.point_at(k / n).as_tuple() for k in range(1, n))
    arr = np.asarray(pts)
    if len(arr) > 400:
        from scipy.spatial import ConvexHull

        arr = arr[ConvexHull(arr).vertices]
    d2 = ((arr[:, None, :] - arr[None, :, :]) ** 2).sum(axis=2)
    return math.sqrt(float(d2.max()))


def point_in_region(r: Region, p: Point2) -> bool:
    """Crossing-number point location, arcs handled exactly."""
    crossings = 0
    for lp in r.loops:
        for e in lp:
            if isinstance(e, Segment):
                y0, y1 = e.start.y, e.end.y
                if (y0 > p.y) == (y1 > p.y):
                    continue
                t = (p.y - y0) / (y1 - y0)
                x = e.start.x + t * (e.end.x - e.start.x)
                if x > p.x:
                    crossings += 1
            else:
                r0 = e.radius
                dy = p.y - e.center.y
                if abs(dy) >= r0:
                    continue
                dx = math.sqrt(r0 * r0 - dy * dy)
                a0 = e.start_angle
                for xc in (e.center.x + dx, e.center.x - dx):
                    if xc <= p.x:
                        continue
                    ang = math.atan2(dy, xc - e.center.x)
                    off = (ang - a0) % (2.0 * math.pi)
                    if e.sweep > 0:
                        inside = off < e.sweep
                    else:
                        inside = (2.0 * math.pi - off) % (2.0 * math.pi) < -e.sweep
                    if inside:
                        crossings += 1
    return crossings % 2 == 1


# ---------------------------------------------------------------------------
# Hausdorff distance between boundary chains
# ---------------------------------------------------------------------------


def _chain_edges(obj) -> list[Edge]:
    if isinstance(obj, Region):
        return [e for lp in obj.loops for e in lp]
    edges = list(obj)
    if not edges:
        raise GeometryError("empty boundary chain")
    return edges


def _sample_chain(edges: list[Edge], spacing: float) -> np.ndarray:
    pts = []
    for e in edges:
        n = max(2, math.ceil(e.length / spacing))
        for k in range(n + 1):
            pts.append(e.point_at(k / n).as_tuple())
    return np.asarray(pts)


def _min_dist_to_edges(points: np.ndarray, edges: list[Edge]) -> np.ndarray:
    best = np.full(len(points), np.inf)
    segs = [e for e in edges if isinstance(e, Segment)]
    if segs:
        a = np.asarray([s.start.as_tuple() for s in segs])
        b = np.asarray([s.end.as_tuple() for s in segs])
        d = b - a
        denom = (d * d).sum(axis=1)
        denom[denom == 0.0] = 1.0
        # (np, ns) projection parameters, clamped
        w = points[:, None, :] - a[None, :, :]
        t = np.clip((w * d[None, :, :]).sum(axis=2) / denom[None, :], 0.0, 1.0)
        proj = a[None, :, :] + t[:, :, None] * d[None, :, :]
        dist = np.sqrt(((points[:, None, :] - proj) ** 2).sum(axis=2))
        best = np.minimum(best, dist.min(axis=1))
    for e in edges:
        if isinstance(e, Segment):
            continue
        c = np.asarray(e.center.as_tuple())
        v = points - c
        rho = np.sqrt((v * v).sum(axis=1))
        ang = np.arctan2(v[:, 1], v[:, 0])
        off = np.mod(ang - e.start_angle, 2.0 * math.pi)
        if e.sweep > 0:
            on_arc = off <= e.sweep
        else:
            on_arc = (2.0 * math.pi - off) % (2.0 * math.pi) <= -e.sweep
        d_circle = np.abs(rho - e.radius)
        d_ends = np.minimum(
            np.sqrt(((points - np.asarray(e.start.as_tuple())) ** 2).sum(axis=1)),
            np.sqrt(((points - np.asarray(e.end.as_tuple())) ** 2).sum(axis=1)),
        )
        best = np.minimum(best, np.where(on_arc, d_circle, d_ends))
    return best


def hausdorff_distance(a, b, relative_spacing: float = 1e-4) -> float:
    """Two-sided Hausdorff distance between boundary chains.

    The sup side is discretized by sampling at ``relative_spacing`` of the
    total chain length; the inf side uses exact point-to-edge projection.
    """
    ea, eb = _chain_edges(a), _chain_edges(b)
    la = sum(e.length for e in ea)
    lb = sum(e.length for e in eb)
    if la <= 0.0 or lb <= 0.0:
        raise GeometryError("boundary chains must have positive length")
    pa = _sample_chain(ea, relative_spacing * la)
    pb = _sample_chain(eb, relative_spacing * lb)
    d_ab = _min_dist_to_edges(pa, eb).max()
    d_ba = _min_dist_to_edges(pb, ea).max()
    return float(max(d_ab, d_ba))


# ---------------------------------------------------------------------------
# classic planar inequalities
# ---------------------------------------------------------------------------


def classic_inequality_checks(r: Region) -> list[BoundReport]:
    """Isoperimetric, Cheeger-type and perimeter-diameter checks for a region.

    The perimeter-diameter report is emitted only for single-loop regions,
    where indecomposability is structural.
    """
    a = r.area
    p = r.perimeter
    if a <= 0.0:
        raise GeometryError("region must have positive area")
    reports = [
        BoundReport("isoperimetric", p, 2.0 * math.sqrt(math.pi * a)),
        BoundReport("cheeger-ratio", p / a, 2.0 * math.sqrt(math.pi) / math.sqrt(a)),
    ]
    if len(r.loops) == 1:
        reports.append(BoundReport("perimeter-diameter", p, 2.0 * diameter(r)))
    return reports


# ---------------------------------------------------------------------------
# boolean operations (polygonal only, backed by shapely)
# ---------------------------------------------------------------------------

_BOOL_OPS = ("intersect", "union", "difference", "symmetric-difference")


def boolean(a: Region, b: Region, op: str) -> Region:
    """Set operation on purely polygonal regions."""
    from .errors import DomainError

    if op not in _BOOL_OPS:
        raise DomainError(f"unknown boolean op {op!r}; expected one of {_BOOL_OPS}")
    if not (a.is_polygonal and b.is_polygonal):
        raise UnsupportedOperationError("boolean operations require polygonal regions")
    from . import shapely_bridge as sb

    ga, gb = sb.to_shapely(a), sb.to_shapely(b)
    if op == "intersect":
        out = ga.intersection(gb)
    elif op == "union":
        out = ga.union(gb)
    elif op == "difference":
        out = ga.difference(gb)
    else:
        out = ga.symmetric_difference(gb)
    return sb.from_shapely(out)
