"""Conversions between Regions and shapely geometries, plus the exact
circle-vs-polygon primitives used by the surgery construction.

Only polygonal regions cross this bridge; arc-bounded regions are produced on
the way back out (splitting a polygon by a circle) with exact measures.
"""

from __future__ import annotations

import math

import numpy as np
import shapely
from shapely.geometry import (
    GeometryCollection,
    LineString,
    MultiPolygon,
    Point,
    Polygon,
)
from shapely.ops import unary_union

from .errors import GeometryError, UnsupportedOperationError
from .geometry import Arc, Point2, Region, Segment

_MIN_RING_AREA = 1e-15


def to_shapely(r: Region) -> Polygon | MultiPolygon:
    """Polygonal Region -> shapely polygon; orientation decides shell vs hole."""
    if not r.is_polygonal:
        raise UnsupportedOperationError("arc-bounded region cannot convert to shapely")
    shells, holes = [], []
    for i, loop in enumerate(r.loops):
        pts = [e.start.as_tuple() for e in loop]
        if r.loop_signed_area(i) >= 0:
            shells.append(pts)
        else:
            holes.append(pts)
    polys = []
    for sh in shells:
        ring = Polygon(sh)
        inner = [h for h in holes if ring.contains(Point(_ring_sample(h)))]
        polys.append(Polygon(sh, inner))
    if not polys:
        return Polygon()
    if len(polys) == 1:
        return polys[0]
    return MultiPolygon(polys)


def _ring_sample(pts) -> tuple[float, float]:
    # representative interior-ish point of a ring: centroid of vertices
    xs = sum(p[0] for p in pts) / len(pts)
    ys = sum(p[1] for p in pts) / len(pts)
    return (xs, ys)


def _ring_to_edges(coords, want_ccw: bool):
    pts = [Point2(float(x), float(y)) for x, y in coords[:-1]]
    # drop exactly repeated consecutive points
    clean = [pts[0]]
    for p in pts[1:]:
        if p.distance(clean[-1]) > 0.0:
            clean.append(p)
    if clean[0].distance(clean[-1]) == 0.0:
        clean.pop()
    if len(clean) < 3:
        return None
    signed = 0.0
    for i in range(len(clean)):
        a, b = clean[i], clean[(i + 1) % len(clean)]
        signed += 0.5 * (a.x * b.y - a.y * b.x)
    if (signed > 0) != want_ccw:
        clean.reverse()
    return [Segment(clean[i], clean[(i + 1) % len(clean)]) for i in range(len(clean))]


def from_shapely(geom) -> Region:
    """Shapely polygonal geometry -> Region (degenerate pieces dropped)."""
    loops = []

    def add_polygon(poly: Polygon):
        if poly.is_empty or poly.area <= _MIN_RING_AREA:
            return
        ext = _ring_to_edges(list(poly.exterior.coords), want_ccw=True)
        if ext is None:
            return
        loops.append(ext)
        for hole in poly.interiors:
            h = _ring_to_edges(list(hole.coords), want_ccw=False)
            if h is not None:
                loops.append(h)

    if isinstance(geom, Polygon):
        add_polygon(geom)
    elif isinstance(geom, (MultiPolygon, GeometryCollection)):
        for g in geom.geoms:
            if isinstance(g, Polygon):
                add_polygon(g)
    elif geom.is_empty:
        pass
    else:
        raise GeometryError(f"cannot convert {geom.geom_type} to a Region")
    return Region(loops, validate=False)


def union_area(regions) -> float:
    return unary_union([to_shapely(r) for r in regions]).area


def symmetric_difference_area(a: Region, b: Region) -> float:
    return to_shapely(a).symmetric_difference(to_shapely(b)).area


def intersection_area(a: Region, b: Region) -> float:
    return to_shapely(a).intersection(to_shapely(b)).area


def segment_length_inside(p: Point2, q: Point2, geom) -> float:
    """Exact length of the part of segment pq inside a shapely polygon."""
    return LineString([p.as_tuple(), q.as_tuple()]).intersection(geom).length


# ---------------------------------------------------------------------------
# exact polygon-vs-disk area (no geometry construction)
# ---------------------------------------------------------------------------


def area_in_disk(geom, center: Point2, radius: float) -> float:
    """|geom ∩ D(center, radius)| for polygonal shapely geometry, exactly.

    Per-edge Green decomposition: each directed edge contributes the signed
    area of the circular-clipped triangle (center, p, q); segments inside the
    disk contribute straight triangles, parts outside contribute circular
    sectors.
    """
    total = 0.0
    for ring, sign in _iter_rings(geom):
        total += sign * abs(_ring_area_in_disk(ring, center, radius))
    return total


def _iter_rings(geom):
    polys = []
    if isinstance(geom, Polygon):
        polys = [geom]
    elif isinstance(geom, (MultiPolygon, GeometryCollection)):
        polys = [g for g in geom.geoms if isinstance(g, Polygon)]
    for poly in polys:
        if poly.is_empty:
            continue
        yield np.asarray(poly.exterior.coords), 1.0
        for hole in poly.interiors:
            yield np.asarray(hole.coords), -1.0


def _ring_area_in_disk(coords: np.ndarray, center: Point2, radius: float) -> float:
    cx, cy = center.x, center.y
    pts = coords[:, :2] - (cx, cy)
    r2 = radius * radius
    total = 0.0
    for i in range(len(pts) - 1):
        px, py = pts[i]
        qx, qy = pts[i + 1]
        dx, dy = qx - px, qy - py
        seg2 = dx * dx + dy * dy
        if seg2 == 0.0:
            continue
        # circle intersections with the segment parameterized on [0, 1]
        b = px * dx + py * dy
        c = px * px + py * py - r2
        disc = b * b - seg2 * c
        ts = [0.0]
        if disc > 0.0:
            sq = math.sqrt(disc)
            for t in ((-b - sq) / seg2, (-b + sq) / seg2):
                if 0.0 < t < 1.0:
                    ts.append(t)
        ts.append(1.0)
        ts.sort()
        for k in range(len(ts) - 1):
            t0, t1 = ts[k], ts[k + 1]
            if t1 - t0 <= 0.0:
                continue
            mx = px + 0.5 * (t0 + t1) * dx
            my = py + 0.5 * (t0 + t1) * dy
            x0, y0 = px + t0 * dx, py + t0 * dy
            x1, y1 = px + t1 * dx, py + t1 * dy
            if mx * mx + my * my <= r2:
                total += 0.5 * (x0 * y1 - y0 * x1)
            else:
                a0 = math.atan2(y0, x0)
                a1 = math.atan2(y1, x1)
                dang = a1 - a0
                while dang > math.pi:
                    dang -= 2.0 * math.pi
                while dang < -math.pi:
                    dang += 2.0 * math.pi
                total += 0.5 * r2 * dang
    return total


# ---------------------------------------------------------------------------
# exact split of a polygonal region by a circle
# ---------------------------------------------------------------------------


def split_by_circle(region: Region, center: Point2, radius: float) -> tuple[Region, Region]:
    """Split a Region into (inside-disk, outside-disk) parts along a circle.

    Boundary chains are reconnected along true circular arcs, so both outputs
    carry exact areas and perimeters.  Holes are supported; chains from all
    rings share one angular assembly around the splitting circle.  Arc edges
    are allowed in the input as long as they do not cross the splitting
    circle (successive concentric cuts never do).
    """
    inside_loops: list[list] = []
    outside_loops: list[list] = []
    inside_chains: list[list] = []
    outside_chains: list[list] = []
    for loop in region.loops:
        _ring_chains(
            loop, center, radius, inside_loops, outside_loops, inside_chains, outside_chains
        )
    if not inside_chains and not outside_chains:
        # no ring crosses the circle; the circle itself may still sit in the
        # region interior, adding a disk component / a circular hole
        probe = Point2(center.x + radius, center.y)
        from .geometry import point_in_region

        if point_in_region(Region(inside_loops + outside_loops, validate=False), probe):
            east = Point2(center.x + radius, center.y)
            west = Point2(center.x - radius, center.y)
            inside_loops.append(
                [Arc(east, west, center, math.pi), Arc(west, east, center, math.pi)]
            )
            outside_loops.append(
                [Arc(east, west, center, -math.pi), Arc(west, east, center, -math.pi)]
            )
    else:
        _assemble_side(inside_chains, True, center, inside_loops)
        _assemble_side(outside_chains, False, center, outside_loops)
    return (
        Region(inside_loops, validate=False),
        Region(outside_loops, validate=False),
    )


def _angle_of(p: Point2, center: Point2) -> float:
    return math.atan2(p.y - center.y, p.x - center.x)


def _arc_crosses_circle(e: Arc, center: Point2, radius: float) -> bool:
    """Whether the arc's distance-to-center range straddles the radius."""
    dc = e.center.distance(center)
    r = e.radius
    if dc < 1e-15:
        lo = hi = r  # concentric: constant distance
    else:
        lo = min(e.start.distance(center), e.end.distance(center))
        hi = max(e.start.distance(center), e.end.distance(center))
        # radial extrema sit where the arc meets the line of centers
        base = math.atan2(center.y - e.center.y, center.x - e.center.x)
        for ang, dist in ((base, abs(dc - r)), (base + math.pi, dc + r)):
            off = (ang - e.start_angle) % (2.0 * math.pi)
            if e.sweep > 0:
                on_arc = off <= e.sweep
            else:
                on_arc = (2.0 * math.pi - off) % (2.0 * math.pi) <= -e.sweep
            if on_arc:
                lo, hi = min(lo, dist), max(hi, dist)
    eps = 1e-12 * max(radius, 1.0)
    return lo < radius - eps and hi > radius + eps


def _ring_chains(loop, center, radius, inside_loops, outside_loops, inside_chains, outside_chains):
    """Classify one ring: whole-ring shortcut or crossing chains by side."""
    cx, cy = center.x, center.y
    r2 = radius * radius

    refined: list = []
    for e in loop:
        if isinstance(e, Arc):
            if _arc_crosses_circle(e, center, radius):
                raise UnsupportedOperationError(
                    "split_by_circle cannot cut an arc edge crossing the circle"
                )
            refined.append(e)
            continue
        p, q = e.start, e.end
        dx, dy = q.x - p.x, q.y - p.y
        seg2 = dx * dx + dy * dy
        if seg2 == 0.0:
            continue
        b = (p.x - cx) * dx + (p.y - cy) * dy
        c = (p.x - cx) ** 2 + (p.y - cy) ** 2 - r2
        disc = b * b - seg2 * c
        cuts = []
        if disc > 0.0:
            sq = math.sqrt(disc)
            for t in sorted(((-b - sq) / seg2, (-b + sq) / seg2)):
                if 1e-12 < t < 1.0 - 1e-12:
                    cuts.append(Point2(p.x + t * dx, p.y + t * dy))
        prev = p
        for cp in cuts:
            refined.append(Segment(prev, cp))
            prev = cp
        refined.append(Segment(prev, q))

    n = len(refined)
    if n < 2:
        return

    def side_of(e) -> bool:
        m = e.point_at(0.5)
        mx, my = m.x - cx, m.y - cy
        return mx * mx + my * my <= r2

    flags = [side_of(e) for e in refined]
    if all(flags):
        inside_loops.append(refined)
        return
    if not any(flags):
        outside_loops.append(refined)
        return

    start = 0
    while flags[start] == flags[start - 1]:
        start += 1
    idx = start
    for _ in range(n):
        side = flags[idx]
        chain = []
        j = idx
        while flags[j] == side:
            chain.append(refined[j])
            j = (j + 1) % n
            if j == idx:
                break
        (inside_chains if side else outside_chains).append(chain)
        idx = j
        if idx == start:
            break


def _assemble_side(chains: list[list], side: bool, center: Point2, sink: list):
    """Connect same-side edge chains with arcs along the circle.

    The inside part keeps the disk on its left, so connecting arcs run
    counterclockwise from a chain end to the angularly-next chain start;
    the outside part runs clockwise.
    """
    if not chains:
        return
    open_chains = dict(enumerate(chains))
    starts = [(_angle_of(ch[0].start, center), i) for i, ch in enumerate(chains)]

    def angular_gap(from_ang: float, to_ang: float) -> float:
        return (to_ang - from_ang) % (2.0 * math.pi) if side else (from_ang - to_ang) % (2.0 * math.pi)

    def connector(a: Point2, b: Point2, gap: float):
        if a.distance(b) <= 1e-12:
            return None
        if gap > 1e-12:
            return Arc(a, b, center, gap if side else -gap)
        return Segment(a, b)

    while open_chains:
        key0 = next(iter(open_chains))
        first = open_chains.pop(key0)
        loop_edges: list = []
        current = first
        while True:
            loop_edges.extend(current)
            end_ang = _angle_of(current[-1].end, center)
            best_key, best_gap = None, None
            for ang, key in starts:
                if key not in open_chains:
                    continue
                gap = angular_gap(end_ang, ang)
                if best_gap is None or gap < best_gap:
                    best_key, best_gap = key, gap
            close_gap = angular_gap(end_ang, _angle_of(first[0].start, center))
            if best_key is None or close_gap <= best_gap:
                conn = connector(current[-1].end, first[0].start, close_gap)
                if conn is not None:
                    loop_edges.append(conn)
                break
            nxt = open_chains.pop(best_key)
            conn = connector(current[-1].end, nxt[0].start, best_gap)
            if conn is not None:
                loop_edges.append(conn)
            current = nxt
        if loop_edges:
            sink.append(loop_edges)
