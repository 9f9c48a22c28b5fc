"""Clusters of interior-disjoint chambers on the plane or a flat torus.

Cluster perimeter follows the half-sum convention: every interface is counted
exactly once, including the interface with the exterior chamber (the
complement of the chamber union).  It is computed combinatorially from a
refined edge arrangement: edges shared by two different chambers count once,
unshared edges count once (exterior interface), and edges shared within one
chamber count zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, GeometryError
from .geometry import Arc, Point2, Region, Segment, cross

HEX_SIDE = 12.0 ** 0.25 / 3.0           # side of the unit-area regular hexagon
HEX_PERIMETER = 2.0 * 12.0 ** 0.25      # P(H) = 6 * side
HEX_DIAMETER = 2.0 * HEX_SIDE

OVERLAP_TOL = 1e-9


@dataclass(frozen=True)
class TorusSpec:
    """Flat torus T(v_beta, w_alpha) carrying the reference honeycomb.

    ``alpha`` must be even and ``beta`` >= 2 so the quotient hexagon stays
    regular; the fundamental domain is [0, sqrt(3)*beta*ell) x [0, 1.5*alpha*ell).
    """

    alpha: int
    beta: int

    def __post_init__(self):
        if self.alpha < 2 or self.alpha % 2 != 0:
            raise DomainError(f"alpha must be a positive even integer, got {self.alpha}")
        if self.beta < 2:
            raise DomainError(f"beta must be >= 2, got {self.beta}")

    @property
    def ell(self) -> float:
        return HEX_SIDE

    @property
    def width(self) -> float:
        return math.sqrt(3.0) * self.beta * HEX_SIDE

    @property
    def height(self) -> float:
        return 1.5 * self.alpha * HEX_SIDE

    @property
    def v_vector(self) -> Point2:
        return Point2(self.width, 0.0)

    @property
    def w_vector(self) -> Point2:
        return Point2(0.0, self.height)

    @property
    def area(self) -> float:
        return self.width * self.height  # equals alpha * beta exactly up to fp

    @property
    def cells(self) -> int:
        return self.alpha * self.beta

    def canonicalize(self, p: Point2) -> Point2:
        x = p.x - math.floor(p.x / self.width) * self.width
        y = p.y - math.floor(p.y / self.height) * self.height
        return Point2(x, y)


def torus_canonicalize(p: Point2, t: TorusSpec) -> Point2:
    return t.canonicalize(p)


class Cluster:
    """N interior-disjoint chamber Regions in an ambient Region or flat torus."""

    def __init__(self, chambers, ambient, validate: bool = True):
        self.chambers: tuple[Region, ...] = tuple(chambers)
        self.ambient = ambient
        if len(self.chambers) < 1:
            raise DomainError("cluster needs at least one chamber")
        if validate:
            self._validate()

    @property
    def n(self) -> int:
        return len(self.chambers)

    @property
    def on_torus(self) -> bool:
        return isinstance(self.ambient, TorusSpec)

    def ambient_area(self) -> float:
        return self.ambient.area if self.on_torus else self.ambient.area

    def exterior_area(self) -> float:
        return self.ambient_area() - sum(ch.area for ch in self.chambers)

    def exterior_region(self) -> Region:
        """Ambient minus chamber union (polygonal planar clusters only)."""
        if self.on_torus:
            raise DomainError("exterior region is derived per fundamental domain; use exterior_area")
        from . import shapely_bridge as sb
        from shapely.ops import unary_union

        amb = sb.to_shapely(self.ambient)
        return sb.from_shapely(amb.difference(unary_union([sb.to_shapely(c) for c in self.chambers])))

    def _validate(self):
        polygonal = [ch.is_polygonal for ch in self.chambers]
        boxes = [ch.bounds() for ch in self.chambers]
        areas = [ch.area for ch in self.chambers]
        if min(areas) <= 0.0:
            raise GeometryError("chambers must have positive area")
        min_area = min(areas)
        try:
            from shapely.strtree import STRtree
            from shapely.geometry import box as shapely_box
            from . import shapely_bridge as sb
        except ImportError:  # pragma: no cover
            return
        geoms = [
            sb.to_shapely(ch) if poly else shapely_box(*b)
            for ch, poly, b in zip(self.chambers, polygonal, boxes)
        ]
        tree = STRtree(geoms)
        for i, g in enumerate(geoms):
            for j in tree.query(g):
                j = int(j)
                if j <= i:
                    continue
                if not (polygonal[i] and polygonal[j]):
                    continue  # arc chambers: construction guarantees disjointness
                inter = g.intersection(geoms[j]).area
                if inter > OVERLAP_TOL * min_area:
                    raise GeometryError(
                        f"chambers {i} and {j} overlap by {inter:.3e}"
                    )
        if not self.on_torus:
            amb = sb.to_shapely(self.ambient) if self.ambient.is_polygonal else None
            if amb is not None:
                for i, (g, poly) in enumerate(zip(geoms, polygonal)):
                    if not poly:
                        continue
                    out = g.difference(amb).area
                    if out > OVERLAP_TOL * max(areas[i], 1.0):
                        raise GeometryError(
                            f"chamber {i} exceeds the ambient by area {out:.3e}"
                        )


# ---------------------------------------------------------------------------
# refined edge arrangement
# ---------------------------------------------------------------------------


@dataclass
class _CountedEdge:
    length: float
    labels: tuple[int, ...]
    # geometry for window clipping
    kind: str                      # "seg" | "arc"
    data: tuple


def _merge_sorted_values(values: list[float], tol: float) -> list[float]:
    values = sorted(values)
    merged = []
    for v in values:
        if merged and v - merged[-1] <= tol:
            continue
        merged.append(v)
    return merged


def _locate(sorted_vals: list[float], v: float, tol: float) -> int:
    import bisect

    i = bisect.bisect_left(sorted_vals, v - tol)
    if i < len(sorted_vals) and abs(sorted_vals[i] - v) <= tol:
        return i
    raise GeometryError("edge endpoint failed to snap to arrangement breakpoint")


def _counted_edges(cluster: Cluster) -> list[_CountedEdge]:
    """Refine all chamber edges into an arrangement and count interfaces.

    On the torus, canonicalize-and-refine passes repeat so that sub-edges of
    wrap-straddling lines settle onto one representative before counting.
    """
    torus = cluster.ambient if cluster.on_torus else None

    seg_items = []   # (label, p, q)
    arc_items = []   # (label, center, radius, a0, span) span > 0, ccw param
    scale = 1.0
    for label, ch in enumerate(cluster.chambers):
        for loop in ch.loops:
            for e in loop:
                scale = max(scale, abs(e.start.x), abs(e.start.y))
                if isinstance(e, Segment):
                    seg_items.append((label, e.start, e.end))
                else:
                    a0 = e.start_angle
                    span = e.sweep
                    if span < 0:
                        a0, span = a0 + span, -span
                    arc_items.append((label, e.center, e.radius, a0, span))

    tol = 1e-9 * scale
    passes = 3 if torus is not None else 1
    for i in range(passes):
        if torus is not None:
            seg_items = [
                (label,) + _canon_pair(p, q, torus) for label, p, q in seg_items
            ]
            arc_items = [
                (label, _canon_arc_center(c, r, a0, span, torus), r, a0, span)
                for label, c, r, a0, span in arc_items
            ]
        seg_buckets, seg_geo = _refine_segments(seg_items, tol)
        arc_buckets, arc_geo = _refine_arcs(arc_items, tol)
        if i < passes - 1:
            seg_items = [
                (label, *seg_geo[key]) for key, labels in seg_buckets.items() for label in labels
            ]
            arc_items = [
                (label, *arc_geo[key]) for key, labels in arc_buckets.items() for label in labels
            ]

    out: list[_CountedEdge] = []
    for key, labels in seg_buckets.items():
        a, b = seg_geo[key]
        out.append(_CountedEdge(a.distance(b), tuple(labels), "seg", (a, b)))
    for key, labels in arc_buckets.items():
        c, r, a0, span = arc_geo[key]
        out.append(_CountedEdge(r * span, tuple(labels), "arc", (c, r, a0, span)))
    return out


def _refine_segments(seg_items, tol):
    """Split coline segments at shared breakpoints; bucket by sub-interval."""
    lines: dict = {}
    for label, p, q in seg_items:
        dx, dy = q.x - p.x, q.y - p.y
        ln = math.hypot(dx, dy)
        if ln == 0.0:
            continue
        ux, uy = dx / ln, dy / ln
        if uy < 0 or (uy == 0 and ux < 0):
            ux, uy = -ux, -uy
        off = p.x * (-uy) + p.y * ux  # signed offset of the line
        key = (round(ux / 1e-9), round(uy / 1e-9), round(off / tol))
        lines.setdefault(key, []).append((label, p, q, ux, uy, off))
    groups = _merge_line_buckets(lines, tol)

    buckets: dict[tuple, list[int]] = {}
    geo: dict[tuple, tuple] = {}
    for gi, members in enumerate(groups):
        ux, uy = members[0][3], members[0][4]
        ts = []
        for label, p, q, *_ in members:
            ts.append(p.x * ux + p.y * uy)
            ts.append(q.x * ux + q.y * uy)
        bps = _merge_sorted_values(ts, tol)
        for label, p, q, *_ in members:
            t0 = _locate(bps, p.x * ux + p.y * uy, 2 * tol)
            t1 = _locate(bps, q.x * ux + q.y * uy, 2 * tol)
            if t0 == t1:
                continue
            lo, hi = min(t0, t1), max(t0, t1)
            base = p if t0 < t1 else q
            tb = bps[lo]
            for k in range(lo, hi):
                key = (gi, k)
                buckets.setdefault(key, []).append(label)
                if key not in geo:
                    a = Point2(base.x + (bps[k] - tb) * ux, base.y + (bps[k] - tb) * uy)
                    b = Point2(base.x + (bps[k + 1] - tb) * ux, base.y + (bps[k + 1] - tb) * uy)
                    geo[key] = (a, b)
    return buckets, geo


def _refine_arcs(arc_items, tol):
    """Split cocircular arcs at shared angular breakpoints."""
    circles: dict = {}
    for label, c, r, a0, span in arc_items:
        key = (round(c.x / tol), round(c.y / tol), round(r / tol))
        circles.setdefault(key, []).append((label, c, r, a0, span))
    cgroups = _merge_circle_buckets(circles, tol)

    buckets: dict[tuple, list[int]] = {}
    geo: dict[tuple, tuple] = {}
    for gi, members in enumerate(cgroups):
        c, r = members[0][1], members[0][2]
        atol = max(tol / max(r, 1e-12), 1e-12)
        angs = []
        for label, _c, _r, a0, span in members:
            angs.append(a0 % (2.0 * math.pi))
            angs.append((a0 + span) % (2.0 * math.pi))
        bps = _merge_sorted_values(angs, atol)
        if len(bps) > 1 and (2.0 * math.pi - bps[-1]) + bps[0] <= atol:
            bps.pop()  # wraparound duplicate
        if not bps:
            bps = [0.0]
        for label, _c, _r, a0, span in members:
            s = a0 % (2.0 * math.pi)
            i0 = _locate_angle(bps, s, atol)
            covered = 0.0
            k = i0
            while covered < span - atol:
                nxt = (k + 1) % len(bps)
                step = (bps[nxt] - bps[k]) % (2.0 * math.pi)
                if step == 0.0:
                    step = 2.0 * math.pi
                key = (gi, k)
                buckets.setdefault(key, []).append(label)
                if key not in geo:
                    geo[key] = (c, r, bps[k], step)
                covered += step
                k = nxt
    return buckets, geo


def _merge_line_buckets(lines: dict, tol: float) -> list[list]:
    reps = []
    for key, members in lines.items():
        reps.append((members[0][3], members[0][4], members[0][5], members))
    reps.sort(key=lambda t: (round(math.atan2(t[1], t[0]) / 1e-9), t[2]))
    groups: list[list] = []
    for ux, uy, off, members in reps:
        if groups:
            pux, puy, poff = groups[-1][-1][3], groups[-1][-1][4], groups[-1][-1][5]
            if abs(ux - pux) < 1e-9 and abs(uy - puy) < 1e-9 and abs(off - poff) <= 2 * tol:
                groups[-1].extend(members)
                continue
        groups.append(list(members))
    return groups


def _merge_circle_buckets(circles: dict, tol: float) -> list[list]:
    reps = sorted(circles.values(), key=lambda m: (m[0][1].x, m[0][1].y, m[0][2]))
    groups: list[list] = []
    for members in reps:
        c, r = members[0][1], members[0][2]
        if groups:
            pc, pr = groups[-1][-1][1], groups[-1][-1][2]
            if c.distance(pc) <= 2 * tol and abs(r - pr) <= 2 * tol:
                groups[-1].extend(members)
                continue
        groups.append(list(members))
    return groups


def _locate_angle(bps: list[float], ang: float, atol: float) -> int:
    for i, b in enumerate(bps):
        d = abs((ang - b + math.pi) % (2.0 * math.pi) - math.pi)
        if d <= 2 * atol:
            return i
    raise GeometryError("arc endpoint failed to snap to angular breakpoint")


def _lattice_index(v: float, period: float) -> int:
    # biased so points sitting exactly on a lattice line canonicalize the same
    # way from both sides of the wrap
    return math.floor(v / period + 1e-9)


def _canon_pair(p: Point2, q: Point2, torus: TorusSpec) -> tuple[Point2, Point2]:
    mx, my = 0.5 * (p.x + q.x), 0.5 * (p.y + q.y)
    kx = _lattice_index(mx, torus.width)
    ky = _lattice_index(my, torus.height)
    dx, dy = -kx * torus.width, -ky * torus.height
    return Point2(p.x + dx, p.y + dy), Point2(q.x + dx, q.y + dy)


def _canon_arc_center(c: Point2, r: float, a0: float, span: float, torus: TorusSpec) -> Point2:
    mid_ang = a0 + 0.5 * span
    mx = c.x + r * math.cos(mid_ang)
    my = c.y + r * math.sin(mid_ang)
    kx = _lattice_index(mx, torus.width)
    ky = _lattice_index(my, torus.height)
    return Point2(c.x - kx * torus.width, c.y - ky * torus.height)


# ---------------------------------------------------------------------------
# convex window clipping
# ---------------------------------------------------------------------------


def _window_halfplanes(window: Region) -> list[tuple[float, float, float]]:
    if not window.is_polygonal or len(window.loops) != 1:
        raise DomainError("window must be a single convex polygon")
    loop = window.loops[0]
    pts = [e.start for e in loop]
    n = len(pts)
    sign = 0.0
    for i in range(n):
        a, b, c = pts[i], pts[(i + 1) % n], pts[(i + 2) % n]
        cr = cross(b - a, c - b)
        if cr * sign < -1e-12 * max(1.0, abs(cr)):
            raise DomainError("window must be convex")
        if abs(cr) > 1e-15:
            sign = math.copysign(1.0, cr) if sign == 0.0 else sign
    if window.loop_signed_area(0) < 0:
        pts.reverse()
    planes = []
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        nx, ny = (b.y - a.y), -(b.x - a.x)  # outward normal for ccw ring
        ln = math.hypot(nx, ny)
        planes.append((nx / ln, ny / ln, (nx * a.x + ny * a.y) / ln))
    return planes


def _clip_segment_fraction(a: Point2, b: Point2, planes) -> float:
    t0, t1 = 0.0, 1.0
    dx, dy = b.x - a.x, b.y - a.y
    for nx, ny, c in planes:
        da = nx * a.x + ny * a.y - c
        dd = nx * dx + ny * dy
        if abs(dd) < 1e-15:
            if da > 0.0:
                return 0.0
            continue
        t_cross = -da / dd
        if dd > 0:
            t1 = min(t1, t_cross)
        else:
            t0 = max(t0, t_cross)
        if t0 >= t1:
            return 0.0
    return t1 - t0


def _clip_arc_fraction(c: Point2, r: float, a0: float, span: float, planes) -> float:
    """Fraction of the arc (ccw from a0 by span) inside the convex window."""
    intervals = [(0.0, span)]
    for nx, ny, cc in planes:
        u = cc - (nx * c.x + ny * c.y)
        rho = r  # |(nx, ny)| == 1
        phi = math.atan2(ny, nx)
        allowed: list[tuple[float, float]]
        if u >= rho:
            continue  # whole circle inside this half-plane
        if u <= -rho:
            return 0.0
        beta = math.acos(u / rho)
        # allowed angles t: cos(t - phi) <= u/rho  ->  t in [phi+beta, phi+2pi-beta]
        lo = (phi + beta - a0) % (2.0 * math.pi)
        width = 2.0 * (math.pi - beta)
        allowed = [(lo, lo + width)]
        intervals = _intersect_intervals(intervals, allowed, span)
        if not intervals:
            return 0.0
    return sum(b - a for a, b in intervals) / span if span > 0 else 0.0


def _intersect_intervals(base, allowed, span):
    """Intersect intervals in arc parameter [0, span] with circular intervals."""
    pieces = []
    for lo, hi in allowed:
        # unwrap the circular interval onto the parameter axis
        for shift in (-2.0 * math.pi, 0.0, 2.0 * math.pi):
            a, b = lo + shift, hi + shift
            if b < 0.0 or a > span:
                continue
            pieces.append((max(a, 0.0), min(b, span)))
    out = []
    for a0, b0 in base:
        for a1, b1 in pieces:
            a, b = max(a0, a1), min(b0, b1)
            if b > a + 1e-15:
                out.append((a, b))
    return out


# ---------------------------------------------------------------------------
# spec operations
# ---------------------------------------------------------------------------


def cluster_perimeter(c: Cluster, window: Region | None = None) -> float:
    """Half-sum cluster perimeter: each interface counted once.

    With a convex ``window`` the relative perimeter P(E; window) is returned.
    """
    if window is not None and c.on_torus:
        raise DomainError("windowed perimeter is not defined for torus clusters here")
    planes = _window_halfplanes(window) if window is not None else None
    total = 0.0
    for ce in _counted_edges(c):
        labels = ce.labels
        if len(labels) == 1:
            weight = 1.0
        elif len(labels) == 2:
            weight = 1.0 if labels[0] != labels[1] else 0.0
        else:
            raise GeometryError(
                f"non-manifold interface shared by {len(labels)} chamber edges"
            )
        if weight == 0.0:
            continue
        if planes is None:
            total += ce.length
        elif ce.kind == "seg":
            a, b = ce.data
            total += ce.length * _clip_segment_fraction(a, b, planes)
        else:
            cc, r, a0, span = ce.data
            total += ce.length * _clip_arc_fraction(cc, r, a0, span, planes)
    return total


def relative_perimeter(c: Cluster, window: Region) -> float:
    return cluster_perimeter(c, window)


def torus_measures(c: Cluster) -> tuple[float, float]:
    """(total chamber area, perimeter over the fundamental domain)."""
    if not c.on_torus:
        raise DomainError("torus_measures needs a torus cluster")
    return (sum(ch.area for ch in c.chambers), cluster_perimeter(c))


def _torus_symdiff_area(a: Region, b: Region, torus: TorusSpec) -> float:
    """|a Δ b| with both regions understood modulo the torus lattice."""
    from . import shapely_bridge as sb

    ga = sb.to_shapely(a)
    gb = sb.to_shapely(b)
    inter = 0.0
    from shapely import affinity

    for kx in (-1, 0, 1):
        for ky in (-1, 0, 1):
            gt = affinity.translate(gb, xoff=kx * torus.width, yoff=ky * torus.height)
            inter += ga.intersection(gt).area
    return ga.area + gb.area - 2.0 * inter


def cluster_distance(a: Cluster, b: Cluster) -> float:
    """Half-sum of chamber symmetric differences, exterior chamber included."""
    if a.n != b.n:
        raise DomainError(f"cluster sizes differ: {a.n} vs {b.n}")
    if a.on_torus != b.on_torus:
        raise DomainError("clusters live on different ambient kinds")
    from . import shapely_bridge as sb

    total = 0.0
    if a.on_torus:
        t: TorusSpec = a.ambient
        for ca, cb in zip(a.chambers, b.chambers):
            total += _torus_symdiff_area(ca, cb, t)
        total += _torus_exterior_symdiff(a, b, t)
    else:
        for ca, cb in zip(a.chambers, b.chambers):
            total += sb.symmetric_difference_area(ca, cb)
        from shapely.ops import unary_union

        ua = unary_union([sb.to_shapely(ch) for ch in a.chambers])
        ub = unary_union([sb.to_shapely(ch) for ch in b.chambers])
        total += ua.symmetric_difference(ub).area
    return 0.5 * total


def _torus_exterior_symdiff(a: Cluster, b: Cluster, t: TorusSpec) -> float:
    ext_a = a.exterior_area()
    ext_b = b.exterior_area()
    if ext_a <= OVERLAP_TOL * t.area and ext_b <= OVERLAP_TOL * t.area:
        return 0.0
    from . import shapely_bridge as sb
    from shapely import affinity
    from shapely.geometry import box
    from shapely.ops import unary_union

    dom = box(0.0, 0.0, t.width, t.height)

    def clipped_union(cl: Cluster):
        parts = []
        for ch in cl.chambers:
            g = sb.to_shapely(ch)
            for kx in (-1, 0, 1):
                for ky in (-1, 0, 1):
                    parts.append(
                        affinity.translate(g, xoff=kx * t.width, yoff=ky * t.height).intersection(dom)
                    )
        return unary_union(parts)

    return clipped_union(a).symmetric_difference(clipped_union(b)).area
