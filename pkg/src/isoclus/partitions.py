"""Constructive equal-area partitions: frame surgery, boundary reassembly,
the competitor substitution, and the skeleton-grid placement.

Every construction returns exact-area chambers (segments and circular arcs),
a plan/ledger describing the combinatorics, and a report with the fitted
constant of the perimeter estimate it realizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from shapely.geometry import LineString
from shapely.ops import split as shapely_split, unary_union

from . import shapely_bridge as sb
from .clusters import HEX_DIAMETER, HEX_PERIMETER, Cluster, cluster_perimeter
from .errors import DomainError, PreconditionError
from .geometry import Point2, Region, diameter, square
from .hexgrid import classify, generate_plane
from .reports import BoundReport

SURGERY_C_CEILING = 10.0


# ---------------------------------------------------------------------------
# equal-area straight cut
# ---------------------------------------------------------------------------


def equal_area_cut(region: Region, target: float, direction: float = 0.0) -> tuple[Region, Region]:
    """Cut a polygonal region by a straight line perpendicular to ``direction``.

    The cut position is found by monotone bisection so the first part (the
    side reached first when sweeping along ``direction``) has exactly the
    target area, within 1e-12 of the total.
    """
    total = region.area
    if not 0.0 < target < total:
        raise DomainError(f"target {target} outside (0, {total})")
    geom = sb.to_shapely(region)
    ux, uy = math.cos(direction), math.sin(direction)
    corners = np.asarray(geom.bounds).reshape(2, 2)
    pts = [(corners[i][0], corners[j][1]) for i in range(2) for j in range(2)]
    projs = [x * ux + y * uy for x, y in pts]
    lo, hi = min(projs), max(projs)
    span = hi - lo
    mx, my = corners.mean(axis=0)
    m_proj = mx * ux + my * uy
    # chord anchored at the bbox center, long enough to cross it fully
    lateral = 2.0 * math.hypot(*(corners[1] - corners[0])) + span

    def cut_line(c: float) -> LineString:
        bx = mx + (c - m_proj) * ux
        by = my + (c - m_proj) * uy
        return LineString(
            [
                (bx - uy * lateral, by + ux * lateral),
                (bx + uy * lateral, by - ux * lateral),
            ]
        )

    def first_area(c: float) -> float:
        pieces = shapely_split(geom, cut_line(c))
        acc = 0.0
        for g in pieces.geoms:
            rep = g.representative_point()
            if rep.x * ux + rep.y * uy <= c:
                acc += g.area
        return acc

    c_star = brentq(
        lambda c: first_area(c) - target,
        lo + 1e-14 * span,
        hi - 1e-14 * span,
        xtol=1e-15 * max(span, 1.0),
        rtol=8.9e-16,
    )
    pieces = shapely_split(geom, cut_line(c_star))
    first, second = [], []
    for g in pieces.geoms:
        rep = g.representative_point()
        (first if rep.x * ux + rep.y * uy <= c_star else second).append(g)
    r1 = sb.from_shapely(unary_union(first))
    r2 = sb.from_shapely(unary_union(second))
    return r1, r2


# ---------------------------------------------------------------------------
# frame surgery
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SurgeryPlan:
    center: Point2
    ray_angles: tuple[float, ...]
    sector_radii: tuple[tuple[float, ...], ...]
    k: int
    s: int
    r: int

    @property
    def sectors(self) -> int:
        return len(self.sector_radii)


def _square_geometry(q: Region) -> tuple[Point2, float]:
    if not q.is_polygonal or len(q.loops) != 1 or len(q.loops[0]) != 4:
        raise DomainError("expected an axis-aligned square region")
    minx, miny, maxx, maxy = q.bounds()
    if abs((maxx - minx) - (maxy - miny)) > 1e-9 * max(maxx - minx, 1.0):
        raise DomainError("expected a square, got a rectangle")
    return Point2(0.5 * (minx + maxx), 0.5 * (miny + maxy)), maxx - minx


def _wedge(center: Point2, a0: float, a1: float, radius: float):
    """Polygonal fan covering the wedge [a0, a1] out to ``radius``."""
    steps = max(2, math.ceil((a1 - a0) / (math.pi / 8.0)))
    pts = [(center.x, center.y)]
    for i in range(steps + 1):
        ang = a0 + (a1 - a0) * i / steps
        pts.append((center.x + radius * math.cos(ang), center.y + radius * math.sin(ang)))
    from shapely.geometry import Polygon

    return Polygon(pts)


def surgery_partition(
    q0: Region, q1: Region, a_region: Region | None, m: int
) -> tuple[Cluster, SurgeryPlan, BoundReport]:
    """Partition A inside the frame Q1 \\ Q0 into M equal-area chambers.

    Radial sector cuts from the common center are followed by circular arcs
    centered there; sector and arc positions come from monotone bisection on
    enclosed area, so every chamber has area |A|/M within 1e-9 relative.
    """
    if m < 1:
        raise DomainError("chamber count M must be at least 1")
    c0, s0 = _square_geometry(q0)
    c1, s1 = _square_geometry(q1)
    if c0.distance(c1) > 1e-9 * s1:
        raise DomainError("Q0 and Q1 must be concentric")
    if not s0 < s1:
        raise DomainError("Q0 must be strictly inside Q1")
    center = c1

    from .geometry import frame as frame_region

    if a_region is None:
        a_region = frame_region(s0, s1, center)
    a_geom = sb.to_shapely(a_region)
    area_a = a_geom.area
    if area_a <= 0.0:
        raise DomainError("A must have positive area")
    outside = area_a - a_geom.intersection(
        sb.to_shapely(frame_region(s0, s1, center))
    ).area
    if outside > 1e-9 * area_a:
        raise DomainError("A must be contained in the frame Q1 minus Q0")

    d = 0.5 * (s1 - s0)
    s_count = math.ceil(d * math.sqrt(m) / math.sqrt(area_a))
    k, r = divmod(m, s_count)
    chamber_area = area_a / m

    n_sectors = k + (1 if r else 0)
    far = 3.0 * s1
    if n_sectors <= 1:
        pieces = [(a_region, m)]
        ray_angles: tuple[float, ...] = ()
    else:
        counts = [s_count] * k + ([r] if r else [])
        angles = [0.0]

        def wedge_area(theta: float) -> float:
            return a_geom.intersection(_wedge(center, 0.0, theta, far)).area

        acc = 0.0
        for cnt in counts[:-1]:
            acc += cnt * chamber_area
            theta = brentq(
                lambda t: wedge_area(t) - acc,
                angles[-1] + 1e-12,
                2.0 * math.pi - 1e-12,
                xtol=1e-14,
                rtol=8.9e-16,
            )
            angles.append(theta)
        angles.append(2.0 * math.pi)
        pieces = []
        for i, cnt in enumerate(counts):
            w = _wedge(center, angles[i], angles[i + 1], far)
            pieces.append((sb.from_shapely(a_geom.intersection(w)), cnt))
        ray_angles = tuple(angles[:-1])

    chambers: list[Region] = []
    sector_radii: list[tuple[float, ...]] = []
    for piece, cnt in pieces:
        piece_geom = sb.to_shapely(piece)
        radii = []
        lo = 0.0
        hi = s1 * math.sqrt(2.0)
        for j in range(1, cnt):
            target = j * chamber_area
            rho = brentq(
                lambda rr: sb.area_in_disk(piece_geom, center, rr) - target,
                lo + 1e-14,
                hi,
                xtol=1e-15 * s1,
                rtol=8.9e-16,
            )
            radii.append(rho)
        sector_radii.append(tuple(radii))
        rest = piece
        for rho in radii:
            inner, rest = sb.split_by_circle(rest, center, rho)
            chambers.append(inner)
        chambers.append(rest)

    for i, ch in enumerate(chambers):
        if abs(ch.area - chamber_area) > 1e-9 * chamber_area:
            raise DomainError(
                f"surgery chamber {i} area {ch.area} misses target {chamber_area}"
            )

    plan = SurgeryPlan(center, ray_angles, tuple(sector_radii), k, s_count, r)
    ambient = square(3.0 * s1, center)
    cluster = Cluster(chambers, ambient, validate=False)
    p_total = cluster_perimeter(cluster)
    p_a = a_region.perimeter
    frame_area = s1 * s1 - s0 * s0
    fitted = (p_total - p_a) * math.sqrt(area_a / m) / frame_area
    report = BoundReport(
        "surgery-perimeter-bound",
        SURGERY_C_CEILING * frame_area * math.sqrt(m / area_a) + p_a,
        p_total,
        fitted_constant=fitted,
        inputs_digest=f"M={m},|A|={area_a:.12g},s={s_count},k={k},r={r}",
    )
    return cluster, plan, report


def square_boundary_projection_length(half_side: float, a0: float, a1: float) -> float:
    """Length of the radial projection of the angle range [a0, a1] onto the
    boundary of the centered square with the given half side."""
    if a1 < a0:
        a0, a1 = a1, a0
    total = 0.0
    # face centers at 0, pi/2, pi, 3pi/2; corners at pi/4 + k pi/2
    corner = math.pi / 4.0
    t = a0
    while t < a1 - 1e-15:
        face = math.floor((t + corner) / (math.pi / 2.0))
        face_end = face * math.pi / 2.0 + corner
        seg_end = min(a1, face_end)
        rel0 = t - face * math.pi / 2.0
        rel1 = seg_end - face * math.pi / 2.0
        total += half_side * (math.tan(rel1) - math.tan(rel0))
        t = seg_end
    return total


# ---------------------------------------------------------------------------
# boundary reassembly
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReassemblyLedger:
    piece_order: tuple            # ((row, col), area) ascending
    cut_positions: tuple          # sweep offsets of the straight cuts
    compositions: tuple           # per boundary chamber: tuple of piece tags
    interior_count: int
    boundary_count: int


def boundary_reassembly_partition(
    omega: Region, n: int
) -> tuple[Cluster, ReassemblyLedger, BoundReport]:
    """Equal-area partition of a polygonal set from the reference hex tiling.

    Interior hexagons are kept whole; boundary pieces are sorted by ascending
    area and merged greedily, splitting with straight cuts so every chamber
    encloses exactly |Omega|/N.
    """
    if n < 1:
        raise DomainError("chamber count N must be at least 1")
    if not omega.is_polygonal:
        raise DomainError("omega must be polygonal")
    area = omega.area
    delta = area / n
    tiling = generate_plane(delta, omega)
    cls = classify(tiling, omega)
    interior = set(cls.interior)

    omega_geom = sb.to_shapely(omega)
    interior_chambers = [tiling.cells[idx] for idx in sorted(interior)]
    pieces = []
    for idx, cell in tiling.cells.items():
        if idx in interior:
            continue
        inter = sb.to_shapely(cell).intersection(omega_geom)
        if inter.area > 1e-12 * delta:
            pieces.append((idx, sb.from_shapely(inter)))
    pieces.sort(key=lambda t: (t[1].area, t[0]))

    k = len(interior_chambers)
    boundary_needed = n - k
    if boundary_needed == 0 and pieces:
        raise DomainError("leftover boundary area with no chambers to absorb it")

    chambers: list[Region] = list(interior_chambers)
    piece_order = tuple(((idx, p.area)) for idx, p in pieces)
    cut_positions: list[float] = []
    compositions: list[tuple] = []

    current_loops: list = []
    current_tags: list = []
    acc = 0.0
    queue = [(f"cell{idx}", p) for idx, p in pieces]  # ascending area order
    out_boundary = []
    while queue:
        tag, piece = queue.pop(0)
        pa = piece.area
        if acc + pa < delta - 1e-12 * delta * 10.0 or len(out_boundary) == boundary_needed - 1 and not queue:
            current_loops.extend(piece.loops)
            current_tags.append(tag)
            acc += pa
            if not queue:
                if abs(acc - delta) > 1e-9 * delta:
                    raise DomainError(
                        f"final boundary chamber closes at {acc}, target {delta}"
                    )
                out_boundary.append(Region(current_loops, validate=False))
                compositions.append(tuple(current_tags))
                current_loops, current_tags, acc = [], [], 0.0
            continue
        need = delta - acc
        minx, miny, maxx, maxy = piece.bounds()
        direction = 0.0 if (maxx - minx) > 1e-9 * math.sqrt(delta) else math.pi / 2.0
        if abs(need - pa) <= 1e-12 * delta:
            taken, rest = piece, None
        else:
            taken, rest = equal_area_cut(piece, need, direction)
            cut_positions.append(need)
        current_loops.extend(taken.loops)
        current_tags.append(tag + "/cut")
        out_boundary.append(Region(current_loops, validate=False))
        compositions.append(tuple(current_tags))
        current_loops, current_tags, acc = [], [], 0.0
        if rest is not None and rest.area > 1e-12 * delta:
            queue.insert(0, (tag + "/rest", rest))

    if current_tags:
        raise DomainError("boundary reassembly left an unfinished chamber")
    if len(out_boundary) != boundary_needed:
        raise DomainError(
            f"boundary reassembly built {len(out_boundary)} chambers, needed {boundary_needed}"
        )
    chambers.extend(out_boundary)

    cluster = Cluster(chambers, omega, validate=False)
    for i, ch in enumerate(cluster.chambers):
        if abs(ch.area - delta) > 1e-9 * delta:
            raise DomainError(f"chamber {i} area {ch.area} misses {delta}")
    total = cluster_perimeter(cluster)
    # normalize to |Omega| = 1 for the energy bound
    scale = math.sqrt(area)
    total_norm = total / scale
    lower = 0.5 * HEX_PERIMETER * math.sqrt(n)
    fitted = (total_norm - lower) / (omega.perimeter / scale)
    ledger = ReassemblyLedger(
        piece_order, tuple(cut_positions), tuple(compositions), k, len(out_boundary)
    )
    report = BoundReport(
        "reassembly-energy",
        total_norm,
        lower,
        fitted_constant=fitted,
        inputs_digest=f"N={n},k={k},h={cls.h}",
    )
    return cluster, ledger, report


# ---------------------------------------------------------------------------
# competitor construction
# ---------------------------------------------------------------------------


def competitor_build(
    omega: Region, e_cluster: Cluster, q_l: Region, n: int, mu: float
) -> tuple[Cluster, BoundReport]:
    """Replace the cluster inside an enlarged square by a hexagon grid plus a
    frame surgery, keeping N chambers of area |Omega|/N.

    Hypotheses checked by name: the chamber-diameter bound, the boundary
    distance d(bd Q_l, bd Omega) > 4 mu sqrt(|Omega|/N), the side bound
    l >= 6 mu sqrt(|Omega|/N), and mu >= diam(H).
    """
    area = omega.area
    if e_cluster.n != n:
        raise DomainError(f"cluster has {e_cluster.n} chambers, expected {n}")
    if e_cluster.exterior_area() > 1e-6 * area:
        raise DomainError("E must partition omega (exterior area exceeds tolerance)")
    size = math.sqrt(area / n)
    if mu < HEX_DIAMETER:
        raise PreconditionError(f"mu = {mu:.6g} violates mu >= diam(H) = {HEX_DIAMETER:.6g}")
    for i, ch in enumerate(e_cluster.chambers):
        dia = diameter(ch)
        if dia > mu * size * (1.0 + 1e-9):
            raise PreconditionError(
                f"chamber {i} violates diam(E(i)) <= mu sqrt(|Omega|/N): {dia:.6g} > {mu * size:.6g}"
            )
    center, side = _square_geometry(q_l)
    if side < 6.0 * mu * size:
        raise PreconditionError(
            f"side l = {side:.6g} violates l >= 6 mu sqrt(|Omega|/N) = {6 * mu * size:.6g}"
        )
    boundary_gap = sb.to_shapely(q_l).exterior.distance(sb.to_shapely(omega).boundary)
    if boundary_gap <= 4.0 * mu * size:
        raise PreconditionError(
            f"d(bd Q_l, bd Omega) = {boundary_gap:.6g} violates > 4 mu sqrt(|Omega|/N) = {4 * mu * size:.6g}"
        )

    d = 2.0 * mu * size
    q_big = square(side + d, center)
    bminx, bminy, bmaxx, bmaxy = q_big.bounds()

    dropped, kept = [], []
    for ch in e_cluster.chambers:
        minx, miny, maxx, maxy = ch.bounds()
        inside = (
            minx > bminx + 1e-12 and maxx < bmaxx - 1e-12
            and miny > bminy + 1e-12 and maxy < bmaxy - 1e-12
        )
        (dropped if inside else kept).append(ch)
    k = len(dropped)

    delta = area / n
    tiling = generate_plane(delta, q_l)
    ql_geom = sb.to_shapely(q_l)
    hex_cells = [
        cell
        for cell in tiling.cells.values()
        if sb.to_shapely(cell).intersection(ql_geom).area > 1e-12 * delta
    ]
    h = len(hex_cells)
    if h > k:
        raise PreconditionError(
            f"hexagon cover needs {h} cells but only {k} chambers were dropped"
        )

    hex_union = unary_union([sb.to_shapely(c) for c in hex_cells])
    kept_union = unary_union([sb.to_shapely(c) for c in kept]) if kept else None
    if kept_union is not None and hex_union.intersection(kept_union).area > 1e-9 * delta:
        raise PreconditionError("hexagon cover overlaps a kept chamber")

    dropped_union = unary_union([sb.to_shapely(c) for c in dropped])
    a_geom = dropped_union.difference(hex_union)
    a_region = sb.from_shapely(a_geom)
    expected = (k - h) * delta
    if abs(a_region.area - expected) > 1e-6 * max(expected, delta):
        raise DomainError(
            f"residual area {a_region.area} does not match (k-h)|Omega|/N = {expected}"
        )

    if k - h > 0:
        surgery_cluster, _, _ = surgery_partition(q_l, q_big, a_region, k - h)
        surgery_chambers = list(surgery_cluster.chambers)
    else:
        surgery_chambers = []

    chambers = kept + hex_cells + surgery_chambers
    cluster = Cluster(chambers, omega, validate=False)
    for i, ch in enumerate(cluster.chambers):
        if abs(ch.area - delta) > 1e-6 * delta:
            raise DomainError(f"competitor chamber {i} area {ch.area} misses {delta}")

    p_f = cluster_perimeter(cluster)
    p_outside = cluster_perimeter(e_cluster) - cluster_perimeter(e_cluster, window=q_l)
    main = q_l.area * 0.5 * HEX_PERIMETER * math.sqrt(n / area)
    fitted = (p_f - main - p_outside) / (q_l.perimeter * mu)
    report = BoundReport(
        "competitor-perimeter-bound",
        main + p_outside + max(fitted, 0.0) * q_l.perimeter * mu,
        p_f,
        fitted_constant=fitted,
        inputs_digest=f"N={n},k={k},h={h},mu={mu:.6g}",
    )
    return cluster, report


# ---------------------------------------------------------------------------
# skeleton grid placement
# ---------------------------------------------------------------------------


def skeleton_grid_place(strip: Region, m: int, delta: float, areas) -> list[Region]:
    """Place m pairwise-disjoint squares inside their own delta-cells of a
    grid spanning the strip, column by column."""
    if m < 1:
        raise DomainError("m must be at least 1")
    areas = list(areas)
    if len(areas) != m:
        raise DomainError(f"need {m} areas, got {len(areas)}")
    for j, a in enumerate(areas):
        if not 0.0 < a <= delta * (1.0 + 1e-12):
            raise DomainError(f"areas[{j}] = {a} must lie in (0, delta]")
    minx, miny, maxx, maxy = strip.bounds()
    length, height = maxx - minx, maxy - miny
    cell = math.sqrt(delta)
    v = math.floor(height / cell + 1e-12)
    if v < 1:
        raise PreconditionError(
            f"v*sqrt(delta) <= d/2 needs d/2 >= sqrt(delta): height {height:.6g} < {cell:.6g}"
        )
    o, r = divmod(m, v)
    used_cols = o + (1 if r else 0)
    if used_cols * cell > length * (1.0 + 1e-12):
        raise PreconditionError(
            f"(o+1)*sqrt(delta) = {(o + 1) * cell:.6g} exceeds the strip length {length:.6g}"
        )
    out = []
    for j in range(m):
        col, row = divmod(j, v)
        x0 = minx + col * cell
        y0 = miny + row * cell
        side = math.sqrt(areas[j])
        out.append(
            Region.from_points(
                [
                    Point2(x0, y0),
                    Point2(x0 + side, y0),
                    Point2(x0 + side, y0 + side),
                    Point2(x0, y0 + side),
                ]
            )
        )
    return out
