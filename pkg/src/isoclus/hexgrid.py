"""Hexagonal tilings: reference plane grids H_delta and the torus honeycomb.

Hexagons have a vertex at top and bottom; rows advance by (3/2)*side
vertically, columns by sqrt(3)*side, odd rows shifted half a column.  The
unit-area cell has side 12^(1/4)/3 and perimeter 2*12^(1/4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .clusters import HEX_SIDE, Cluster, TorusSpec
from .errors import DomainError
from .geometry import Point2, Region

SQRT3 = math.sqrt(3.0)


def hexagon_cell(center: Point2, side: float) -> Region:
    """Regular hexagon with vertices at angles 90 + 60k degrees."""
    pts = []
    for k in range(6):
        ang = math.pi / 2.0 + k * math.pi / 3.0
        pts.append(Point2(center.x + side * math.cos(ang), center.y + side * math.sin(ang)))
    return Region.from_points(pts)


def unit_hexagon(center: Point2 = Point2(0.0, 0.0)) -> Region:
    return hexagon_cell(center, HEX_SIDE)


@dataclass(frozen=True)
class HexTiling:
    """Indexed hexagonal tiling of cell area ``delta``."""

    delta: float
    offset: Point2
    cells: dict  # (row, col) -> Region

    @property
    def side(self) -> float:
        return math.sqrt(self.delta) * HEX_SIDE

    def center(self, row: int, col: int) -> Point2:
        s = self.side
        return Point2(
            self.offset.x + (col + 0.5 * (row % 2)) * SQRT3 * s,
            self.offset.y + row * 1.5 * s,
        )


@dataclass(frozen=True)
class HexClassification:
    interior: tuple      # indices (row, col) of cells compactly contained
    boundary: tuple      # indices of cells meeting the boundary of Omega

    @property
    def k(self) -> int:
        return len(self.interior)

    @property
    def h(self) -> int:
        return len(self.boundary)


def generate_plane(delta: float, bbox: Region, offset: Point2 = Point2(0.0, 0.0)) -> HexTiling:
    """All hexagons of area ``delta`` whose bounding box meets ``bbox``."""
    if delta <= 0.0:
        raise DomainError("cell area delta must be positive")
    if bbox.is_empty:
        raise DomainError("bbox region is empty")
    minx, miny, maxx, maxy = bbox.bounds()
    s = math.sqrt(delta) * HEX_SIDE
    row_lo = math.floor((miny - offset.y - s) / (1.5 * s))
    row_hi = math.ceil((maxy - offset.y + s) / (1.5 * s))
    col_lo = math.floor((minx - offset.x - SQRT3 * s) / (SQRT3 * s))
    col_hi = math.ceil((maxx - offset.x + SQRT3 * s) / (SQRT3 * s))
    cells = {}
    for row in range(row_lo, row_hi + 1):
        cy = offset.y + row * 1.5 * s
        if cy + s < miny or cy - s > maxy:
            continue
        for col in range(col_lo, col_hi + 1):
            cx = offset.x + (col + 0.5 * (row % 2)) * SQRT3 * s
            if cx + SQRT3 * s / 2.0 < minx or cx - SQRT3 * s / 2.0 > maxx:
                continue
            cells[(row, col)] = hexagon_cell(Point2(cx, cy), s)
    return HexTiling(delta, offset, cells)


def generate_torus(t: TorusSpec) -> Cluster:
    """Reference unit-area honeycomb of T(alpha, beta) as an N-tiling Cluster.

    Chambers are labeled bottom-row first: H(1) is the base hexagon, row k+1
    holds labels 1 + k*beta ... (k+1)*beta.
    """
    chambers = []
    for row in range(t.alpha):
        for col in range(t.beta):
            cx = (col + 0.5 * (row % 2)) * SQRT3 * HEX_SIDE
            cy = row * 1.5 * HEX_SIDE
            chambers.append(hexagon_cell(Point2(cx, cy), HEX_SIDE))
    return Cluster(chambers, t, validate=False)


def classify(tiling: HexTiling, omega: Region, clearance: float = 1e-9) -> HexClassification:
    """Split cells into compactly-contained and boundary-meeting sets.

    Interior means the whole closed cell lies inside omega with positive
    clearance from its boundary; boundary means the cell meets the boundary
    of omega.  Cells disjoint from omega fall in neither set.
    """
    from . import shapely_bridge as sb
    import shapely

    if omega.is_empty:
        raise DomainError("omega is empty")
    minx, miny, maxx, maxy = omega.bounds()
    tminx, tminy, tmaxx, tmaxy = _tiling_bounds(tiling)
    if tminx > minx or tminy > miny or tmaxx < maxx or tmaxy < maxy:
        raise DomainError("tiling does not cover omega's bounding box")
    g_omega = sb.to_shapely(omega)
    shrunk = g_omega.buffer(-clearance)
    prepared = shapely.prepared.prep(shrunk)
    boundary = g_omega.boundary
    interior, hits = [], []
    for idx, cell in tiling.cells.items():
        g = sb.to_shapely(cell)
        if prepared.contains_properly(g):
            interior.append(idx)
        elif g.intersects(boundary):
            hits.append(idx)
    return HexClassification(tuple(sorted(interior)), tuple(sorted(hits)))


def tiling_to_json(tiling: HexTiling, classification: HexClassification | None = None) -> list:
    """Tiling export: one entry per cell with (row, col, class) tags."""
    from .geojson import region_to_json

    interior = set(classification.interior) if classification else set()
    boundary = set(classification.boundary) if classification else set()
    out = []
    for (row, col), cell in sorted(tiling.cells.items()):
        if (row, col) in interior:
            tag = "interior"
        elif (row, col) in boundary:
            tag = "boundary"
        else:
            tag = "outside" if classification else "unclassified"
        out.append({"row": row, "col": col, "class": tag, "region": region_to_json(cell)})
    return out


def _tiling_bounds(tiling: HexTiling):
    s = tiling.side
    xs = [c.x for c in (tiling.center(*idx) for idx in tiling.cells)]
    ys = [c.y for c in (tiling.center(*idx) for idx in tiling.cells)]
    if not xs:
        raise DomainError("tiling has no cells")
    return (
        min(xs) - SQRT3 * s / 2.0,
        min(ys) - s,
        max(xs) + SQRT3 * s / 2.0,
        max(ys) + s,
    )
