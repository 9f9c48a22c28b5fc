"""Quantitative stability machinery for the honeycomb.

Covers the circular-arc kernel of the chordal isoperimetric inequality,
quantitative regular-n-gon fitting, the hexagonal unit inequality, and the
L1-asymmetry/quadratic-sharpness estimates for perturbed torus tilings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, linear_sum_assignment, minimize

from .clusters import HEX_PERIMETER, HEX_SIDE, Cluster, TorusSpec
from .errors import DomainError, GeometryError, PreconditionError
from .geometry import Arc, Point2, Region, RigidMotion, Segment, cross
from .hexgrid import SQRT3, generate_torus
from .reports import BoundReport

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# the arc function
# ---------------------------------------------------------------------------


def _segment_area(phi: float) -> float:
    """Area between a unit chord and the circular arc of half-angle phi."""
    s = math.sin(phi)
    return (2.0 * phi - math.sin(2.0 * phi)) / (8.0 * s * s)


def arc_excess(a: float) -> float:
    """arc(a) - 1, computed without cancellation for small areas."""
    if a < 0:
        raise DomainError("enclosed area must be nonnegative")
    if a < 1e-5:
        # series: phi = 6a - 28.8 a^3 + ..., so phi/sin(phi) - 1 = 6a^2 + ...
        return 6.0 * a * a - 32.4 * a**4
    lo, hi = 1e-9, math.pi - 1e-9
    if a > _segment_area(hi):
        raise DomainError(f"enclosed area {a} beyond solver range")
    phi = brentq(lambda p: _segment_area(p) - a, lo, hi, xtol=1e-15, rtol=8.9e-16)
    return phi / math.sin(phi) - 1.0


def arc(a: float) -> float:
    """Length of the circular arc enclosing area ``a`` above a unit chord.

    Increasing, arc(0) = 1, convex up to a = pi/8 (the half-disk) and concave
    beyond; the parametrization by the half-angle covers every a >= 0.
    """
    return 1.0 + arc_excess(a)


def arc_t(a: float, t: float) -> float:
    """Arc length over a chord of length ``t``: arc_t(a) = t * arc(a / t^2)."""
    if t <= 0:
        raise DomainError("chord length must be positive")
    return t * arc(a / (t * t))


@dataclass(frozen=True)
class ArcFunction:
    """Callable wrapper exposing the arc kernel with its scaled variant."""

    def __call__(self, a: float) -> float:
        return arc(a)

    def over_chord(self, a: float, t: float) -> float:
        return arc_t(a, t)


# ---------------------------------------------------------------------------
# per-side decomposition of a perturbed polygon
# ---------------------------------------------------------------------------


def _corner_indices(chain: list, corners: list[Point2]) -> list[int]:
    idx = []
    pts = [e.start for e in chain]
    for c in corners:
        hits = [i for i, p in enumerate(pts) if p.distance(c) < 1e-9]
        if not hits:
            raise DomainError("corner point missing from the chamber boundary chain")
        idx.append(hits[0])
    return idx


def side_decomposition(e_region: Region, pi_region: Region):
    """Per-side (chord length, enclosed area, side chain) between E and Pi.

    Pi must be a convex polygon whose vertices appear on E's single boundary
    loop; side i of E is the sub-chain between corners i and i+1.
    """
    if len(e_region.loops) != 1:
        raise DomainError("chamber must have a single boundary loop")
    if not pi_region.is_polygonal or len(pi_region.loops) != 1:
        raise DomainError("reference polygon must be a single polygonal loop")
    chain = list(e_region.loops[0])
    corners = [e.start for e in pi_region.loops[0]]
    idx = _corner_indices(chain, corners)
    n = len(corners)
    sides = []
    for i in range(n):
        j0, j1 = idx[i], idx[(i + 1) % n]
        sub = []
        k = j0
        while k != j1:
            sub.append(chain[k])
            k = (k + 1) % len(chain)
        chord = corners[i].distance(corners[(i + 1) % n])
        # area between sub-chain and the chord, via the closed loop chain+chord
        green = sum(e.green_area() for e in sub)
        green += 0.5 * cross(corners[(i + 1) % n], corners[i])
        sides.append((chord, abs(green), sub))
    return sides


def chordal_check(e_region: Region, pi_region: Region) -> BoundReport:
    """Chordal isoperimetric inequality P(E) >= P(Pi) * arc(|E^Pi| / P(Pi)).

    Valid in the smallness regime: every side chord <= 1 and every per-side
    bulge ratio a_i / l_i^2 <= pi/8.
    """
    sides = side_decomposition(e_region, pi_region)
    for i, (chord, a_i, _) in enumerate(sides):
        if chord > 1.0 + 1e-12:
            raise PreconditionError(f"side length l_{i} = {chord:.6g} exceeds 1")
        if a_i / (chord * chord) > math.pi / 8.0 + 1e-12:
            raise PreconditionError(
                f"bulge ratio a_{i}/l_{i}^2 = {a_i / chord**2:.6g} exceeds pi/8"
            )
    total_bulge = sum(a for _, a, _ in sides)
    p_pi = pi_region.perimeter
    rhs = p_pi * arc(total_bulge / p_pi)
    return BoundReport("chordal-isoperimetric", e_region.perimeter, rhs)


def bulged_hexagon(base: Region, side_areas) -> Region:
    """Replace sides of a convex polygon by outward circular bulges.

    ``side_areas[i]`` is the extra area enclosed over side i (0 keeps the
    segment).  Dido-optimal: each bulged side is exactly the circular arc
    enclosing that area over the chord.
    """
    if not base.is_polygonal or len(base.loops) != 1:
        raise DomainError("base must be a single polygonal loop")
    loop = list(base.loops[0])
    if len(side_areas) != len(loop):
        raise DomainError("need one bulge area per side")
    edges = []
    for e, a in zip(loop, side_areas):
        if a == 0.0:
            edges.append(e)
            continue
        if a < 0:
            raise DomainError("bulge areas must be nonnegative")
        p, q = e.start, e.end
        ell = p.distance(q)
        phi = brentq(
            lambda t: _segment_area(t) - a / (ell * ell),
            1e-12,
            math.pi - 1e-9,
            xtol=1e-15,
            rtol=8.9e-16,
        )
        radius = ell / (2.0 * math.sin(phi))
        mid = Point2(0.5 * (p.x + q.x), 0.5 * (p.y + q.y))
        # ccw loop: interior on the left, bulge to the right, center on the left
        nx, ny = -(q.y - p.y) / ell, (q.x - p.x) / ell
        h = radius * math.cos(phi)
        center = Point2(mid.x + nx * h, mid.y + ny * h)
        edges.append(Arc(p, q, center, 2.0 * phi))
    return Region([edges])


# ---------------------------------------------------------------------------
# quantitative n-gon fitting
# ---------------------------------------------------------------------------


def regular_ngon_side(n: int) -> float:
    """Side of the regular unit-area n-gon: P = n*l = 2 sqrt(n tan(pi/n))."""
    return 2.0 * math.sqrt(math.tan(math.pi / n) / n)


def _polygon_points(region: Region) -> np.ndarray:
    if not region.is_polygonal or len(region.loops) != 1:
        raise DomainError("expected a single polygonal loop")
    pts = np.asarray([e.start.as_tuple() for e in region.loops[0]])
    # enforce ccw
    x, y = pts[:, 0], pts[:, 1]
    if np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)) < 0:
        pts = pts[::-1]
    return pts


def _polygon_centroid(pts: np.ndarray) -> np.ndarray:
    x, y = pts[:, 0], pts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    crosses = x * yn - xn * y
    a = 0.5 * crosses.sum()
    cx = ((x + xn) * crosses).sum() / (6.0 * a)
    cy = ((y + yn) * crosses).sum() / (6.0 * a)
    return np.array([cx, cy])


def _is_convex(pts: np.ndarray) -> bool:
    d = np.roll(pts, -1, axis=0) - pts
    cr = d[:, 0] * np.roll(d, -1, axis=0)[:, 1] - d[:, 1] * np.roll(d, -1, axis=0)[:, 0]
    return bool((cr > -1e-12 * np.abs(cr).max()).all())


def _edge_candidates(pts: np.ndarray, per_edge: int) -> np.ndarray:
    nxt = np.roll(pts, -1, axis=0)
    ts = np.linspace(0.0, 1.0, per_edge, endpoint=False)
    cand = pts[None, :, :] + ts[:, None, None] * (nxt - pts)[None, :, :]
    return cand.reshape(-1, 2)


def _max_min_dist(points: np.ndarray, poly: np.ndarray) -> float:
    """max over points of distance to the polygon boundary (edge union)."""
    a = poly
    b = np.roll(poly, -1, axis=0)
    d = b - a
    denom = (d * d).sum(axis=1)
    w = points[:, None, :] - a[None, :, :]
    t = np.clip((w * d[None, :, :]).sum(axis=2) / denom[None, :], 0.0, 1.0)
    proj = a[None, :, :] + t[:, :, None] * d[None, :, :]
    dist = np.sqrt(((points[:, None, :] - proj) ** 2).sum(axis=2)).min(axis=1)
    return float(dist.max())


def _hd_convex(pa: np.ndarray, pb: np.ndarray, per_edge: int = 4) -> float:
    ca = _edge_candidates(pa, per_edge)
    cb = _edge_candidates(pb, per_edge)
    return max(_max_min_dist(ca, pb), _max_min_dist(cb, pa))


def _hd_convex_batch(subject: np.ndarray, polys: np.ndarray, per_edge: int = 4) -> np.ndarray:
    """Hausdorff distances between one polygon and a (K, n, 2) batch."""
    cs = _edge_candidates(subject, per_edge)              # (m, 2)
    a = polys                                             # (K, n, 2)
    b = np.roll(polys, -1, axis=1)
    d = b - a
    denom = (d * d).sum(axis=2)                           # (K, n)
    w = cs[:, None, None, :] - a[None, :, :, :]           # (m, K, n, 2)
    t = np.clip((w * d[None]).sum(axis=3) / denom[None], 0.0, 1.0)
    proj = a[None] + t[..., None] * d[None]
    dist1 = np.sqrt(((cs[:, None, None, :] - proj) ** 2).sum(axis=3)).min(axis=2)
    d1 = dist1.max(axis=0)                                # (K,)

    nxt = np.roll(polys, -1, axis=1)
    ts = np.linspace(0.0, 1.0, per_edge, endpoint=False)
    cand = polys[:, None, :, :] + ts[None, :, None, None] * (nxt - polys)[:, None, :, :]
    cand = cand.reshape(polys.shape[0], -1, 2)            # (K, c, 2)
    sa = subject
    sb = np.roll(subject, -1, axis=0)
    sd = sb - sa
    sden = (sd * sd).sum(axis=1)                          # (q,)
    w2 = cand[:, :, None, :] - sa[None, None, :, :]       # (K, c, q, 2)
    t2 = np.clip((w2 * sd[None, None]).sum(axis=3) / sden[None, None], 0.0, 1.0)
    proj2 = sa[None, None] + t2[..., None] * sd[None, None]
    dist2 = np.sqrt(((cand[:, :, None, :] - proj2) ** 2).sum(axis=3)).min(axis=2)
    d2 = dist2.max(axis=1)
    return np.maximum(d1, d2)


@dataclass(frozen=True)
class NgonFit:
    n: int
    polygon: Region
    motion: RigidMotion
    hd: float
    deficit: float

    @property
    def ratio(self) -> float | None:
        if self.deficit <= 1e-14:
            return None
        return self.hd * self.hd / self.deficit


def fit_regular_ngon(pi_region: Region, n: int, scan: int = 720) -> NgonFit:
    """Best rigid placement of the regular unit-area n-gon against ``pi_region``.

    Barycenters are aligned, the rotation is scanned on a 2*pi/n-periodic grid
    and refined by golden section; for odd n the reflection is tried too.
    """
    pts = _polygon_points(pi_region)
    if not _is_convex(pts):
        raise DomainError("fit_regular_ngon needs a convex polygon")
    area = pi_region.area
    if abs(area - 1.0) > 1e-9:
        raise DomainError(f"polygon area must be 1 within 1e-9, got {area}")
    bary = _polygon_centroid(pts)
    local = pts - bary

    ell = regular_ngon_side(n)
    circum = 1.0 / math.sqrt(n * math.sin(math.pi / n) * math.cos(math.pi / n))
    base_ang = TWO_PI * np.arange(n) / n

    def ngon(theta: float) -> np.ndarray:
        ang = base_ang + theta
        return np.column_stack([circum * np.cos(ang), circum * np.sin(ang)])

    variants = [local] if n % 2 == 0 else [local, local[::-1] * np.array([-1.0, 1.0])]
    best = (math.inf, 0.0, 0)
    period = TWO_PI / n
    thetas = np.linspace(0.0, period, scan, endpoint=False)
    all_ngons = np.stack([ngon(float(t)) for t in thetas])
    for vi, subject in enumerate(variants):
        vals = _hd_convex_batch(subject, all_ngons)
        k = int(vals.argmin())
        lo = thetas[k] - period / scan
        hi = thetas[k] + period / scan

        from scipy.optimize import minimize_scalar

        res = minimize_scalar(
            lambda t, s=subject: _hd_convex(s, ngon(t)),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-10},
        )
        if res.fun < best[0]:
            best = (float(res.fun), float(res.x), vi)
    _, theta, vi = best
    hd = _hd_convex(variants[vi], ngon(theta), per_edge=16)
    p = pi_region.perimeter
    deficit = p * p - (n * ell) ** 2
    motion = RigidMotion(theta, Point2(*bary))
    return NgonFit(n, pi_region, motion, hd, max(deficit, 0.0))


def ngon_variance_bound(pi_region: Region, n: int | None = None) -> BoundReport:
    """Vertex-radius and side-length variance against the perimeter deficit."""
    pts = _polygon_points(pi_region)
    if not _is_convex(pts):
        raise DomainError("ngon_variance_bound needs a convex polygon")
    if n is None:
        n = len(pts)
    if len(pts) != n:
        raise DomainError(f"expected {n} vertices, found {len(pts)}")
    if abs(pi_region.area - 1.0) > 1e-9:
        raise DomainError("polygon area must be 1 within 1e-9")
    bary = _polygon_centroid(pts)
    radii = np.sqrt(((pts - bary) ** 2).sum(axis=1))
    sides = np.sqrt(((np.roll(pts, -1, axis=0) - pts) ** 2).sum(axis=1))
    variance = ((radii - radii.mean()) ** 2).sum() + ((sides - sides.mean()) ** 2).sum()
    p = pi_region.perimeter
    deficit = max(p * p - (n * regular_ngon_side(n)) ** 2, 0.0)
    fitted = None if deficit <= 1e-14 else float(variance / deficit)
    return BoundReport(
        "ngon-variance-vs-deficit",
        deficit,
        0.0,
        fitted_constant=fitted,
        inputs_digest=f"variance={variance:.12g}",
    )


def hexagon_unit_inequality(e_region: Region, pi_region: Region) -> BoundReport:
    """Hexagonal unit inequality with the best-fit regular hexagon H_*.

    Checks P(E) >= P(H) + (P(H)/2)(|Pi| - |E|) + c1 (|E^Pi|^2 + hd^2) and
    returns the fitted c1; requires the smallness regime (side lengths within
    0.1 of P(H)/6, bulge ratios at most pi/8).
    """
    sides = side_decomposition(e_region, pi_region)
    ell_ref = HEX_PERIMETER / 6.0
    for i, (chord, a_i, _) in enumerate(sides):
        if abs(chord - ell_ref) > 0.1:
            raise PreconditionError(
                f"side l_{i} = {chord:.6g} outside the closeness regime around {ell_ref:.6g}"
            )
        if a_i / (chord * chord) > math.pi / 8.0 + 1e-12:
            raise PreconditionError(f"bulge ratio a_{i}/l_{i}^2 exceeds pi/8")
    area_pi = pi_region.area
    scale = 1.0 / math.sqrt(area_pi)
    fit = fit_regular_ngon(pi_region.scaled(scale), 6)
    hd = fit.hd / scale  # hd(partial Pi, partial H_*) at Pi's scale
    sym = sum(a for _, a, _ in sides)
    lhs = e_region.perimeter
    rhs_base = HEX_PERIMETER + 0.5 * HEX_PERIMETER * (area_pi - e_region.area)
    denom = sym * sym + hd * hd
    fitted = None if denom <= 1e-16 else float((lhs - rhs_base) / denom)
    return BoundReport(
        "hexagon-unit-inequality",
        lhs,
        rhs_base,
        fitted_constant=fitted,
        inputs_digest=f"symdiff={sym:.12g},hd={hd:.12g}",
    )


# ---------------------------------------------------------------------------
# honeycomb asymmetry on the torus
# ---------------------------------------------------------------------------


def _convex_clip_area(subject, clip) -> float:
    """Area of subject (any simple ccw polygon) clipped by convex ccw polygon.

    Point lists of (x, y) tuples; pure-python on purpose, polygons are tiny
    and this sits in the asymmetry scan's hot loop.
    """
    pts = subject
    k = len(clip)
    for i in range(k):
        ax, ay = clip[i]
        bx, by = clip[i + 1 - k]
        ex, ey = bx - ax, by - ay
        out = []
        if not pts:
            return 0.0
        prev = pts[-1]
        prev_in = ex * (prev[1] - ay) - ey * (prev[0] - ax) >= -1e-12
        for cur in pts:
            cur_in = ex * (cur[1] - ay) - ey * (cur[0] - ax) >= -1e-12
            if cur_in:
                if not prev_in:
                    out.append(_line_cross(prev, cur, ax, ay, ex, ey))
                out.append(cur)
            elif prev_in:
                out.append(_line_cross(prev, cur, ax, ay, ex, ey))
            prev, prev_in = cur, cur_in
        pts = out
    if len(pts) < 3:
        return 0.0
    acc = 0.0
    px, py = pts[-1]
    for x, y in pts:
        acc += px * y - py * x
        px, py = x, y
    return 0.5 * abs(acc)


def _line_cross(p, q, ax, ay, ex, ey):
    px, py = p
    qx, qy = q
    dp = ex * (py - ay) - ey * (px - ax)
    dq = ex * (qy - ay) - ey * (qx - ax)
    t = dp / (dp - dq)
    return (px + t * (qx - px), py + t * (qy - py))


@dataclass(frozen=True)
class AsymmetryResult:
    alpha: float
    t: float      # horizontal translation parameter, v_x = t*sqrt(3)*ell
    s: float      # vertical translation parameter,   v_y = s*ell
    permutation: tuple[int, ...]

    @property
    def translation(self) -> Point2:
        return Point2(self.t * SQRT3 * HEX_SIDE, self.s * HEX_SIDE)


class _AsymmetryObjective:
    def __init__(self, cluster: Cluster):
        if not cluster.on_torus:
            raise DomainError("asymmetry is defined for torus tilings")
        self.torus: TorusSpec = cluster.ambient
        t = self.torus
        if cluster.exterior_area() > 1e-6 * t.area:
            raise DomainError("cluster is not a tiling: exterior area exceeds tolerance")
        for i, ch in enumerate(cluster.chambers):
            if abs(ch.area - 1.0) > 1e-6:
                raise DomainError(f"chamber {i} is not unit-area: {ch.area}")
        if cluster.n != t.cells:
            raise DomainError("a unit-area tiling must have alpha*beta chambers")
        self.chambers = [
            [tuple(p) for p in _polygon_points(ch)] for ch in cluster.chambers
        ]
        self.areas = [ch.area for ch in cluster.chambers]
        ref = generate_torus(t)
        self.ref = [[tuple(p) for p in _polygon_points(ch)] for ch in ref.chambers]
        self.translates = [
            (kx * t.width, ky * t.height) for kx in (-1, 0, 1) for ky in (-1, 0, 1)
        ]
        self.boxes = [
            (
                min(p[0] for p in ch),
                min(p[1] for p in ch),
                max(p[0] for p in ch),
                max(p[1] for p in ch),
            )
            for ch in self.chambers
        ]
        self.ref_boxes = [
            (
                min(p[0] for p in ch),
                min(p[1] for p in ch),
                max(p[0] for p in ch),
                max(p[1] for p in ch),
            )
            for ch in self.ref
        ]

    def overlap(self, ci: int, hex_pts, hex_box) -> float:
        minx, miny, maxx, maxy = self.boxes[ci]
        hminx, hminy, hmaxx, hmaxy = hex_box
        total = 0.0
        chamber = self.chambers[ci]
        for tx, ty in self.translates:
            if hmaxx + tx < minx or hminx + tx > maxx:
                continue
            if hmaxy + ty < miny or hminy + ty > maxy:
                continue
            h = [(x + tx, y + ty) for x, y in hex_pts]
            total += _convex_clip_area(chamber, h)
        return total

    def distance(self, t: float, s: float) -> tuple[float, tuple[int, ...]]:
        vx, vy = t * SQRT3 * HEX_SIDE, s * HEX_SIDE
        n = len(self.chambers)
        cost = np.empty((n, n))
        for j, ref in enumerate(self.ref):
            h = [(x + vx, y + vy) for x, y in ref]
            bminx, bminy, bmaxx, bmaxy = self.ref_boxes[j]
            box = (bminx + vx, bminy + vy, bmaxx + vx, bmaxy + vy)
            for i in range(n):
                ov = self.overlap(i, h, box)
                cost[i, j] = self.areas[i] + 1.0 - 2.0 * ov
        rows, cols = linear_sum_assignment(cost)
        return 0.5 * float(cost[rows, cols].sum()), tuple(int(c) for c in cols)


def alpha_asymmetry(cluster: Cluster, grid: int = 64) -> AsymmetryResult:
    """L1 distance to the nearest translated, relabeled reference honeycomb.

    Minimizes over v = (t*sqrt(3)l, s*l) with s, t in [0, 1] (coarse grid plus
    local refinement) and over chamber relabelings via optimal assignment on
    the pairwise symmetric-difference matrix.
    """
    obj = _AsymmetryObjective(cluster)

    best = (math.inf, 0.0, 0.0)
    for t in np.linspace(0.0, 1.0, grid, endpoint=False):
        for s in np.linspace(0.0, 1.0, grid, endpoint=False):
            d, _ = obj.distance(float(t), float(s))
            if d < best[0]:
                best = (d, float(t), float(s))

    def f(x):
        t = x[0] % 1.0
        s = min(max(x[1], 0.0), 1.0)
        return obj.distance(t, s)[0]

    res = minimize(
        f,
        x0=[best[1], best[2]],
        method="Nelder-Mead",
        options={"xatol": 1e-9, "fatol": 1e-13, "maxiter": 400},
    )
    t_opt = float(res.x[0] % 1.0)
    s_opt = float(min(max(res.x[1], 0.0), 1.0))
    d, perm = obj.distance(t_opt, s_opt)
    if d > best[0]:
        t_opt, s_opt = best[1], best[2]
        d, perm = obj.distance(t_opt, s_opt)
    return AsymmetryResult(max(d, 0.0), t_opt, s_opt, perm)


# ---------------------------------------------------------------------------
# exact-area perturbations and the sharpness constant
# ---------------------------------------------------------------------------


def three_edge_perturbation(t: TorusSpec, epsilon: float) -> Cluster:
    """Push the three edges around a triple point, keeping all areas exact.

    Each of the three edges meeting the top vertex of the base hexagon is bent
    at its midpoint by a lateral bump of height epsilon * side; bump directions
    are chosen cyclically so each adjacent face loses and gains the same
    transfer area, leaving every chamber at unit area exactly.
    """
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    if epsilon >= 0.45:
        raise DomainError("epsilon too large for a valid perturbation")
    base = generate_torus(t)
    ell = HEX_SIDE
    v0 = Point2(0.0, ell)
    ends = [
        Point2(SQRT3 / 2.0 * ell, ell / 2.0),   # down-right
        Point2(-SQRT3 / 2.0 * ell, ell / 2.0),  # down-left
        Point2(0.0, 2.0 * ell),                 # up
    ]
    h = epsilon * ell

    # cyclic bump directions: rotate each edge direction by +90 degrees
    bends = []
    for end in ends:
        dx, dy = end.x - v0.x, end.y - v0.y
        ln = math.hypot(dx, dy)
        bends.append(
            (
                _edge_key_mod(v0, end, t),
                np.array([-dy / ln, dx / ln]) * h,
            )
        )
    bend_map = dict(bends)

    new_chambers = []
    for ch in base.chambers:
        pts = [e.start for e in ch.loops[0]]
        out = []
        n = len(pts)
        for i in range(n):
            a, b = pts[i], pts[(i + 1) % n]
            out.append(a)
            key = _edge_key_mod(a, b, t)
            if key in bend_map:
                w = bend_map[key]
                mid = Point2(0.5 * (a.x + b.x) + w[0], 0.5 * (a.y + b.y) + w[1])
                out.append(mid)
        new_chambers.append(Region.from_points(out))
    return Cluster(new_chambers, t, validate=False)


def _edge_key_mod(a: Point2, b: Point2, t: TorusSpec):
    mx, my = 0.5 * (a.x + b.x), 0.5 * (a.y + b.y)
    kx = math.floor(mx / t.width + 1e-9)
    ky = math.floor(my / t.height + 1e-9)
    pts = sorted(
        [
            (round((a.x - kx * t.width) / 1e-9), round((a.y - ky * t.height) / 1e-9)),
            (round((b.x - kx * t.width) / 1e-9), round((b.y - ky * t.height) / 1e-9)),
        ]
    )
    return tuple(pts[0]) + tuple(pts[1])


def kappa_estimate(family) -> float:
    """min over the family of (P(E) - P(H)) / (P(H) * alpha(E)^2)."""
    from .clusters import cluster_perimeter

    members = list(family)
    if not members:
        raise DomainError("empty perturbation family")
    kappas = []
    for i, cluster in enumerate(members):
        result = alpha_asymmetry(cluster)
        if result.alpha <= 1e-9:
            raise DomainError(f"family member {i} has zero asymmetry (alpha = 0)")
        t: TorusSpec = cluster.ambient
        p_ref = t.cells * HEX_PERIMETER / 2.0
        p = cluster_perimeter(cluster)
        kappas.append((p - p_ref) / (p_ref * result.alpha**2))
    return min(kappas)
