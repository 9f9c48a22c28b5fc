"""Cheeger constants of convex planar sets and H_N asymptotics.

The Cheeger set of a convex body is the inner parallel body at distance r
rounded by radius-r corner arcs, where r solves |K_{-r}| = pi r^2; its ratio
P/A equals 1/r.  H_N sandwich bounds follow the hexagonal-packing upper
construction with the planar Cheeger inequality as the lower curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, linprog
from scipy.spatial import HalfspaceIntersection

from .clusters import HEX_SIDE
from .errors import DomainError
from .geometry import Arc, Point2, Region, Segment
from .hexgrid import classify, generate_plane, unit_hexagon
from .reports import BoundReport

H_BALL = 2.0  # Cheeger constant of the unit-radius disk: P/|B| = 2*pi/pi


# ---------------------------------------------------------------------------
# convex Cheeger constant
# ---------------------------------------------------------------------------


def _convex_points(k_region: Region) -> np.ndarray:
    if not k_region.is_polygonal or len(k_region.loops) != 1:
        raise DomainError("cheeger_convex needs a single convex polygonal loop")
    pts = np.asarray([e.start.as_tuple() for e in k_region.loops[0]])
    x, y = pts[:, 0], pts[:, 1]
    if np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)) < 0:
        pts = pts[::-1]
    d = np.roll(pts, -1, axis=0) - pts
    cr = d[:, 0] * np.roll(d, -1, axis=0)[:, 1] - d[:, 1] * np.roll(d, -1, axis=0)[:, 0]
    if not (cr > -1e-12 * max(1.0, float(np.abs(cr).max()))).all():
        raise DomainError("cheeger_convex needs a convex polygon")
    return pts


def _halfplanes(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Outward unit normals and offsets: n . x <= c describes the polygon."""
    d = np.roll(pts, -1, axis=0) - pts
    lengths = np.sqrt((d * d).sum(axis=1))
    normals = np.column_stack([d[:, 1], -d[:, 0]]) / lengths[:, None]
    offsets = (normals * pts).sum(axis=1)
    return normals, offsets


def _incenter(normals: np.ndarray, offsets: np.ndarray) -> tuple[np.ndarray, float]:
    """Chebyshev center and inradius via linear programming."""
    n = len(normals)
    a_ub = np.column_stack([normals, np.ones(n)])
    res = linprog(c=[0.0, 0.0, -1.0], A_ub=a_ub, b_ub=offsets, bounds=[(None, None)] * 2 + [(0, None)], method="highs")
    if not res.success:
        raise DomainError("degenerate polygon: no inradius")
    return res.x[:2], float(res.x[2])


def _inner_parallel(normals, offsets, interior, r: float) -> np.ndarray | None:
    """Ordered vertices of {x : n.x <= c - r}, or None when it collapses."""
    try:
        hs = HalfspaceIntersection(
            np.column_stack([normals, -(offsets - r)]), interior
        )
    except Exception:
        return None
    verts = hs.intersections
    verts = verts[np.isfinite(verts).all(axis=1)]
    if len(verts) < 3:
        return None
    center = verts.mean(axis=0)
    order = np.argsort(np.arctan2(verts[:, 1] - center[1], verts[:, 0] - center[0]))
    verts = verts[order]
    # drop duplicate vertices (collapsed edges)
    keep = [0]
    for i in range(1, len(verts)):
        if np.linalg.norm(verts[i] - verts[keep[-1]]) > 1e-12:
            keep.append(i)
    if np.linalg.norm(verts[keep[-1]] - verts[keep[0]]) <= 1e-12 and len(keep) > 1:
        keep.pop()
    verts = verts[keep]
    return verts if len(verts) >= 3 else None


def _poly_area_perimeter(verts: np.ndarray) -> tuple[float, float]:
    x, y = verts[:, 0], verts[:, 1]
    area = 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
    per = float(np.sqrt(((np.roll(verts, -1, axis=0) - verts) ** 2).sum(axis=1)).sum())
    return abs(area), per


@dataclass(frozen=True)
class CheegerResult:
    h: float
    inner_radius: float
    cheeger_set: Region

    def fixed_point_residual(self) -> float:
        c = self.cheeger_set
        return abs(c.perimeter / c.area - self.h) / self.h


def cheeger_convex(k_region: Region) -> CheegerResult:
    """Cheeger constant of a convex polygon via |K_{-r}| = pi r^2.

    Returns h = 1/r and the Cheeger set: the inner parallel body pushed back
    out by r with radius-r corner arcs.
    """
    pts = _convex_points(k_region)
    normals, offsets = _halfplanes(pts)
    interior, inradius = _incenter(normals, offsets)
    if inradius <= 0:
        raise DomainError("degenerate polygon")

    def g(r: float) -> float:
        verts = _inner_parallel(normals, offsets, interior, r)
        area = 0.0 if verts is None else _poly_area_perimeter(verts)[0]
        return area - math.pi * r * r

    hi = inradius * (1.0 - 1e-12)
    r_star = brentq(g, 1e-12 * inradius, hi, xtol=1e-15, rtol=8.9e-16)
    verts = _inner_parallel(normals, offsets, interior, r_star)
    if verts is None:
        raise DomainError("inner parallel body collapsed at the Cheeger radius")
    return CheegerResult(1.0 / r_star, r_star, _rounded_body(verts, r_star))


def _rounded_body(verts: np.ndarray, r: float) -> Region:
    """Minkowski sum of a convex ccw polygon with the radius-r disk."""
    n = len(verts)
    d = np.roll(verts, -1, axis=0) - verts
    lengths = np.sqrt((d * d).sum(axis=1))
    normals = np.column_stack([d[:, 1], -d[:, 0]]) / lengths[:, None]
    edges = []
    for i in range(n):
        a = verts[i] + r * normals[i]
        b = verts[(i + 1) % n] + r * normals[i]
        edges.append(Segment(Point2(*a), Point2(*b)))
        j = (i + 1) % n
        c = verts[j] + r * normals[j]
        ang0 = math.atan2(normals[i][1], normals[i][0])
        ang1 = math.atan2(normals[j][1], normals[j][0])
        sweep = (ang1 - ang0) % (2.0 * math.pi)
        if sweep > 1e-14:
            edges.append(Arc(Point2(*b), Point2(*c), Point2(*verts[j]), sweep))
    return Region([edges])


def h_ratio(r_region: Region) -> float:
    """Plain ratio P(E)/|E| (the self-Cheeger value of a chamber)."""
    if r_region.area <= 0:
        raise DomainError("region must have positive area")
    return r_region.perimeter / r_region.area


@lru_cache(maxsize=1)
def hexagon_cheeger_constant() -> float:
    """h(H) for the unit-area regular hexagon, computed once."""
    return cheeger_convex(unit_hexagon()).h


# ---------------------------------------------------------------------------
# H_N sandwich and monotonicity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HNSandwich:
    n: int
    lower: float
    upper: float | None
    feasible: bool
    k: int | None = None
    delta: float | None = None
    alpha_exp: float | None = None

    @property
    def raw_upper(self) -> float | None:
        """Sum over the N chosen interior cells (all congruent): equals upper."""
        return self.upper


def hn_lower(omega_area: float, n: int) -> float:
    return math.sqrt(math.pi) * H_BALL * n ** 1.5 / math.sqrt(omega_area)


def hn_sandwich(
    omega: Region,
    n: int,
    eps: float = 0.25,
    alpha_grid: int = 33,
    compute_upper: bool = True,
) -> HNSandwich:
    """Sandwich bounds for the N-Cheeger constant of a polygonal set.

    Lower: sqrt(pi) h(B) N^(3/2) / sqrt(|Omega|).  Upper: hexagonal packing
    with cell area delta(N) = |Omega|/N - |Omega|/N^alpha; alpha is chosen as
    the largest exponent in (1 + eps, 3/2) whose interior-cell count reaches N.
    """
    if not 0.0 <= eps < 0.5:
        raise DomainError("exponent margin eps must lie in [0, 1/2)")
    if n < 2:
        raise DomainError("sandwich needs n >= 2")
    area = omega.area
    lower = hn_lower(area, n)
    if not compute_upper:
        return HNSandwich(n, lower, None, False)
    h_hex = hexagon_cheeger_constant()
    alphas = np.linspace(1.0 + eps, 1.5, alpha_grid + 2)[1:-1]
    # k(alpha) decreases with alpha; binary search the largest feasible alpha
    lo, hi = 0, len(alphas) - 1
    best = None

    def k_of(alpha: float):
        delta = area / n - area / n**alpha
        if delta <= 0:
            return None, delta
        tiling = generate_plane(delta, omega)
        cls = classify(tiling, omega)
        return cls.k, delta

    while lo <= hi:
        mid = (lo + hi) // 2
        k, delta = k_of(float(alphas[mid]))
        if k is not None and k >= n:
            best = (float(alphas[mid]), k, delta)
            lo = mid + 1
        else:
            hi = mid - 1
    if best is None:
        return HNSandwich(n, lower, None, False)
    alpha, k, delta = best
    upper = n * h_hex / math.sqrt(delta)
    return HNSandwich(n, lower, upper, True, k=k, delta=delta, alpha_exp=alpha)


def hn_monotonicity(curve: list[HNSandwich], omega_area: float) -> list[BoundReport]:
    """Property-2 style checks along a consecutive-N sandwich curve."""
    reports = []
    c = math.sqrt(math.pi) * H_BALL / math.sqrt(omega_area)
    for a, b in zip(curve, curve[1:]):
        if b.n != a.n + 1:
            raise DomainError("monotonicity checks need consecutive N values")
        step = c * math.sqrt(b.n)
        # successive differences of the lower curve reproduce the closed form
        residual = abs((b.lower - a.lower) - c * (b.n**1.5 - a.n**1.5))
        reports.append(
            BoundReport(f"hn-lower-succ-identity[N={a.n}]", 1e-12 * max(b.lower, 1.0), residual)
        )
        reports.append(BoundReport(f"hn-lower-monotone[N={a.n}]", b.lower, a.lower + step))
        if b.upper is not None:
            reports.append(BoundReport(f"hn-upper-vs-lower-step[N={a.n}]", b.upper, a.lower + step))
    return reports


# ---------------------------------------------------------------------------
# pointwise formulas
# ---------------------------------------------------------------------------


def chamber_volume_floor(hn_value: float, n_dim: int = 2) -> float:
    """Minimal chamber area of a Cheeger N-cluster: n^n w_n / (2^n H_N^n)."""
    if hn_value <= 0:
        raise DomainError("H_N must be positive")
    if n_dim != 2:
        raise DomainError("only the planar case is supported")
    return math.pi / (hn_value * hn_value)


def curvature_constants(h_values, areas) -> np.ndarray:
    """Interface curvature matrix C[j, k] for chambers 1..N (index 0 = exterior).

    C[j, 0] = h_j, C[j, k] = (|E_k| h_j - |E_j| h_k) / (|E_j| + |E_k|), and
    antisymmetry C[k, j] = -C[j, k] holds exactly by construction.
    """
    h = list(h_values)
    a = list(areas)
    if len(h) != len(a):
        raise DomainError("need one h value per chamber area")
    if any(x <= 0 for x in a):
        raise DomainError("chamber areas must be positive")
    n = len(h)
    c = np.zeros((n + 1, n + 1))
    for j in range(1, n + 1):
        c[j, 0] = h[j - 1]
        c[0, j] = -h[j - 1]
        for k in range(j + 1, n + 1):
            val = (a[k - 1] * h[j - 1] - a[j - 1] * h[k - 1]) / (a[j - 1] + a[k - 1])
            c[j, k] = val
            c[k, j] = -val
    return c


def p_eigenvalue_lower(h: float, p: float) -> float:
    """First p-Laplacian Dirichlet eigenvalue lower bound (h / p)^p."""
    if p <= 1.0:
        raise DomainError("p must exceed 1")
    if h <= 0:
        raise DomainError("h must be positive")
    return (h / p) ** p


def p_partition_lower(hn_value: float, p: float, n: int) -> float:
    """Optimal-partition energy lower bound (1/N^(p-1)) (H_N / p)^p."""
    if p <= 1.0:
        raise DomainError("p must exceed 1")
    if hn_value <= 0:
        raise DomainError("H_N must be positive")
    return (hn_value / p) ** p / n ** (p - 1.0)


def p_laplacian_bounds(h: float, p: float, n: int | None = None):
    """(h/p)^p, optionally paired with the partition bound at the same value."""
    single = p_eigenvalue_lower(h, p)
    if n is None:
        return single
    return single, p_partition_lower(h, p, n)
