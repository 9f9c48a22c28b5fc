"""Verifiers for the honeycomb lower bounds and equidistribution residuals."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .clusters import HEX_PERIMETER, Cluster, TorusSpec, cluster_perimeter
from .errors import DomainError, PreconditionError
from .geometry import Region
from .reports import BoundReport


def hales_torus(cluster: Cluster) -> BoundReport:
    """Honeycomb bound on the torus: P(E) >= (P(H)/2)(min(|E0|,1) + sum |Ei|).

    Equality (slack within 1e-9) characterizes unit-area hexagonal tilings.
    """
    if not cluster.on_torus:
        raise DomainError("hales_torus needs a torus cluster")
    for i, ch in enumerate(cluster.chambers):
        if ch.area > 1.0 + 1e-9:
            raise PreconditionError(f"chamber {i} has area {ch.area} > 1")
    total_area = sum(ch.area for ch in cluster.chambers)
    exterior = max(cluster.ambient.area - total_area, 0.0)
    lhs = cluster_perimeter(cluster)
    rhs = 0.5 * HEX_PERIMETER * (min(exterior, 1.0) + total_area)
    return BoundReport("hales-torus", lhs, rhs)


def hales_plane(cluster: Cluster) -> BoundReport:
    """Strict planar honeycomb bound: P(E) > (P(H)/2) * sum |Ei|."""
    if cluster.on_torus:
        raise DomainError("hales_plane needs a bounded planar cluster")
    for i, ch in enumerate(cluster.chambers):
        if ch.area > 1.0 + 1e-9:
            raise PreconditionError(f"chamber {i} has area {ch.area} > 1")
    lhs = cluster_perimeter(cluster)
    rhs = 0.5 * HEX_PERIMETER * sum(ch.area for ch in cluster.chambers)
    return BoundReport("hales-plane", lhs, rhs)


def local_lower_bound(cluster: Cluster, window: Region) -> BoundReport:
    """Localized bound P(E; O) >= |O| (P(H)/2) sqrt(N/|Omega|) - P(O)."""
    if cluster.on_torus:
        raise DomainError("local_lower_bound applies to planar clusters")
    omega = cluster.ambient
    from . import shapely_bridge as sb

    out = sb.to_shapely(window).difference(sb.to_shapely(omega)).area
    if out > 1e-9 * max(window.area, 1.0):
        raise DomainError("window O must be contained in the ambient set")
    n = cluster.n
    area = omega.area
    lhs = cluster_perimeter(cluster, window=window)
    rhs = window.area * 0.5 * HEX_PERIMETER * math.sqrt(n / area) - window.perimeter
    return BoundReport("local-lower-bound", lhs, rhs)


@dataclass(frozen=True)
class EquidistributionResult:
    residual: float
    dia_normalized: float      # r / P(Q_l)
    indeco_normalized: float   # r / (P(Q_l)^(3/2) (N/|Omega|)^(1/4))
    reports: tuple[BoundReport, BoundReport]


def equidistribution_residual(
    cluster: Cluster, window: Region, n: int | None = None
) -> EquidistributionResult:
    """Deviation of localized perimeter from the hexagonal density.

    r = P(E; Q_l) - |Q_l| (P(H)/2) sqrt(N/|Omega|); both normalized residual
    forms are returned for empirical-constant tracking.
    """
    if cluster.on_torus:
        raise DomainError("equidistribution residuals apply to planar clusters")
    omega = cluster.ambient
    from . import shapely_bridge as sb

    out = sb.to_shapely(window).difference(sb.to_shapely(omega)).area
    if out > 1e-9 * max(window.area, 1.0):
        raise DomainError("window Q_l must be contained in the ambient set")
    if n is None:
        n = cluster.n
    area = omega.area
    density = 0.5 * HEX_PERIMETER * math.sqrt(n / area)
    residual = cluster_perimeter(cluster, window=window) - window.area * density
    p_w = window.perimeter
    dia = residual / p_w
    indeco = residual / (p_w ** 1.5 * (n / area) ** 0.25)
    reports = (
        BoundReport("equidistribution-dia", abs(dia), 0.0, fitted_constant=dia),
        BoundReport("equidistribution-indeco", abs(indeco), 0.0, fitted_constant=indeco),
    )
    return EquidistributionResult(residual, dia, indeco, reports)
