"""Minimal SVG rendering of clusters: one filled path per chamber, true arcs."""

from __future__ import annotations

import math

from .clusters import Cluster, TorusSpec
from .geometry import Arc, Region, Segment


def _path_d(region: Region) -> str:
    parts = []
    for loop in region.loops:
        first = loop[0].start
        parts.append(f"M {first.x:.9g} {-first.y:.9g}")
        for e in loop:
            if isinstance(e, Segment):
                parts.append(f"L {e.end.x:.9g} {-e.end.y:.9g}")
            else:
                r = e.radius
                large = 1 if abs(e.sweep) > math.pi else 0
                sweep_flag = 1 if e.sweep > 0 else 0
                parts.append(
                    f"A {r:.9g} {r:.9g} 0 {large} {sweep_flag} {e.end.x:.9g} {-e.end.y:.9g}"
                )
        parts.append("Z")
    return " ".join(parts)


def render_regions_svg(regions: list[Region], labels: list[str] | None = None) -> str:
    """Overlay plot of bare regions (used for fitted-shape comparisons)."""
    boxes = [r.bounds() for r in regions]
    minx = min(b[0] for b in boxes)
    miny = min(b[1] for b in boxes)
    maxx = max(b[2] for b in boxes)
    maxy = max(b[3] for b in boxes)
    spanx, spany = maxx - minx, maxy - miny
    mx, my = 0.05 * spanx + 1e-9, 0.05 * spany + 1e-9
    sw = 0.004 * max(spanx, spany, 1e-9)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{minx - mx:.9g} {-(maxy + my):.9g} '
        f'{spanx + 2 * mx:.9g} {spany + 2 * my:.9g}">',
    ]
    n = len(regions)
    for i, r in enumerate(regions):
        hue = int(360.0 * i / max(n, 1))
        title = f"<title>{labels[i]}</title>" if labels else ""
        lines.append(
            f'<path d="{_path_d(r)}" fill="hsl({hue},60%,72%)" fill-opacity="0.45" '
            f'stroke="hsl({hue},70%,35%)" stroke-width="{sw:.9g}">{title}</path>'
        )
    lines.append("</svg>")
    return "\n".join(lines)


def render_svg(cluster: Cluster, stroke_width: float | None = None) -> str:
    """SVG document: viewbox fitted to the ambient bounding box plus 5% margin,
    chambers filled by index hue, arcs rendered as true path arcs."""
    if cluster.on_torus:
        t: TorusSpec = cluster.ambient
        minx, miny, maxx, maxy = 0.0, 0.0, t.width, t.height
    else:
        minx, miny, maxx, maxy = cluster.ambient.bounds()
    spanx, spany = maxx - minx, maxy - miny
    mx, my = 0.05 * spanx, 0.05 * spany
    vb = (minx - mx, -(maxy + my), spanx + 2 * mx, spany + 2 * my)
    if stroke_width is None:
        stroke_width = 0.004 * max(spanx, spany)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{vb[0]:.9g} {vb[1]:.9g} {vb[2]:.9g} {vb[3]:.9g}">',
    ]
    clip = ""
    if cluster.on_torus:
        lines.append(
            f'<clipPath id="fund"><rect x="{minx:.9g}" y="{-maxy:.9g}" '
            f'width="{spanx:.9g}" height="{spany:.9g}"/></clipPath>'
        )
        lines.append(
            f'<rect x="{minx:.9g}" y="{-maxy:.9g}" width="{spanx:.9g}" height="{spany:.9g}" '
            f'fill="none" stroke="#333" stroke-width="{stroke_width:.9g}"/>'
        )
        clip = ' clip-path="url(#fund)"'
        lines.append(f"<g{clip}>")
    n = cluster.n
    for i, ch in enumerate(cluster.chambers):
        hue = int(360.0 * i / max(n, 1))
        if cluster.on_torus:
            # draw the chamber and its wrapped copies, clipped to the domain
            t = cluster.ambient
            d_parts = []
            for kx in (-1, 0, 1):
                for ky in (-1, 0, 1):
                    from .geometry import Point2, RigidMotion

                    moved = ch.translated(Point2(kx * t.width, ky * t.height))
                    bx = moved.bounds()
                    if bx[2] < minx or bx[0] > maxx or bx[3] < miny or bx[1] > maxy:
                        continue
                    d_parts.append(_path_d(moved))
            d = " ".join(d_parts)
        else:
            d = _path_d(ch)
        lines.append(
            f'<path d="{d}" fill="hsl({hue},60%,72%)" stroke="#222" '
            f'stroke-width="{stroke_width:.9g}"/>'
        )
    if cluster.on_torus:
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines)
