"""Geometry JSON: loops of {"seg": ...} / {"arc": ...} edges, clusters with a
region or torus ambient.  Errors name the offending field path."""

from __future__ import annotations

import json

from .clusters import Cluster, TorusSpec
from .errors import ParseError
from .geometry import Arc, Point2, Region, Segment


def _point(obj, path: str) -> Point2:
    if (
        not isinstance(obj, (list, tuple))
        or len(obj) != 2
        or not all(isinstance(v, (int, float)) for v in obj)
    ):
        raise ParseError(f"{path}: expected [x, y] pair, got {obj!r}")
    return Point2(float(obj[0]), float(obj[1]))


def edge_to_json(e) -> dict:
    if isinstance(e, Segment):
        return {"seg": [[e.start.x, e.start.y], [e.end.x, e.end.y]]}
    return {
        "arc": {
            "from": [e.start.x, e.start.y],
            "to": [e.end.x, e.end.y],
            "center": [e.center.x, e.center.y],
            "sweep": e.sweep,
        }
    }


def edge_from_json(obj, path: str):
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ParseError(f"{path}: edge must be a single-key object")
    if "seg" in obj:
        pts = obj["seg"]
        if not isinstance(pts, (list, tuple)) or len(pts) != 2:
            raise ParseError(f"{path}.seg: expected two points")
        return Segment(_point(pts[0], f"{path}.seg[0]"), _point(pts[1], f"{path}.seg[1]"))
    if "arc" in obj:
        a = obj["arc"]
        for key in ("from", "to", "center", "sweep"):
            if key not in a:
                raise ParseError(f"{path}.arc: missing {key!r}")
        return Arc(
            _point(a["from"], f"{path}.arc.from"),
            _point(a["to"], f"{path}.arc.to"),
            _point(a["center"], f"{path}.arc.center"),
            float(a["sweep"]),
        )
    raise ParseError(f"{path}: unknown edge kind {list(obj)[0]!r}")


def region_to_json(r: Region) -> dict:
    return {"loops": [{"edges": [edge_to_json(e) for e in lp]} for lp in r.loops]}


def region_from_json(obj, path: str = "region") -> Region:
    if not isinstance(obj, dict) or "loops" not in obj:
        raise ParseError(f"{path}: expected object with 'loops'")
    loops = []
    for i, lp in enumerate(obj["loops"]):
        if not isinstance(lp, dict) or "edges" not in lp:
            raise ParseError(f"{path}.loops[{i}]: expected object with 'edges'")
        loops.append(
            [edge_from_json(e, f"{path}.loops[{i}].edges[{j}]") for j, e in enumerate(lp["edges"])]
        )
    try:
        return Region(loops)
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def cluster_to_json(c: Cluster) -> dict:
    if c.on_torus:
        ambient = {"torus": {"alpha": c.ambient.alpha, "beta": c.ambient.beta}}
    else:
        ambient = {"ambient": region_to_json(c.ambient)}
    return {**ambient, "chambers": [region_to_json(ch) for ch in c.chambers]}


def cluster_from_json(obj, path: str = "cluster", validate: bool = True) -> Cluster:
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: expected object")
    if "torus" in obj:
        spec = obj["torus"]
        for key in ("alpha", "beta"):
            if key not in spec:
                raise ParseError(f"{path}.torus: missing {key!r}")
        ambient = TorusSpec(int(spec["alpha"]), int(spec["beta"]))
    elif "ambient" in obj:
        ambient = region_from_json(obj["ambient"], f"{path}.ambient")
    else:
        raise ParseError(f"{path}: needs 'ambient' or 'torus'")
    if "chambers" not in obj or not isinstance(obj["chambers"], list):
        raise ParseError(f"{path}: 'chambers' must be a list")
    chambers = [
        region_from_json(ch, f"{path}.chambers[{i}]") for i, ch in enumerate(obj["chambers"])
    ]
    return Cluster(chambers, ambient, validate=validate)


def load_region(path: str) -> Region:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return region_from_json(obj, path)


def load_cluster(path: str, validate: bool = True) -> Cluster:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return cluster_from_json(obj, path, validate=validate)


def dump_region(r: Region, path: str):
    with open(path, "w") as fh:
        json.dump(region_to_json(r), fh)


def dump_cluster(c: Cluster, path: str):
    with open(path, "w") as fh:
        json.dump(cluster_to_json(c), fh)
