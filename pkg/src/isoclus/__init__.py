"""Planar/toroidal N-cluster geometry with honeycomb-type bound verifiers."""

from .clusters import (
    HEX_DIAMETER,
    HEX_PERIMETER,
    HEX_SIDE,
    Cluster,
    TorusSpec,
    cluster_distance,
    cluster_perimeter,
    torus_canonicalize,
    torus_measures,
)
from .errors import (
    DomainError,
    GeometryError,
    ParseError,
    PreconditionError,
    UnsupportedOperationError,
)
from .geometry import (
    Arc,
    Point2,
    Region,
    RigidMotion,
    Segment,
    area,
    boolean,
    classic_inequality_checks,
    diameter,
    disk,
    frame,
    half_disk_over_unit_chord,
    hausdorff_distance,
    perimeter,
    point_in_region,
    rectangle,
    regular_polygon,
    square,
)
from .reports import BoundReport

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
