import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from isoclus.geometry import Point2, Region


def random_convex_polygon(rng: np.random.Generator, n_points: int = 12, scale: float = 1.0) -> Region:
    from scipy.spatial import ConvexHull

    pts = rng.normal(size=(n_points, 2)) * scale
    hull = ConvexHull(pts)
    return Region.from_points([Point2(*pts[i]) for i in hull.vertices])


def random_star_polygon(rng: np.random.Generator, n: int = 10, scale: float = 1.0) -> Region:
    """Simple star-shaped polygon: random radii over well-spread angles.

    Angular gaps stay below pi so the origin is interior and the polygon is
    simple with positive signed area.
    """
    gaps = rng.uniform(0.5, 1.0, size=n)
    angles = 2.0 * math.pi * np.cumsum(gaps) / gaps.sum()
    radii = rng.uniform(0.3, 1.0, size=n) * scale
    pts = [Point2(r * math.cos(a), r * math.sin(a)) for r, a in zip(radii, angles)]
    return Region.from_points(pts)


@pytest.fixture
def rng():
    return np.random.default_rng(42)
