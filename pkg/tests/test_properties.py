"""Property tests for the pure numeric kernels."""

import math

from hypothesis import given, settings
from hypothesis import strategies as st

from isoclus.cheeger import (
    chamber_volume_floor,
    curvature_constants,
    p_eigenvalue_lower,
    p_partition_lower,
)
from isoclus.geometry import Point2, RigidMotion
from isoclus.stability import arc, arc_excess, arc_t

finite = st.floats(allow_nan=False, allow_infinity=False)


@given(st.floats(min_value=0.0, max_value=5.0))
def test_arc_at_least_one(a):
    assert arc(a) >= 1.0


@given(st.floats(min_value=0.0, max_value=1.0), st.floats(min_value=0.1, max_value=4.0))
def test_arc_t_scaling(a, t):
    assert math.isclose(arc_t(a, t), t * arc(a / (t * t)), rel_tol=1e-12)


@given(st.floats(min_value=1e-12, max_value=0.04))
def test_arc_excess_quadratic_coercivity(a):
    assert arc_excess(a) >= 5.0 * a * a  # eta ~ 6 near zero on this range


@given(
    st.lists(st.floats(min_value=0.1, max_value=50.0), min_size=1, max_size=8),
    st.data(),
)
def test_curvature_antisymmetry(hs, data):
    areas = data.draw(
        st.lists(
            st.floats(min_value=0.01, max_value=100.0),
            min_size=len(hs),
            max_size=len(hs),
        )
    )
    c = curvature_constants(hs, areas)
    assert (c + c.T == 0.0).all()
    for j in range(1, len(hs) + 1):
        assert c[j, 0] == hs[j - 1]


@given(st.floats(min_value=0.1, max_value=100.0), st.floats(min_value=1.000001, max_value=4.0))
def test_p_eigenvalue_bound_positive(h, p):
    assert p_eigenvalue_lower(h, p) > 0.0


@given(
    st.floats(min_value=1.0, max_value=1e4),
    st.floats(min_value=1.000001, max_value=3.0),
    st.integers(min_value=1, max_value=256),
)
def test_p_partition_below_n_times_eigenvalue(hn, p, n):
    # partition bound is the Jensen floor of n identical chambers
    per_chamber = p_eigenvalue_lower(hn / n, p)
    assert p_partition_lower(hn, p, n) <= n * per_chamber * (1.0 + 1e-12)


@given(st.floats(min_value=1e-3, max_value=1e6))
def test_chamber_floor_monotone(hn):
    assert chamber_volume_floor(hn) >= chamber_volume_floor(hn * 2.0)


@settings(max_examples=40)
@given(
    st.floats(min_value=-math.pi, max_value=math.pi),
    st.floats(min_value=-10, max_value=10),
    st.floats(min_value=-10, max_value=10),
    st.floats(min_value=-5, max_value=5),
    st.floats(min_value=-5, max_value=5),
)
def test_rigid_motion_group_laws(theta, tx, ty, px, py):
    m = RigidMotion(theta, Point2(tx, ty))
    p = Point2(px, py)
    q = m.apply(p)
    back = m.inverse().apply(q)
    assert back.distance(p) <= 1e-9
    ident = m.compose(m.inverse())
    assert ident.apply(p).distance(p) <= 1e-9
