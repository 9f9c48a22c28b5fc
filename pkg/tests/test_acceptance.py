"""Acceptance suite: every criterion at its stated tolerance, one line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the pass/fail lines
and timings.
"""

import math
import time

import numpy as np
import pytest

from isoclus import Point2, Region, RigidMotion, boolean, classic_inequality_checks, square
from isoclus.clusters import (
    HEX_PERIMETER,
    HEX_SIDE,
    Cluster,
    TorusSpec,
    cluster_distance,
    cluster_perimeter,
)
from isoclus.geometry import regular_polygon
from isoclus.hexgrid import generate_torus, unit_hexagon

from conftest import random_star_polygon


BUDGETS = {}


def _finish(number: int, t0: float, budget: float):
    elapsed = time.time() - t0
    BUDGETS[number] = elapsed
    print(f"criterion {number:2d}: PASS ({elapsed:.2f}s, budget {budget:.0f}s)")
    assert elapsed < budget, f"criterion {number} exceeded its runtime budget"


def test_criterion_01_hexagon_constants():
    t0 = time.time()
    h = unit_hexagon()
    assert abs(h.area - 1.0) <= 1e-9
    assert abs(h.perimeter - 2.0 * 12.0 ** 0.25) <= 1e-9
    _finish(1, t0, 1.0)


def test_criterion_02_surgery_partition():
    from isoclus.partitions import surgery_partition

    t0 = time.time()
    q0, q1 = square(1.0), square(3.0)
    constants = []
    for m in (10, 100, 1000):
        cluster, plan, report = surgery_partition(q0, q1, None, m)
        target = 8.0 / m
        for ch in cluster.chambers:
            assert abs(ch.area - target) <= 1e-9 * target
        c = report.fitted_constant
        assert 0.0 < c <= 10.0
        constants.append(c)
    assert max(constants) / min(constants) <= 4.0
    _finish(2, t0, 10.0)


def test_criterion_03_boundary_reassembly():
    from isoclus.partitions import boundary_reassembly_partition

    t0 = time.time()
    omega = square(1.0, Point2(0.5, 0.5))
    constants = []
    for n in (16, 64, 256, 1024):
        cluster, ledger, report = boundary_reassembly_partition(omega, n)
        delta = 1.0 / n
        assert abs(cluster.exterior_area()) <= 1e-9
        for ch in cluster.chambers:
            assert abs(ch.area - delta) <= 1e-9 * delta
        total = report.lhs  # |Omega| = 1: already normalized
        assert total >= 0.5 * HEX_PERIMETER * math.sqrt(n) - 1e-9
        constants.append(report.fitted_constant)
    assert max(constants) / min(constants) <= 4.0
    _finish(3, t0, 60.0)


def test_criterion_04_hales_torus_equality():
    from isoclus.bounds import hales_torus
    from isoclus.partitions import equal_area_cut
    from isoclus.stability import three_edge_perturbation

    t0 = time.time()
    for ab in ((2, 2), (4, 4), (2, 6)):
        spec = TorusSpec(*ab)
        honeycomb = generate_torus(spec)
        per = cluster_perimeter(honeycomb)
        assert abs(per - spec.cells * HEX_PERIMETER / 2.0) <= 1e-9
        assert abs(hales_torus(honeycomb).slack) <= 1e-9
    # perturbation corpus members give strictly positive slack
    spec = TorusSpec(2, 2)
    for eps in (1e-2, 5e-2):
        rep = hales_torus(three_edge_perturbation(spec, eps))
        assert rep.slack > 0
    honeycomb = generate_torus(spec)
    first, second = equal_area_cut(honeycomb.chambers[0], 0.5, math.pi / 2.0)
    split = Cluster([first, second] + list(honeycomb.chambers[1:]), spec, validate=False)
    assert hales_torus(split).slack > 0
    _finish(4, t0, 10.0)


def test_criterion_05_arc_function():
    from isoclus.stability import arc, arc_excess

    t0 = time.time()
    assert arc(0.0) == 1.0
    assert abs(arc(math.pi / 8.0) - math.pi / 2.0) <= 1e-10
    xs = np.linspace(0.0, math.pi / 8.0, 200)
    ys = np.array([arc(float(x)) for x in xs])
    second = ys[2:] - 2.0 * ys[1:-1] + ys[:-2]
    assert (second >= -1e-10).all()
    grid = np.linspace(1e-9, 0.05, 400)
    eta = min(arc_excess(float(a)) / (a * a) for a in grid)
    assert eta > 0
    _finish(5, t0, 1.0)


def test_criterion_06_chordal_equality_case():
    from isoclus.stability import arc_t, bulged_hexagon, chordal_check

    t0 = time.time()
    base = regular_polygon(6, HEX_SIDE, phase=math.pi / 2.0)
    for a in (1e-3, 1e-2):
        e_region = bulged_hexagon(base, [a, 0, 0, 0, 0, 0])
        predicted = base.perimeter - HEX_SIDE + arc_t(a, HEX_SIDE)
        assert abs(e_region.perimeter - predicted) <= 1e-8 * predicted
    two = bulged_hexagon(base, [5e-3, 5e-3, 0, 0, 0, 0])
    rep = chordal_check(two, base)
    assert rep.slack > 0
    _finish(6, t0, 5.0)


def _hexagon_corpus(seed: int, size: int):
    from isoclus.stability import fit_regular_ngon

    rng = np.random.default_rng(seed)
    base = regular_polygon(6, HEX_SIDE, phase=math.pi / 2.0)
    pts0 = np.asarray([e.start.as_tuple() for e in base.loops[0]])
    ratios = []
    while len(ratios) < size:
        pts = pts0 + rng.normal(scale=2e-3, size=pts0.shape)
        try:
            r = Region.from_points([Point2(*p) for p in pts])
            r = r.scaled(1.0 / math.sqrt(r.area))
            fit = fit_regular_ngon(r, 6)
        except ValueError:
            continue
        if not 1e-10 <= fit.deficit <= 1e-2:
            continue
        assert math.isfinite(fit.ratio)
        ratios.append(fit.ratio)
    return ratios


def test_criterion_07_quantitative_hexagon_stability():
    t0 = time.time()
    max_a = max(_hexagon_corpus(seed=1, size=500))
    max_b = max(_hexagon_corpus(seed=2, size=500))
    assert max(max_a, max_b) / min(max_a, max_b) <= 2.0
    _finish(7, t0, 120.0)


def test_criterion_08_honeycomb_asymmetry():
    from isoclus.stability import alpha_asymmetry, kappa_estimate, three_edge_perturbation

    t0 = time.time()
    spec = TorusSpec(2, 2)
    honeycomb = generate_torus(spec)
    assert alpha_asymmetry(honeycomb).alpha <= 1e-9
    # invariance under the lattice translation family
    pert = three_edge_perturbation(spec, 1e-2)
    base_alpha = alpha_asymmetry(pert).alpha
    v = Point2(0.4 * math.sqrt(3.0) * HEX_SIDE, 0.6 * HEX_SIDE)
    moved = Cluster([ch.translated(v) for ch in pert.chambers], spec, validate=False)
    assert abs(alpha_asymmetry(moved).alpha - base_alpha) <= 1e-6
    # quadratic sharpness of kappa across the epsilon range
    kappas = []
    for eps in (1e-3, 1e-2, 5e-2):
        member = three_edge_perturbation(spec, eps)
        result = alpha_asymmetry(member)
        assert result.alpha > 0
        p = cluster_perimeter(member)
        p_ref = spec.cells * HEX_PERIMETER / 2.0
        kappas.append((p - p_ref) / (p_ref * result.alpha**2))
    assert kappa_estimate([three_edge_perturbation(spec, 1e-2)]) > 0
    assert min(kappas) > 0
    assert max(kappas) / min(kappas) <= 5.0
    _finish(8, t0, 120.0)


def test_criterion_09_cheeger_constants():
    from isoclus.cheeger import cheeger_convex
    from oracles import min_rounded_square_ratio

    t0 = time.time()
    res = cheeger_convex(square(1.0))
    assert abs(res.h - (2.0 + math.sqrt(math.pi))) <= 1e-8
    assert abs(res.h - min_rounded_square_ratio(1.0, n=400001)) <= 1e-8
    n = 10000
    poly = regular_polygon(n, 2.0 * math.sin(math.pi / n))
    assert abs(cheeger_convex(poly).h - 2.0) <= 1e-3
    k = regular_polygon(7, 1.0)
    h1 = cheeger_convex(k).h
    for lam in (0.5, 3.0):
        assert abs(cheeger_convex(k.scaled(lam)).h - h1 / lam) <= 1e-8 * h1
    _finish(9, t0, 30.0)


def test_criterion_10_hn_sandwich():
    from isoclus.cheeger import hexagon_cheeger_constant, hn_lower, hn_sandwich

    t0 = time.time()
    omega = square(1.0)
    hh = hexagon_cheeger_constant()
    ratios = []
    for n in (16, 32, 64, 128, 256, 512, 1024):
        s = hn_sandwich(omega, n)
        assert s.feasible, f"upper construction infeasible at N={n}"
        assert s.lower <= s.upper
        assert abs(s.lower - 2.0 * math.sqrt(math.pi) * n**1.5) <= 1e-9 * s.lower
        ratios.append(s.upper / n**1.5)
    tail = ratios[-4:]
    assert all(b <= a + 1e-12 for a, b in zip(tail, tail[1:]))
    assert 2.0 * math.sqrt(math.pi) <= ratios[-1] <= hh + 0.2
    # lower-curve successive differences reproduce the Property-2 identity
    c = 2.0 * math.sqrt(math.pi)
    for n in range(16, 257):
        diff = hn_lower(1.0, n + 1) - hn_lower(1.0, n)
        assert abs(diff - c * ((n + 1) ** 1.5 - n**1.5)) <= 1e-12 * max(diff, 1.0)
        assert hn_lower(1.0, n + 1) >= hn_lower(1.0, n) + c * math.sqrt(n + 1) - 1e-12
    _finish(10, t0, 60.0)


def test_criterion_11_curvature_constants():
    from isoclus.cheeger import curvature_constants

    t0 = time.time()
    c = curvature_constants([4.0, 3.0, 5.0], [1.0, 2.0, 0.5])
    assert (c + c.T == 0.0).all()
    assert c[1, 2] == (2.0 * 4.0 - 1.0 * 3.0) / 3.0
    assert c[1, 0] == 4.0 and c[2, 0] == 3.0 and c[3, 0] == 5.0
    same = curvature_constants([4.0, 4.0], [1.5, 1.5])
    assert same[1, 2] == 0.0
    _finish(11, t0, 1.0)


def test_criterion_12_p_limits():
    from isoclus.cheeger import p_eigenvalue_lower, p_partition_lower

    t0 = time.time()
    p = 1.0 + 1e-8
    for h in (0.5, 2.0, 7.0):
        assert abs(p_eigenvalue_lower(h, p) - h) <= 1e-6 * h
    for hn, n in ((10.0, 4), (250.0, 64)):
        assert abs(p_partition_lower(hn, p, n) - hn) <= 1e-6 * hn
    _finish(12, t0, 1.0)


def test_criterion_13_kernel_property_suite():
    t0 = time.time()
    rng = np.random.default_rng(7)
    regions = [random_star_polygon(rng, n=int(rng.integers(5, 14))) for _ in range(200)]
    for r in regions:
        area, per = r.area, r.perimeter
        for _ in range(3):
            m = RigidMotion(rng.uniform(0, 2 * math.pi), Point2(*rng.uniform(-5, 5, 2)))
            moved = r.transformed(m)
            assert abs(moved.area - area) <= 1e-12 * max(area, 1.0)
            assert abs(moved.perimeter - per) <= 1e-12 * max(per, 1.0)
        for lam in (0.5, 2.0, 7.0):
            s = r.scaled(lam)
            assert abs(s.area - lam * lam * area) <= 1e-12 * max(lam * lam * area, 1.0)
            assert abs(s.perimeter - lam * per) <= 1e-12 * max(lam * per, 1.0)
        for report in classic_inequality_checks(r):
            assert report.satisfied, report
    # inclusion-exclusion on random pairs
    for i in range(0, 100, 2):
        a, b = regions[i], regions[i + 1].translated(Point2(0.4, -0.2))
        union = boolean(a, b, "union").area
        inter = boolean(a, b, "intersect").area
        assert abs(union + inter - a.area - b.area) <= 1e-9
    # cluster-distance triangle inequality on random triples
    ambient = square(40.0)
    for _ in range(20):
        centers = rng.uniform(-4, 4, size=(3, 2))
        clusters = [
            Cluster(
                [square(1.0, Point2(*c)), square(1.0, Point2(*(c + 10.0)))],
                ambient,
                validate=False,
            )
            for c in centers
        ]
        d01 = cluster_distance(clusters[0], clusters[1])
        d12 = cluster_distance(clusters[1], clusters[2])
        d02 = cluster_distance(clusters[0], clusters[2])
        assert d02 <= d01 + d12 + 1e-9
    _finish(13, t0, 60.0)
