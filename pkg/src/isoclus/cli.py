"""Command-line front end: constructions, bound checks, sweeps, CSV/SVG output.

Subcommands: construct {surgery, reassembly, competitor}; bounds {hales,
local, equi}; stability {arc, chordal, ngon, hexagon, alpha, kappa};
cheeger {convex, hn-sweep}; render.  All runs are deterministic for a fixed
seed; ISOCLUS_THREADS caps sweep parallelism.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import geojson
from .clusters import HEX_PERIMETER, Cluster, TorusSpec, cluster_perimeter
from .errors import ParseError
from .geometry import Point2, Region, square
from .reports import BoundReport


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("ISOCLUS_THREADS", "1")))
    except ValueError:
        return 1


def _map_maybe_parallel(fn, items):
    workers = min(_threads(), len(items)) if items else 1
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _append_csv(path: str, header: list[str], rows: list[dict]):
    """Atomic append: header written once, each row a single write call."""
    payload = ""
    if not os.path.exists(path) or os.path.getsize(path) == 0:
        payload += ",".join(header) + "\n"
    for row in rows:
        payload += ",".join(_fmt(row.get(col, "")) for col in header) + "\n"
    fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_APPEND, 0o644)
    try:
        os.write(fd, payload.encode())
    finally:
        os.close(fd)


CSV_HEADER = [
    "experiment",
    "params",
    "n",
    "lhs",
    "rhs",
    "slack",
    "satisfied",
    "fitted_constant",
    "extra",
    "wall_time",
]


def _report_row(experiment: str, params: str, n, report: BoundReport, extra="", wall=0.0) -> dict:
    return {
        "experiment": experiment,
        "params": params,
        "n": n,
        "lhs": report.lhs,
        "rhs": report.rhs,
        "slack": report.slack,
        "satisfied": report.satisfied,
        "fitted_constant": ""
        if report.fitted_constant is None
        else f"{report.fitted_constant:.12g}",
        "extra": extra,
        "wall_time": f"{wall:.3f}",
    }


def _emit(args, rows: list[dict], cluster: Cluster | None = None, name: str = "out"):
    os.makedirs(args.out, exist_ok=True)
    if args.csv:
        _append_csv(os.path.join(args.out, args.csv), CSV_HEADER, rows)
    if cluster is not None:
        geojson.dump_cluster(cluster, os.path.join(args.out, f"{name}.json"))
        if args.svg:
            from .svg import render_svg

            with open(os.path.join(args.out, f"{name}.svg"), "w") as fh:
                fh.write(render_svg(cluster))
    for row in rows:
        flag = "ok" if str(row["satisfied"]) in ("True", "ok", "") else "VIOLATED"
        print(
            f"{row['experiment']}[{row['params']}] lhs={_fmt(row['lhs'])} rhs={_fmt(row['rhs'])} "
            f"slack={_fmt(row['slack'])} fitted={row['fitted_constant']} [{flag}]"
        )


def _load_omega(path: str) -> Region:
    return geojson.load_region(path)


def _parse_torus(text: str) -> TorusSpec:
    try:
        a, b = text.lower().split("x")
        return TorusSpec(int(a), int(b))
    except ValueError as exc:
        raise ParseError(f"torus spec must look like 4x4, got {text!r}") from exc


# ---------------------------------------------------------------------------
# construct
# ---------------------------------------------------------------------------


def cmd_construct_surgery(args) -> int:
    from .partitions import surgery_partition

    t0 = time.time()
    q0, q1 = square(args.q0), square(args.q1)
    a_region = geojson.load_region(args.a) if args.a else None
    cluster, plan, report = surgery_partition(q0, q1, a_region, args.m)
    row = _report_row(
        "construct-surgery",
        f"q0={args.q0};q1={args.q1};m={args.m}",
        args.m,
        report,
        extra=f"s={plan.s};k={plan.k};r={plan.r}",
        wall=time.time() - t0,
    )
    _emit(args, [row], cluster, f"surgery_m{args.m}")
    return 0


def cmd_construct_reassembly(args) -> int:
    from .partitions import boundary_reassembly_partition

    omega = _load_omega(args.omega) if args.omega else square(1.0, Point2(0.5, 0.5))

    def run(n: int):
        t0 = time.time()
        cluster, ledger, report = boundary_reassembly_partition(omega, n)
        row = _report_row(
            "construct-reassembly",
            f"n={n}",
            n,
            report,
            extra=f"k={ledger.interior_count};b={ledger.boundary_count}",
            wall=time.time() - t0,
        )
        return cluster, row

    ns = [int(x) for x in args.n.split(",")]
    results = _map_maybe_parallel(run, ns)
    rows = [row for _, row in results]
    _emit(args, rows, results[-1][0], f"reassembly_n{ns[-1]}")
    return 0


def cmd_construct_competitor(args) -> int:
    from .partitions import competitor_build

    t0 = time.time()
    omega = _load_omega(args.omega)
    e_cluster = geojson.load_cluster(args.cluster)
    q_l = square(args.ql, Point2(*args.ql_center))
    cluster, report = competitor_build(omega, e_cluster, q_l, args.n, args.mu)
    row = _report_row(
        "construct-competitor",
        f"ql={args.ql};n={args.n};mu={args.mu}",
        args.n,
        report,
        wall=time.time() - t0,
    )
    _emit(args, [row], cluster, f"competitor_n{args.n}")
    return 0


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


def cmd_bounds_hales(args) -> int:
    from .bounds import hales_plane, hales_torus
    from .hexgrid import generate_torus

    t0 = time.time()
    if args.torus:
        spec = _parse_torus(args.torus)
        cluster = generate_torus(spec) if not args.cluster else geojson.load_cluster(args.cluster)
        report = hales_torus(cluster)
        params = f"torus={args.torus}"
    else:
        cluster = geojson.load_cluster(args.cluster)
        report = (hales_torus if cluster.on_torus else hales_plane)(cluster)
        params = f"cluster={os.path.basename(args.cluster)}"
    row = _report_row("bounds-hales", params, cluster.n, report, wall=time.time() - t0)
    _emit(args, [row])
    return 0 if report.satisfied else 3


def cmd_bounds_local(args) -> int:
    from .bounds import local_lower_bound

    t0 = time.time()
    cluster = geojson.load_cluster(args.cluster)
    window = square(args.window, Point2(*args.center))
    report = local_lower_bound(cluster, window)
    row = _report_row(
        "bounds-local", f"window={args.window}", cluster.n, report, wall=time.time() - t0
    )
    _emit(args, [row])
    return 0 if report.satisfied else 3


def cmd_bounds_equi(args) -> int:
    from .bounds import equidistribution_residual

    t0 = time.time()
    cluster = geojson.load_cluster(args.cluster)
    window = square(args.ql, Point2(*args.center))
    res = equidistribution_residual(cluster, window, n=args.n)
    rows = [
        _report_row(
            "bounds-equi",
            f"ql={args.ql}",
            args.n or cluster.n,
            rep,
            extra=f"residual={res.residual:.12g}",
            wall=time.time() - t0,
        )
        for rep in res.reports
    ]
    _emit(args, rows)
    return 0


# ---------------------------------------------------------------------------
# stability
# ---------------------------------------------------------------------------


def cmd_stability_arc(args) -> int:
    from .stability import arc

    rows = []
    for a in args.a:
        t0 = time.time()
        val = arc(a)
        rows.append(
            {
                "experiment": "stability-arc",
                "params": f"a={a:.12g}",
                "n": "",
                "lhs": val,
                "rhs": 1.0,
                "slack": val - 1.0,
                "satisfied": val >= 1.0,
                "fitted_constant": "",
                "extra": "",
                "wall_time": f"{time.time() - t0:.3f}",
            }
        )
    _emit(args, rows)
    return 0


def cmd_stability_chordal(args) -> int:
    import math as _math

    from .clusters import HEX_SIDE
    from .geometry import regular_polygon
    from .stability import bulged_hexagon, chordal_check

    t0 = time.time()
    base = regular_polygon(6, HEX_SIDE, phase=_math.pi / 2.0)
    bulges = [float(x) for x in args.bulges.split(",")]
    if len(bulges) < 6:
        bulges += [0.0] * (6 - len(bulges))
    e_region = bulged_hexagon(base, bulges[:6])
    report = chordal_check(e_region, base)
    row = _report_row(
        "stability-chordal", f"bulges={args.bulges}", 6, report, wall=time.time() - t0
    )
    _emit(args, [row])
    return 0 if report.satisfied else 3


def cmd_stability_ngon(args) -> int:
    from .geometry import regular_polygon
    from .stability import fit_regular_ngon, regular_ngon_side

    rng = np.random.default_rng(args.seed)
    base = regular_polygon(args.ngon, regular_ngon_side(args.ngon))
    pts0 = np.asarray([e.start.as_tuple() for e in base.loops[0]])

    def sample(i: int):
        t0 = time.time()
        while True:
            pts = pts0 + rng.normal(scale=args.sigma, size=pts0.shape)
            r = Region.from_points([Point2(*p) for p in pts])
            r = r.scaled(1.0 / math.sqrt(r.area))
            try:
                fit = fit_regular_ngon(r, args.ngon)
            except Exception:
                continue
            if fit.deficit <= args.max_deficit:
                return fit, time.time() - t0

    rows = []
    ratios = []
    last_fit = None
    for i in range(args.samples):
        fit, wall = sample(i)
        last_fit = fit
        ratio = fit.ratio if fit.ratio is not None else 0.0
        ratios.append(ratio)
        rows.append(
            {
                "experiment": "stability-ngon",
                "params": f"n={args.ngon};sample={i}",
                "n": args.ngon,
                "lhs": fit.hd,
                "rhs": 0.0,
                "slack": fit.hd,
                "satisfied": True,
                "fitted_constant": f"{ratio:.12g}",
                "extra": f"deficit={fit.deficit:.12g}",
                "wall_time": f"{wall:.3f}",
            }
        )
    _emit(args, rows)
    if args.svg and last_fit is not None:
        from .svg import render_regions_svg

        fitted = regular_polygon(
            args.ngon, regular_ngon_side(args.ngon), phase=last_fit.motion.theta
        ).translated(last_fit.motion.translation)
        doc = render_regions_svg([last_fit.polygon, fitted], ["sample", "fitted"])
        with open(os.path.join(args.out, "ngon_overlay.svg"), "w") as fh:
            fh.write(doc)
    print(f"empirical C({args.ngon}) envelope: {max(ratios):.6g} over {len(ratios)} samples")
    return 0


def cmd_stability_hexagon(args) -> int:
    import math as _math

    from .clusters import HEX_SIDE
    from .geometry import regular_polygon
    from .stability import bulged_hexagon, hexagon_unit_inequality

    t0 = time.time()
    base = regular_polygon(6, HEX_SIDE, phase=_math.pi / 2.0)
    e_region = bulged_hexagon(base, [args.bulge, 0, 0, 0, 0, 0])
    report = hexagon_unit_inequality(e_region, base)
    row = _report_row(
        "stability-hexagon", f"bulge={args.bulge:.12g}", 6, report, wall=time.time() - t0
    )
    _emit(args, [row])
    return 0 if report.satisfied else 3


def cmd_stability_alpha(args) -> int:
    from .hexgrid import generate_torus
    from .stability import alpha_asymmetry, three_edge_perturbation

    t0 = time.time()
    spec = _parse_torus(args.torus)
    if args.cluster:
        cluster = geojson.load_cluster(args.cluster)
    elif args.eps:
        cluster = three_edge_perturbation(spec, args.eps)
    else:
        cluster = generate_torus(spec)
    res = alpha_asymmetry(cluster)
    rows = [
        {
            "experiment": "stability-alpha",
            "params": f"torus={args.torus};eps={args.eps or 0}",
            "n": cluster.n,
            "lhs": res.alpha,
            "rhs": 0.0,
            "slack": res.alpha,
            "satisfied": True,
            "fitted_constant": "",
            "extra": f"t={res.t:.9g};s={res.s:.9g}",
            "wall_time": f"{time.time() - t0:.3f}",
        }
    ]
    _emit(args, rows)
    print(f"alpha = {res.alpha:.9g} at v = ({res.t:.6g}, {res.s:.6g})")
    return 0


def cmd_stability_kappa(args) -> int:
    from .stability import kappa_estimate, three_edge_perturbation

    t0 = time.time()
    spec = _parse_torus(args.torus)
    eps_values = [float(x) for x in args.eps_list.split(",")]
    family = [three_edge_perturbation(spec, e) for e in eps_values]
    kappa = kappa_estimate(family)
    rows = [
        {
            "experiment": "stability-kappa",
            "params": f"torus={args.torus};eps={args.eps_list}",
            "n": spec.cells,
            "lhs": kappa,
            "rhs": 0.0,
            "slack": kappa,
            "satisfied": kappa > 0,
            "fitted_constant": f"{kappa:.12g}",
            "extra": "",
            "wall_time": f"{time.time() - t0:.3f}",
        }
    ]
    _emit(args, rows)
    print(f"kappa estimate: {kappa:.9g}")
    return 0 if kappa > 0 else 3


# ---------------------------------------------------------------------------
# cheeger
# ---------------------------------------------------------------------------


def cmd_cheeger_convex(args) -> int:
    from .cheeger import cheeger_convex

    t0 = time.time()
    if args.k:
        region = geojson.load_region(args.k)
        params = f"k={os.path.basename(args.k)}"
    else:
        region = square(args.square)
        params = f"square={args.square}"
    res = cheeger_convex(region)
    rows = [
        {
            "experiment": "cheeger-convex",
            "params": params,
            "n": 1,
            "lhs": res.h,
            "rhs": 2.0 * math.sqrt(math.pi) / math.sqrt(region.area),
            "slack": res.h - 2.0 * math.sqrt(math.pi) / math.sqrt(region.area),
            "satisfied": res.h >= 2.0 * math.sqrt(math.pi) / math.sqrt(region.area) - 1e-9,
            "fitted_constant": "",
            "extra": f"r={res.inner_radius:.12g}",
            "wall_time": f"{time.time() - t0:.3f}",
        }
    ]
    _emit(args, rows)
    print(f"h = {res.h:.12g} (inner radius {res.inner_radius:.12g})")
    return 0


def cmd_cheeger_hn_sweep(args) -> int:
    from .cheeger import hn_sandwich

    omega = _load_omega(args.omega) if args.omega else square(1.0)
    ns = []
    n = 16
    while n <= args.nmax:
        ns.append(n)
        n *= 2

    def run(n: int):
        t0 = time.time()
        s = hn_sandwich(omega, n, eps=args.eps)
        return s, time.time() - t0

    results = _map_maybe_parallel(run, ns)
    rows = []
    for s, wall in results:
        rows.append(
            {
                "experiment": "cheeger-hn",
                "params": f"eps={args.eps}",
                "n": s.n,
                "lhs": "" if s.upper is None else s.upper,
                "rhs": s.lower,
                "slack": "" if s.upper is None else s.upper - s.lower,
                "satisfied": (s.upper is None) or (s.upper >= s.lower),
                "fitted_constant": "",
                "extra": f"k={s.k};delta={'' if s.delta is None else f'{s.delta:.12g}'};feasible={s.feasible}",
                "wall_time": f"{wall:.3f}",
            }
        )
    _emit(args, rows)
    return 0


def cmd_render(args) -> int:
    from .svg import render_svg

    cluster = geojson.load_cluster(args.cluster)
    doc = render_svg(cluster)
    out = args.output or os.path.join(args.out, "render.svg")
    os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
    with open(out, "w") as fh:
        fh.write(doc)
    print(f"wrote {out}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--svg", action="store_true", help="emit an SVG of the construction")
    p.add_argument("--csv", default=None, help="CSV file (relative to --out) to append rows to")


def _pair(text: str) -> tuple[float, float]:
    x, y = text.split(",")
    return (float(x), float(y))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isoclus", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    construct = sub.add_parser("construct", help="equal-area partition constructions")
    csub = construct.add_subparsers(dest="sub", required=True)

    p = csub.add_parser("surgery", help="frame surgery partition")
    p.add_argument("--q0", type=float, required=True, help="inner square side")
    p.add_argument("--q1", type=float, required=True, help="outer square side")
    p.add_argument("--m", type=int, required=True, help="chamber count")
    p.add_argument("--a", default=None, help="geometry JSON for A (defaults to the frame)")
    _add_common(p)
    p.set_defaults(fn=cmd_construct_surgery)

    p = csub.add_parser("reassembly", help="boundary reassembly partition")
    p.add_argument("--omega", default=None, help="geometry JSON (default: unit square)")
    p.add_argument("--n", required=True, help="chamber count(s), comma separated")
    _add_common(p)
    p.set_defaults(fn=cmd_construct_reassembly)

    p = csub.add_parser("competitor", help="hexagonal competitor substitution")
    p.add_argument("--omega", required=True)
    p.add_argument("--cluster", required=True)
    p.add_argument("--ql", type=float, required=True, help="inner square side")
    p.add_argument("--ql-center", type=_pair, default=(0.0, 0.0))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mu", type=float, required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_construct_competitor)

    bounds = sub.add_parser("bounds", help="honeycomb bound verifiers")
    bsub = bounds.add_subparsers(dest="sub", required=True)

    p = bsub.add_parser("hales", help="Hales honeycomb bound")
    p.add_argument("--torus", default=None, help="e.g. 4x4 for the reference honeycomb")
    p.add_argument("--cluster", default=None, help="cluster JSON")
    _add_common(p)
    p.set_defaults(fn=cmd_bounds_hales)

    p = bsub.add_parser("local", help="localized lower bound")
    p.add_argument("--cluster", required=True)
    p.add_argument("--window", type=float, required=True, help="window square side")
    p.add_argument("--center", type=_pair, default=(0.0, 0.0))
    _add_common(p)
    p.set_defaults(fn=cmd_bounds_local)

    p = bsub.add_parser("equi", help="equidistribution residuals")
    p.add_argument("--cluster", required=True)
    p.add_argument("--ql", type=float, required=True)
    p.add_argument("--center", type=_pair, default=(0.0, 0.0))
    p.add_argument("--n", type=int, default=None)
    _add_common(p)
    p.set_defaults(fn=cmd_bounds_equi)

    stability = sub.add_parser("stability", help="quantitative stability checks")
    ssub = stability.add_subparsers(dest="sub", required=True)

    p = ssub.add_parser("arc", help="evaluate the arc kernel")
    p.add_argument("--a", type=float, nargs="+", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_stability_arc)

    p = ssub.add_parser("chordal", help="chordal isoperimetric check on a bulged hexagon")
    p.add_argument("--bulges", required=True, help="comma-separated per-side bulge areas")
    _add_common(p)
    p.set_defaults(fn=cmd_stability_chordal)

    p = ssub.add_parser("ngon", help="quantitative n-gon fitting sweep")
    p.add_argument("--ngon", type=int, default=6)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--sigma", type=float, default=1e-3)
    p.add_argument("--max-deficit", type=float, default=1e-2)
    _add_common(p)
    p.set_defaults(fn=cmd_stability_ngon)

    p = ssub.add_parser("hexagon", help="hexagonal unit inequality on a bulged hexagon")
    p.add_argument("--bulge", type=float, required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_stability_hexagon)

    p = ssub.add_parser("alpha", help="honeycomb asymmetry")
    p.add_argument("--torus", required=True)
    p.add_argument("--eps", type=float, default=None, help="three-edge perturbation size")
    p.add_argument("--cluster", default=None)
    _add_common(p)
    p.set_defaults(fn=cmd_stability_alpha)

    p = ssub.add_parser("kappa", help="sharpness constant over a perturbation family")
    p.add_argument("--torus", required=True)
    p.add_argument("--eps-list", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_stability_kappa)

    cheeger = sub.add_parser("cheeger", help="Cheeger constants and H_N bounds")
    chsub = cheeger.add_subparsers(dest="sub", required=True)

    p = chsub.add_parser("convex", help="Cheeger constant of a convex polygon")
    p.add_argument("--k", default=None, help="geometry JSON")
    p.add_argument("--square", type=float, default=1.0)
    _add_common(p)
    p.set_defaults(fn=cmd_cheeger_convex)

    p = chsub.add_parser("hn-sweep", help="H_N sandwich sweep")
    p.add_argument("--omega", default=None, help="geometry JSON (default unit square)")
    p.add_argument("--nmax", type=int, default=256)
    p.add_argument("--eps", type=float, default=0.25)
    _add_common(p)
    p.set_defaults(fn=cmd_cheeger_hn_sweep)

    p = sub.add_parser("render", help="render a cluster JSON to SVG")
    p.add_argument("--cluster", required=True)
    p.add_argument("--output", default=None)
    _add_common(p)
    p.set_defaults(fn=cmd_render)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
