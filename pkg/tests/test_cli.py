import json
import math
import os
import xml.etree.ElementTree as ET

import pytest

from isoclus import Point2, square
from isoclus.cli import main
from isoclus.clusters import Cluster, TorusSpec
from isoclus.geojson import (
    cluster_from_json,
    cluster_to_json,
    dump_cluster,
    dump_region,
    region_from_json,
    region_to_json,
)
from isoclus.hexgrid import generate_torus
from isoclus.svg import render_svg
from isoclus import ParseError


# --- JSON round trips ---------------------------------------------------------


def test_region_json_roundtrip():
    from isoclus import disk

    for r in (square(2.0), disk(1.5, Point2(0.3, -0.2))):
        back = region_from_json(region_to_json(r))
        assert back.area == pytest.approx(r.area, rel=1e-12)
        assert back.perimeter == pytest.approx(r.perimeter, rel=1e-12)


def test_cluster_json_roundtrip_torus():
    c = generate_torus(TorusSpec(2, 2))
    back = cluster_from_json(cluster_to_json(c), validate=False)
    assert back.n == c.n
    assert back.on_torus
    assert back.ambient.alpha == 2


def test_json_parse_errors_name_field():
    with pytest.raises(ParseError, match="loops"):
        region_from_json({"nope": []})
    with pytest.raises(ParseError, match=r"edges\[0\]"):
        region_from_json({"loops": [{"edges": [{"bad": 1}]}]})
    with pytest.raises(ParseError, match="chambers"):
        cluster_from_json({"torus": {"alpha": 2, "beta": 2}})


def test_json_file_error_has_position(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{"loops": [,]}')
    from isoclus.geojson import load_region

    with pytest.raises(ParseError, match=":1:"):
        load_region(str(p))


# --- CLI ------------------------------------------------------------------------


def test_cli_surgery_runs(tmp_path, capsys):
    rc = main(
        [
            "construct",
            "surgery",
            "--q0",
            "1",
            "--q1",
            "3",
            "--m",
            "20",
            "--out",
            str(tmp_path),
            "--csv",
            "rows.csv",
            "--svg",
        ]
    )
    assert rc == 0
    assert (tmp_path / "rows.csv").exists()
    assert (tmp_path / "surgery_m20.json").exists()
    svg_path = tmp_path / "surgery_m20.svg"
    assert svg_path.exists()
    root = ET.parse(svg_path).getroot()
    paths = [el for el in root.iter() if el.tag.endswith("path")]
    assert len(paths) == 20
    # arcs present in the path data
    assert any("A " in p.attrib["d"] for p in paths)


def test_cli_hales_equality(tmp_path, capsys):
    rc = main(["bounds", "hales", "--torus", "4x4", "--out", str(tmp_path), "--csv", "h.csv"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "bounds-hales" in out
    rows = (tmp_path / "h.csv").read_text().strip().split("\n")
    assert len(rows) == 2  # header + row
    # slack column ~ 0
    header = rows[0].split(",")
    vals = rows[1].split(",")
    slack = float(vals[header.index("slack")])
    assert abs(slack) <= 1e-9


def test_cli_unknown_subcommand():
    rc = main(["frobnicate"])
    assert rc != 0


def test_cli_reassembly_csv_reproducible(tmp_path):
    args = [
        "construct",
        "reassembly",
        "--n",
        "16",
        "--out",
        str(tmp_path),
        "--csv",
        "r.csv",
    ]
    assert main(args) == 0
    first = (tmp_path / "r.csv").read_text()
    (tmp_path / "r.csv").unlink()
    assert main(args) == 0
    second = (tmp_path / "r.csv").read_text()

    def strip_wall(text):
        rows = [r.split(",") for r in text.strip().split("\n")]
        return [r[:-1] for r in rows]

    assert strip_wall(first) == strip_wall(second)


def test_cli_arc_and_cheeger(tmp_path, capsys):
    assert main(["stability", "arc", "--a", "0", str(math.pi / 8), "--out", str(tmp_path)]) == 0
    assert main(["cheeger", "convex", "--square", "1.0", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "3.77245385" in out


def test_cli_render_and_invalid_json(tmp_path):
    c = generate_torus(TorusSpec(2, 2))
    path = tmp_path / "c.json"
    dump_cluster(c, str(path))
    rc = main(["render", "--cluster", str(path), "--output", str(tmp_path / "c.svg")])
    assert rc == 0
    root = ET.parse(tmp_path / "c.svg").getroot()
    paths = [el for el in root.iter() if el.tag.endswith("path")]
    assert len(paths) == c.n

    bad = tmp_path / "bad.json"
    bad.write_text("{broken")
    rc = main(["render", "--cluster", str(bad)])
    assert rc == 2


def test_cli_ngon_overlay_svg(tmp_path):
    rc = main(
        [
            "stability",
            "ngon",
            "--samples",
            "3",
            "--sigma",
            "1e-3",
            "--out",
            str(tmp_path),
            "--svg",
            "--csv",
            "n.csv",
        ]
    )
    assert rc == 0
    overlay = tmp_path / "ngon_overlay.svg"
    assert overlay.exists()
    root = ET.parse(overlay).getroot()
    paths = [el for el in root.iter() if el.tag.endswith("path")]
    assert len(paths) == 2
    rows = (tmp_path / "n.csv").read_text().strip().split("\n")
    assert len(rows) == 4  # header + 3 samples


def test_cli_threads_env(tmp_path, monkeypatch):
    monkeypatch.setenv("ISOCLUS_THREADS", "2")
    rc = main(
        ["construct", "reassembly", "--n", "4,9", "--out", str(tmp_path), "--csv", "t.csv"]
    )
    assert rc == 0
    rows = (tmp_path / "t.csv").read_text().strip().split("\n")
    assert len(rows) == 3


def test_svg_polygonal_cluster_valid_xml():
    amb = square(4.0)
    c = Cluster([square(1.0, Point2(-1, 0)), square(1.0, Point2(1, 0))], amb)
    doc = render_svg(c)
    root = ET.fromstring(doc)
    paths = [el for el in root.iter() if el.tag.endswith("path")]
    assert len(paths) == 2
