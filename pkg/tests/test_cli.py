import json
import math

import numpy as np
import pytest

from iccregion import cli
from iccregion.region_geom import Polygon2D, point_distances

BASE = {"channel": {"P1": 6, "P2": 1.5, "a12": 0.74, "a21": 0.74, "K": 4}}


def run(tmp_path, doc, *flags):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc) if isinstance(doc, dict) else doc)
    return cli.main(["--config", str(path), "--out", str(tmp_path / "out"), *flags])


def error_line(capsys):
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1
    return err[0].split(":", 3)


@pytest.mark.parametrize("doc,where", [
    ({}, "channel"),
    ({"channel": {"P1": 6, "P2": 1.5, "a12": 0.74}}, "channel.a21"),
    ({**BASE, "mode": "plot"}, "mode"),
    ({**BASE, "sweep": {"resolution": 1}}, "sweep"),
    ({**BASE, "sweep": {"lambda_grid": [0.5]}}, "sweep.lambda_grid"),
    ({**BASE, "K_list": []}, "K_list"),
    ("[1, 2", "$"),
])
def test_validation_errors_exit_2(tmp_path, capsys, doc, where):
    assert run(tmp_path, doc) == 2
    kind, path, _ = error_line(capsys)[1:]
    assert kind == "validation" and path == where


def test_missing_config_exits_4(tmp_path, capsys):
    assert cli.main(["--config", str(tmp_path / "nope.json")]) == 4
    assert error_line(capsys)[1] == "io"


def test_unwritable_output_exits_4(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    doc = {**BASE, "mode": "hk", "baseline_resolution": 2, "out": str(blocker / "sub")}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(doc))
    assert cli.main(["--config", str(path)]) == 4
    assert error_line(capsys)[1] == "io"


def test_relay_mode_point_to_point(tmp_path):
    doc = {"channel": {"P1": 6, "P2": 1.5, "a12": 0.74, "a21": 0, "K": 2}, "mode": "relay"}
    assert run(tmp_path, doc) == 0
    report = (tmp_path / "out" / "report.txt").read_text()
    assert f"capacity={0.5 * math.log2(7):.6f}" in report


def test_region_mode_coarse(tmp_path):
    assert run(tmp_path, {**BASE, "mode": "region"}, "--resolution", "2") == 0
    out = tmp_path / "out"
    assert "check slope_audit_region_K4: pass" in (out / "report.txt").read_text()
    assert (out / "region.svg").exists()


def test_csv_roundtrip_and_svg(tmp_path):
    assert run(tmp_path, {**BASE, "mode": "hk", "baseline_resolution": 5}) == 0
    out = tmp_path / "out"
    text = (out / "hk.csv").read_text()
    assert text.splitlines()[0] == "r1_bits,r2_bits"
    rows = cli.read_csv(out / "hk.csv")
    assert tuple(rows[0]) == min(map(tuple, rows))
    hull = Polygon2D(rows)
    assert hull.area() > 0  # counter-clockwise
    assert np.all(point_distances(hull, rows) <= 1e-6)
    svg = (out / "hk.svg").read_text()
    assert 'width="800"' in svg and 'height="600"' in svg and "<polyline" in svg


def test_no_plot_flag(tmp_path):
    assert run(tmp_path, {**BASE, "mode": "hk", "baseline_resolution": 2}, "--no-plot") == 0
    assert not (tmp_path / "out" / "hk.svg").exists()


def test_flags_override_config():
    cfg = cli.parse_config({**BASE, "mode": "hk", "sweep": {"resolution": 5}},
                           {"mode": "gvbc", "resolution": 3, "no_plot": True})
    assert cfg.mode == "gvbc" and cfg.sweep.resolution == 3 and not cfg.plot
