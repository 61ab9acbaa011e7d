import csv
import io
import json
import xml.etree.ElementTree as ET

import numpy as np

from herzlab.report import ConstantReport, fmt, write_svg_scatter


def _report():
    r = ConstantReport("demo", meta={"hypothesis_violated": False})
    r.add('a,"quoted"', 2.0, 1.0, proxy=0.5)
    r.add("b", 1.0, 4.0)
    r.add("zero", 1.0, 0.0, flag="zero")
    r.add("bad", float("nan"), 1.0)
    return r


def test_statistics():
    r = _report()
    assert r.max_ratio == 2.0 and r.min_ratio == 0.25 and r.spread == 8.0
    assert r.skipped == 2
    assert r.flags == ["", "", "zero", "nonfinite"]
    s = r.summary()
    assert s["witness_max"]["label"] == 'a,"quoted"' and s["witness_min"]["index"] == 1
    assert s["hypothesis_violated"] is False


def test_empty_report():
    r = ConstantReport("none")
    assert np.isnan(r.max_ratio) and r.summary()["witness_max"] is None


def test_csv_round_trip():
    r = _report()
    rows = list(csv.reader(io.StringIO(r.csv_text())))
    assert rows[0] == ["index", "label", "lhs", "rhs", "ratio", "flag", "proxy"]
    assert rows[1][1] == 'a,"quoted"' and float(rows[1][4]) == 2.0 and rows[1][6] == "0.5"
    assert rows[3][4] == "nan" and rows[3][5] == "zero"
    assert float(rows[2][2]) == 1.0


def test_fmt_round_trips():
    x = 0.1 + 0.2
    assert float(fmt(x)) == x
    assert fmt(True) == "1" and fmt(np.int64(3)) == "3" and fmt("s") == "s"


def test_write_outputs(tmp_path):
    r = _report()
    summary = r.write(tmp_path, summary_extra={"gates": [{"ok": np.bool_(True)}]})
    assert (tmp_path / "demo.csv").read_text() == r.csv_text()
    on_disk = json.loads((tmp_path / "demo.json").read_text())
    assert on_disk == summary and on_disk["gates"][0]["ok"] is True
    root = ET.parse(tmp_path / "demo.svg").getroot()
    assert root.tag.endswith("svg")
    assert len([e for e in root.iter() if e.tag.endswith("circle")]) == 2


def test_svg_escapes_and_degenerate(tmp_path):
    p = tmp_path / "x.svg"
    write_svg_scatter(p, [1, 1], [3, 3], title="a < b & c")
    ET.parse(p)
    write_svg_scatter(p, [], [], logy=False)
    ET.parse(p)
