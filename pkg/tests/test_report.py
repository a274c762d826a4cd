import math
import re

import pytest

from radperturb.errors import SchemaMismatch
from radperturb.report import (
    FeatureRow,
    confusion_svg,
    features_csv,
    format_float,
    parse_float,
    read_features_csv,
    robust_fraction_svg,
)


def test_float_text_round_trip():
    for x in (0.1, -1e-300, 1 / 3, 12345678.9, 0.0):
        assert parse_float(format_float(x)) == x
    assert format_float(math.nan) == "NaN" and math.isnan(parse_float("NaN"))


def test_features_csv_round_trip(tmp_path):
    ids = ["a@1mm", "b@1mm"]
    rows = [
        FeatureRow("s1", "test", "original", 0, (1.5, math.nan), {"b@1mm": "zero mean"}),
        FeatureRow("s1", "test", "N", 3, (2.0, 0.25), {}),
    ]
    text = features_csv(ids, rows)
    header = text.splitlines()[0].split(",")
    assert header == ["subject", "image", "chain", "instance", "a@1mm", "b@1mm", "b@1mm.reason"]
    assert text.splitlines()[1].endswith("1.5,NaN,zero mean")
    p = tmp_path / "f.csv"
    p.write_text(text)
    fids, back = read_features_csv(p)
    assert fids == ids
    assert back[1].values == (2.0, 0.25) and back[0].reasons == {"b@1mm": "zero mean"}


def test_row_length_checked():
    with pytest.raises(SchemaMismatch):
        features_csv(["a"], [FeatureRow("s", "test", "N", 0, (1.0, 2.0), {})])


def bar_heights(svg):
    return {m.group(1): float(m.group(2)) for m in re.finditer(r'data-label="([^"]+)"[^>]*height="([0-9.]+)"', svg)}


def test_planted_fractions_geometry():
    svg = robust_fraction_svg(["A", "B", "C"], [0.2, 0.5, 0.9])
    h = bar_heights(svg)
    assert h["A"] == pytest.approx(40, abs=1) and h["B"] == pytest.approx(100, abs=1) and h["C"] == pytest.approx(180, abs=1)
    assert h["B"] / h["A"] == pytest.approx(2.5, abs=0.05)


def test_full_height_bar():
    assert bar_heights(robust_fraction_svg(["A"], [1.0]))["A"] == 200.0


def test_confusion_stack():
    svg = confusion_svg(["A"], [{"tp": 0.5, "tn": 0.25, "fp": 0.25, "fn": 0.0}])
    heights = [float(x) for x in re.findall(r'class="(?:tp|tn|fp|fn)"[^>]*height="([0-9.]+)"', svg)]
    assert heights == [100.0, 50.0, 50.0, 0.0]
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
