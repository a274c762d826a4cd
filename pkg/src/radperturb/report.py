"""Feature, ICC and summary tables as CSV, and bar charts as plain SVG."""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

from .errors import IoFailure, SchemaMismatch

META_COLUMNS = ("subject", "image", "chain", "instance")
ORIGINAL = "original"
REFERENCE = "retest"


def format_float(x: float) -> str:
    """Shortest round-trip text for a float; NaN becomes ``NaN``."""
    x = float(x)
    if math.isnan(x):
        return "NaN"
    return repr(x)


def parse_float(text: str) -> float:
    return math.nan if text in ("", "NaN") else float(text)


def write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_text(path: Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc


def to_csv(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


@dataclass(frozen=True)
class FeatureRow:
    subject: str
    image: str
    chain: str
    instance: int
    values: tuple[float, ...]
    reasons: dict


def features_csv(feature_ids: Sequence[str], rows: Sequence[FeatureRow]) -> str:
    """Feature table: metadata columns, features in schema order, then one
    ``<feature>.reason`` column for every feature that is missing somewhere."""
    with_reason = {fid for r in rows for fid in r.reasons}
    reason_cols = [fid for fid in feature_ids if fid in with_reason]
    header = [*META_COLUMNS, *feature_ids, *(f"{fid}.reason" for fid in reason_cols)]
    out = []
    for r in rows:
        if len(r.values) != len(feature_ids):
            raise SchemaMismatch("row length does not match the feature schema")
        line = [r.subject, r.image, r.chain, str(r.instance)]
        line += [format_float(v) for v in r.values]
        line += [r.reasons.get(fid, "") for fid in reason_cols]
        out.append(line)
    return to_csv(header, out)


def read_features_csv(path: Path) -> tuple[list[str], list[FeatureRow]]:
    reader = csv.reader(io.StringIO(read_text(path)))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaMismatch(f"{path} is empty") from None
    if tuple(header[:4]) != META_COLUMNS:
        raise SchemaMismatch(f"{path} is not a feature table")
    body = header[4:]
    feature_ids = [h for h in body if not h.endswith(".reason")]
    reason_cols = [h[: -len(".reason")] for h in body if h.endswith(".reason")]
    nf = len(feature_ids)
    rows = []
    for line in reader:
        if len(line) != len(header):
            raise SchemaMismatch(f"{path}: row with {len(line)} fields, expected {len(header)}")
        vals = tuple(parse_float(t) for t in line[4 : 4 + nf])
        reasons = {fid: t for fid, t in zip(reason_cols, line[4 + nf :]) if t}
        rows.append(FeatureRow(line[0], line[1], line[2], int(line[3]), vals, reasons))
    return feature_ids, rows


# SVG charts -------------------------------------------------------------

PLOT_HEIGHT = 200.0
BAR_WIDTH = 36.0
BAR_GAP = 14.0
LEFT = 50.0
TOP = 20.0
COLOURS = {"tp": "#2c7fb8", "tn": "#7fcdbb", "fp": "#fdae61", "fn": "#d7191c", "robust": "#3182bd"}


def _num(x: float) -> str:
    return f"{x:.2f}"


def _svg(width: float, height: float, body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(width)}" height="{_num(height)}" '
        f'viewBox="0 0 {_num(width)} {_num(height)}" font-family="sans-serif" font-size="10">'
    )
    return "\n".join([head, *body, "</svg>"]) + "\n"


def _axes(n_bars: int, title: str) -> tuple[list[str], float]:
    width = LEFT + n_bars * (BAR_WIDTH + BAR_GAP) + BAR_GAP
    base = TOP + PLOT_HEIGHT
    body = [
        f'<text x="{_num(LEFT)}" y="{_num(TOP - 6)}">{title}</text>',
        f'<line x1="{_num(LEFT)}" y1="{_num(TOP)}" x2="{_num(LEFT)}" y2="{_num(base)}" stroke="black"/>',
        f'<line x1="{_num(LEFT)}" y1="{_num(base)}" x2="{_num(width)}" y2="{_num(base)}" stroke="black"/>',
    ]
    for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = base - tick * PLOT_HEIGHT
        body.append(f'<text x="{_num(LEFT - 6)}" y="{_num(y + 3)}" text-anchor="end">{tick:.2f}</text>')
    return body, width


def robust_fraction_svg(labels: Sequence[str], fractions: Sequence[float]) -> str:
    """One bar per chain; bar height is the robust fraction of a 200 px axis."""
    body, width = _axes(len(labels), "Fraction of robust features")
    base = TOP + PLOT_HEIGHT
    for i, (lab, f) in enumerate(zip(labels, fractions)):
        x = LEFT + BAR_GAP + i * (BAR_WIDTH + BAR_GAP)
        h = 0.0 if math.isnan(f) else f * PLOT_HEIGHT
        body.append(
            f'<rect class="bar" data-label="{lab}" x="{_num(x)}" y="{_num(base - h)}" '
            f'width="{_num(BAR_WIDTH)}" height="{_num(h)}" fill="{COLOURS["robust"]}"/>'
        )
        body.append(f'<text x="{_num(x + BAR_WIDTH / 2)}" y="{_num(base + 14)}" text-anchor="middle">{lab}</text>')
    return _svg(width, base + 30, body)


def confusion_svg(labels: Sequence[str], fractions: Sequence[dict]) -> str:
    """Stacked bars of TP, TN, FP and FN fractions per chain."""
    body, width = _axes(len(labels), "Agreement with the reference")
    base = TOP + PLOT_HEIGHT
    for i, (lab, fr) in enumerate(zip(labels, fractions)):
        x = LEFT + BAR_GAP + i * (BAR_WIDTH + BAR_GAP)
        y = base
        for key in ("tp", "tn", "fp", "fn"):
            h = fr[key] * PLOT_HEIGHT
            y -= h
            body.append(
                f'<rect class="{key}" data-label="{lab}" x="{_num(x)}" y="{_num(y)}" '
                f'width="{_num(BAR_WIDTH)}" height="{_num(h)}" fill="{COLOURS[key]}"/>'
            )
        body.append(f'<text x="{_num(x + BAR_WIDTH / 2)}" y="{_num(base + 14)}" text-anchor="middle">{lab}</text>')
    legend_x = LEFT
    for key in ("tp", "tn", "fp", "fn"):
        body.append(
            f'<rect x="{_num(legend_x)}" y="{_num(base + 20)}" width="10" height="10" fill="{COLOURS[key]}"/>'
        )
        body.append(f'<text x="{_num(legend_x + 13)}" y="{_num(base + 29)}">{key.upper()}</text>')
        legend_x += 40
    return _svg(max(width, legend_x), base + 40, body)
