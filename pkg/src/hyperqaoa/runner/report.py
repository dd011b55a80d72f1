"""Aggregation of run records into tables, and CSV/SVG emission."""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..magic import normalize
from ..metrics import RunRecord

METRICS = ("ar", "fidelity", "nfev", "magic")
GROUP_KEYS = ("family", "n", "scheme", "p")
CSV_HEADER = [*GROUP_KEYS, "mean", "std", "count"]
SCHEME_ORDER = ("ma", "ka", "sa", "aa")
SCHEME_LABELS = {
    "ma": "Multi-angle",
    "ka": "k-interaction angle",
    "sa": "Single-angle",
    "aa": "Automorphic angle",
}
SCHEME_COLORS = {"ma": "#d62728", "ka": "#ff7f0e", "sa": "#1f77b4", "aa": "#2ca02c"}
METRIC_LABELS = {
    "ar": "Approximation ratio",
    "fidelity": "Fidelity",
    "nfev": "Function evaluations",
    "magic": "Normalized M2",
}


@dataclass(frozen=True)
class Row:
    family: str
    n: int
    scheme: str
    p: int
    mean: float
    std: float
    count: int

    def key(self) -> tuple:
        return (self.family, self.n, self.scheme, self.p)


def normalized_magic(records: Iterable[RunRecord]) -> dict[tuple, float]:
    """Per-record barrier height divided by the largest one of its instance.

    Keyed by ``RunRecord.key``; instances whose values are all zero are left out.
    """
    by_instance: dict[str, dict[tuple, float]] = defaultdict(dict)
    for rec in records:
        if rec.error is None and rec.m2_max is not None:
            by_instance[rec.problem_id][rec.key] = rec.m2_max
    out: dict[tuple, float] = {}
    for values in by_instance.values():
        scaled, ok = normalize(values)
        if ok:
            out.update({k: r.normalized for k, r in scaled.items()})
    return out


def aggregate(records: Sequence[RunRecord], metric: str) -> list[Row]:
    """Mean, population std and count of ``metric`` per (family, n, scheme, p)."""
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    good = [r for r in records if r.error is None]
    magic = normalized_magic(good) if metric == "magic" else {}
    groups: dict[tuple, list[float]] = defaultdict(list)
    for rec in good:
        if metric == "ar":
            if rec.ar is None:
                continue
            value = rec.ar
        elif metric == "magic":
            if rec.key not in magic:
                continue
            value = magic[rec.key]
        else:
            value = getattr(rec, metric)
        groups[(rec.family, rec.n, rec.scheme, rec.p)].append(float(value))
    rows = []
    for key in sorted(groups, key=lambda k: (k[0], k[1], _scheme_rank(k[2]), k[3])):
        vals = np.asarray(groups[key])
        rows.append(Row(*key, float(vals.mean()), float(vals.std()), int(vals.size)))
    return rows


def _scheme_rank(scheme: str) -> tuple:
    return (SCHEME_ORDER.index(scheme) if scheme in SCHEME_ORDER else len(SCHEME_ORDER), scheme)


def write_csv(rows: Sequence[Row], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in rows:
            writer.writerow([r.family, r.n, r.scheme, r.p, repr(r.mean), repr(r.std), r.count])
    return path


def read_csv(path) -> list[Row]:
    with open(path, newline="") as fh:
        return [
            Row(d["family"], int(d["n"]), d["scheme"], int(d["p"]),
                float(d["mean"]), float(d["std"]), int(d["count"]))
            for d in csv.DictReader(fh)
        ]


# --------------------------------------------------------------------------
# SVG

_W, _H = 640, 400
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 170, 30, 50


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return [float(t) for t in np.arange(start, hi + step * 1e-9, step)]


def render_svg(rows: Sequence[Row], metric: str, x_key: str, title: str = "") -> str:
    series: dict[str, list[Row]] = defaultdict(list)
    for r in rows:
        series[r.scheme].append(r)
    xs = [getattr(r, x_key) for r in rows]
    lows = [r.mean - r.std for r in rows]
    highs = [r.mean + r.std for r in rows]
    x_lo, x_hi = (min(xs), max(xs)) if xs else (0, 1)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1, x_hi + 1
    y_lo, y_hi = (min(lows), max(highs)) if rows else (0.0, 1.0)
    if metric in ("ar", "fidelity", "magic") and rows:
        y_lo, y_hi = min(0.0, y_lo), max(1.0, y_hi)
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pw, ph = _W - _LEFT - _RIGHT, _H - _TOP - _BOTTOM

    def sx(x):
        return _LEFT + (x - x_lo) / (x_hi - x_lo) * pw

    def sy(y):
        return _TOP + ph - (y - y_lo) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.0f}" y="18" text-anchor="middle">{title}</text>',
        f'<line class="axis" x1="{_LEFT}" y1="{_TOP + ph}" x2="{_LEFT + pw}" y2="{_TOP + ph}" stroke="black"/>',
        f'<line class="axis" x1="{_LEFT}" y1="{_TOP}" x2="{_LEFT}" y2="{_TOP + ph}" stroke="black"/>',
    ]
    for t in range(int(np.ceil(x_lo)), int(np.floor(x_hi)) + 1):
        out.append(
            f'<text x="{_fmt(sx(t))}" y="{_TOP + ph + 18}" text-anchor="middle">{t}</text>'
        )
    for t in _ticks(y_lo, y_hi):
        out.append(
            f'<text x="{_LEFT - 6}" y="{_fmt(sy(t) + 4)}" text-anchor="end">{t:.4g}</text>'
        )
    out.append(
        f'<text x="{_LEFT + pw / 2:.0f}" y="{_H - 10}" text-anchor="middle">{x_key}</text>'
    )
    out.append(
        f'<text x="16" y="{_TOP + ph / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_TOP + ph / 2:.0f})">{METRIC_LABELS.get(metric, metric)}</text>'
    )
    for idx, scheme in enumerate(sorted(series, key=_scheme_rank)):
        pts = sorted(series[scheme], key=lambda r: getattr(r, x_key))
        color = SCHEME_COLORS.get(scheme, "#7f7f7f")
        path = " ".join(f"{_fmt(sx(getattr(r, x_key)))},{_fmt(sy(r.mean))}" for r in pts)
        out.append(f'<g class="series" data-scheme="{scheme}">')
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{path}"/>')
        for r in pts:
            x = sx(getattr(r, x_key))
            out.append(
                f'<line x1="{_fmt(x)}" y1="{_fmt(sy(r.mean - r.std))}" x2="{_fmt(x)}" '
                f'y2="{_fmt(sy(r.mean + r.std))}" stroke="{color}"/>'
            )
            out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(sy(r.mean))}" r="3" fill="{color}"/>')
        out.append("</g>")
        ly = _TOP + 10 + 20 * idx
        out.append(
            f'<line x1="{_LEFT + pw + 15}" y1="{ly}" x2="{_LEFT + pw + 35}" y2="{ly}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        out.append(
            f'<text x="{_LEFT + pw + 40}" y="{ly + 4}">{SCHEME_LABELS.get(scheme, scheme)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def report(rows: Sequence[Row], kind: str, out_dir, x_key: str | None = None) -> list[Path]:
    """Write ``<kind>.csv`` plus one SVG chart per panel.

    The x axis is ``n`` when several problem sizes are present, otherwise
    ``p``; one panel is drawn for every value of the other key.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [write_csv(rows, out_dir / f"{kind}.csv")]
    if x_key is None:
        x_key = "n" if len({r.n for r in rows}) > 1 else "p"
    panel_key = "p" if x_key == "n" else "n"
    panels: dict[tuple, list[Row]] = defaultdict(list)
    for r in rows:
        panels[(r.family, getattr(r, panel_key))].append(r)
    if not panels:
        path = out_dir / f"{kind}.svg"
        path.write_text(render_svg([], kind, x_key, METRIC_LABELS.get(kind, kind)))
        return written + [path]
    for (family, value), panel_rows in sorted(panels.items()):
        name = f"{kind}_{family}_{panel_key}{value}.svg"
        title = f"{METRIC_LABELS.get(kind, kind)}: {family}, {panel_key}={value}"
        path = out_dir / name
        path.write_text(render_svg(panel_rows, kind, x_key, title))
        written.append(path)
    return written
