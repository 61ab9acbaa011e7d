"""Empirical-constant reports and their CSV / JSON / SVG serialisation."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["ConstantReport", "write_svg_scatter", "fmt"]


def fmt(x) -> str:
    """Round-trippable text for a float (stable across runs on one platform)."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    return x


@dataclass
class ConstantReport:
    """Per-sample ``lhs / rhs`` ratios of one inequality and their extremes.

    Samples whose ``rhs`` vanishes are skipped from the statistics but kept in
    the row table with a flag.
    """

    name: str
    labels: list = field(default_factory=list)
    lhs: list = field(default_factory=list)
    rhs: list = field(default_factory=list)
    flags: list = field(default_factory=list)
    extra: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, label: str, lhs: float, rhs: float, flag: str = "", **extra) -> None:
        self.labels.append(label)
        self.lhs.append(float(lhs))
        self.rhs.append(float(rhs))
        if not flag and not (math.isfinite(float(lhs)) and math.isfinite(float(rhs))):
            flag = "nonfinite"
        self.flags.append(flag)
        self.extra.append(extra)

    @property
    def ratios(self) -> np.ndarray:
        lhs = np.asarray(self.lhs, dtype=float)
        rhs = np.asarray(self.rhs, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(rhs > 0, lhs / np.where(rhs > 0, rhs, 1.0), np.nan)

    @property
    def _valid(self) -> np.ndarray:
        r = self.ratios
        return np.isfinite(r)

    @property
    def skipped(self) -> int:
        return int(np.sum(~self._valid))

    @property
    def max_ratio(self) -> float:
        r = self.ratios[self._valid]
        return float(r.max()) if r.size else float("nan")

    @property
    def min_ratio(self) -> float:
        r = self.ratios[self._valid]
        return float(r.min()) if r.size else float("nan")

    @property
    def spread(self) -> float:
        lo = self.min_ratio
        return self.max_ratio / lo if lo > 0 else float("inf")

    def _witness(self, which) -> dict | None:
        r = np.where(self._valid, self.ratios, np.nan)
        if not np.any(self._valid):
            return None
        i = int(np.nanargmax(r) if which == "max" else np.nanargmin(r))
        return {"index": i, "label": self.labels[i], "ratio": float(r[i])}

    def summary(self) -> dict:
        return _jsonable(
            {
                "name": self.name,
                "n_samples": len(self.labels),
                "skipped": self.skipped,
                "max_ratio": self.max_ratio,
                "min_ratio": self.min_ratio,
                "spread": self.spread,
                "witness_max": self._witness("max"),
                "witness_min": self._witness("min"),
                **self.meta,
            }
        )

    def csv_text(self) -> str:
        extra_keys = sorted({k for e in self.extra for k in e})
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["index", "label", "lhs", "rhs", "ratio", "flag", *extra_keys])
        for i, (lab, a, b, r, fl, ex) in enumerate(
            zip(self.labels, self.lhs, self.rhs, self.ratios, self.flags, self.extra)
        ):
            wr.writerow([i, lab, fmt(a), fmt(b), fmt(r), fl, *(fmt(ex.get(k, "")) for k in extra_keys)])
        return buf.getvalue()

    def write(self, outdir, stem: str | None = None, summary_extra: dict | None = None) -> dict:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        stem = stem or self.name
        (outdir / f"{stem}.csv").write_text(self.csv_text(), encoding="utf-8")
        summary = self.summary()
        if summary_extra:
            summary.update(_jsonable(summary_extra))
        (outdir / f"{stem}.json").write_text(json.dumps(summary, indent=2, sort_keys=True), encoding="utf-8")
        xs = np.asarray([e.get("proxy", i) for i, e in enumerate(self.extra)], dtype=float)
        write_svg_scatter(outdir / f"{stem}.svg", xs, self.ratios, title=stem, xlabel="sample", ylabel="ratio")
        return summary


def write_svg_scatter(path, x, y, title="", xlabel="x", ylabel="y", logy=True, size=(480, 320)) -> None:
    """Scatter plot as plain SVG 1.1 (axes, ticks at the extremes, optional log-y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = np.isfinite(x) & np.isfinite(y) & ((y > 0) if logy else True)
    x, y = x[ok], y[ok]
    W, H = size
    ml, mr, mt, mb = 60, 20, 30, 40
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2}" y="18" text-anchor="middle" font-size="13">{_esc(title)}</text>',
        f'<line x1="{ml}" y1="{H - mb}" x2="{W - mr}" y2="{H - mb}" stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{H - mb}" stroke="black"/>',
        f'<text x="{W / 2}" y="{H - 8}" text-anchor="middle" font-size="11">{_esc(xlabel)}</text>',
        f'<text x="14" y="{H / 2}" text-anchor="middle" font-size="11" '
        f'transform="rotate(-90 14 {H / 2})">{_esc(ylabel)}{" (log)" if logy else ""}</text>',
    ]
    if x.size:
        yy = np.log10(y) if logy else y
        x0, x1 = float(x.min()), float(x.max())
        y0, y1 = float(yy.min()), float(yy.max())
        if x1 == x0:
            x0, x1 = x0 - 1, x1 + 1
        if y1 == y0:
            y0, y1 = y0 - 0.5, y1 + 0.5
        px = ml + (x - x0) / (x1 - x0) * (W - ml - mr)
        py = H - mb - (yy - y0) / (y1 - y0) * (H - mt - mb)
        for a, b in zip(px, py):
            parts.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="2.5" fill="steelblue"/>')
        lab = (lambda v: f"{10**v:.3g}") if logy else (lambda v: f"{v:.3g}")
        parts.append(f'<text x="{ml - 4}" y="{H - mb}" text-anchor="end" font-size="10">{lab(y0)}</text>')
        parts.append(f'<text x="{ml - 4}" y="{mt + 4}" text-anchor="end" font-size="10">{lab(y1)}</text>')
        parts.append(f'<text x="{ml}" y="{H - mb + 14}" text-anchor="middle" font-size="10">{x0:.3g}</text>')
        parts.append(f'<text x="{W - mr}" y="{H - mb + 14}" text-anchor="middle" font-size="10">{x1:.3g}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")


def _esc(s: str) -> str:
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
