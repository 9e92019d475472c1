"""Self-contained deterministic SVG plots and the artifact report bundle.

No charting dependency: plots are assembled from fixed-format SVG primitives
so byte-identical reruns stay byte-identical.
"""
from __future__ import annotations

import csv
import glob
import json
import math
import os
from pathlib import Path

import numpy as np

from .errors import MissingArtifactError
from .persistence import PersistenceDiagram
from .sweep import expressivity_frequencies, records_from_json

PALETTE = ["#1f6fb2", "#d1495b", "#3a9d5d", "#8661c1", "#c78b2e",
           "#3aa6a6", "#b3548c", "#6b7280"]


def _f(x) -> str:
    return f"{x:.6g}"


class SvgCanvas:
    def __init__(self, width=820, height=520):
        self.width = width
        self.height = height
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        ]

    def line(self, x1, y1, x2, y2, color="#333333", width=1.0):
        self.parts.append(
            f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
            f'stroke="{color}" stroke-width="{_f(width)}"/>')

    def polyline(self, pts, color, width=1.6):
        coords = " ".join(f"{_f(x)},{_f(y)}" for x, y in pts)
        self.parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="{_f(width)}"/>')

    def circle(self, x, y, r, color):
        self.parts.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(r)}" fill="{color}"/>')

    def text(self, x, y, s, size=12, color="#111111", anchor="start"):
        self.parts.append(
            f'<text x="{_f(x)}" y="{_f(y)}" font-size="{size}" fill="{color}" '
            f'font-family="Helvetica, Arial, sans-serif" text-anchor="{anchor}">{s}</text>')

    def rect(self, x, y, w, h, color):
        self.parts.append(
            f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" height="{_f(h)}" fill="{color}"/>')

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min(s * mag for s in (1, 2, 5, 10) if s * mag >= raw)
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-12:
        out.append(round(t, 12))
        t += step
    return out


class Axes:
    """Linear axes mapping data space onto the canvas with ticks."""

    def __init__(self, canvas, xlim, ylim, margin=(70, 20, 30, 50), xlabel="", ylabel="", title=""):
        self.c = canvas
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        left, right, top, bottom = margin
        self.px0, self.px1 = left, canvas.width - right
        self.py0, self.py1 = canvas.height - bottom, top
        canvas.line(self.px0, self.py0, self.px1, self.py0)
        canvas.line(self.px0, self.py0, self.px0, self.py1)
        for t in _ticks(self.x0, self.x1):
            px = self.px(t)
            canvas.line(px, self.py0, px, self.py0 + 4)
            canvas.text(px, self.py0 + 18, _f(t), size=10, anchor="middle")
        for t in _ticks(self.y0, self.y1):
            py = self.py(t)
            canvas.line(self.px0 - 4, py, self.px0, py)
            canvas.text(self.px0 - 8, py + 4, _f(t), size=10, anchor="end")
        if xlabel:
            canvas.text((self.px0 + self.px1) / 2, canvas.height - 8, xlabel, anchor="middle")
        if ylabel:
            canvas.text(14, self.py1 - 6, ylabel)
        if title:
            canvas.text((self.px0 + self.px1) / 2, 16, title, size=13, anchor="middle")

    def px(self, x):
        return self.px0 + (x - self.x0) / (self.x1 - self.x0) * (self.px1 - self.px0)

    def py(self, y):
        return self.py0 + (y - self.y0) / (self.y1 - self.y0) * (self.py1 - self.py0)


def barcode_svg(diagram: PersistenceDiagram, title="persistence barcode") -> str:
    """Per-dimension bar sections; essential classes run to the right edge
    with an open arrowhead."""
    dims = sorted({int(d) for d in diagram.dims[diagram.select(include_zero=False)]})
    dims = [d for d in dims if d <= diagram.max_homology_dim] or [0]
    bars_by_dim = {}
    for d in dims:
        m = diagram.select(dim=d)
        bars = sorted(zip(diagram.births[m], diagram.deaths[m]), key=lambda t: (t[0], t[1]))
        bars_by_dim[d] = bars
    total = sum(len(v) for v in bars_by_dim.values()) or 1
    height = max(220, 70 + 9 * total + 26 * len(dims))
    canvas = SvgCanvas(820, height)
    eps = diagram.eps_max
    ax = Axes(canvas, (0.0, eps * 1.02), (0.0, 1.0), xlabel="scale", title=title)
    y = ax.py1 + 14
    for di, d in enumerate(dims):
        color = PALETTE[di % len(PALETTE)]
        canvas.text(ax.px0 + 4, y + 4, f"H{d} ({len(bars_by_dim[d])} bars)", size=11, color=color)
        y += 14
        for birth, death in bars_by_dim[d]:
            x1 = ax.px(birth)
            if math.isinf(death):
                x2 = ax.px(eps * 1.02)
                canvas.line(x1, y, x2, y, color=color, width=2.4)
                canvas.text(x2 + 2, y + 3, "&#8734;", size=9, color=color)
            else:
                canvas.line(x1, y, ax.px(death), y, color=color, width=2.4)
            y += 9
        y += 12
    return canvas.render()


def error_curves_svg(curves, title="minimum error vs minibatches",
                     xlabel="minibatches", ylabel="error") -> str:
    """One polyline per labeled curve; curves are (step, error) sequences."""
    canvas = SvgCanvas()
    xmax = max((max(s for s, _ in pts) for pts in curves.values() if pts), default=1)
    ax = Axes(canvas, (0, xmax * 1.02), (0.0, 1.0), xlabel=xlabel, ylabel=ylabel, title=title)
    for i, (label, pts) in enumerate(sorted(curves.items())):
        color = PALETTE[i % len(PALETTE)]
        if pts:
            ax_pts = [(ax.px(s), ax.py(e)) for s, e in pts]
            canvas.polyline(ax_pts, color)
        canvas.text(ax.px1 - 150, ax.py1 + 14 + 13 * i, str(label), size=10, color=color)
    return canvas.render()


def scatter_svg(points_by_label, title="", xlabel="", ylabel="") -> str:
    canvas = SvgCanvas()
    all_pts = [p for pts in points_by_label.values() for p in pts]
    if not all_pts:
        all_pts = [(0.0, 0.0)]
    xs = [p[0] for p in all_pts]
    ys = [p[1] for p in all_pts]
    ax = Axes(canvas, (min(xs), max(xs) * 1.05 + 1e-9), (0.0, max(ys) * 1.05 + 1e-9),
              xlabel=xlabel, ylabel=ylabel, title=title)
    for i, (label, pts) in enumerate(sorted(points_by_label.items())):
        color = PALETTE[i % len(PALETTE)]
        for x, y in pts:
            canvas.circle(ax.px(x), ax.py(y), 3.0, color)
        canvas.text(ax.px1 - 150, ax.py1 + 14 + 13 * i, str(label), size=10, color=color)
    return canvas.render()


def min_error_curves(records):
    """Per (ell, h0): pointwise minimum of the held-out error curves over
    records (aligned on eval steps)."""
    grouped = {}
    for r in records:
        if not r.error_curve:
            continue
        grouped.setdefault((r.ell, r.h0), []).append(r.error_curve)
    out = {}
    for (ell, h0), curves in sorted(grouped.items()):
        steps = sorted({s for c in curves for s, _ in c})
        best = {}
        for c in curves:
            d = dict(c)
            last = None
            for s in steps:
                if s in d:
                    last = d[s]
                if last is not None:
                    best[s] = min(best.get(s, 1.0), last)
        out[f"({ell},{h0})"] = sorted(best.items())
    return out


def report(artifacts_dir, out_dir) -> list:
    """Render every diagram JSON as a barcode SVG and, when sweep records are
    present, the error-curve SVG, the convergence scatter (SVG + CSV) and the
    expressivity tables (CSV). Raises MissingArtifactError when the directory
    holds neither kind of artifact."""
    artifacts_dir = Path(artifacts_dir)
    out_dir = Path(out_dir)
    diagrams = []
    for path in sorted(glob.glob(str(artifacts_dir / "*.json"))):
        try:
            with open(path) as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError):
            continue
        if isinstance(obj, dict) and "pairs" in obj:
            diagrams.append((path, PersistenceDiagram.from_json_obj(obj)))
    sweep_path = artifacts_dir / "sweep_records.json"
    if not diagrams and not sweep_path.exists():
        raise MissingArtifactError(
            "no report inputs found",
            missing=["<diagram>.json", "sweep_records.json"],
            searched=str(artifacts_dir),
        )
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    for path, diagram in diagrams:
        stem = Path(path).name.rsplit(".json", 1)[0].replace(".diag", "")
        target = out_dir / f"{stem}.barcode.svg"
        target.write_text(barcode_svg(diagram, title=f"barcode: {stem}"))
        written.append(str(target))

    if sweep_path.exists():
        records = records_from_json(str(sweep_path))
        curves = min_error_curves(records)
        target = out_dir / "error_curves.svg"
        target.write_text(error_curves_svg(curves))
        written.append(str(target))

        target = out_dir / "convergence_scatter.csv"
        with open(target, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["spec_name", "beta0_data", "beta1_data", "ell", "h0",
                        "trial", "converged_at", "best_error"])
            for r in records:
                w.writerow([r.spec_name, r.beta0_data, r.beta1_data, r.ell, r.h0,
                            r.trial,
                            "" if r.converged_at is None else r.converged_at,
                            "" if r.best_error is None else repr(r.best_error)])
        written.append(str(target))

        pts = {}
        for r in records:
            if r.converged_at is not None:
                key = f"b0={r.beta0_data},b1={r.beta1_data}"
                pts.setdefault(key, []).append((r.h0, r.converged_at))
        target = out_dir / "convergence_scatter.svg"
        target.write_text(scatter_svg(pts, title="convergence step vs width",
                                      xlabel="h0", ylabel="steps to target error"))
        written.append(str(target))

        for dim in (0, 1):
            table, ks = expressivity_frequencies(records, dim=dim)
            target = out_dir / f"expressivity_beta{dim}.csv"
            with open(target, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["h0"] + [f"P(beta{dim}>={k})" for k in ks])
                for h0, row in sorted(table.items()):
                    w.writerow([h0] + [repr(row[k]) for k in ks])
            written.append(str(target))
    return written
