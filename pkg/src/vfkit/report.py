"""Artifact emission: CSV tables, markdown summaries, and small SVG charts.

Everything here writes deterministic bytes for the same inputs (no
timestamps, stable ordering) so reruns diff clean.  SVG charts are
hand-rolled polylines: good enough to eyeball a curve without pulling in a
plotting stack.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .metrics import MetricReport, MixGrid
from .saturation import SimCurve


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_curves_csv(reports: list[MetricReport], path: str | Path) -> None:
    """One row per (scope, metric, k); whole-suite metrics carry an empty k."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["scope,metric,k,value"]
    for rep in reports:
        for name, value in (
            ("dr_full", rep.dr_full),
            ("vacc_full", rep.vacc_full),
            ("depc", rep.depc),
            ("diversity_ratio", rep.diversity_ratio),
            ("auc_at_n", rep.auc_at_n),
        ):
            lines.append(f"{rep.scope},{name},,{_fmt(value)}")
        for point in rep.curve:
            lines.append(f"{rep.scope},dr_at_k,{point.k},{_fmt(point.dr)}")
            lines.append(f"{rep.scope},vacc_at_k,{point.k},{_fmt(point.vacc)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_summary_md(reports: list[MetricReport], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [
        "# Evaluation summary",
        "",
        "| scope | tests | solutions (CE) | DR | VAcc | DEPC | diversity | AUC |",
        "|---|---|---|---|---|---|---|---|",
    ]
    for rep in reports:
        lines.append(
            f"| {rep.scope} | {rep.n_tests} | {rep.m_solutions} ({rep.m_ce}) "
            f"| {_fmt(rep.dr_full)} | {_fmt(rep.vacc_full)} | {rep.depc} "
            f"| {_fmt(rep.diversity_ratio)} | {_fmt(rep.auc_at_n)} |"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_grid_csv(grid: MixGrid, path: str | Path) -> None:
    """Mixing table: header row of source names, one row per source;
    empty cell where the AUC is undefined."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["source," + ",".join(grid.names)]
    for i, name in enumerate(grid.names):
        cells = []
        for j in range(len(grid.names)):
            v = grid.auc[i, j]
            cells.append("" if math.isnan(v) else repr(float(v)))
        lines.append(f"{name}," + ",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_sim_csv(curve: SimCurve, bound: list[float] | None, analytic: list[float] | None,
                  path: str | Path) -> None:
    """Simulated detection curve with optional model bound and closed-form
    columns aligned by n."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = "n,dr_simulated"
    if bound is not None:
        header += ",dr_model_bound"
    if analytic is not None:
        header += ",dr_analytic"
    lines = [header]
    for i, (n, dr) in enumerate(curve.points):
        row = f"{n},{_fmt(float(dr))}"
        if bound is not None:
            row += f",{_fmt(float(bound[i]))}"
        if analytic is not None:
            row += f",{_fmt(float(analytic[i]))}"
        lines.append(row)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def svg_line_chart(series: list[tuple[str, list[tuple[float, float]]]], path: str | Path,
                   title: str = "", xlabel: str = "", ylabel: str = "") -> None:
    """Minimal multi-series line chart.  series = [(label, [(x, y), ...])]."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    width, height, pad = 640, 420, 56
    xs = [x for _, pts in series for x, _ in pts]
    ys = [y for _, pts in series for _, y in pts]
    if not xs:
        raise ValueError("nothing to plot")
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(0.0, min(ys)), max(1.0, max(ys))
    if x_hi == x_lo:
        x_hi = x_lo + 1.0

    def sx(x: float) -> float:
        return pad + (x - x_lo) / (x_hi - x_lo) * (width - 2 * pad)

    def sy(y: float) -> float:
        return height - pad - (y - y_lo) / (y_hi - y_lo) * (height - 2 * pad)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = y_lo + frac * (y_hi - y_lo)
        parts.append(
            f'<text x="{pad - 6}" y="{sy(y) + 4}" text-anchor="end">{y:.2f}</text>'
        )
        parts.append(
            f'<line x1="{pad}" y1="{sy(y)}" x2="{width - pad}" y2="{sy(y)}" '
            f'stroke="#dddddd" stroke-dasharray="3,3"/>'
        )
        x = x_lo + frac * (x_hi - x_lo)
        parts.append(
            f'<text x="{sx(x)}" y="{height - pad + 16}" text-anchor="middle">{x:g}</text>'
        )
    if title:
        parts.append(f'<text x="{width / 2}" y="20" text-anchor="middle" font-size="15">{title}</text>')
    if xlabel:
        parts.append(f'<text x="{width / 2}" y="{height - 8}" text-anchor="middle">{xlabel}</text>')
    if ylabel:
        parts.append(
            f'<text x="14" y="{height / 2}" text-anchor="middle" '
            f'transform="rotate(-90 14 {height / 2})">{ylabel}</text>'
        )
    for idx, (label, pts) in enumerate(series):
        color = _PALETTE[idx % len(_PALETTE)]
        coords = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in pts)
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        parts.append(
            f'<text x="{width - pad + 4}" y="{pad + 16 * idx + 10}" fill="{color}">{label}</text>'
        )
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n", encoding="utf-8")


def svg_heatmap(grid: MixGrid, path: str | Path, title: str = "") -> None:
    """Mixing-table heatmap with cell annotations."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    size = len(grid.names)
    cell, pad = 72, 90
    width = pad + size * cell + 20
    height = pad + size * cell + 20
    finite = grid.auc[np.isfinite(grid.auc)]
    lo = float(finite.min()) if finite.size else 0.0
    hi = float(finite.max()) if finite.size else 1.0
    if hi == lo:
        hi = lo + 1.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        parts.append(f'<text x="{width / 2}" y="18" text-anchor="middle" font-size="14">{title}</text>')
    for i, name in enumerate(grid.names):
        parts.append(
            f'<text x="{pad - 6}" y="{pad + i * cell + cell / 2 + 4}" text-anchor="end">{name}</text>'
        )
        parts.append(
            f'<text x="{pad + i * cell + cell / 2}" y="{pad - 8}" text-anchor="middle">{name}</text>'
        )
    for i in range(size):
        for j in range(size):
            v = grid.auc[i, j]
            if math.isnan(v):
                fill, label = "#eeeeee", ""
            else:
                t = (float(v) - lo) / (hi - lo)
                shade = int(235 - t * 160)
                fill, label = f"rgb({shade},{shade},255)", f"{float(v):.3f}"
            x, y = pad + j * cell, pad + i * cell
            parts.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" '
                         f'fill="{fill}" stroke="white"/>')
            if label:
                parts.append(
                    f'<text x="{x + cell / 2}" y="{y + cell / 2 + 4}" text-anchor="middle">{label}</text>'
                )
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n", encoding="utf-8")
