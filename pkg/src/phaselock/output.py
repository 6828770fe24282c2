"""CSV and standalone SVG writers for trajectories."""

from __future__ import annotations

import csv
import io
import math
import os
from pathlib import Path
from typing import IO, Sequence, Union
from xml.sax.saxutils import escape

from .trajectory import Trajectory

__all__ = ["format_value", "emit_csv", "render_csv", "render_svg_lineplot", "emit_svg_lineplot"]

Destination = Union[str, os.PathLike, IO[str]]

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def format_value(v) -> str:
    """Integers verbatim, floats as the shortest exact round-trip decimal."""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    x = float(v)
    if x == 0.0:
        x = 0.0  # drop the sign of -0.0
    return repr(x)


def render_csv(trajectory: Trajectory) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(trajectory.names)
    for row in trajectory.rows():
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def _write(text: str, destination: Destination) -> None:
    if hasattr(destination, "write"):
        destination.write(text)
        return
    Path(destination).write_text(text, encoding="utf-8", newline="")


def emit_csv(trajectory: Trajectory, destination: Destination) -> None:
    _write(render_csv(trajectory), destination)


def _span(lo: float, hi: float) -> tuple[float, float]:
    if hi - lo > 1e-12 * max(1.0, abs(lo), abs(hi)):
        return lo, hi
    pad = 0.5 if lo == 0 else abs(lo) * 0.1
    return lo - pad, hi + pad


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    ticks = []
    x = first
    while x <= hi + step * 1e-9:
        ticks.append(round(x, 12))
        x += step
    return ticks


def render_svg_lineplot(
    trajectory: Trajectory,
    columns: Sequence[str],
    title: str = "",
    width: int = 720,
    height: int = 420,
) -> str:
    unknown = [c for c in columns if c not in trajectory.columns]
    if unknown:
        raise KeyError(f"unknown column(s): {', '.join(unknown)}")
    if not columns:
        raise ValueError("no columns to plot")

    left, right, top, bottom = 64, 150, 36, 48
    pw, ph = width - left - right, height - top - bottom
    ts = [float(t) for t in trajectory["t"]]
    values = [float(v) for c in columns for v in trajectory[c] if math.isfinite(float(v))]
    x0, x1 = _span(min(ts, default=0.0), max(ts, default=1.0))
    y0, y1 = _span(min(values, default=0.0), max(values, default=1.0))

    def sx(t: float) -> float:
        return left + (t - x0) / (x1 - x0) * pw

    def sy(v: float) -> float:
        return top + (y1 - v) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    if title:
        out.append(f'<text x="{left}" y="{top - 14}" font-size="14">{escape(title)}</text>')
    out.append(
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#000000"/>'
    )
    for tx in _ticks(x0, x1):
        x = sx(tx)
        out.append(f'<line x1="{x:.2f}" y1="{top + ph}" x2="{x:.2f}" y2="{top + ph + 5}" stroke="#000000"/>')
        out.append(f'<text x="{x:.2f}" y="{top + ph + 18}" text-anchor="middle">{tx:g}</text>')
    for ty in _ticks(y0, y1):
        y = sy(ty)
        out.append(f'<line x1="{left - 5}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="#000000"/>')
        out.append(f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end">{ty:g}</text>')
    out.append(f'<text x="{left + pw / 2:.2f}" y="{height - 10}" text-anchor="middle">t</text>')

    for k, name in enumerate(columns):
        color = PALETTE[k % len(PALETTE)]
        pts = " ".join(
            f"{sx(t):.2f},{sy(float(v)):.2f}" for t, v in zip(ts, trajectory[name]) if math.isfinite(float(v))
        )
        if len(trajectory) == 1:
            x, y = pts.split(",") if pts else ("0", "0")
            out.append(f'<circle cx="{x}" cy="{y}" r="2.5" fill="{color}"/>')
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = top + 12 + 18 * k
        lx = left + pw + 14
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 28}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg_lineplot(
    trajectory: Trajectory, columns: Sequence[str], destination: Destination, title: str = ""
) -> None:
    _write(render_svg_lineplot(trajectory, columns, title), destination)
