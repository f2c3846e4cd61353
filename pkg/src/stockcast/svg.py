"""Self-contained SVG line charts with fixed formatting, so files diff cleanly."""
from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 900, 360
MARGIN = 50
COLORS = ("#1f4e79", "#c0504d")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def line_chart(series: Sequence[tuple[str, Sequence[float]]], title: str = "", comment: str | None = None) -> str:
    """Draw each ``(label, values)`` pair as a polyline on shared axes."""
    arrays = [np.asarray(v, dtype=np.float64) for _, v in series]
    n = max((a.size for a in arrays), default=0)
    finite = np.concatenate([a[np.isfinite(a)] for a in arrays]) if arrays else np.empty(0)
    lo, hi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    plot_w, plot_h = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN

    def sx(i: int) -> float:
        return MARGIN + (plot_w * i / (n - 1) if n > 1 else plot_w / 2)

    def sy(v: float) -> float:
        return MARGIN + plot_h * (hi - v) / (hi - lo)

    out = ['<?xml version="1.0" encoding="UTF-8"?>']
    if comment:
        out.append(f"<!-- {escape(comment)} -->")
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">')
    out.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    if title:
        out.append(f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" font-family="sans-serif" font-size="14">{escape(title)}</text>')
    x0, y0, x1, y1 = MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, MARGIN
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>')
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>')
    for v in (lo, hi):
        out.append(f'<text x="{x0 - 6}" y="{_fmt(sy(v) + 4)}" text-anchor="end" font-family="sans-serif" font-size="10">{v:.3g}</text>')
    if lo < 0 < hi:
        out.append(f'<line x1="{x0}" y1="{_fmt(sy(0.0))}" x2="{x1}" y2="{_fmt(sy(0.0))}" stroke="#999999" stroke-dasharray="4 4"/>')
    for k, ((label, _), a) in enumerate(zip(series, arrays)):
        color = COLORS[k % len(COLORS)]
        pts = " ".join(f"{_fmt(sx(i))},{_fmt(sy(v))}" for i, v in enumerate(a) if np.isfinite(v))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1" points="{pts}"/>')
        ly = MARGIN + 14 * k
        out.append(f'<text x="{x1 - 4}" y="{ly}" text-anchor="end" font-family="sans-serif" font-size="11" fill="{color}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
