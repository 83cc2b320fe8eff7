"""Minimal SVG line plot for power curves."""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 40, 60


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 10))
        t += step
    return ticks


def power_curve_svg(points: Sequence, alpha: float, title: str = "") -> str:
    """Power against shift, with a dashed horizontal line at ``alpha``."""
    pts = [(p.delta, p.power) for p in points if math.isfinite(p.power)]
    xs = [d for d, _ in pts] or [0.0]
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    plot_w = WIDTH - LEFT - RIGHT
    plot_h = HEIGHT - TOP - BOTTOM

    def sx(x):
        return LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        return TOP + (1.0 - y) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')

    for y in _nice_ticks(0.0, 1.0):
        out.append(f'<line x1="{LEFT}" y1="{sy(y):.2f}" x2="{WIDTH - RIGHT}" y2="{sy(y):.2f}" stroke="#e5e5e5"/>')
        out.append(f'<text x="{LEFT - 8}" y="{sy(y) + 4:.2f}" text-anchor="end">{y:g}</text>')
    for x in _nice_ticks(x_lo, x_hi):
        out.append(f'<line x1="{sx(x):.2f}" y1="{TOP + plot_h}" x2="{sx(x):.2f}" y2="{TOP + plot_h + 5}" stroke="black"/>')
        out.append(f'<text x="{sx(x):.2f}" y="{TOP + plot_h + 20}" text-anchor="middle">{x:g}</text>')

    out.append(
        f'<polyline points="{LEFT},{TOP} {LEFT},{TOP + plot_h} {WIDTH - RIGHT},{TOP + plot_h}" '
        'fill="none" stroke="black"/>'
    )
    out.append(
        f'<line x1="{LEFT}" y1="{sy(alpha):.2f}" x2="{WIDTH - RIGHT}" y2="{sy(alpha):.2f}" '
        'stroke="#c0392b" stroke-dasharray="6,4"/>'
    )
    out.append(
        f'<text x="{WIDTH - RIGHT - 4}" y="{sy(alpha) - 6:.2f}" text-anchor="end" fill="#c0392b">'
        f"alpha = {alpha:g}</text>"
    )
    if pts:
        coords = " ".join(f"{sx(d):.2f},{sy(p):.2f}" for d, p in pts)
        out.append(f'<polyline points="{coords}" fill="none" stroke="#1f77b4" stroke-width="2"/>')
        for d, p in pts:
            out.append(f'<circle cx="{sx(d):.2f}" cy="{sy(p):.2f}" r="3" fill="#1f77b4"/>')

    out.append(
        f'<text x="{LEFT + plot_w / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle">'
        "median difference (delta)</text>"
    )
    out.append(
        f'<text x="18" y="{TOP + plot_h / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {TOP + plot_h / 2:.1f})">power</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
