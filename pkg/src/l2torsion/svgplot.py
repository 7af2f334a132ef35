"""Dependency-free SVG log-log plots of torsion curves with asymptote overlays."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence


def _ticks(lo: float, hi: float) -> list[float]:
    """Powers of two covering [lo, hi] (natural for grids bracketing 1)."""
    out = []
    k = math.floor(math.log2(lo))
    while 2.0**k <= hi * 1.0001:
        if 2.0**k >= lo * 0.9999:
            out.append(2.0**k)
        k += 1
    return out or [lo, hi]


def curve_svg(
    points: Sequence[tuple[float, float]],
    path: str | Path,
    asymptotes: Sequence[tuple[float, float, str]] = (),
    title: str = "",
    width: int = 640,
    height: int = 440,
) -> Path:
    """Write a log-log plot.

    asymptotes are (slope, log-intercept, label) triples drawn dashed in
    log-log coordinates: log y = slope * log x + intercept.
    """
    pts = [(t, v) for t, v in points if t > 0 and v > 0]
    if not pts:
        raise ValueError("no positive points to plot")
    margin = 56
    xs = [math.log(t) for t, _ in pts]
    ys = [math.log(v) for _, v in pts]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if y_hi - y_lo < 0.2:
        pad = 0.1
        y_lo -= pad
        y_hi += pad
    x_span = (x_hi - x_lo) or 1.0
    y_span = (y_hi - y_lo) or 1.0

    def sx(x: float) -> float:
        return margin + (x - x_lo) / x_span * (width - 2 * margin)

    def sy(y: float) -> float:
        return height - margin - (y - y_lo) / y_span * (height - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width // 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
    ]
    # axes
    parts.append(
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>'
    )
    parts.append(
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>'
    )
    for tick in _ticks(math.exp(x_lo), math.exp(x_hi)):
        px = sx(math.log(tick))
        parts.append(
            f'<line x1="{px:.1f}" y1="{height - margin}" x2="{px:.1f}" '
            f'y2="{height - margin + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{px:.1f}" y="{height - margin + 18}" text-anchor="middle" '
            f'font-size="11">{tick:g}</text>'
        )
    for frac in (0.0, 0.5, 1.0):
        y_val = y_lo + frac * y_span
        py = sy(y_val)
        parts.append(
            f'<line x1="{margin - 5}" y1="{py:.1f}" x2="{margin}" y2="{py:.1f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{margin - 8}" y="{py + 4:.1f}" text-anchor="end" '
            f'font-size="11">{math.exp(y_val):.4g}</text>'
        )
    parts.append(
        f'<text x="{width // 2}" y="{height - 8}" text-anchor="middle" font-size="12">t</text>'
    )
    # dashed asymptote overlays
    for slope, intercept, label in asymptotes:
        y1 = slope * x_lo + intercept
        y2 = slope * x_hi + intercept
        parts.append(
            f'<line x1="{sx(x_lo):.1f}" y1="{sy(y1):.1f}" x2="{sx(x_hi):.1f}" '
            f'y2="{sy(y2):.1f}" stroke="#888" stroke-dasharray="6 4"/>'
        )
        parts.append(
            f'<text x="{sx(x_hi) - 4:.1f}" y="{sy(y2) - 6:.1f}" text-anchor="end" '
            f'font-size="11" fill="#666">{label}</text>'
        )
    # the curve itself
    poly = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in zip(xs, ys))
    parts.append(f'<polyline points="{poly}" fill="none" stroke="#c2362b" stroke-width="1.5"/>')
    for x, y in zip(xs, ys):
        parts.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="3" fill="#c2362b"/>')
    parts.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(parts))
    return path
