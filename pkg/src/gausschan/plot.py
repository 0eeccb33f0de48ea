"""Minimal SVG rendering of the DR / RR threshold curves."""

from __future__ import annotations

import json
import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
MARGIN = 56
TICK = 0.25


def _ticks(lo: float, hi: float) -> list[float]:
    step = TICK * max(1, math.ceil((hi - lo) / TICK / 40))
    k = math.ceil(lo / step - 1e-9)
    out = []
    while k * step <= hi + 1e-9:
        out.append(round(k * step, 10))
        k += 1
    return out


def _segments(rows, attr):
    """Split a curve at excluded rows so the singular points stay visibly open."""
    seg, out = [], []
    for r in rows:
        if r.excluded:
            if seg:
                out.append(seg)
            seg = []
        else:
            seg.append((r.tau, getattr(r, attr)))
    if seg:
        out.append(seg)
    return out


def threshold_svg(rows, manifest: dict | None = None) -> str:
    """SVG with the DR threshold as a thin line and the RR threshold as a thick one."""
    good = [r for r in rows if not r.excluded]
    if not good:
        raise ValueError("nothing to plot: every row is excluded")
    x_lo, x_hi = min(r.tau for r in rows), max(r.tau for r in rows)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    y_hi = max(1.0, max(max(r.eps_dr, r.eps_rr) for r in good))
    y_hi = TICK * math.ceil(y_hi / TICK)

    def sx(x):
        return MARGIN + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2 * MARGIN)

    def sy(y):
        return HEIGHT - MARGIN - y / y_hi * (HEIGHT - 2 * MARGIN)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">'
    ]
    if manifest is not None:
        out.append(f"<metadata>{escape(json.dumps(manifest, sort_keys=True))}</metadata>")
    x0, x1, y0, y1 = sx(x_lo), sx(x_hi), sy(0.0), sy(y_hi)
    out.append(f'<g stroke="black" stroke-width="1" fill="none">'
               f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x1:.2f}" y2="{y0:.2f}"/>'
               f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x0:.2f}" y2="{y1:.2f}"/></g>')
    out.append('<g font-family="sans-serif" font-size="11" fill="black">')
    for t in _ticks(x_lo, x_hi):
        x = sx(t)
        out.append(f'<line x1="{x:.2f}" y1="{y0:.2f}" x2="{x:.2f}" y2="{y0 + 4:.2f}" stroke="black"/>'
                   f'<text x="{x:.2f}" y="{y0 + 16:.2f}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(0.0, y_hi):
        y = sy(t)
        out.append(f'<line x1="{x0 - 4:.2f}" y1="{y:.2f}" x2="{x0:.2f}" y2="{y:.2f}" stroke="black"/>'
                   f'<text x="{x0 - 7:.2f}" y="{y + 4:.2f}" text-anchor="end">{t:g}</text>')
    out.append(f'<text x="{(x0 + x1) / 2:.2f}" y="{HEIGHT - 14}" text-anchor="middle">tau</text>')
    out.append(f'<text x="16" y="{(y0 + y1) / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {(y0 + y1) / 2:.2f})">excess noise</text>')
    out.append("</g>")
    for attr, width, label in (("eps_dr", 1, "DR"), ("eps_rr", 3, "RR")):
        for seg in _segments(rows, attr):
            pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in seg)
            out.append(f'<polyline class="{label}" points="{pts}" fill="none" '
                       f'stroke="black" stroke-width="{width}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
