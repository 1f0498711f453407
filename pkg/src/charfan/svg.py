"""Tiny SVG line-plot writer: axes box, polylines, markers and labels."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _finite_pairs(xs, ys):
    return [(float(x), float(y)) for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)]


def _span(vals):
    lo, hi = min(vals), max(vals)
    if hi - lo < 1e-300:
        lo, hi = lo - 0.5, hi + 0.5
    return lo, hi


def line_plot(path, series, title: str = "", xlabel: str = "", ylabel: str = "",
              markers=(), vlines=(), width: int = 640, height: int = 420) -> None:
    """``series`` is a list of (label, xs, ys); ``vlines`` a list of (x, label)."""
    pad_l, pad_r, pad_t, pad_b = 70, 20, 40, 50
    pts = [p for _, xs, ys in series for p in _finite_pairs(xs, ys)]
    pts += [(float(x), float(y)) for x, y, _ in markers]
    if not pts:
        pts = [(0.0, 0.0)]
    x0, x1 = _span([p[0] for p in pts] + [float(v) for v, _ in vlines])
    y0, y1 = _span([p[1] for p in pts])
    W, H = width - pad_l - pad_r, height - pad_t - pad_b
    sx = lambda x: pad_l + (x - x0) / (x1 - x0) * W
    sy = lambda y: pad_t + (y1 - y) / (y1 - y0) * H

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
           f'<rect x="{pad_l}" y="{pad_t}" width="{W}" height="{H}" fill="white" stroke="black"/>']
    for k in range(5):
        xv = x0 + (x1 - x0) * k / 4
        yv = y0 + (y1 - y0) * k / 4
        out.append(f'<text x="{sx(xv):.2f}" y="{pad_t + H + 16}" text-anchor="middle">{xv:.4g}</text>')
        out.append(f'<text x="{pad_l - 6}" y="{sy(yv) + 4:.2f}" text-anchor="end">{yv:.4g}</text>')
    for m, (label, xs, ys) in enumerate(series):
        color = PALETTE[m % len(PALETTE)]
        seg = _finite_pairs(xs, ys)
        if seg:
            coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in seg)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        out.append(f'<text x="{pad_l + 8}" y="{pad_t + 16 + 14 * m}" fill="{color}">{escape(label)}</text>')
    for x, label in vlines:
        out.append(f'<line x1="{sx(x):.2f}" y1="{pad_t}" x2="{sx(x):.2f}" y2="{pad_t + H}" '
                   f'stroke="gray" stroke-dasharray="4,3"/>')
        out.append(f'<text x="{sx(x) + 3:.2f}" y="{pad_t + H - 6}" fill="gray">{escape(label)}</text>')
    for x, y, label in markers:
        out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" fill="black"/>')
        if label:
            out.append(f'<text x="{sx(x) + 5:.2f}" y="{sy(y) - 5:.2f}">{escape(label)}</text>')
    out.append(f'<text x="{width / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append(f'<text x="{pad_l + W / 2}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{pad_t + H / 2}" text-anchor="middle" '
               f'transform="rotate(-90 16 {pad_t + H / 2})">{escape(ylabel)}</text>')
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")
