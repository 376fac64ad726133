"""Minimal SVG line plots (polylines and text, no plotting dependency)."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"]


def line_plot(series: dict, *, title: str = "", xlabel: str = "seconds",
              ylabel: str = "log10 error", width: int = 640, height: int = 420) -> str:
    """``series`` maps a label to ``(x, y)`` arrays; x must be non-decreasing."""
    left, right, top, bottom = 70, 150, 40, 50
    xs = [np.asarray(x, float) for x, _ in series.values()]
    ys = [np.asarray(y, float) for _, y in series.values()]
    finite = [v[np.isfinite(v)] for v in ys]
    xmax = max((x.max() for x in xs if x.size), default=1.0) or 1.0
    ymin = min((v.min() for v in finite if v.size), default=0.0)
    ymax = max((v.max() for v in finite if v.size), default=1.0)
    if ymax == ymin:
        ymax = ymin + 1.0
    pw, ph = width - left - right, height - top - bottom

    def px(x):
        return left + pw * x / xmax

    def py(y):
        return top + ph * (ymax - y) / (ymax - ymin)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
           f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
           f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
           f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle" font-size="12">'
           f'{escape(xlabel)}</text>',
           f'<text x="15" y="{top + ph / 2:.1f}" text-anchor="middle" font-size="12" '
           f'transform="rotate(-90 15 {top + ph / 2:.1f})">{escape(ylabel)}</text>']
    for k in range(5):
        xv = xmax * k / 4
        yv = ymin + (ymax - ymin) * k / 4
        out.append(f'<text x="{px(xv):.1f}" y="{top + ph + 15}" text-anchor="middle" '
                   f'font-size="10">{xv:.3g}</text>')
        out.append(f'<text x="{left - 5}" y="{py(yv) + 3:.1f}" text-anchor="end" '
                   f'font-size="10">{yv:.3g}</text>')
    for k, (label, (x, y)) in enumerate(series.items()):
        x, y = np.asarray(x, float), np.asarray(y, float)
        if np.any(np.diff(x) < 0):
            raise ValueError(f"series {label!r}: x values must be non-decreasing")
        ok = np.isfinite(y)
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x[ok], y[ok]))
        color = COLORS[k % len(COLORS)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                   f'data-label="{escape(label)}" points="{pts}"/>')
        ly = top + 15 + 18 * k
        out.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 30}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text class="legend" x="{left + pw + 35}" y="{ly + 4}" '
                   f'font-size="12">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
