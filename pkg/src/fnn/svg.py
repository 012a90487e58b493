"""Minimal self-contained SVG line plots (no plotting dependency)."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["line_plot"]

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def line_plot(path, x, series: dict, title: str = "", log_y: bool = False,
              width: int = 640, height: int = 400) -> None:
    """Write one polyline per entry of ``series`` (label -> y values) against ``x``."""
    x = np.asarray(x, dtype=np.float64)
    ys = {k: np.asarray(v, dtype=np.float64) for k, v in series.items()}
    if log_y:
        ys = {k: np.log10(np.maximum(v, 1e-300)) for k, v in ys.items()}
    finite = np.concatenate([v[np.isfinite(v)] for v in ys.values()] or [np.zeros(1)])
    y_lo, y_hi = float(finite.min()), float(finite.max())
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    x_lo, x_hi = float(x.min()), float(x.max())
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    pad = 50

    def px(v):
        return pad + (v - x_lo) / (x_hi - x_lo) * (width - 2 * pad)

    def py(v):
        return height - pad - (v - y_lo) / (y_hi - y_lo) * (height - 2 * pad)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
        'fill="none" stroke="black"/>',
        f'<text x="{width / 2}" y="{pad / 2}" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{pad}" y="{height - pad / 3}" font-size="11">{x_lo:g}</text>',
        f'<text x="{width - pad}" y="{height - pad / 3}" text-anchor="end" font-size="11">{x_hi:g}</text>',
        f'<text x="{pad - 4}" y="{height - pad}" text-anchor="end" font-size="11">'
        f'{("1e%.1f" % y_lo) if log_y else ("%.3g" % y_lo)}</text>',
        f'<text x="{pad - 4}" y="{pad + 10}" text-anchor="end" font-size="11">'
        f'{("1e%.1f" % y_hi) if log_y else ("%.3g" % y_hi)}</text>',
    ]
    for i, (label, y) in enumerate(ys.items()):
        color = _COLORS[i % len(_COLORS)]
        ok = np.isfinite(y)
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x[ok], y[ok]))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{width - pad - 4}" y="{pad + 16 * (i + 1)}" text-anchor="end" '
                   f'font-size="12" fill="{color}">{escape(label)}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")
