"""Bare-bones SVG line charts for eyeballing sweep output."""
from __future__ import annotations

from collections import OrderedDict
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
MARGIN = 56
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f")


def _fmt(v: float) -> str:
    return f"{v:.4g}"


def line_chart_svg(series, xlabel: str = "", ylabel: str = "", title: str = "") -> str:
    """Render ``{name: (xs, ys)}`` as one SVG document."""
    xs_all = [x for xs, _ in series.values() for x in xs]
    ys_all = [y for _, ys in series.values() for y in ys]
    if not xs_all:
        raise ValueError("nothing to plot")
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = min(ys_all), max(ys_all)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pw, ph = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN

    def sx(x):
        return MARGIN + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return HEIGHT - MARGIN - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>',
        f'<text x="{WIDTH / 2}" y="{MARGIN / 2}" text-anchor="middle">{escape(title)}</text>',
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="14" y="{HEIGHT / 2}" text-anchor="middle" transform="rotate(-90 14 {HEIGHT / 2})">{escape(ylabel)}</text>',
    ]
    for i in range(5):
        xv = x0 + (x1 - x0) * i / 4
        yv = y0 + (y1 - y0) * i / 4
        out.append(f'<text x="{sx(xv):.1f}" y="{HEIGHT - MARGIN + 16}" text-anchor="middle">{_fmt(xv)}</text>')
        out.append(f'<text x="{MARGIN - 6}" y="{sy(yv) + 4:.1f}" text-anchor="end">{_fmt(yv)}</text>')
    for n, (name, (xs, ys)) in enumerate(series.items()):
        color = PALETTE[n % len(PALETTE)]
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = MARGIN + 14 + 16 * n
        out.append(f'<line x1="{WIDTH - MARGIN - 110}" y1="{ly - 4}" x2="{WIDTH - MARGIN - 90}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{WIDTH - MARGIN - 84}" y="{ly}">{escape(str(name))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def chart_from_rows(header, rows, title: str = "") -> str:
    """Plot column 2 against column 0, one line per distinct column-1 value."""
    series: "OrderedDict[str, tuple[list, list]]" = OrderedDict()
    for row in rows:
        key = row[1] if isinstance(row[1], str) else f"{header[1]}={_fmt(row[1])}"
        xs, ys = series.setdefault(key, ([], []))
        xs.append(float(row[0]))
        ys.append(float(row[2]))
    return line_chart_svg(series, header[0], header[2], title)
