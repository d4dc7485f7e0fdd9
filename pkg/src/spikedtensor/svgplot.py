"""Tiny dependency-free SVG renderer for line plots and histograms.

Not a plotting library: just enough to drop theory/empirical overlays next
to the CSV files each experiment writes.
"""

from __future__ import annotations

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 60, 15, 15, 45
_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    import math
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min(s for s in (mag, 2 * mag, 5 * mag, 10 * mag) if s >= raw)
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-12 * abs(hi):
        out.append(round(t, 12))
        t += step
    return out


class SvgFigure:
    def __init__(self, xlabel: str = "", ylabel: str = "", title: str = ""):
        self.xlabel, self.ylabel, self.title = xlabel, ylabel, title
        self.lines = []     # (xs, ys, label, style)
        self.bars = []      # (edges, heights, label)

    def add_line(self, xs, ys, label: str = "", dots: bool = False):
        pts = [(float(x), float(y)) for x, y in zip(xs, ys)
               if _finite(x) and _finite(y)]
        self.lines.append((pts, label, dots))

    def add_hist(self, edges, heights, label: str = ""):
        self.bars.append(([float(e) for e in edges], [float(h) for h in heights], label))

    def _extent(self):
        xs, ys = [], []
        for pts, _, _ in self.lines:
            xs += [p[0] for p in pts]
            ys += [p[1] for p in pts]
        for edges, heights, _ in self.bars:
            xs += edges
            ys += heights + [0.0]
        if not xs:
            return 0.0, 1.0, 0.0, 1.0
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(min(ys), 0.0), max(ys)
        if x1 == x0:
            x1 = x0 + 1.0
        if y1 == y0:
            y1 = y0 + 1.0
        pad = 0.05 * (y1 - y0)
        return x0, x1, y0, y1 + pad

    def write(self, path) -> None:
        x0, x1, y0, y1 = self._extent()
        iw = _W - _ML - _MR
        ih = _H - _MT - _MB

        def px(x):
            return _ML + (x - x0) / (x1 - x0) * iw

        def py(y):
            return _MT + ih - (y - y0) / (y1 - y0) * ih

        parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
                 f'font-family="sans-serif" font-size="11">',
                 f'<rect width="{_W}" height="{_H}" fill="white"/>']
        for t in _ticks(x0, x1):
            parts.append(f'<line x1="{px(t):.1f}" y1="{_MT + ih}" x2="{px(t):.1f}" '
                         f'y2="{_MT + ih + 4}" stroke="black"/>')
            parts.append(f'<text x="{px(t):.1f}" y="{_MT + ih + 16}" text-anchor="middle">{t:g}</text>')
        for t in _ticks(y0, y1):
            parts.append(f'<line x1="{_ML - 4}" y1="{py(t):.1f}" x2="{_ML}" y2="{py(t):.1f}" stroke="black"/>')
            parts.append(f'<text x="{_ML - 7}" y="{py(t):.1f}" text-anchor="end" dominant-baseline="middle">{t:g}</text>')
        parts.append(f'<rect x="{_ML}" y="{_MT}" width="{iw}" height="{ih}" fill="none" stroke="black"/>')

        ci = 0
        legend = []
        for edges, heights, label in self.bars:
            color = _COLORS[ci % len(_COLORS)]
            ci += 1
            for left, right, h in zip(edges[:-1], edges[1:], heights):
                parts.append(f'<rect x="{px(left):.2f}" y="{py(h):.2f}" '
                             f'width="{max(px(right) - px(left), 0.5):.2f}" '
                             f'height="{max(py(0) - py(h), 0):.2f}" fill="{color}" '
                             f'fill-opacity="0.45" stroke="none"/>')
            if label:
                legend.append((label, color))
        for pts, label, dots in self.lines:
            color = _COLORS[ci % len(_COLORS)]
            ci += 1
            if dots:
                for x, y in pts:
                    parts.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="2.5" fill="{color}"/>')
            else:
                d = "M" + " L".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
                parts.append(f'<path d="{d}" fill="none" stroke="{color}" stroke-width="1.5"/>')
            if label:
                legend.append((label, color))
        for k, (label, color) in enumerate(legend):
            yk = _MT + 14 + 16 * k
            parts.append(f'<line x1="{_ML + 10}" y1="{yk}" x2="{_ML + 34}" y2="{yk}" '
                         f'stroke="{color}" stroke-width="3"/>')
            parts.append(f'<text x="{_ML + 40}" y="{yk + 4}">{_esc(label)}</text>')
        if self.xlabel:
            parts.append(f'<text x="{_ML + iw / 2:.0f}" y="{_H - 8}" text-anchor="middle">{_esc(self.xlabel)}</text>')
        if self.ylabel:
            parts.append(f'<text x="14" y="{_MT + ih / 2:.0f}" text-anchor="middle" '
                         f'transform="rotate(-90 14 {_MT + ih / 2:.0f})">{_esc(self.ylabel)}</text>')
        parts.append("</svg>")
        with open(path, "w") as fh:
            fh.write("\n".join(parts))


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _finite(v) -> bool:
    try:
        return v == v and abs(float(v)) != float("inf")
    except (TypeError, ValueError):
        return False
