"""Minimal dependency-free SVG line plots.

Each series is (label, xs, ys); one polyline per series, linear or
log-scaled y axis, a small legend. Output is deterministic for fixed
input.
"""

from __future__ import annotations

import math

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#e377c2", "#7f7f7f")

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 70, 20, 40, 50  # margins


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def line_plot(path, series, title: str = "", xlabel: str = "",
              ylabel: str = "", log_y: bool = False) -> None:
    """Write an SVG line plot; raises on empty input, writes nothing."""
    series = [(label, list(xs), list(ys)) for label, xs, ys in series]
    if not series or any(len(xs) == 0 or len(xs) != len(ys)
                         for _, xs, ys in series):
        raise ValueError("series must be non-empty with matching lengths")

    def ty(v: float) -> float:
        if log_y:
            return math.log10(max(v, 1e-300))
        return v

    all_x = [x for _, xs, _ in series for x in xs]
    all_y = [ty(y) for _, _, ys in series for y in ys]
    x0, x1 = min(all_x), max(all_x)
    y0, y1 = min(all_y), max(all_y)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    pw = _W - _ML - _MR
    ph = _H - _MT - _MB

    def px(x: float) -> float:
        return _ML + (x - x0) / (x1 - x0) * pw

    def py(y: float) -> float:
        return _MT + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" '
        f'height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" '
        'fill="none" stroke="#333" stroke-width="1"/>',
    ]
    if title:
        parts.append(f'<text x="{_W / 2}" y="24" text-anchor="middle" '
                     f'font-size="15" font-family="sans-serif">{title}</text>')
    if xlabel:
        parts.append(f'<text x="{_W / 2}" y="{_H - 10}" '
                     'text-anchor="middle" font-size="12" '
                     f'font-family="sans-serif">{xlabel}</text>')
    if ylabel:
        parts.append(f'<text x="16" y="{_H / 2}" text-anchor="middle" '
                     'font-size="12" font-family="sans-serif" '
                     f'transform="rotate(-90 16 {_H / 2})">{ylabel}</text>')

    for tx in _ticks(x0, x1):
        X = _ML + (tx - x0) / (x1 - x0) * pw
        parts.append(f'<line x1="{_fmt(X)}" y1="{_MT + ph}" '
                     f'x2="{_fmt(X)}" y2="{_MT + ph + 5}" stroke="#333"/>')
        parts.append(f'<text x="{_fmt(X)}" y="{_MT + ph + 18}" '
                     'text-anchor="middle" font-size="10" '
                     f'font-family="sans-serif">{_fmt(tx)}</text>')
    for tv in _ticks(y0, y1):
        Y = _MT + (1.0 - (tv - y0) / (y1 - y0)) * ph
        label = f"1e{_fmt(tv)}" if log_y else _fmt(tv)
        parts.append(f'<line x1="{_ML - 5}" y1="{_fmt(Y)}" x2="{_ML}" '
                     f'y2="{_fmt(Y)}" stroke="#333"/>')
        parts.append(f'<text x="{_ML - 8}" y="{_fmt(Y + 3)}" '
                     'text-anchor="end" font-size="10" '
                     f'font-family="sans-serif">{label}</text>')

    for i, (label, xs, ys) in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        points = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}"
                          for x, y in zip(xs, ys))
        parts.append(f'<polyline fill="none" stroke="{color}" '
                     f'stroke-width="1.5" points="{points}"/>')
        ly = _MT + 14 + 16 * i
        parts.append(f'<line x1="{_ML + pw - 110}" y1="{ly - 4}" '
                     f'x2="{_ML + pw - 90}" y2="{ly - 4}" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{_ML + pw - 84}" y="{ly}" font-size="11" '
                     f'font-family="sans-serif">{label}</text>')

    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
