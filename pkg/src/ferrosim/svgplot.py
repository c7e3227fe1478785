"""Dependency-free SVG charts: line plots and filled-cell contour maps.

Deliberately small: axes, ticks, polylines, colored cells. Enough to eyeball
every CSV the tool emits without pulling in a plotting stack.
"""

from __future__ import annotations

import math

import numpy as np

_W, _H = 640, 440
_ML, _MR, _MT, _MB = 70, 20, 30, 50
_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    step = 10.0 ** math.floor(math.log10(span / n))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if span / (step * mult) <= n + 1:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    out = []
    t = first
    while t <= hi + 1e-12 * span:
        out.append(round(t, 12))
        t += step
    return out


def _log_ticks(lo: float, hi: float) -> list[float]:
    lo_e = math.floor(math.log10(lo))
    hi_e = math.ceil(math.log10(hi))
    step = max(1, (hi_e - lo_e) // 8)
    return [10.0 ** e for e in range(lo_e, hi_e + 1, step)]


class _Axes:
    def __init__(self, x_lo, x_hi, y_lo, y_hi, logx=False, logy=False):
        self.logx, self.logy = logx, logy
        tx = (lambda v: math.log10(v)) if logx else (lambda v: v)
        ty = (lambda v: math.log10(v)) if logy else (lambda v: v)
        self.tx, self.ty = tx, ty
        self.x_lo, self.x_hi = tx(x_lo), tx(x_hi)
        self.y_lo, self.y_hi = ty(y_lo), ty(y_hi)
        if self.x_hi <= self.x_lo:
            self.x_hi = self.x_lo + 1.0
        if self.y_hi <= self.y_lo:
            self.y_hi = self.y_lo + 1.0

    def px(self, x: float) -> float:
        f = (self.tx(x) - self.x_lo) / (self.x_hi - self.x_lo)
        return _ML + f * (_W - _ML - _MR)

    def py(self, y: float) -> float:
        f = (self.ty(y) - self.y_lo) / (self.y_hi - self.y_lo)
        return _H - _MB - f * (_H - _MT - _MB)


def _frame(axes: _Axes, xlabel: str, ylabel: str, title: str,
           x_ticks: list[float], y_ticks: list[float]) -> list[str]:
    parts = [f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
             f'height="{_H - _MT - _MB}" fill="none" stroke="black"/>']
    for t in x_ticks:
        x = axes.px(t)
        parts.append(f'<line x1="{x:.1f}" y1="{_H - _MB}" x2="{x:.1f}" '
                     f'y2="{_H - _MB + 5}" stroke="black"/>')
        parts.append(f'<text x="{x:.1f}" y="{_H - _MB + 18}" font-size="11" '
                     f'text-anchor="middle">{t:.3g}</text>')
    for t in y_ticks:
        y = axes.py(t)
        parts.append(f'<line x1="{_ML - 5}" y1="{y:.1f}" x2="{_ML}" y2="{y:.1f}" '
                     f'stroke="black"/>')
        parts.append(f'<text x="{_ML - 8}" y="{y + 4:.1f}" font-size="11" '
                     f'text-anchor="end">{t:.3g}</text>')
    parts.append(f'<text x="{(_ML + _W - _MR) / 2}" y="{_H - 12}" font-size="13" '
                 f'text-anchor="middle">{xlabel}</text>')
    parts.append(f'<text x="16" y="{(_MT + _H - _MB) / 2}" font-size="13" '
                 f'text-anchor="middle" transform="rotate(-90 16 {(_MT + _H - _MB) / 2})">'
                 f'{ylabel}</text>')
    parts.append(f'<text x="{(_ML + _W - _MR) / 2}" y="18" font-size="13" '
                 f'text-anchor="middle">{title}</text>')
    return parts


def _svg(parts: list[str]) -> str:
    body = "\n".join(parts)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}">\n<rect width="100%" height="100%" fill="white"/>\n'
            f'{body}\n</svg>\n')


def line_chart(path, x, series: dict[str, np.ndarray], xlabel: str, ylabel: str,
               title: str = "", logx: bool = False, logy: bool = False) -> None:
    """Write a multi-series line chart; series maps legend label to y-array."""
    x = np.asarray(x, dtype=float)
    ys = {k: np.asarray(v, dtype=float) for k, v in series.items()}
    finite = np.concatenate([v[np.isfinite(v)] for v in ys.values()] or [np.array([0.0])])
    if logy:
        finite = finite[finite > 0]
    if finite.size == 0:
        finite = np.array([1.0])
    y_lo, y_hi = float(finite.min()), float(finite.max())
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    xf = x[np.isfinite(x)]
    if logx:
        xf = xf[xf > 0]
    axes = _Axes(float(xf.min()), float(xf.max()), y_lo, y_hi, logx, logy)
    x_ticks = _log_ticks(float(xf.min()), float(xf.max())) if logx else \
        _ticks(float(xf.min()), float(xf.max()))
    y_ticks = _log_ticks(max(y_lo, 1e-300), y_hi) if logy else _ticks(y_lo, y_hi)
    parts = _frame(axes, xlabel, ylabel, title, x_ticks, y_ticks)
    for idx, (label, y) in enumerate(ys.items()):
        color = _COLORS[idx % len(_COLORS)]
        pts = []
        for xi, yi in zip(x, y):
            if not (np.isfinite(xi) and np.isfinite(yi)):
                continue
            if (logx and xi <= 0) or (logy and yi <= 0):
                continue
            pts.append(f"{axes.px(xi):.1f},{axes.py(yi):.1f}")
        if pts:
            parts.append(f'<polyline points="{" ".join(pts)}" fill="none" '
                         f'stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{_W - _MR - 6}" y="{_MT + 16 + 14 * idx}" font-size="11" '
                     f'text-anchor="end" fill="{color}">{label}</text>')
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(_svg(parts))


def _heat_color(f: float) -> str:
    """Blue -> white -> red ramp on [0, 1]."""
    f = min(1.0, max(0.0, f))
    if f < 0.5:
        g = f / 0.5
        r, gr, b = int(255 * g), int(255 * g), 255
    else:
        g = (f - 0.5) / 0.5
        r, gr, b = 255, int(255 * (1 - g)), int(255 * (1 - g))
    return f"#{r:02x}{gr:02x}{b:02x}"


def contour_chart(path, x, y, z, xlabel: str, ylabel: str, title: str = "",
                  logy: bool = True) -> None:
    """Filled-cell map: z[i, j] over x[i] (linear) and y[j] (log by default)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    finite = z[np.isfinite(z)]
    z_lo = float(finite.min()) if finite.size else 0.0
    z_hi = float(finite.max()) if finite.size else 1.0
    if z_hi <= z_lo:
        z_hi = z_lo + 1.0
    axes = _Axes(float(x.min()), float(x.max()), float(y.min()), float(y.max()),
                 logx=False, logy=logy)

    def edges(vals, log):
        v = np.log10(vals) if log else vals
        mid = 0.5 * (v[1:] + v[:-1])
        first = v[0] - (mid[0] - v[0]) if len(v) > 1 else v[0] - 0.5
        last = v[-1] + (v[-1] - mid[-1]) if len(v) > 1 else v[-1] + 0.5
        e = np.concatenate([[first], mid, [last]])
        return 10.0 ** e if log else e

    xe = edges(x, False)
    ye = edges(y, logy)
    parts = []
    for i in range(len(x)):
        for j in range(len(y)):
            val = z[i, j]
            if not np.isfinite(val):
                continue
            x0, x1 = axes.px(xe[i]), axes.px(xe[i + 1])
            y0, y1 = axes.py(ye[j]), axes.py(ye[j + 1])
            color = _heat_color((val - z_lo) / (z_hi - z_lo))
            parts.append(f'<rect x="{min(x0, x1):.1f}" y="{min(y0, y1):.1f}" '
                         f'width="{abs(x1 - x0):.1f}" height="{abs(y1 - y0):.1f}" '
                         f'fill="{color}"/>')
    y_ticks = _log_ticks(float(y.min()), float(y.max())) if logy else \
        _ticks(float(y.min()), float(y.max()))
    parts += _frame(axes, xlabel, ylabel, f"{title} [{z_lo:.3g} .. {z_hi:.3g}]",
                    _ticks(float(x.min()), float(x.max())), y_ticks)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(_svg(parts))
