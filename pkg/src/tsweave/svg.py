"""Minimal multi-panel SVG line and step charts.

Output depends only on the data: coordinates are printed with fixed
precision and nothing time-dependent is embedded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .core import TimeSeries

PANEL_W = 320
PANEL_H = 200
MARGIN = {"left": 46, "right": 12, "top": 28, "bottom": 28}
GAP = 16
STROKE = "#1f77b4"


@dataclass(frozen=True)
class Panel:
    title: str
    series: TimeSeries
    steps: bool = False


def _fmt(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _nice_ticks(lo: float, hi: float, count: int = 4):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * step:
        ticks.append(v)
        v += step
    return ticks


def _tick_label(v: float) -> str:
    return f"{v:.4g}"


def _panel(p: Panel, ox: float, oy: float, letter_index: int) -> list:
    x, y = p.series
    if p.steps:
        # steps-post: each value holds until the next sample; extend the last by one step
        step = x[-1] - x[-2] if x.size > 1 else 1.0
        x = np.append(x, x[-1] + step)
        y = np.append(y, y[-1])
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(y.min()), float(y.max())
    if x1 == x0:
        x1 = x0 + 1.0
    pad = 0.05 * (y1 - y0) if y1 > y0 else max(1.0, abs(y0) * 0.05)
    y0, y1 = y0 - pad, y1 + pad
    pw = PANEL_W - MARGIN["left"] - MARGIN["right"]
    ph = PANEL_H - MARGIN["top"] - MARGIN["bottom"]
    left, top = ox + MARGIN["left"], oy + MARGIN["top"]

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + (y1 - v) / (y1 - y0) * ph

    out = [f'<g class="panel" data-index="{letter_index}">']
    out.append(
        f'<text class="panel-title" x="{_fmt(ox + MARGIN["left"])}" y="{_fmt(oy + 18)}" '
        f'font-size="13" font-family="sans-serif">{escape(p.title)}</text>'
    )
    out.append(
        f'<rect x="{_fmt(left)}" y="{_fmt(top)}" width="{_fmt(pw)}" height="{_fmt(ph)}" '
        f'fill="none" stroke="#444" stroke-width="0.8"/>'
    )
    for tv in _nice_ticks(y0, y1):
        ty = sy(tv)
        out.append(f'<line x1="{_fmt(left - 4)}" y1="{_fmt(ty)}" x2="{_fmt(left)}" y2="{_fmt(ty)}" stroke="#444"/>')
        out.append(
            f'<text x="{_fmt(left - 6)}" y="{_fmt(ty + 3)}" font-size="9" text-anchor="end" '
            f'font-family="sans-serif">{_tick_label(tv)}</text>'
        )
    for tv in _nice_ticks(x0, x1):
        tx = sx(tv)
        out.append(f'<line x1="{_fmt(tx)}" y1="{_fmt(top + ph)}" x2="{_fmt(tx)}" y2="{_fmt(top + ph + 4)}" stroke="#444"/>')
        out.append(
            f'<text x="{_fmt(tx)}" y="{_fmt(top + ph + 14)}" font-size="9" text-anchor="middle" '
            f'font-family="sans-serif">{_tick_label(tv)}</text>'
        )
    px = [sx(v) for v in x.tolist()]
    py = [sy(v) for v in y.tolist()]
    if p.steps:
        cmds = [f"M{_fmt(px[0])},{_fmt(py[0])}"]
        for i in range(1, len(px)):
            cmds.append(f"H{_fmt(px[i])}V{_fmt(py[i])}")
        out.append(f'<path class="steps" d="{"".join(cmds)}" fill="none" stroke="{STROKE}" stroke-width="1"/>')
    else:
        pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(px, py))
        out.append(f'<polyline class="line" points="{pts}" fill="none" stroke="{STROKE}" stroke-width="0.8"/>')
    out.append("</g>")
    return out


def render(panels, columns: int = None, title: str = None) -> str:
    """Lay ``panels`` out on a grid and return the SVG document text."""
    panels = list(panels)
    if columns is None:
        columns = len(panels) if len(panels) <= 4 else 4
    rows = math.ceil(len(panels) / columns)
    head = 24 if title else 0
    width = columns * PANEL_W + (columns - 1) * GAP
    height = head + rows * PANEL_H + (rows - 1) * GAP
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="8" y="17" font-size="15" font-family="sans-serif">{escape(title)}</text>')
    for i, p in enumerate(panels):
        r, c = divmod(i, columns)
        out.extend(_panel(p, c * (PANEL_W + GAP), head + r * (PANEL_H + GAP), i))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def lettered(titles):
    """``["Original", ...]`` -> ``["a) Original", ...]``."""
    return [f"{chr(ord('a') + i)}) {t}" for i, t in enumerate(titles)]

