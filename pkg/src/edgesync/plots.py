"""Minimal deterministic SVG line plots.

Hand-rolled on purpose: the emitted bytes are a pure function of the data,
which keeps plot artifacts byte-reproducible across runs and machines (no
plotting library, no font metrics, no timestamps).  One polyline per series.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

_WIDTH, _HEIGHT = 960, 540
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 24, 44, 52
_PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
)
_MAX_POINTS = 1500


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    return f"{v:.6g}"


def line_plot_svg(times: np.ndarray, series: np.ndarray, title: str, y_label: str = "") -> str:
    """Render one or more series against time as an SVG document string."""
    times = np.asarray(times, dtype=float)
    series = np.asarray(series, dtype=float)
    if series.ndim == 1:
        series = series[:, None]
    if series.shape[0] != times.size:
        raise ValueError("series length does not match the time grid")

    x0, x1 = float(times[0]), float(times[-1])
    if x1 == x0:
        x1 = x0 + 1.0
    y0, y1 = float(series.min()), float(series.max())
    if y1 == y0:
        pad = max(0.5, 0.5 * abs(y0))
    else:
        pad = 0.05 * (y1 - y0)
    y0 -= pad
    y1 += pad

    plot_w = _WIDTH - _LEFT - _RIGHT
    plot_h = _HEIGHT - _TOP - _BOTTOM

    def sx(v):
        return _LEFT + (v - x0) / (x1 - x0) * plot_w

    def sy(v):
        return _TOP + (y1 - v) / (y1 - y0) * plot_h

    stride = max(1, int(np.ceil(times.size / _MAX_POINTS)))
    idx = np.arange(0, times.size, stride)
    if idx[-1] != times.size - 1:
        idx = np.append(idx, times.size - 1)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="#ffffff"/>',
        f'<text x="{_WIDTH // 2}" y="24" font-family="sans-serif" font-size="16" '
        f'text-anchor="middle">{title}</text>',
    ]
    if y_label:
        parts.append(
            f'<text x="16" y="{_TOP - 12}" font-family="sans-serif" font-size="12">{y_label}</text>'
        )

    for frac in np.linspace(0.0, 1.0, 6):
        xv = x0 + frac * (x1 - x0)
        yv = y0 + frac * (y1 - y0)
        xp, yp = sx(xv), sy(yv)
        parts.append(
            f'<line x1="{_fmt(xp)}" y1="{_TOP}" x2="{_fmt(xp)}" y2="{_TOP + plot_h}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<line x1="{_LEFT}" y1="{_fmt(yp)}" x2="{_LEFT + plot_w}" y2="{_fmt(yp)}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(xp)}" y="{_TOP + plot_h + 18}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle">{_tick_label(xv)}</text>'
        )
        parts.append(
            f'<text x="{_LEFT - 6}" y="{_fmt(yp + 4)}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end">{_tick_label(yv)}</text>'
        )
    parts.append(
        f'<rect x="{_LEFT}" y="{_TOP}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333333" stroke-width="1"/>'
    )
    parts.append(
        f'<text x="{_LEFT + plot_w // 2}" y="{_HEIGHT - 14}" font-family="sans-serif" '
        f'font-size="12" text-anchor="middle">t</text>'
    )

    for j in range(series.shape[1]):
        color = _PALETTE[j % len(_PALETTE)]
        pts = " ".join(f"{_fmt(sx(times[i]))},{_fmt(sy(series[i, j]))}" for i in idx)
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.2"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_line_plot(path, times, series, title: str, y_label: str = "") -> None:
    Path(path).write_text(line_plot_svg(times, series, title, y_label), encoding="utf-8")
