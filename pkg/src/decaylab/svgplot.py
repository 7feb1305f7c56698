"""Minimal SVG line plots.

CSV is the authoritative output format everywhere in this package; these
plots exist so a run directory can be eyeballed without loading anything.
Hand-rolled on purpose: one polyline per series, linear or log axes, no
plotting dependency.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

__all__ = ["line_plot"]

_PALETTE = ("#1f6fb2", "#c4452c", "#3a8c3f", "#7b4fa6", "#b08f26", "#4a4a4a")
_W, _H = 720, 460
_ML, _MR, _MT, _MB = 72, 24, 40, 56


def _fmt(value: float) -> str:
    if value == 0:
        return "0"
    mag = abs(value)
    if 1e-3 <= mag < 1e4:
        text = f"{value:.6g}"
    else:
        text = f"{value:.2e}"
    return text


def _ticks(lo: float, hi: float, log: bool) -> list[float]:
    if log:
        lo_e, hi_e = math.floor(lo + 1e-12), math.ceil(hi - 1e-12)
        step = max(1, int(math.ceil((hi_e - lo_e) / 6.0)))
        return [float(e) for e in range(int(lo_e), int(hi_e) + 1, step)]
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / 5.0
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-9 * step:
        out.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return out


def line_plot(path, series: Sequence[tuple], *, title: str = "",
              xlabel: str = "", ylabel: str = "", logx: bool = False,
              logy: bool = False) -> None:
    """Write an SVG with one line per (x, y, label) triple.

    Log axes drop nonpositive points of a series rather than failing; a
    series with nothing left is skipped.
    """
    drawn = []
    for idx, (x, y, label) in enumerate(series):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        keep = np.isfinite(x) & np.isfinite(y)
        if logx:
            keep &= x > 0
        if logy:
            keep &= y > 0
        if not np.any(keep):
            continue
        xv = np.log10(x[keep]) if logx else x[keep]
        yv = np.log10(y[keep]) if logy else y[keep]
        drawn.append((xv, yv, label, _PALETTE[idx % len(_PALETTE)]))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
    ]
    if title:
        parts.append(f'<text x="{_W / 2}" y="24" text-anchor="middle" '
                     f'font-size="15">{_esc(title)}</text>')
    if not drawn:
        parts.append(f'<text x="{_W / 2}" y="{_H / 2}" text-anchor="middle">'
                     f'no plottable data</text>')
        parts.append("</svg>")
        _write(path, parts)
        return
    x_lo = min(float(s[0].min()) for s in drawn)
    x_hi = max(float(s[0].max()) for s in drawn)
    y_lo = min(float(s[1].min()) for s in drawn)
    y_hi = max(float(s[1].max()) for s in drawn)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.04 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    def sx(v):
        return _ML + (v - x_lo) / (x_hi - x_lo) * (_W - _ML - _MR)

    def sy(v):
        return _H - _MB - (v - y_lo) / (y_hi - y_lo) * (_H - _MT - _MB)

    parts.append(f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
                 f'height="{_H - _MT - _MB}" fill="none" stroke="#888"/>')
    for tv in _ticks(x_lo, x_hi, logx):
        if not x_lo <= tv <= x_hi:
            continue
        px = sx(tv)
        label = f"1e{int(tv)}" if logx else _fmt(tv)
        parts.append(f'<line x1="{px:.1f}" y1="{_H - _MB}" x2="{px:.1f}" '
                     f'y2="{_H - _MB + 5}" stroke="#444"/>')
        parts.append(f'<text x="{px:.1f}" y="{_H - _MB + 18}" '
                     f'text-anchor="middle">{label}</text>')
    for tv in _ticks(y_lo, y_hi, logy):
        if not y_lo <= tv <= y_hi:
            continue
        py = sy(tv)
        label = f"1e{int(tv)}" if logy else _fmt(tv)
        parts.append(f'<line x1="{_ML - 5}" y1="{py:.1f}" x2="{_ML}" '
                     f'y2="{py:.1f}" stroke="#444"/>')
        parts.append(f'<text x="{_ML - 8}" y="{py + 4:.1f}" '
                     f'text-anchor="end">{label}</text>')
    if xlabel:
        parts.append(f'<text x="{(_ML + _W - _MR) / 2}" y="{_H - 14}" '
                     f'text-anchor="middle">{_esc(xlabel)}</text>')
    if ylabel:
        parts.append(f'<text x="18" y="{(_MT + _H - _MB) / 2}" '
                     f'text-anchor="middle" transform="rotate(-90 18 '
                     f'{(_MT + _H - _MB) / 2})">{_esc(ylabel)}</text>')
    for xv, yv, label, color in drawn:
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(xv, yv))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     f'stroke-width="1.5"/>')
    ly = _MT + 14
    for _, _, label, color in drawn:
        if not label:
            continue
        parts.append(f'<line x1="{_ML + 10}" y1="{ly - 4}" x2="{_ML + 34}" '
                     f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{_ML + 40}" y="{ly}">{_esc(label)}</text>')
        ly += 16
    parts.append("</svg>")
    _write(path, parts)


def _esc(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;"))


def _write(path, parts) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
