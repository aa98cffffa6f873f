"""Feasibility-curve figure: f_pzf and f_zf against the missing fraction.

The figure is written as a standalone SVG (no plotting dependency) next
to a CSV of the sampled values.  The vertical gap between the curves is
the theoretical price of zero-filling without re-projection.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .certificates import f_pzf, f_zf

_W, _H = 840, 560
_ML, _MR, _MT, _MB = 72, 24, 36, 56


def fig1_grid(n_points: int = 1000) -> np.ndarray:
    """Interior grid on (0, 1): i/(n+1) for i = 1..n."""
    if n_points < 1:
        raise ValueError("need at least one grid point")
    return np.arange(1, n_points + 1) / (n_points + 1.0)


def _ticks(lo: float, hi: float, target: int = 6):
    span = hi - lo
    raw = span / max(target - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-12 * span:
        out.append(0.0 if abs(t) < 1e-12 * span else t)
        t += step
    return out


def emit_fig1(
    alpha: float,
    beta: float,
    eps: float,
    out_dir: str = ".",
    n_points: int = 1000,
    stem: str = "fig1",
) -> tuple[str, str]:
    """Write <stem>.csv and <stem>.svg under out_dir; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    omegas = fig1_grid(n_points)
    fp = f_pzf(omegas, alpha, beta, eps)
    fz = f_zf(omegas, alpha, beta, eps)

    csv_path = os.path.join(out_dir, f"{stem}.csv")
    with open(csv_path, "w", encoding="ascii") as fh:
        fh.write("omega,f_pzf,f_zf\n")
        for w, a, b in zip(omegas, fp, fz):
            fh.write("%.17g,%.17g,%.17g\n" % (w, a, b))

    ylo = float(min(fp.min(), fz.min(), 0.0))
    yhi = float(max(fp.max(), fz.max(), 0.0))
    pad = 0.05 * (yhi - ylo or 1.0)
    ylo, yhi = ylo - pad, yhi + pad
    pw = _W - _ML - _MR
    ph = _H - _MT - _MB

    def sx(w):
        return _ML + w * pw

    def sy(v):
        return _MT + (yhi - v) / (yhi - ylo) * ph

    def polyline(ws, vs, color):
        pts = " ".join("%.2f,%.2f" % (sx(w), sy(v)) for w, v in zip(ws, vs))
        return (
            f'<polyline fill="none" stroke="{color}" stroke-width="2" '
            f'points="{pts}"/>'
        )

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_W} {_H}" '
        f'font-family="sans-serif" font-size="14">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" '
        'stroke="#444"/>',
    ]
    for t in _ticks(0.0, 1.0):
        x = sx(t)
        parts.append(
            f'<line x1="{x:.2f}" y1="{_MT + ph}" x2="{x:.2f}" '
            f'y2="{_MT + ph + 5}" stroke="#444"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{_MT + ph + 22}" text-anchor="middle">'
            f"{t:g}</text>"
        )
    for t in _ticks(ylo, yhi):
        y = sy(t)
        parts.append(
            f'<line x1="{_ML - 5}" y1="{y:.2f}" x2="{_ML}" y2="{y:.2f}" '
            'stroke="#444"/>'
        )
        parts.append(
            f'<text x="{_ML - 9}" y="{y + 5:.2f}" text-anchor="end">{t:g}</text>'
        )
    if ylo < 0.0 < yhi:
        y0 = sy(0.0)
        parts.append(
            f'<line x1="{_ML}" y1="{y0:.2f}" x2="{_ML + pw}" y2="{y0:.2f}" '
            'stroke="#999" stroke-dasharray="6 4"/>'
        )
    parts.append(polyline(omegas, fp, "#1f77b4"))
    parts.append(polyline(omegas, fz, "#d62728"))
    lx = _ML + pw - 170
    parts.extend(
        [
            f'<line x1="{lx}" y1="{_MT + 18}" x2="{lx + 34}" y2="{_MT + 18}" '
            'stroke="#1f77b4" stroke-width="2"/>',
            f'<text x="{lx + 42}" y="{_MT + 23}">f_pzf</text>',
            f'<line x1="{lx}" y1="{_MT + 40}" x2="{lx + 34}" y2="{_MT + 40}" '
            'stroke="#d62728" stroke-width="2"/>',
            f'<text x="{lx + 42}" y="{_MT + 45}">f_zf</text>',
            f'<text x="{_ML + pw / 2:.0f}" y="{_H - 14}" text-anchor="middle">'
            "missing fraction omega</text>",
            f'<text x="20" y="{_MT + ph / 2:.0f}" text-anchor="middle" '
            f'transform="rotate(-90 20 {_MT + ph / 2:.0f})">feasibility</text>',
            f'<text x="{_ML + pw / 2:.0f}" y="24" text-anchor="middle" '
            'font-size="16">Feasibility of the two programs vs missing '
            "fraction (alpha=%g, beta=%g, eps=%g)</text>" % (alpha, beta, eps),
        ]
    )
    parts.append("</svg>")
    svg_path = os.path.join(out_dir, f"{stem}.svg")
    with open(svg_path, "w", encoding="ascii") as fh:
        fh.write("\n".join(parts) + "\n")
    return svg_path, csv_path
