"""Minimal standalone SVG line plots of detector counts against phase."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .trials import CountsTable

WIDTH, HEIGHT = 800, 500
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 20, 40, 60

COLORS = {"D_L": "#1f77b4", "D_R": "#d62728"}


@dataclass(frozen=True)
class Axes:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def px(self, x: float) -> float:
        span = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
        return MARGIN_LEFT + (x - self.x_min) / (self.x_max - self.x_min) * span

    def py(self, y: float) -> float:
        span = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
        return HEIGHT - MARGIN_BOTTOM - (y - self.y_min) / (self.y_max - self.y_min) * span

    def data_x(self, px: float) -> float:
        span = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
        return self.x_min + (px - MARGIN_LEFT) / span * (self.x_max - self.x_min)

    def data_y(self, py: float) -> float:
        span = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
        return self.y_min + (HEIGHT - MARGIN_BOTTOM - py) / span * (self.y_max - self.y_min)


def axes_for(table: CountsTable) -> Axes:
    phis = table.phis()
    x_min, x_max = float(phis.min()), float(phis.max())
    if x_max == x_min:
        x_min, x_max = x_min - 1.0, x_max + 1.0
    y_top = max(int(max(table.n_L().max(), table.n_R().max())), 1)
    return Axes(x_min, x_max, 0.0, _nice_ceiling(y_top * 1.05))


def _nice_ceiling(y: float) -> float:
    step = 10 ** math.floor(math.log10(y))
    for m in (1, 2, 2.5, 5, 10):
        if m * step >= y:
            return m * step
    return 10 * step


def _points(ax: Axes, xs: Sequence[float], ys: Sequence[float]) -> str:
    return " ".join(f"{ax.px(x):.3f},{ax.py(y):.3f}" for x, y in zip(xs, ys))


def expected_counts(table: CountsTable, overlay: str) -> tuple[np.ndarray, np.ndarray]:
    """Analytic ``n (1 +- cos phi) / 2`` per row; ``tails`` swaps the detectors, ``flat`` is ``n/2``."""
    phis = table.phis()
    n = (table.n_L() + table.n_R()).astype(float)
    if overlay == "flat":
        return n / 2, n / 2
    heads_L = 0.5 * n * (1 + np.cos(phis))
    heads_R = 0.5 * n * (1 - np.cos(phis))
    if overlay == "heads":
        return heads_L, heads_R
    if overlay == "tails":
        return heads_R, heads_L
    raise ValueError(f"unknown overlay {overlay!r}")


def render_counts_svg(table: CountsTable, title: str = "", overlay: str | None = None) -> str:
    if len(table) == 0:
        raise ValueError("no rows to plot")
    ax = axes_for(table)
    phis = table.phis()
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'data-x-min="{ax.x_min!r}" data-x-max="{ax.x_max!r}" '
        f'data-y-min="{ax.y_min!r}" data-y-max="{ax.y_max!r}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]

    out.append('<g class="grid" stroke="#dddddd" stroke-width="1">')
    for k in range(9):
        x = ax.x_min + k * (ax.x_max - ax.x_min) / 8
        px = ax.px(x)
        out.append(f'<line x1="{px:.3f}" y1="{MARGIN_TOP}" x2="{px:.3f}" y2="{HEIGHT - MARGIN_BOTTOM}"/>')
    for k in range(6):
        y = ax.y_min + k * (ax.y_max - ax.y_min) / 5
        py = ax.py(y)
        out.append(f'<line x1="{MARGIN_LEFT}" y1="{py:.3f}" x2="{WIDTH - MARGIN_RIGHT}" y2="{py:.3f}"/>')
    out.append("</g>")

    out.append('<g class="ticks" font-family="sans-serif" font-size="11" fill="#333333">')
    for k in range(9):
        x = ax.x_min + k * (ax.x_max - ax.x_min) / 8
        out.append(
            f'<text x="{ax.px(x):.3f}" y="{HEIGHT - MARGIN_BOTTOM + 16}" text-anchor="middle">{x:.2f}</text>'
        )
    for k in range(6):
        y = ax.y_min + k * (ax.y_max - ax.y_min) / 5
        out.append(
            f'<text x="{MARGIN_LEFT - 6}" y="{ax.py(y) + 4:.3f}" text-anchor="end">{y:g}</text>'
        )
    out.append("</g>")

    out.append(
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{WIDTH - MARGIN_LEFT - MARGIN_RIGHT}" '
        f'height="{HEIGHT - MARGIN_TOP - MARGIN_BOTTOM}" fill="none" stroke="#333333" stroke-width="1"/>'
    )
    out.append(
        f'<text x="{(MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2}" y="{HEIGHT - 15}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="13">phi (rad)</text>'
    )
    out.append(
        f'<text x="18" y="{(MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 18 {(MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2})">detector counts</text>'
    )
    if title:
        out.append(
            f'<text x="{WIDTH / 2}" y="24" text-anchor="middle" font-family="sans-serif" '
            f'font-size="15">{escape(title)}</text>'
        )

    if overlay:
        exp_L, exp_R = expected_counts(table, overlay)
        for name, ys in (("D_L", exp_L), ("D_R", exp_R)):
            out.append(
                f'<polyline class="expected" data-series={quoteattr(name)} fill="none" '
                f'stroke="{COLORS[name]}" stroke-width="1" stroke-dasharray="4 3" '
                f'points="{_points(ax, phis, ys)}"/>'
            )

    for name, ys in (("D_L", table.n_L()), ("D_R", table.n_R())):
        out.append(
            f'<polyline class="series" data-series={quoteattr(name)} fill="none" '
            f'stroke="{COLORS[name]}" stroke-width="2" points="{_points(ax, phis, ys)}"/>'
        )

    lx = WIDTH - MARGIN_RIGHT - 70
    for k, name in enumerate(("D_L", "D_R")):
        y = MARGIN_TOP + 16 + 16 * k
        out.append(
            f'<line x1="{lx}" y1="{y - 4}" x2="{lx + 20}" y2="{y - 4}" stroke="{COLORS[name]}" stroke-width="2"/>'
        )
        out.append(
            f'<text x="{lx + 26}" y="{y}" font-family="sans-serif" font-size="12">{name}</text>'
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"
