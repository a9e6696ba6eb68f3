"""Self-contained SVG line charts with logarithmic axes, no plotting dependency."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence
from xml.sax.saxutils import escape

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf")

WIDTH, HEIGHT = 820, 560
LEFT, RIGHT, TOP, BOTTOM = 90, 210, 50, 70


@dataclass
class Series:
    label: str
    points: list[tuple[float, float]]
    color: str = "#1f77b4"
    dashed: bool = False
    markers: bool = False
    line: bool = True
    # (x, lo, hi) vertical error bars
    errors: list[tuple[float, float, float]] = field(default_factory=list)


@dataclass
class HLine:
    label: str
    y: float
    color: str = "#555555"


class _Axis:
    def __init__(self, lo: float, hi: float, log: bool, pixel_lo: float, pixel_hi: float):
        self.log = log
        if log:
            lo, hi = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
            if hi == lo:
                hi += 1
        elif hi == lo:
            lo, hi = lo - 1.0, hi + 1.0
        self.lo, self.hi = lo, hi
        self.pixel_lo, self.pixel_hi = pixel_lo, pixel_hi

    def __call__(self, value: float) -> float:
        v = math.log10(value) if self.log else value
        frac = (v - self.lo) / (self.hi - self.lo)
        return self.pixel_lo + frac * (self.pixel_hi - self.pixel_lo)

    def ticks(self) -> list[tuple[float, str]]:
        if self.log:
            step = max(1, int(math.ceil((self.hi - self.lo) / 10)))
            return [(10.0**e, f"1e{e}") for e in range(int(self.lo), int(self.hi) + 1, step)]
        span = self.hi - self.lo
        raw = span / 8
        mag = 10 ** math.floor(math.log10(raw))
        step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
        start = math.ceil(self.lo / step) * step
        out = []
        v = start
        while v <= self.hi + 1e-9 * span:
            out.append((v, f"{v:g}"))
            v += step
        return out


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def line_chart(
    series: Sequence[Series],
    title: str,
    x_label: str,
    y_label: str,
    log_x: bool = False,
    log_y: bool = True,
    hlines: Sequence[HLine] = (),
) -> str:
    """Render series as an SVG document string.

    Points that cannot be drawn on a log axis (non-positive) are dropped.
    """

    def usable(x: float, y: float) -> bool:
        return math.isfinite(x) and math.isfinite(y) and (x > 0 or not log_x) and (y > 0 or not log_y)

    xs, ys = [], []
    for s in series:
        for x, y in s.points:
            if usable(x, y):
                xs.append(x)
                ys.append(y)
    ys.extend(h.y for h in hlines if h.y > 0 or not log_y)
    if not xs:
        raise ValueError("nothing to plot")

    px_left, px_right = LEFT, WIDTH - RIGHT
    px_top, px_bottom = TOP, HEIGHT - BOTTOM
    ax = _Axis(min(xs), max(xs), log_x, px_left, px_right)
    ay = _Axis(min(ys), max(ys), log_y, px_bottom, px_top)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{(px_left + px_right) / 2}" y="{TOP - 20}" text-anchor="middle" '
        f'font-size="15">{escape(title)}</text>',
    ]
    for value, label in ax.ticks():
        x = ax(value)
        out.append(
            f'<line x1="{_fmt(x)}" y1="{px_top}" x2="{_fmt(x)}" y2="{px_bottom}" stroke="#e5e5e5"/>'
        )
        out.append(
            f'<text x="{_fmt(x)}" y="{px_bottom + 18}" text-anchor="middle">{escape(label)}</text>'
        )
    for value, label in ay.ticks():
        y = ay(value)
        out.append(
            f'<line x1="{px_left}" y1="{_fmt(y)}" x2="{px_right}" y2="{_fmt(y)}" stroke="#e5e5e5"/>'
        )
        out.append(
            f'<text x="{px_left - 8}" y="{_fmt(y + 4)}" text-anchor="end">{escape(label)}</text>'
        )
    out.append(
        f'<rect x="{px_left}" y="{px_top}" width="{px_right - px_left}" '
        f'height="{px_bottom - px_top}" fill="none" stroke="black"/>'
    )
    out.append(
        f'<text x="{(px_left + px_right) / 2}" y="{HEIGHT - 25}" text-anchor="middle">'
        f"{escape(x_label)}</text>"
    )
    cy = (px_top + px_bottom) / 2
    out.append(
        f'<text x="25" y="{cy}" text-anchor="middle" transform="rotate(-90 25 {cy})">'
        f"{escape(y_label)}</text>"
    )

    legend: list[tuple[str, str, bool, bool]] = []
    for h in hlines:
        if log_y and h.y <= 0:
            continue
        y = _fmt(ay(h.y))
        out.append(
            f'<line x1="{px_left}" y1="{y}" x2="{px_right}" y2="{y}" stroke="{h.color}" '
            'stroke-dasharray="2,4" stroke-width="1.5"/>'
        )
        legend.append((h.label, h.color, True, False))

    for s in series:
        pts = [(ax(x), ay(y)) for x, y in s.points if usable(x, y)]
        if s.line and len(pts) > 1:
            dash = ' stroke-dasharray="7,4"' if s.dashed else ""
            path = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
            out.append(
                f'<polyline points="{path}" fill="none" stroke="{s.color}" stroke-width="1.8"{dash}/>'
            )
        for x, lo, hi in s.errors:
            if not usable(x, hi):
                continue
            lo = lo if (lo > 0 or not log_y) else min(hi, 10.0**ay.lo)
            out.append(
                f'<line x1="{_fmt(ax(x))}" y1="{_fmt(ay(lo))}" x2="{_fmt(ax(x))}" '
                f'y2="{_fmt(ay(hi))}" stroke="{s.color}"/>'
            )
        if s.markers:
            for x, y in pts:
                out.append(
                    f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3.2" fill="none" stroke="{s.color}"/>'
                )
        legend.append((s.label, s.color, s.dashed, s.markers and not s.line))

    lx = px_right + 15
    for i, (label, color, dashed, marker_only) in enumerate(legend):
        y = px_top + 10 + 18 * i
        if marker_only:
            out.append(f'<circle cx="{lx + 12}" cy="{y}" r="3.2" fill="none" stroke="{color}"/>')
        else:
            dash = ' stroke-dasharray="7,4"' if dashed else ""
            out.append(
                f'<line x1="{lx}" y1="{y}" x2="{lx + 24}" y2="{y}" stroke="{color}" '
                f'stroke-width="1.8"{dash}/>'
            )
        out.append(f'<text x="{lx + 30}" y="{y + 4}">{escape(label)}</text>')

    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path: Path, document: str) -> Path:
    path = Path(path)
    path.write_text(document, encoding="utf-8")
    return path


def color(i: int) -> str:
    return COLORS[i % len(COLORS)]


def label_pex(p_ex: float, prefix: Optional[str] = None) -> str:
    text = f"p_ex={p_ex:g}"
    return f"{prefix} {text}" if prefix else text
