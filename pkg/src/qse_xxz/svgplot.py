"""Minimal deterministic SVG line plots of scan records.

Output depends only on the input numbers: fixed canvas, fixed number
formatting and no timestamps, so files can be compared byte for byte.
"""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

__all__ = ["line_plot_svg", "semiaxes_svg", "volume_svg", "render_plots"]

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=110, top=40, bottom=55)
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _f(x: float) -> str:
    return f"{x:.3f}"


def _nice_ticks(lo: float, hi: float, count: int = 6) -> list[float]:
    span = hi - lo
    raw = span / max(count - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    k = 0
    while first + k * step <= hi + 1e-9 * span:
        ticks.append(round(first + k * step, 12))
        k += 1
    return ticks


def line_plot_svg(x, series, title: str, xlabel: str, ylabel: str) -> str:
    """SVG text with one ``<polyline>`` per entry of ``series``.

    ``series`` is a list of ``(label, y_values)``; ``None`` entries in a
    series are skipped.
    """
    if len(x) < 2:
        raise ValueError("a line plot needs at least two records")
    xs = [float(v) for v in x]
    ys_all = [float(v) for _, ys in series for v in ys if v is not None]
    if not ys_all:
        raise ValueError("no finite values to plot")
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(0.0, min(ys_all)), max(ys_all)
    if y_hi - y_lo < 1e-12:
        y_hi = y_lo + 1.0
    y_hi += 0.05 * (y_hi - y_lo)

    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(v):
        return MARGIN["left"] + (v - x_lo) / (x_hi - x_lo) * pw

    def py(v):
        return MARGIN["top"] + (y_hi - v) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" '
        'fill="none" stroke="black" stroke-width="1"/>',
    ]
    for t in _nice_ticks(x_lo, x_hi):
        X = _f(px(t))
        out.append(f'<line x1="{X}" y1="{_f(MARGIN["top"] + ph)}" x2="{X}" y2="{_f(MARGIN["top"] + ph + 5)}" stroke="black"/>')
        out.append(f'<text x="{X}" y="{_f(MARGIN["top"] + ph + 18)}" text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(y_lo, y_hi):
        Y = _f(py(t))
        out.append(f'<line x1="{MARGIN["left"] - 5}" y1="{Y}" x2="{MARGIN["left"]}" y2="{Y}" stroke="black"/>')
        out.append(f'<text x="{MARGIN["left"] - 8}" y="{Y}" text-anchor="end" dominant-baseline="middle">{t:g}</text>')
    out.append(f'<text x="{WIDTH / 2:g}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append(f'<text x="{MARGIN["left"] + pw / 2:g}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    cy = MARGIN["top"] + ph / 2
    out.append(f'<text x="18" y="{cy:g}" text-anchor="middle" transform="rotate(-90 18 {cy:g})">{escape(ylabel)}</text>')

    for k, (label, ys) in enumerate(series):
        color = COLORS[k % len(COLORS)]
        pts = " ".join(f"{_f(px(xv))},{_f(py(float(yv)))}" for xv, yv in zip(xs, ys) if yv is not None)
        dash = ' stroke-dasharray="6 4"' if k == 1 else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{pts}"/>')
        ly = MARGIN["top"] + 14 + 18 * k
        lx = MARGIN["left"] + pw + 10
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="1.5"{dash}/>')
        out.append(f'<text x="{lx + 26}" y="{ly}" dominant-baseline="middle">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def semiaxes_svg(records) -> str:
    records = list(records)
    x = [r.delta for r in records]
    series = [(f"s_{c}", [getattr(r, f"s_{c}") for r in records]) for c in "xyz"]
    return line_plot_svg(x, series, "Steering ellipsoid semiaxes", "Delta", "semiaxis length")


def volume_svg(records) -> str:
    records = list(records)
    return line_plot_svg([r.delta for r in records], [("V_A", [r.volume for r in records])],
                         "Steering ellipsoid volume", "Delta", "volume")


def render_plots(records, out_dir, kinds=("svg-semiaxes", "svg-volume")) -> list[Path]:
    """Write ``semiaxes.svg`` and/or ``volume.svg``.

    Raises ``ValueError`` before touching the file system when fewer than two
    records are supplied.
    """
    from .scan import write_text

    records = list(records)
    if len(records) < 2:
        raise ValueError("plotting needs at least two records")
    texts = {}
    if "svg-semiaxes" in kinds:
        texts["semiaxes.svg"] = semiaxes_svg(records)
    if "svg-volume" in kinds:
        texts["volume.svg"] = volume_svg(records)
    return [write_text(Path(out_dir) / name, text) for name, text in texts.items()]
