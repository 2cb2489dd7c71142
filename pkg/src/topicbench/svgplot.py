"""Dependency-free SVG chart emitters.

Deterministic by construction: fixed coordinate formatting, no timestamps or
generated ids, so numerically identical inputs give byte-identical files.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import ParameterError

WIDTH, HEIGHT = 720, 440
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 24, 40, 56

ALGO_COLORS = {"gibbs": "#3465a4", "vb": "#e07b39"}
CURVE_COLORS = [
    "#3465a4", "#e07b39", "#4e9a06", "#75507b", "#c4a000",
    "#06989a", "#a40000", "#888a85", "#5c3566", "#ce5c00",
    "#204a87", "#8f5902", "#2e3436", "#729fcf", "#ad7fa8",
]
TRUTH_COLOR = "#cc0000"


def _f(x: float) -> str:
    return f"{x:.2f}"


class _Svg:
    def __init__(self, width: int, height: int):
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">',
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        ]

    def line(self, x1, y1, x2, y2, stroke="#2e3436", width=1.0, cls=None):
        c = f' class="{cls}"' if cls else ""
        self.parts.append(
            f'<line{c} x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
            f'stroke="{stroke}" stroke-width="{_f(width)}"/>'
        )

    def rect(self, x, y, w, h, fill, stroke="#2e3436", cls=None):
        c = f' class="{cls}"' if cls else ""
        self.parts.append(
            f'<rect{c} x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" height="{_f(h)}" '
            f'fill="{fill}" fill-opacity="0.55" stroke="{stroke}"/>'
        )

    def circle(self, x, y, r, fill, cls=None):
        c = f' class="{cls}"' if cls else ""
        self.parts.append(f'<circle{c} cx="{_f(x)}" cy="{_f(y)}" r="{_f(r)}" fill="{fill}"/>')

    def text(self, x, y, s, size=12, anchor="middle", cls=None, fill="#2e3436"):
        c = f' class="{cls}"' if cls else ""
        self.parts.append(
            f'<text{c} x="{_f(x)}" y="{_f(y)}" font-family="sans-serif" font-size="{size}" '
            f'text-anchor="{anchor}" fill="{fill}">{_escape(s)}</text>'
        )

    def polyline(self, points, stroke, width=1.2, cls=None):
        c = f' class="{cls}"' if cls else ""
        pts = " ".join(f"{_f(x)},{_f(y)}" for x, y in points)
        self.parts.append(
            f'<polyline{c} points="{pts}" fill="none" stroke="{stroke}" '
            f'stroke-width="{_f(width)}"/>'
        )

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _y_scale(lo: float, hi: float):
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    lo -= 0.05 * span
    hi += 0.05 * span
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def to_y(v: float) -> float:
        return MARGIN_T + plot_h * (1.0 - (v - lo) / (hi - lo))

    return lo, hi, to_y


def emit_boxplot(
    summaries,
    path: Path | str,
    title: str = "",
    xlabel: str = "documents per corpus (M)",
    ylabel: str = "average KLD (nats)",
    group_key=None,
) -> None:
    """Grouped box plot: one x slot per group key, one box per algorithm.

    Boxes carry class "box" and outlier markers class "outlier".
    """
    summaries = list(summaries)
    if not summaries:
        raise ParameterError("need at least one group summary to plot")
    if group_key is None:
        group_key = lambda s: s.M

    keys = sorted({group_key(s) for s in summaries})
    algos = sorted({s.algorithm for s in summaries})
    all_vals = [v for s in summaries for v in s.values]
    lo, hi, to_y = _y_scale(min(all_vals), max(all_vals))

    svg = _Svg(WIDTH, HEIGHT)
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    x_axis_y = HEIGHT - MARGIN_B

    # axes and ticks
    svg.line(MARGIN_L, MARGIN_T, MARGIN_L, x_axis_y)
    svg.line(MARGIN_L, x_axis_y, WIDTH - MARGIN_R, x_axis_y)
    for i in range(6):
        v = lo + (hi - lo) * i / 5
        y = to_y(v)
        svg.line(MARGIN_L - 4, y, MARGIN_L, y)
        svg.text(MARGIN_L - 8, y + 4, f"{v:.2f}", size=11, anchor="end")
    svg.text(14, (MARGIN_T + x_axis_y) / 2, ylabel, size=12, anchor="middle")
    svg.text((MARGIN_L + WIDTH - MARGIN_R) / 2, HEIGHT - 14, xlabel, size=12)
    if title:
        svg.text(WIDTH / 2, 22, title, size=14)

    slot_w = plot_w / len(keys)
    box_w = min(34.0, slot_w / (len(algos) + 1))
    for gi, key in enumerate(keys):
        x_center = MARGIN_L + slot_w * (gi + 0.5)
        svg.text(x_center, x_axis_y + 18, str(key), size=11)
        for ai, algo in enumerate(algos):
            match = [s for s in summaries if group_key(s) == key and s.algorithm == algo]
            if not match:
                continue
            s = match[0]
            x = x_center + (ai - (len(algos) - 1) / 2) * (box_w + 8) - box_w / 2
            color = ALGO_COLORS.get(algo, "#555753")
            y_q1, y_q3 = to_y(s.q1), to_y(s.q3)
            y_med = to_y(s.median)
            y_lo, y_hi = to_y(s.whisker_low), to_y(s.whisker_high)
            cx = x + box_w / 2
            svg.line(cx, y_q3, cx, y_hi, stroke=color)
            svg.line(cx, y_q1, cx, y_lo, stroke=color)
            svg.line(cx - box_w / 4, y_hi, cx + box_w / 4, y_hi, stroke=color)
            svg.line(cx - box_w / 4, y_lo, cx + box_w / 4, y_lo, stroke=color)
            svg.rect(x, y_q3, box_w, max(y_q1 - y_q3, 0.5), fill=color, cls="box")
            svg.line(x, y_med, x + box_w, y_med, stroke="#2e3436", width=1.6)
            for v in s.outliers:
                svg.circle(cx, to_y(v), 2.5, fill=color, cls="outlier")

    # legend
    lx = WIDTH - MARGIN_R - 110
    for ai, algo in enumerate(algos):
        y = MARGIN_T + 8 + 18 * ai
        svg.rect(lx, y - 8, 12, 10, fill=ALGO_COLORS.get(algo, "#555753"))
        svg.text(lx + 18, y, algo, size=12, anchor="start")

    Path(path).write_text(svg.render(), encoding="utf-8")


def emit_wordtopic_plot(
    truth_phi, fit_phi, alignment: dict[int, int], average_kld: float, path: Path | str
) -> None:
    """Overlay each true topic (highlight color) with its aligned extracted
    topic; the title carries the average KLD to two decimals."""
    truth = np.atleast_2d(np.asarray(truth_phi, dtype=np.float64))
    fit = np.atleast_2d(np.asarray(fit_phi, dtype=np.float64))
    if truth.shape[1] != fit.shape[1]:
        raise ParameterError("truth and fit must share the vocabulary axis")

    V = truth.shape[1]
    top = max(truth.max(), fit.max())
    lo, hi, to_y = _y_scale(0.0, float(top))
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    x_axis_y = HEIGHT - MARGIN_B

    def to_x(v: int) -> float:
        return MARGIN_L + plot_w * (v / max(V - 1, 1))

    svg = _Svg(WIDTH, HEIGHT)
    svg.line(MARGIN_L, MARGIN_T, MARGIN_L, x_axis_y)
    svg.line(MARGIN_L, x_axis_y, WIDTH - MARGIN_R, x_axis_y)
    for i in range(6):
        v = lo + (hi - lo) * i / 5
        svg.line(MARGIN_L - 4, to_y(v), MARGIN_L, to_y(v))
        svg.text(MARGIN_L - 8, to_y(v) + 4, f"{v:.3f}", size=10, anchor="end")
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        v = int(round(frac * (V - 1)))
        svg.line(to_x(v), x_axis_y, to_x(v), x_axis_y + 4)
        svg.text(to_x(v), x_axis_y + 18, str(v), size=10)
    svg.text((MARGIN_L + WIDTH - MARGIN_R) / 2, HEIGHT - 14, "vocabulary index", size=12)
    svg.text(WIDTH / 2, 22, f"KLD = {average_kld:.2f}", size=14)

    for t in range(truth.shape[0]):
        j = alignment.get(t)
        if j is not None:
            color = CURVE_COLORS[t % len(CURVE_COLORS)]
            svg.polyline(
                [(to_x(v), to_y(fit[j, v])) for v in range(V)], stroke=color, cls="fit"
            )
    for t in range(truth.shape[0]):
        svg.polyline(
            [(to_x(v), to_y(truth[t, v])) for v in range(V)],
            stroke=TRUTH_COLOR,
            width=1.0,
            cls="truth",
        )

    Path(path).write_text(svg.render(), encoding="utf-8")
