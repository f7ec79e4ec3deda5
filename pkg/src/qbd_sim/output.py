"""CSV and SVG emission for the command-line front end.

All numbers are written with 17 significant digits ('.17g'), which
round-trips IEEE doubles exactly and is locale independent, so a fixed
configuration and seed produce byte-identical files on any platform.
The SVG output is a deliberately minimal set of unstyled polylines with
axes and labels; it is a convenience view, not a data format.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .master_equation import FieldStatistics, PhotonDistribution
from .physics import passage_weight_table
from .sweep import SweepRow
from .trajectory import (
    OUTCOME_CODE_E,
    OUTCOME_CODE_F,
    OUTCOME_CODE_G,
    TrajectoryRecord,
)

_OUTCOME_LETTER = {OUTCOME_CODE_F: "F", OUTCOME_CODE_G: "G", OUTCOME_CODE_E: "E"}


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def steady_csv(header: list[str], dist: PhotonDistribution,
               stats: FieldStatistics) -> str:
    lines = list(header)
    lines.append("n,p")
    for n, p in enumerate(dist.probs):
        lines.append(f"{n},{fmt(p)}")
    lines.append(f"# mean_n={fmt(stats.mean_n)}")
    lines.append(f"# fano={fmt(stats.fano) if stats.fano is not None else 'undefined'}")
    lines.append(f"# tail_mass={fmt(dist.tail_mass)}")
    return "\n".join(lines) + "\n"


def sweep_csv(header: list[str], rows: Sequence[SweepRow]) -> str:
    lines = list(header)
    lines.append("phi,mean_n,fano,fano_defined,tail_mass")
    for row in rows:
        defined = row.fano is not None
        fano_field = fmt(row.fano) if defined else ""
        lines.append(f"{fmt(row.phi)},{fmt(row.mean_n)},{fano_field},"
                     f"{'true' if defined else 'false'},{fmt(row.tail_mass)}")
    return "\n".join(lines) + "\n"


def trajectory_csv(header: list[str], record: TrajectoryRecord) -> str:
    lines = list(header)
    lines.append("time_s,true_n,filter_mean,filter_std,last_outcome")
    for t, n, mean, std, code in zip(record.sample_times, record.sample_true_n,
                                     record.sample_filter_mean,
                                     record.sample_filter_std,
                                     record.sample_outcomes):
        letter = _OUTCOME_LETTER.get(int(code), "-")
        lines.append(f"{fmt(t)},{int(n)},{fmt(mean)},{fmt(std)},{letter}")
    return "\n".join(lines) + "\n"


def passage_csv(header: list[str], n_max: int, phase: float) -> str:
    table = passage_weight_table(n_max, phase)
    lines = list(header)
    lines.append("n,w_f,w_g,w_e")
    for n, (w_f, w_g, w_e) in enumerate(table):
        lines.append(f"{n},{fmt(w_f)},{fmt(w_g)},{fmt(w_e)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Minimal SVG line plots.

_WIDTH = 800
_PANEL_HEIGHT = 220
_MARGIN_LEFT = 70
_MARGIN_RIGHT = 20
_MARGIN_TOP = 24
_MARGIN_BOTTOM = 44


def _coord(v: float) -> str:
    return format(v, ".2f")


def _finite_range(values: Iterable[float]) -> tuple[float, float]:
    finite = [v for v in values if math.isfinite(v)]
    if not finite:
        return 0.0, 1.0
    lo, hi = min(finite), max(finite)
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    return lo, hi


def svg_line_plot(panels: Sequence[tuple[str, Sequence[tuple[np.ndarray, np.ndarray]]]],
                  x_label: str, title: str = "") -> str:
    """Stacked panels of polylines sharing one x axis.

    ``panels`` is a sequence of (y_label, curves); each curve is a pair
    of equal-length x and y arrays.  Non-finite points are dropped.
    """
    height = _MARGIN_TOP + _PANEL_HEIGHT * len(panels) + _MARGIN_BOTTOM
    all_x = np.concatenate([np.asarray(xs, dtype=float)
                            for _, curves in panels for xs, _ in curves])
    x_lo, x_hi = _finite_range(all_x)
    plot_w = _WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT

    def x_px(x: float) -> float:
        return _MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
             f'height="{height}" font-family="sans-serif" font-size="12">']
    if title:
        parts.append(f'<text x="{_WIDTH // 2}" y="16" text-anchor="middle">{title}</text>')

    for index, (y_label, curves) in enumerate(panels):
        top = _MARGIN_TOP + index * _PANEL_HEIGHT
        bottom = top + _PANEL_HEIGHT - 28
        plot_h = bottom - top
        ys_all = np.concatenate([np.asarray(ys, dtype=float) for _, ys in curves])
        y_lo, y_hi = _finite_range(ys_all)

        def y_px(y: float) -> float:
            return bottom - (y - y_lo) / (y_hi - y_lo) * plot_h

        # axes
        parts.append(f'<polyline fill="none" stroke="black" points="'
                     f'{_coord(_MARGIN_LEFT)},{_coord(top)} '
                     f'{_coord(_MARGIN_LEFT)},{_coord(bottom)} '
                     f'{_coord(_WIDTH - _MARGIN_RIGHT)},{_coord(bottom)}"/>')
        parts.append(f'<text x="{_MARGIN_LEFT - 6}" y="{_coord(bottom)}" '
                     f'text-anchor="end">{fmt_tick(y_lo)}</text>')
        parts.append(f'<text x="{_MARGIN_LEFT - 6}" y="{_coord(top + 10)}" '
                     f'text-anchor="end">{fmt_tick(y_hi)}</text>')
        parts.append(f'<text x="14" y="{_coord((top + bottom) / 2)}" text-anchor="middle" '
                     f'transform="rotate(-90 14 {_coord((top + bottom) / 2)})">'
                     f'{y_label}</text>')

        strokes = ("black", "#888888", "#bbbbbb")
        for curve_idx, (xs, ys) in enumerate(curves):
            xs = np.asarray(xs, dtype=float)
            ys = np.asarray(ys, dtype=float)
            keep = np.isfinite(xs) & np.isfinite(ys)
            pts = " ".join(f"{_coord(x_px(x))},{_coord(y_px(y))}"
                           for x, y in zip(xs[keep], ys[keep]))
            stroke = strokes[min(curve_idx, len(strokes) - 1)]
            parts.append(f'<polyline fill="none" stroke="{stroke}" points="{pts}"/>')

    bottom_axis = _MARGIN_TOP + len(panels) * _PANEL_HEIGHT - 28
    parts.append(f'<text x="{_MARGIN_LEFT}" y="{bottom_axis + 18}">{fmt_tick(x_lo)}</text>')
    parts.append(f'<text x="{_WIDTH - _MARGIN_RIGHT}" y="{bottom_axis + 18}" '
                 f'text-anchor="end">{fmt_tick(x_hi)}</text>')
    parts.append(f'<text x="{_WIDTH // 2}" y="{height - 10}" '
                 f'text-anchor="middle">{x_label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def fmt_tick(x: float) -> str:
    return format(x, ".4g")
