"""CSV and SVG emission.

Both formats are bit-deterministic for identical input: floats are written
with 17 significant digits (lossless for binary64), lines end with LF, and
the SVG contains no timestamps or random ids.
"""

from __future__ import annotations

import math
from typing import List, Sequence, Tuple

import numpy as np

from .errors import InputError
from .simplex import Trajectory

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#17becf", "#7f7f7f")


def _fmt(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def emit_csv(traj: Trajectory, path: str) -> None:
    """Write `t,phase,x1_1..x1_m,x2_1..x2_n,kl_to_ref,min_component`."""
    m = traj.log_probs1.shape[1]
    n = traj.log_probs2.shape[1]
    header = (["t", "phase"]
              + [f"x1_{i + 1}" for i in range(m)]
              + [f"x2_{j + 1}" for j in range(n)]
              + ["kl_to_ref", "min_component"])
    p1, p2 = traj.probabilities1, traj.probabilities2
    phases = traj.phases
    lines = [",".join(header)]
    for r in range(traj.n_records):
        row = [str(int(traj.times[r])), str(int(phases[r]))]
        row += [_fmt(v) for v in p1[r]]
        row += [_fmt(v) for v in p2[r]]
        row.append(_fmt(float(traj.kl_to_ref[r])))
        row.append(_fmt(float(traj.min_component[r])))
        lines.append(",".join(row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path: str) -> dict:
    """Parse a trajectory CSV back into arrays (exact float round-trip)."""
    with open(path, encoding="utf-8") as fh:
        rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
    if len(rows) < 2:
        raise InputError(f"{path} holds no data rows")
    header = rows[0]
    cols = {name: idx for idx, name in enumerate(header)}
    x1_cols = [c for c in header if c.startswith("x1_")]
    x2_cols = [c for c in header if c.startswith("x2_")]
    data = rows[1:]

    def column(name, dtype=float):
        return np.array([dtype(r[cols[name]]) for r in data])

    return {
        "t": column("t", int),
        "phase": column("phase", int),
        "x1": np.column_stack([column(c) for c in x1_cols]),
        "x2": np.column_stack([column(c) for c in x2_cols]),
        "kl_to_ref": column("kl_to_ref"),
        "min_component": column("min_component"),
    }


Series = Sequence[Tuple[str, Sequence[Tuple[float, float]]]]

_WIDTH, _HEIGHT = 800, 600
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 72, 16, 16, 48


def emit_svg_plot(series: Series, path: str, log_y: bool = False) -> None:
    """Standalone SVG 1.1 line chart: one polyline per series, linear or
    log10 y-axis, min/max tick labels, and a legend.  Non-finite values
    (and nonpositive ones under log_y) are dropped; the dropped count is
    noted in an SVG comment."""
    if not series:
        raise InputError("no series to plot")
    cleaned = []
    dropped = 0
    for label, points in series:
        keep = []
        for t, v in points:
            ok = math.isfinite(t) and math.isfinite(v) and (not log_y or v > 0)
            if ok:
                keep.append((float(t), float(v)))
            else:
                dropped += 1
        cleaned.append((str(label), keep))
    if all(not pts for _, pts in cleaned):
        raise InputError("every data point was dropped; nothing to plot")

    xs = [t for _, pts in cleaned for t, _ in pts]
    ys = [math.log10(v) if log_y else v for _, pts in cleaned for _, v in pts]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5

    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def sx(t):
        return _MARGIN_L + (t - x_lo) / (x_hi - x_lo) * plot_w

    def sy(v):
        vv = math.log10(v) if log_y else v
        return _MARGIN_T + (y_hi - vv) / (y_hi - y_lo) * plot_h

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f"<!-- dropped {dropped} non-finite points -->",
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#444444" stroke-width="1"/>',
    ]
    axis_font = 'font-family="monospace" font-size="13"'
    y_lo_label = f"1e{y_lo:.4g}" if log_y else f"{y_lo:.6g}"
    y_hi_label = f"1e{y_hi:.4g}" if log_y else f"{y_hi:.6g}"
    out += [
        f'<text x="{_MARGIN_L}" y="{_HEIGHT - _MARGIN_B + 20}" {axis_font}>{x_lo:.6g}</text>',
        f'<text x="{_WIDTH - _MARGIN_R}" y="{_HEIGHT - _MARGIN_B + 20}" {axis_font} '
        f'text-anchor="end">{x_hi:.6g}</text>',
        f'<text x="{_MARGIN_L - 6}" y="{_HEIGHT - _MARGIN_B}" {axis_font} '
        f'text-anchor="end">{y_lo_label}</text>',
        f'<text x="{_MARGIN_L - 6}" y="{_MARGIN_T + 12}" {axis_font} '
        f'text-anchor="end">{y_hi_label}</text>',
    ]
    for idx, (label, pts) in enumerate(cleaned):
        if not pts:
            continue
        color = _PALETTE[idx % len(_PALETTE)]
        coords = " ".join(f"{sx(t):.3f},{sy(v):.3f}" for t, v in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                   f'points="{coords}"/>')
    legend_y = _MARGIN_T + 18
    for idx, (label, _) in enumerate(cleaned):
        color = _PALETTE[idx % len(_PALETTE)]
        y = legend_y + idx * 18
        out.append(f'<line x1="{_WIDTH - 170}" y1="{y - 4}" x2="{_WIDTH - 140}" '
                   f'y2="{y - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{_WIDTH - 132}" y="{y}" {axis_font}>{_escape(label)}</text>')
    out.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;"))
