"""Deterministic CSV and SVG writers.

Floats are written with 17 significant digits so every double round-trips.
SVG paths are written in data coordinates under a single affine transform,
so the numbers in a path are exactly the numbers in the matching CSV column.
"""
from __future__ import annotations

import csv
import math
import re
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 800, 600
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 90, 30, 50, 70
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def fmt(x) -> str:
    return format(float(x), ".17g")


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])


def read_csv(path):
    """Header and float columns of a file written by ``write_csv``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [row for row in reader]
    cols = {}
    for j, name in enumerate(header):
        vals = []
        for row in rows:
            try:
                vals.append(float(row[j]))
            except ValueError:
                vals.append(row[j])
        cols[name] = np.array(vals, dtype=object if any(isinstance(v, str) for v in vals) else float)
    return header, cols


def trajectory_header(n):
    from .diagnostics import CSV_FIELDS

    return (["t"] + [f"a_{i}" for i in range(1, n + 1)] + [f"b_{i}" for i in range(1, n + 1)]
            + list(CSV_FIELDS) + ["relative_energy_residual", "gradient_norm"])


def trajectory_rows(traj):
    from .diagnostics import CSV_FIELDS

    for s in traj.samples:
        d = s.diagnostics
        yield ([s.t] + list(s.a) + list(s.b) + [getattr(d, f) for f in CSV_FIELDS]
               + [d.relative_residual, d.gradient_norm])


def write_trajectory_csv(path, traj, n):
    write_csv(path, trajectory_header(n), trajectory_rows(traj))


# --- SVG ------------------------------------------------------------------------

def nice_ticks(lo, hi, target=6):
    """Tick positions on a 1-2-5 ladder covering [lo, hi]."""
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return [0.0]
    if hi <= lo:
        pad = abs(lo) * 0.1 or 1.0
        lo, hi = lo - pad, hi + pad
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for m in (1, 2, 5, 10):
        step = m * mag
        if step >= raw:
            break
    first = math.ceil(lo / step - 1e-9)
    last = math.floor(hi / step + 1e-9)
    return [k * step for k in range(first, last + 1)]


def _range(values):
    finite = [v for arr in values for v in np.asarray(arr, dtype=float) if math.isfinite(v)]
    if not finite:
        return 0.0, 1.0
    lo, hi = min(finite), max(finite)
    if hi == lo:
        pad = abs(lo) * 0.1 or 1.0
        lo, hi = lo - pad, hi + pad
    return lo, hi


def _path_data(x, y):
    parts = []
    pen_down = False
    for xi, yi in zip(np.asarray(x, dtype=float), np.asarray(y, dtype=float)):
        if not (math.isfinite(xi) and math.isfinite(yi)):
            pen_down = False
            continue
        parts.append(("L" if pen_down else "M") + f"{fmt(xi)} {fmt(yi)}")
        pen_down = True
    return " ".join(parts)


def line_plot(series, title="", xlabel="", ylabel="") -> str:
    """SVG text for line series given as (label, x, y) triples."""
    xlo, xhi = _range([s[1] for s in series])
    ylo, yhi = _range([s[2] for s in series])
    xt = nice_ticks(xlo, xhi)
    yt = nice_ticks(ylo, yhi)
    xlo, xhi = min(xlo, xt[0]), max(xhi, xt[-1])
    ylo, yhi = min(ylo, yt[0]), max(yhi, yt[-1])
    pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    sx = pw / (xhi - xlo)
    sy = ph / (yhi - ylo)

    def px(x):
        return MARGIN_LEFT + (x - xlo) * sx

    def py(y):
        return MARGIN_TOP + ph - (y - ylo) * sy

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="14">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.2f}" y="28" text-anchor="middle" font-size="18">{escape(title)}</text>',
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in xt:
        X = px(t)
        out.append(f'<line x1="{X:.3f}" y1="{MARGIN_TOP + ph}" x2="{X:.3f}" y2="{MARGIN_TOP + ph + 6}" stroke="black"/>')
        out.append(f'<text x="{X:.3f}" y="{MARGIN_TOP + ph + 22}" text-anchor="middle">{t:.6g}</text>')
    for t in yt:
        Y = py(t)
        out.append(f'<line x1="{MARGIN_LEFT - 6}" y1="{Y:.3f}" x2="{MARGIN_LEFT}" y2="{Y:.3f}" stroke="black"/>')
        out.append(f'<text x="{MARGIN_LEFT - 10}" y="{Y + 5:.3f}" text-anchor="end">{t:.6g}</text>')
    out.append(f'<text x="{MARGIN_LEFT + pw / 2:.2f}" y="{HEIGHT - 20}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="22" y="{MARGIN_TOP + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 22 {MARGIN_TOP + ph / 2:.2f})">{escape(ylabel)}</text>')
    out.append(f'<clipPath id="plot-area"><rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}"/></clipPath>')
    out.append('<g clip-path="url(#plot-area)">')
    # data -> pixel: X = sx x + (MARGIN_LEFT - sx xlo), Y = -sy y + (MARGIN_TOP + ph + sy ylo)
    matrix = f"matrix({fmt(sx)} 0 0 {fmt(-sy)} {fmt(MARGIN_LEFT - sx * xlo)} {fmt(MARGIN_TOP + ph + sy * ylo)})"
    for i, (label, x, y) in enumerate(series):
        color = COLORS[i % len(COLORS)]
        out.append(f'<path data-label="{escape(label)}" transform="{matrix}" d="{_path_data(x, y)}" '
                   f'fill="none" stroke="{color}" stroke-width="2" vector-effect="non-scaling-stroke"/>')
    out.append("</g>")
    for i, (label, _, _) in enumerate(series):
        color = COLORS[i % len(COLORS)]
        ly = MARGIN_TOP + 20 + 20 * i
        out.append(f'<line x1="{MARGIN_LEFT + 12}" y1="{ly}" x2="{MARGIN_LEFT + 40}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{MARGIN_LEFT + 46}" y="{ly + 5}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


_PATH = re.compile(r'<path data-label="([^"]*)" transform="[^"]*" d="([^"]*)"')
_POINT = re.compile(r"[ML]([^ ]+) ([^ ]+)")


def read_svg_series(svg_text):
    """Recover {label: (x, y)} from the data paths of an SVG written by ``line_plot``."""
    out = {}
    for label, d in _PATH.findall(svg_text):
        pts = _POINT.findall(d)
        out[label] = (np.array([float(a) for a, _ in pts]), np.array([float(b) for _, b in pts]))
    return out


def write_text(path, text):
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
