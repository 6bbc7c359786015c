"""Dependency-free SVG rendering of sweep datasets.

Output is a pure function of the input rows, so identical CSVs produce
byte-identical SVGs.
"""

import csv
import math
from xml.sax.saxutils import escape

import numpy as np

from .errors import ColumnError

__all__ = ["read_dataset", "emit_plot", "heatmap_svg", "line_svg", "marching_squares"]

WIDTH, HEIGHT = 640, 480
LEFT, RIGHT, TOP, BOTTOM = 70, 110, 30, 60
LINE_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

# viridis anchors, linearly interpolated
_VIRIDIS = np.array([
    (68, 1, 84), (72, 40, 120), (62, 74, 137), (49, 104, 142), (38, 130, 142),
    (31, 158, 137), (53, 183, 121), (109, 205, 89), (180, 222, 44), (253, 231, 37),
], dtype=float)


def _color(t):
    if not math.isfinite(t):
        return "#cccccc"
    t = min(max(t, 0.0), 1.0) * (len(_VIRIDIS) - 1)
    i = min(int(t), len(_VIRIDIS) - 2)
    r, g, b = _VIRIDIS[i] + (t - i) * (_VIRIDIS[i + 1] - _VIRIDIS[i])
    return f"#{round(r):02x}{round(g):02x}{round(b):02x}"


def _num(s):
    try:
        return float(s)
    except ValueError:
        return math.nan


def read_dataset(path):
    """Columns of a sweep CSV as ``{name: list of str}``; ``#`` lines skipped."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(line for line in fh if not line.startswith("#")))
    if not rows:
        raise ColumnError(f"{path}: empty dataset")
    header, body = rows[0], rows[1:]
    return {name: [r[i] if i < len(r) else "" for r in body] for i, name in enumerate(header)}


def _require(data, names):
    missing = [n for n in names if n not in data]
    if missing:
        raise ColumnError(f"missing column(s) {missing}; available: {sorted(data)}")


def _f(x):
    return f"{x:.2f}"


def _tick(v):
    return f"{v:.3g}"


def _frame(title, xlabel, ylabel):
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{(LEFT + WIDTH - RIGHT) / 2:.0f}" y="{HEIGHT - 15}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="18" y="{(TOP + HEIGHT - BOTTOM) / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {(TOP + HEIGHT - BOTTOM) / 2:.0f})">{escape(ylabel)}</text>',
    ]
    return parts


def _axis_ticks(lo, hi, log, n=5):
    if log:
        a, b = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
        return [10.0**k for k in range(a, b + 1) if lo * (1 - 1e-9) <= 10.0**k <= hi * (1 + 1e-9)]
    return list(np.linspace(lo, hi, n))


def marching_squares(xs, ys, z, level):
    """Contour segments of ``z[i, j]`` (x index ``i``) at ``level``.

    Returns a list of ``((x0, y0), (x1, y1))`` in data coordinates; saddle
    cells are resolved with the cell-centre average.
    """
    segs = []
    nx, ny = z.shape

    def interp(p, q, zp, zq):
        t = 0.5 if zq == zp else (level - zp) / (zq - zp)
        return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))

    for i in range(nx - 1):
        for j in range(ny - 1):
            corners = [(xs[i], ys[j]), (xs[i + 1], ys[j]), (xs[i + 1], ys[j + 1]), (xs[i], ys[j + 1])]
            vals = [z[i, j], z[i + 1, j], z[i + 1, j + 1], z[i, j + 1]]
            if not all(math.isfinite(v) for v in vals):
                continue
            above = [v >= level for v in vals]
            if all(above) or not any(above):
                continue
            pts = []
            for k in range(4):
                m = (k + 1) % 4
                if above[k] != above[m]:
                    pts.append(interp(corners[k], corners[m], vals[k], vals[m]))
            if len(pts) == 2:
                segs.append((pts[0], pts[1]))
            else:
                # saddle: pair edges according to the centre value
                centre_above = sum(vals) / 4 >= level
                if centre_above == above[0]:
                    segs += [(pts[0], pts[1]), (pts[2], pts[3])]
                else:
                    segs += [(pts[0], pts[3]), (pts[1], pts[2])]
    return segs


def heatmap_svg(xs, ys, z, xlabel, ylabel, zlabel, contour=None, logx=False, logy=False, title=""):
    """Cell-grid heatmap; ``z`` has shape ``(len(xs), len(ys))``."""
    xs, ys, z = np.asarray(xs, float), np.asarray(ys, float), np.asarray(z, float)
    tx = np.log10 if logx else (lambda v: v)
    ty = np.log10 if logy else (lambda v: v)
    ux, uy = tx(xs), ty(ys)

    def edges(u):
        if len(u) == 1:
            return np.array([u[0] - 0.5, u[0] + 0.5])
        mid = (u[1:] + u[:-1]) / 2
        return np.concatenate([[2 * u[0] - mid[0]], mid, [2 * u[-1] - mid[-1]]])

    ex, ey = edges(ux), edges(uy)
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(u):
        return LEFT + (u - ex[0]) / (ex[-1] - ex[0]) * pw

    def py(u):
        return TOP + ph - (u - ey[0]) / (ey[-1] - ey[0]) * ph

    finite = z[np.isfinite(z)]
    zlo, zhi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    span = zhi - zlo if zhi > zlo else 1.0
    out = _frame(title, xlabel, ylabel)
    out.append('<g class="cells" shape-rendering="crispEdges">')
    for i in range(len(xs)):
        for j in range(len(ys)):
            x0, x1 = px(ex[i]), px(ex[i + 1])
            y0, y1 = py(ey[j + 1]), py(ey[j])
            out.append(
                f'<rect class="cell" x="{_f(x0)}" y="{_f(y0)}" width="{_f(x1 - x0)}" '
                f'height="{_f(y1 - y0)}" fill="{_color((z[i, j] - zlo) / span)}"/>'
            )
    out.append("</g>")
    if contour is not None:
        segs = marching_squares(ux, uy, z, contour)
        d = " ".join(f"M{_f(px(a[0]))},{_f(py(a[1]))}L{_f(px(b[0]))},{_f(py(b[1]))}" for a, b in segs)
        out.append(f'<path class="contour" data-level="{contour!r}" d="{d}" fill="none" stroke="white" stroke-width="1.5"/>')
    out += _axes_svg(ex, ey, px, py, logx, logy)
    # colour bar
    bx, bw, nb = WIDTH - RIGHT + 20, 18, 50
    for k in range(nb):
        y0 = TOP + ph - (k + 1) * ph / nb
        out.append(f'<rect class="colorbar" x="{bx}" y="{_f(y0)}" width="{bw}" height="{_f(ph / nb + 0.5)}" '
                   f'fill="{_color((k + 0.5) / nb)}"/>')
    for v in np.linspace(zlo, zhi, 5):
        y = TOP + ph - (v - zlo) / span * ph
        out.append(f'<text x="{bx + bw + 4}" y="{_f(y + 4)}">{_tick(v)}</text>')
    out.append(f'<text x="{bx}" y="{TOP - 8}">{escape(zlabel)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _axes_svg(ex, ey, px, py, logx, logy):
    out = []
    x0, x1, y0, y1 = px(ex[0]), px(ex[-1]), py(ey[0]), py(ey[-1])
    out.append(f'<rect x="{_f(x0)}" y="{_f(y1)}" width="{_f(x1 - x0)}" height="{_f(y0 - y1)}" fill="none" stroke="black"/>')
    for v in _axis_ticks(*(10.0 ** ex[[0, -1]] if logx else ex[[0, -1]]), logx):
        x = px(math.log10(v) if logx else v)
        out.append(f'<line x1="{_f(x)}" y1="{_f(y0)}" x2="{_f(x)}" y2="{_f(y0 + 5)}" stroke="black"/>')
        out.append(f'<text x="{_f(x)}" y="{_f(y0 + 18)}" text-anchor="middle">{_tick(v)}</text>')
    for v in _axis_ticks(*(10.0 ** ey[[0, -1]] if logy else ey[[0, -1]]), logy):
        y = py(math.log10(v) if logy else v)
        out.append(f'<line x1="{_f(x0 - 5)}" y1="{_f(y)}" x2="{_f(x0)}" y2="{_f(y)}" stroke="black"/>')
        out.append(f'<text x="{_f(x0 - 8)}" y="{_f(y + 4)}" text-anchor="end">{_tick(v)}</text>')
    return out


def line_svg(x, series, xlabel, ylabel, logx=False, logy=False, title=""):
    """Line chart of ``series`` (``{name: y array}``) against ``x``."""
    x = np.asarray(x, float)
    order = np.argsort(x, kind="stable")
    x = x[order]
    series = {k: np.asarray(v, float)[order] for k, v in series.items()}
    tx = np.log10 if logx else (lambda v: v)
    ty = np.log10 if logy else (lambda v: v)
    ux = tx(x)
    ally = np.concatenate([ty(v) for v in series.values()])
    ally = ally[np.isfinite(ally)]
    ylo, yhi = (float(ally.min()), float(ally.max())) if ally.size else (0.0, 1.0)
    if yhi == ylo:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    pad = 0.05 * (yhi - ylo)
    ex = np.array([ux.min(), ux.max() if ux.max() > ux.min() else ux.min() + 1])
    ey = np.array([ylo - pad, yhi + pad]) if not logy else np.array([ylo, yhi])
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(u):
        return LEFT + (u - ex[0]) / (ex[-1] - ex[0]) * pw

    def py(u):
        return TOP + ph - (u - ey[0]) / (ey[-1] - ey[0]) * ph

    out = _frame(title, xlabel, ylabel)
    out += _axes_svg(ex, ey, px, py, logx, logy)
    for k, (name, y) in enumerate(series.items()):
        color = LINE_COLORS[k % len(LINE_COLORS)]
        uy = ty(y)
        # break the polyline at non-finite values
        pieces, cur = [], []
        for a, b in zip(ux, uy):
            if math.isfinite(b):
                cur.append(f"{_f(px(a))},{_f(py(b))}")
            elif cur:
                pieces.append(cur)
                cur = []
        if cur:
            pieces.append(cur)
        for pts in pieces:
            out.append(f'<polyline class="series" data-name="{escape(name)}" points="{" ".join(pts)}" '
                       f'fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = TOP + 15 + 16 * k
        out.append(f'<line x1="{WIDTH - RIGHT + 8}" y1="{ly}" x2="{WIDTH - RIGHT + 26}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{WIDTH - RIGHT + 30}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(dataset, kind, axes, out, contour=None, logx=False, logy=False, title="", where=None):
    """Render a sweep CSV to SVG.

    Parameters
    ----------
    dataset : path
        CSV written by one of the sweep runners.
    kind : {"heatmap", "line"}
    axes : sequence of str
        Heatmap: ``(x, y, z)``. Line: ``(x, y1, y2, ...)``.
    out : path
        Destination SVG file.
    contour : float, optional
        Heatmap level drawn as a marching-squares path.
    where : tuple (column, value), optional
        Keep only rows whose ``column`` equals ``value`` (e.g. one robustness scan).

    Raises
    ------
    ColumnError
        If a named column is absent.
    """
    data = read_dataset(dataset)
    axes = list(axes)
    if where is not None:
        _require(data, [where[0]])
        keep = [i for i, v in enumerate(data[where[0]]) if v == where[1]]
        data = {k: [v[i] for i in keep] for k, v in data.items()}
    _require(data, axes)
    if kind == "heatmap":
        if len(axes) != 3:
            raise ValueError("heatmap needs axes (x, y, z)")
        xc = np.array([_num(v) for v in data[axes[0]]])
        yc = np.array([_num(v) for v in data[axes[1]]])
        zc = np.array([_num(v) for v in data[axes[2]]])
        xs, ys = np.unique(xc), np.unique(yc)
        z = np.full((len(xs), len(ys)), np.nan)
        z[np.searchsorted(xs, xc), np.searchsorted(ys, yc)] = zc
        svg = heatmap_svg(xs, ys, z, axes[0], axes[1], axes[2], contour, logx, logy, title)
    elif kind == "line":
        if len(axes) < 2:
            raise ValueError("line plot needs axes (x, y1, ...)")
        x = [_num(v) for v in data[axes[0]]]
        series = {name: [_num(v) for v in data[name]] for name in axes[1:]}
        svg = line_svg(x, series, axes[0], ", ".join(axes[1:]), logx, logy, title)
    else:
        raise ValueError(f"kind must be 'heatmap' or 'line', got {kind!r}")
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg)
    return out
