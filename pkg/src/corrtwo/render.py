"""Deterministic SVG rendering of 2D correlation spectra.

Layout follows the split-screen convention of 2D correlation plots: a central
contour (or image) panel, the two marginal 1D spectra above and to the left,
tick-labelled axes on the bottom and right, and a color-bar legend in the
top-right corner; the remaining corner regions stay empty.

Level construction: the requested level count is forced odd, thresholds are
spaced evenly on the symmetric range [-max|zlim|, +max|zlim|] and colors are
anchored there (two-color cold gradient below zero, three-color warm gradient
above, transparent center), so equally negative and positive values get
comparable colors even when the data range is lopsided.  The scale is then
restricted to thresholds strictly inside zlim and re-spread over it; levels in
the cutout band are transparent as well.

Everything is a pure function of its inputs: contour geometry is emitted in
data coordinates under a fixed affine transform, all numbers are printed with
fixed precision, so identical inputs give byte-identical documents.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import CorrelationSpectra, format_number
from .errors import DataError

TRANSPARENT = "transparent"
COLD_ANCHORS = ("#00008b", "#00ffff")             # darkblue -> cyan
WARM_ANCHORS = ("#ffff00", "#ff0000", "#8b0000")  # yellow -> red -> darkred

# canvas layout (pixels)
CANVAS = 900.0
MAIN = (150.0, 150.0, 560.0, 560.0)      # x, y, width, height
TOP_STRIP = (150.0, 40.0, 560.0, 100.0)
LEFT_STRIP = (40.0, 150.0, 100.0, 560.0)
LEGEND_BOX = (730.0, 40.0, 130.0, 100.0)


@dataclass(eq=False)
class PlotSpec:
    """What to draw and how."""

    which: str = "sync"
    mode: str = "contour"
    level_count: int = 16
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None
    zlim: tuple[float, float] | None = None
    cutout: tuple[float, float] | None = None
    legend: bool = True
    marginal_x: np.ndarray | None = None
    marginal_y: np.ndarray | None = None
    diagonal: bool | None = None

    def __post_init__(self):
        if self.which not in ("sync", "async"):
            raise DataError(f"which must be 'sync' or 'async', got {self.which!r}")
        if self.mode not in ("contour", "image"):
            raise DataError(f"mode must be 'contour' or 'image', got {self.mode!r}")
        if self.level_count < 2:
            raise DataError(f"level_count must be >= 2, got {self.level_count}")
        for name in ("xlim", "ylim"):
            window = getattr(self, name)
            if window is not None and not window[0] < window[1]:
                raise DataError(f"{name} must be an ordered pair, got {window}")
        if self.zlim is not None and not self.zlim[0] < self.zlim[1]:
            raise DataError(f"zlim must be an ordered pair, got {self.zlim}")
        if self.cutout is not None and not self.cutout[0] <= 0.0 <= self.cutout[1]:
            raise DataError(f"cutout must straddle 0, got {self.cutout}")


@dataclass(eq=False)
class LevelScale:
    """Symmetric anchored scale plus the zlim-restricted thresholds actually drawn."""

    levels: np.ndarray          # odd length, symmetric about 0, center transparent
    colors: list[str]
    drawn_levels: np.ndarray
    drawn_colors: list[str]


def _hex_to_rgb(color: str) -> tuple[int, int, int]:
    return tuple(int(color[i:i + 2], 16) for i in (1, 3, 5))


def _gradient(anchors: tuple[str, ...], count: int) -> list[str]:
    """`count` colors linearly interpolated (RGB) through equally spaced anchors."""
    if count <= 0:
        return []
    if count == 1:
        return [anchors[0]]
    stops = np.linspace(0.0, 1.0, len(anchors))
    rgb = np.array([_hex_to_rgb(a) for a in anchors], dtype=float)
    t = np.linspace(0.0, 1.0, count)
    channels = [np.interp(t, stops, rgb[:, c]) for c in range(3)]
    return [
        "#%02x%02x%02x" % tuple(int(round(v)) for v in point)
        for point in zip(*channels)
    ]


def compute_levels(
    zvalues: np.ndarray,
    zlim: tuple[float, float] | None,
    level_count: int,
    cutout: tuple[float, float] | None = None,
) -> LevelScale:
    """Build the level/color scale for a matrix window (see module docstring)."""
    if level_count < 2:
        raise DataError(f"level_count must be >= 2, got {level_count}")
    zvalues = np.asarray(zvalues, dtype=float)
    if zlim is None:
        lo, hi = float(zvalues.min()), float(zvalues.max())
    else:
        lo, hi = float(zlim[0]), float(zlim[1])
        if lo >= hi:
            raise DataError(f"degenerate zlim ({lo}, {hi})")
    if cutout is not None and not cutout[0] <= 0.0 <= cutout[1]:
        raise DataError(f"cutout must straddle 0, got {cutout}")

    n = level_count + 1 if level_count % 2 == 0 else level_count
    extreme = max(abs(lo), abs(hi))
    levels = np.linspace(-extreme, extreme, n)
    colors = [TRANSPARENT] * n
    if cutout is None:
        negative = levels < 0
        positive = levels > 0
    else:
        negative = levels <= cutout[0]
        positive = levels >= cutout[1]
    for idx, color in zip(np.nonzero(negative)[0], _gradient(COLD_ANCHORS, int(negative.sum()))):
        colors[idx] = color
    for idx, color in zip(np.nonzero(positive)[0], _gradient(WARM_ANCHORS, int(positive.sum()))):
        colors[idx] = color
    colors[(n - 1) // 2] = TRANSPARENT

    keep = (lo < levels) & (levels < hi)
    drawn_colors = [c for c, k in zip(colors, keep) if k]
    drawn_levels = np.linspace(lo, hi, len(drawn_colors)) if drawn_colors else np.empty(0)
    return LevelScale(levels, colors, drawn_levels, drawn_colors)


def window_axes(
    corr: CorrelationSpectra,
    xlim: tuple[float, float] | None = None,
    ylim: tuple[float, float] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Indices of axis points strictly inside the windows (endpoints excluded)."""

    def select(axis, window, name):
        if window is None:
            return np.arange(axis.size)
        if not window[0] < window[1]:
            raise DataError(f"{name} must be an ordered pair, got {window}")
        idx = np.nonzero((window[0] < axis) & (axis < window[1]))[0]
        if idx.size == 0:
            raise DataError(f"{name} {window} selects no axis points")
        return idx

    return select(corr.axis1, xlim, "xlim"), select(corr.axis2, ylim, "ylim")


# ---------------------------------------------------------------------------
# marching squares
# ---------------------------------------------------------------------------

# case -> list of (edge, edge) pairs; edges: 0 bottom, 1 right, 2 top, 3 left.
# Corners bits: 1 = (i, j), 2 = (i+1, j), 4 = (i+1, j+1), 8 = (i, j+1).
_CASE_SEGMENTS = {
    1: [(0, 3)], 2: [(0, 1)], 3: [(3, 1)], 4: [(2, 1)],
    6: [(0, 2)], 7: [(2, 3)], 8: [(2, 3)], 9: [(0, 2)],
    11: [(2, 1)], 12: [(3, 1)], 13: [(0, 1)], 14: [(0, 3)],
}


def contour_segments(x: np.ndarray, y: np.ndarray, z: np.ndarray, level: float):
    """Line segments of the iso-line z = level, in data coordinates.

    Classification is strict (corner above iff value > level); saddle cells are
    resolved by the sign of the cell-center average.  Zero-length segments are
    dropped.  The construction commutes exactly with transposition and with
    simultaneous negation of z and level.
    """
    above = z > level
    a00 = above[:-1, :-1]
    a10 = above[1:, :-1]
    a11 = above[1:, 1:]
    a01 = above[:-1, 1:]
    case = (
        a00.astype(np.int8) + 2 * a10.astype(np.int8)
        + 4 * a11.astype(np.int8) + 8 * a01.astype(np.int8)
    )
    segments = []
    for i, j in np.argwhere((case > 0) & (case < 15)):
        v00, v10 = z[i, j], z[i + 1, j]
        v01, v11 = z[i, j + 1], z[i + 1, j + 1]
        x0, x1 = x[i], x[i + 1]
        y0, y1 = y[j], y[j + 1]

        def crossing(edge):
            if edge == 0:    # bottom: (x0,y0)-(x1,y0)
                t = (level - v00) / (v10 - v00)
                return (x0 + t * (x1 - x0), y0)
            if edge == 1:    # right: (x1,y0)-(x1,y1)
                t = (level - v10) / (v11 - v10)
                return (x1, y0 + t * (y1 - y0))
            if edge == 2:    # top: (x0,y1)-(x1,y1)
                t = (level - v01) / (v11 - v01)
                return (x0 + t * (x1 - x0), y1)
            t = (level - v00) / (v01 - v00)   # left: (x0,y0)-(x0,y1)
            return (x0, y0 + t * (y1 - y0))

        c = case[i, j]
        if c in (5, 10):
            center_above = (v00 + v10 + v01 + v11) / 4.0 > level
            if c == 5:
                pairs = [(0, 1), (2, 3)] if center_above else [(0, 3), (2, 1)]
            else:
                pairs = [(0, 3), (2, 1)] if center_above else [(0, 1), (2, 3)]
        else:
            pairs = _CASE_SEGMENTS[c]
        for e1, e2 in pairs:
            p1, p2 = crossing(e1), crossing(e2)
            if p1 != p2:
                segments.append((p1, p2))
    return segments


# ---------------------------------------------------------------------------
# SVG assembly
# ---------------------------------------------------------------------------

def _fmt(v: float) -> str:
    return f"{v:.6f}"


def _nice_ticks(lo: float, hi: float, target: int = 5) -> np.ndarray:
    raw = (hi - lo) / target
    magnitude = 10.0 ** np.floor(np.log10(raw))
    step = 10.0 * magnitude
    for mult in (1.0, 2.0, 2.5, 5.0):
        if raw <= mult * magnitude:
            step = mult * magnitude
            break
    first = np.ceil(lo / step) * step
    ticks = np.arange(first, hi + step * 1e-9, step)
    return ticks[(ticks >= lo) & (ticks <= hi)]


def _marginal_values(provided, reference, idx, axis_len, name):
    values = reference if provided is None else np.asarray(provided, dtype=float)
    if values.shape != (axis_len,):
        raise DataError(
            f"marginal length mismatch: {name} has {values.size} values, "
            f"axis has {axis_len}"
        )
    return values[idx]


def render_plot(corr: CorrelationSpectra, spec: PlotSpec | None = None) -> bytes:
    """Render one correlation matrix to an SVG document (bytes)."""
    spec = spec or PlotSpec()
    matrix = corr.sync if spec.which == "sync" else corr.asyn
    idx1, idx2 = window_axes(corr, spec.xlim, spec.ylim)
    if idx1.size < 2 or idx2.size < 2:
        raise DataError("window selects fewer than 2 axis points")
    x = corr.axis1[idx1]
    y = corr.axis2[idx2]
    sub = matrix[np.ix_(idx1, idx2)]
    spec_x = _marginal_values(spec.marginal_x, corr.ref1, idx1, corr.n1, "marginal_x")
    spec_y = _marginal_values(spec.marginal_y, corr.ref2, idx2, corr.n2, "marginal_y")
    scale = compute_levels(sub, spec.zlim, spec.level_count, spec.cutout)
    draw_diagonal = corr.is_homo if spec.diagonal is None else spec.diagonal

    mx, my, mw, mh = MAIN
    x_lo, x_hi = float(x.min()), float(x.max())
    y_lo, y_hi = float(y.min()), float(y.max())
    sx = mw / (x_hi - x_lo)
    sy = mh / (y_hi - y_lo)
    to_px = lambda v: mx + (v - x_lo) * sx
    to_py = lambda v: my + mh - (v - y_lo) * sy
    transform = (
        f"matrix({sx:.8f} 0 0 {-sy:.8f} "
        f"{mx - x_lo * sx:.8f} {my + mh + y_lo * sy:.8f})"
    )

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS:g}" '
        f'height="{CANVAS:g}" viewBox="0 0 {CANVAS:g} {CANVAS:g}">',
        f'<rect x="0" y="0" width="{CANVAS:g}" height="{CANVAS:g}" fill="white"/>',
        '<g id="panel-corner-tl"/>',
        '<g id="panel-corner-bl"/>',
        '<g id="panel-corner-br"/>',
    ]

    # main panel in data coordinates
    out.append(f'<g id="main" transform="{transform}">')
    if spec.mode == "contour":
        for level, color in zip(scale.drawn_levels, scale.drawn_colors):
            if color == TRANSPARENT:
                continue
            segments = contour_segments(x, y, sub, float(level))
            if not segments:
                continue
            d = " ".join(
                f"M {_fmt(p1[0])} {_fmt(p1[1])} L {_fmt(p2[0])} {_fmt(p2[1])}"
                for p1, p2 in segments
            )
            out.append(
                f'<path d="{d}" fill="none" stroke="{color}" stroke-width="1.2" '
                f'vector-effect="non-scaling-stroke" '
                f'data-level="{format_number(level)}"/>'
            )
    else:
        k = len(scale.drawn_colors)
        if k > 0:
            lo = scale.drawn_levels[0] if k > 1 else float(sub.min())
            hi = scale.drawn_levels[-1] if k > 1 else float(sub.max())
            span = hi - lo if hi > lo else 1.0
            ex = _cell_edges(x)
            ey = _cell_edges(y)
            bins = np.clip(((sub - lo) / span * k).astype(int), 0, k - 1)
            for i in range(x.size):
                for j in range(y.size):
                    if not lo <= sub[i, j] <= hi:
                        continue
                    color = scale.drawn_colors[bins[i, j]]
                    if color == TRANSPARENT:
                        continue
                    rx, rw = sorted((ex[i], ex[i + 1]))[0], abs(ex[i + 1] - ex[i])
                    ry, rh = sorted((ey[j], ey[j + 1]))[0], abs(ey[j + 1] - ey[j])
                    out.append(
                        f'<rect x="{_fmt(rx)}" y="{_fmt(ry)}" width="{_fmt(rw)}" '
                        f'height="{_fmt(rh)}" fill="{color}"/>'
                    )
    if draw_diagonal:
        d0 = max(x_lo, y_lo)
        d1 = min(x_hi, y_hi)
        if d0 < d1:
            out.append(
                f'<line x1="{_fmt(d0)}" y1="{_fmt(d0)}" x2="{_fmt(d1)}" '
                f'y2="{_fmt(d1)}" stroke="white" stroke-opacity="0.5" '
                f'stroke-width="1.5" vector-effect="non-scaling-stroke"/>'
            )
    out.append("</g>")
    out.append(
        f'<rect x="{_fmt(mx)}" y="{_fmt(my)}" width="{_fmt(mw)}" '
        f'height="{_fmt(mh)}" fill="none" stroke="black" stroke-width="1"/>'
    )

    out.append(_marginal_top(x, spec_x, to_px))
    out.append(_marginal_left(y, spec_y, to_py))
    out.append(_axes_svg(x_lo, x_hi, y_lo, y_hi, to_px, to_py))
    if spec.legend:
        out.append(_legend_svg(scale))
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


def _cell_edges(axis: np.ndarray) -> np.ndarray:
    mids = (axis[:-1] + axis[1:]) / 2.0
    first = axis[0] - (mids[0] - axis[0])
    last = axis[-1] + (axis[-1] - mids[-1])
    return np.concatenate([[first], mids, [last]])


def _polyline(points: list[tuple[float, float]], gid: str) -> str:
    joined = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in points)
    return (
        f'<g id="{gid}"><polyline points="{joined}" fill="none" '
        f'stroke="black" stroke-width="1.5"/></g>'
    )


def _marginal_top(x, values, to_px) -> str:
    tx, ty, tw, th = TOP_STRIP
    vmin, vmax = float(values.min()), float(values.max())
    span = vmax - vmin
    pad = 4.0
    height = th - 2 * pad
    points = []
    for xi, vi in zip(x, values):
        norm = 0.5 if span == 0 else (vi - vmin) / span
        points.append((to_px(xi), ty + th - pad - norm * height))
    return _polyline(points, "marginal-x")


def _marginal_left(y, values, to_py) -> str:
    lx, ly, lw, lh = LEFT_STRIP
    vmin, vmax = float(values.min()), float(values.max())
    span = vmax - vmin
    pad = 4.0
    width = lw - 2 * pad
    points = []
    # peak points toward the left edge, mirroring the rotated 1D spectrum
    for yi, vi in zip(y, values):
        norm = 0.5 if span == 0 else (vmax - vi) / span
        points.append((lx + pad + norm * width, to_py(yi)))
    return _polyline(points, "marginal-y")


def _axes_svg(x_lo, x_hi, y_lo, y_hi, to_px, to_py) -> str:
    mx, my, mw, mh = MAIN
    parts = ['<g id="axes" font-family="monospace" font-size="14">']
    for value in _nice_ticks(x_lo, x_hi):
        px = to_px(value)
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{_fmt(my + mh)}" x2="{_fmt(px)}" '
            f'y2="{_fmt(my + mh + 6)}" stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(px)}" y="{_fmt(my + mh + 22)}" '
            f'text-anchor="middle">{value:g}</text>'
        )
    for value in _nice_ticks(y_lo, y_hi):
        py = to_py(value)
        parts.append(
            f'<line x1="{_fmt(mx + mw)}" y1="{_fmt(py)}" x2="{_fmt(mx + mw + 6)}" '
            f'y2="{_fmt(py)}" stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(mx + mw + 10)}" y="{_fmt(py + 5)}" '
            f'text-anchor="start">{value:g}</text>'
        )
    parts.append("</g>")
    return "\n".join(parts)


def _legend_svg(scale: LevelScale) -> str:
    gx, gy, gw, gh = LEGEND_BOX
    bar_x, bar_w = gx + 15.0, 20.0
    bar_y, bar_h = gy + 10.0, gh - 20.0
    parts = ['<g id="legend" font-family="monospace" font-size="12">']
    k = len(scale.drawn_colors)
    if k > 0:
        cell = bar_h / k
        for i, color in enumerate(scale.drawn_colors):
            if color == TRANSPARENT:
                continue
            # bottom of the bar is the lowest level
            cy = bar_y + bar_h - (i + 1) * cell
            parts.append(
                f'<rect x="{_fmt(bar_x)}" y="{_fmt(cy)}" width="{_fmt(bar_w)}" '
                f'height="{_fmt(cell)}" fill="{color}"/>'
            )
        lv0 = float(scale.drawn_levels[0])
        lv1 = float(scale.drawn_levels[-1])
        span = lv1 - lv0 if lv1 > lv0 else 1.0
        for q in np.quantile(scale.drawn_levels, [0.1, 0.9]):
            py = bar_y + bar_h - (float(q) - lv0) / span * bar_h
            parts.append(
                f'<line x1="{_fmt(bar_x + bar_w)}" y1="{_fmt(py)}" '
                f'x2="{_fmt(bar_x + bar_w + 4)}" y2="{_fmt(py)}" '
                f'stroke="black" stroke-width="1"/>'
            )
            parts.append(
                f'<text x="{_fmt(bar_x + bar_w + 7)}" y="{_fmt(py + 4)}" '
                f'text-anchor="start" class="legend-quantile">{q:.1e}</text>'
            )
    parts.append(
        f'<rect x="{_fmt(bar_x)}" y="{_fmt(bar_y)}" width="{_fmt(bar_w)}" '
        f'height="{_fmt(bar_h)}" fill="none" stroke="black" stroke-width="1"/>'
    )
    parts.append("</g>")
    return "\n".join(parts)
