"""Dependency-free SVG emission with byte-deterministic output.

Matplotlib embeds ids and version strings that change across runs, so plots
that must be reproducible are written by hand: a grayscale heatmap (dark
cells mean values near 1) with optional overlay polylines.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError

_MARGIN_LEFT = 60.0
_MARGIN_RIGHT = 16.0
_MARGIN_TOP = 34.0
_MARGIN_BOTTOM = 46.0
_CELL = 9.0


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def render_heatmap(values: np.ndarray, x_ticks, y_ticks, overlays=(),
                   title: str = "", x_label: str = "", y_label: str = "") -> str:
    """Grayscale heatmap SVG; values in [0, 1], 1.0 rendered black.

    `values[i, j]` colors the cell at row y_ticks[i], column x_ticks[j].
    Each overlay is a dict with keys ``x`` (data coordinates along the
    column axis), ``y`` (along the row axis), ``color`` and ``label``;
    overlay coordinates are interpolated onto tick positions so theory
    curves can land between cells.
    """
    grid = np.atleast_2d(np.asarray(values, dtype=np.float64))
    if np.any(grid < -1e-12) or np.any(grid > 1 + 1e-12):
        raise InputError("heatmap values must lie in [0, 1]")
    rows, cols = grid.shape
    x_ticks = list(x_ticks)
    y_ticks = list(y_ticks)
    if len(x_ticks) != cols or len(y_ticks) != rows:
        raise InputError("tick counts must match the grid shape")

    width = _MARGIN_LEFT + cols * _CELL + _MARGIN_RIGHT
    height = _MARGIN_TOP + rows * _CELL + _MARGIN_BOTTOM

    def cx(j: float) -> float:
        return _MARGIN_LEFT + (j + 0.5) * _CELL

    def cy(i: float) -> float:
        return _MARGIN_TOP + (i + 0.5) * _CELL

    def data_to_col(x: float) -> float:
        return float(np.interp(x, x_ticks, np.arange(cols), left=-0.5, right=cols - 0.5))

    def data_to_row(y: float) -> float:
        return float(np.interp(y, y_ticks, np.arange(rows), left=-0.5, right=rows - 0.5))

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        f'<rect width="{_fmt(width)}" height="{_fmt(height)}" fill="#ffffff"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_fmt(width / 2)}" y="20" text-anchor="middle" '
            f'font-family="monospace" font-size="13">{title}</text>'
        )
    for i in range(rows):
        for j in range(cols):
            level = int(round(255 * (1.0 - min(max(grid[i, j], 0.0), 1.0))))
            color = f"#{level:02x}{level:02x}{level:02x}"
            parts.append(
                f'<rect x="{_fmt(_MARGIN_LEFT + j * _CELL)}" '
                f'y="{_fmt(_MARGIN_TOP + i * _CELL)}" '
                f'width="{_fmt(_CELL)}" height="{_fmt(_CELL)}" fill="{color}"/>'
            )
    for overlay in overlays:
        xs = overlay["x"]
        ys = overlay["y"]
        color = overlay.get("color", "#cc0000")
        pts = " ".join(
            f"{_fmt(cx(data_to_col(x)))},{_fmt(cy(data_to_row(y)))}"
            for x, y in zip(xs, ys)
        )
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        label = overlay.get("label")
        if label:
            last_x = cx(data_to_col(xs[-1]))
            last_y = cy(data_to_row(ys[-1]))
            parts.append(
                f'<text x="{_fmt(last_x + 4)}" y="{_fmt(last_y)}" '
                f'font-family="monospace" font-size="10" fill="{color}">{label}</text>'
            )
    # sparse axis labels
    x_step = max(1, cols // 8)
    for j in range(0, cols, x_step):
        parts.append(
            f'<text x="{_fmt(cx(j))}" y="{_fmt(height - _MARGIN_BOTTOM + 16)}" '
            f'text-anchor="middle" font-family="monospace" font-size="10">{x_ticks[j]}</text>'
        )
    for i in range(rows):
        parts.append(
            f'<text x="{_fmt(_MARGIN_LEFT - 8)}" y="{_fmt(cy(i) + 3)}" '
            f'text-anchor="end" font-family="monospace" font-size="10">{y_ticks[i]}</text>'
        )
    if x_label:
        parts.append(
            f'<text x="{_fmt(_MARGIN_LEFT + cols * _CELL / 2)}" '
            f'y="{_fmt(height - 10)}" text-anchor="middle" '
            f'font-family="monospace" font-size="11">{x_label}</text>'
        )
    if y_label:
        parts.append(
            f'<text x="14" y="{_fmt(_MARGIN_TOP + rows * _CELL / 2)}" '
            f'font-family="monospace" font-size="11" '
            f'transform="rotate(-90 14 {_fmt(_MARGIN_TOP + rows * _CELL / 2)})" '
            f'text-anchor="middle">{y_label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_heatmap(values, x_ticks, y_ticks, path, overlays=(), title="",
                 x_label="", y_label="") -> None:
    """Render and write a heatmap; identical inputs give identical bytes."""
    text = render_heatmap(values, x_ticks, y_ticks, overlays, title, x_label, y_label)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
