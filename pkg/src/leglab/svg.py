"""Minimal SVG emission for curves and isotopy traces.

Output is presentation-only: fixed viewport, curves auto-fitted, frames
of a trace drawn with an opacity ramp.  Never parsed back.
"""
from __future__ import annotations

import numpy as np

from .errors import ValidationError

VIEWPORT = 640           # square viewport side in px
PAD_FRACTION = 0.05


def _fit(all_points: np.ndarray):
    lo = all_points.min(axis=0)
    hi = all_points.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-12))
    pad = PAD_FRACTION * span
    scale = VIEWPORT / (span + 2 * pad)

    def to_px(pts):
        x = (pts[:, 0] - lo[0] + pad) * scale
        y = VIEWPORT - (pts[:, 1] - lo[1] + pad) * scale   # y up
        return x, y
    return to_px


def _path(pts_px, closed: bool) -> str:
    x, y = pts_px
    parts = [f"M {x[0]:.3f} {y[0]:.3f}"]
    parts += [f"L {xi:.3f} {yi:.3f}" for xi, yi in zip(x[1:], y[1:])]
    if closed:
        parts.append("Z")
    return " ".join(parts)


def curves_to_svg(curves, strokes=None, widths=None, opacities=None) -> str:
    """Render plane curves (or xy-projections of space curves) to SVG."""
    curves = list(curves)
    if not curves:
        raise ValidationError("nothing to draw")
    pts2 = [c.vertices[:, :2] for c in curves]
    to_px = _fit(np.vstack(pts2))
    n = len(curves)
    strokes = strokes or ["#1f4e79"] * n
    widths = widths or [1.5] * n
    opacities = opacities or [1.0] * n
    body = []
    for c, p, col, w, op in zip(curves, pts2, strokes, widths, opacities):
        body.append(
            f'<path d="{_path(to_px(p), c.closed)}" fill="none" '
            f'stroke="{col}" stroke-width="{w}" stroke-opacity="{op:.3f}"/>')
    inner = "\n  ".join(body)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{VIEWPORT}" '
            f'height="{VIEWPORT}" viewBox="0 0 {VIEWPORT} {VIEWPORT}">\n  '
            f'{inner}\n</svg>\n')


def trace_to_svg(trace, stroke: str = "#1f4e79") -> str:
    """Draw every frame of a trace with an opacity ramp (late frames solid)."""
    n = len(trace.frames)
    opac = [0.25 + 0.75 * k / max(n - 1, 1) for k in range(n)]
    return curves_to_svg(trace.frames, strokes=[stroke] * n,
                         widths=[1.5] * n, opacities=opac)
