"""SVG circle diagram of the Hashin-Shtrikman type bounds.

Geometry is emitted in problem coordinates (``a`` right, ``c`` up); one
top-level transform flips the vertical axis for display.
"""

from __future__ import annotations

from xml.sax.saxutils import escape, quoteattr

from .bounds_hs import DiskGeometry, HSReport, VerticalLine

__all__ = ["circle_diagram_svg"]

MARGIN = 0.10


def _num(x: float) -> str:
    return format(float(x), ".12g")


def _extent(report: HSReport):
    hs_disks, phase_disks = report.geometry
    xs, ys = [0.0], []
    for shape in (*hs_disks, *phase_disks):
        if isinstance(shape, DiskGeometry):
            (cx, cy), r = shape.center, shape.radius
            xs += [cx - r, cx + r]
            ys += [cy - r, cy + r]
        else:
            xs.append(shape.a)
    for p in report.phases:
        xs.append(p.a)
        ys.append(p.c)
    xs.append(report.y.a_Y)
    ys.append(-report.y.c_Y)
    return min(xs), max(xs), min(ys), max(ys)


def circle_diagram_svg(report: HSReport, title: str | None = None) -> str:
    """Phase circles (dashed), bound circles (solid), the phase points, the
    point ``(a_Y, -c_Y)`` and the tangency points on ``a = 0``."""
    x0, x1, y0, y1 = _extent(report)
    span = max(x1 - x0, y1 - y0, 1e-12)
    w, h = max(x1 - x0, 1e-3 * span), max(y1 - y0, 1e-3 * span)
    vb = (x0 - MARGIN * w, -(y1 + MARGIN * h), w * (1 + 2 * MARGIN), h * (1 + 2 * MARGIN))
    stroke = _num(0.004 * span)
    mark = 0.015 * span
    lo, hi = y0 - MARGIN * h, y1 + MARGIN * h

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{" ".join(_num(v) for v in vb)}" width="600" height="{_num(600 * vb[3] / vb[2])}">',
    ]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    out.append(f'<g transform="scale(1,-1)" fill="none" stroke-width="{stroke}">')
    out.append(f'<line class="axis" x1="0" y1="{_num(lo)}" x2="0" y2="{_num(hi)}" stroke="#888"/>')
    if lo < 0 < hi:
        out.append(f'<line class="axis" x1="{_num(vb[0])}" y1="0" x2="{_num(vb[0] + vb[2])}" y2="0" stroke="#888"/>')

    hs_disks, phase_disks = report.geometry
    for kind, shapes, extra in (("phase", phase_disks, ' stroke-dasharray="4 3"'), ("hs", hs_disks, "")):
        color = "#1f77b4" if kind == "phase" else "#d62728"
        for shape in shapes:
            if isinstance(shape, VerticalLine):
                out.append(
                    f'<line class="{kind}-line" x1="{_num(shape.a)}" y1="{_num(lo)}" '
                    f'x2="{_num(shape.a)}" y2="{_num(hi)}" stroke="{color}"{extra}/>'
                )
                continue
            (cx, cy), r = shape.center, shape.radius
            out.append(
                f'<circle class="{kind}-circle" cx="{_num(cx)}" cy="{_num(cy)}" r="{_num(r)}" '
                f'stroke="{color}"{extra}/>'
            )

    points = [(p.a, p.c, f"phase {i}") for i, p in enumerate(report.phases, start=1)]
    points.append((report.y.a_Y, -report.y.c_Y, "Y"))
    for x, y, label in points:
        d = (f"M {_num(x - mark)} {_num(y)} L {_num(x + mark)} {_num(y)} "
             f"M {_num(x)} {_num(y - mark)} L {_num(x)} {_num(y + mark)}")
        out.append(f'<path class="point-marker" data-label={quoteattr(label)} d="{d}" stroke="black"/>')
    for shape in hs_disks:
        if isinstance(shape, DiskGeometry):
            x, y = shape.tangent_point
            d = f"M {_num(x)} {_num(y - mark)} L {_num(x + mark)} {_num(y)} L {_num(x)} {_num(y + mark)} Z"
            out.append(f'<path class="tangency-marker" d="{d}" fill="#2ca02c" stroke="none"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
