"""SVG pictures of flat surfaces and interval exchanges using drawsvg."""

from typing import List, Optional, Tuple

import drawsvg as draw

from .config import SVG_COLORS, SVG_FONT_SIZE, SVG_LABEL_DEPTH, SVG_MARGIN, SVG_SCALE
from .exact_utils import Number
from .stacking import IntervalExchange
from .surface import FlatSurfaceModel, Rectangle, build_surface, teichmuller

FONT = "DejaVu Sans, Arial, sans-serif"
TICK = 5


class _Frame:
    """Maps global surface coordinates (y up) to SVG pixels (y down)."""

    def __init__(self, width: float, height: float, scale: float, margin: float):
        self.unit = scale / max(width, height)
        self.margin = margin
        self.height = height
        self.size = (width * self.unit + 2 * margin, height * self.unit + 2 * margin)

    def x(self, value: Number) -> float:
        return self.margin + float(value) * self.unit

    def y(self, value: Number) -> float:
        return self.margin + (self.height - float(value)) * self.unit


def _owner(rects: Tuple[Rectangle, ...], coord: Number, horizontal: bool) -> Rectangle:
    for r in rects:
        lo = r.x0 if horizontal else r.y0
        hi = lo + (r.width if horizontal else r.height)
        if lo <= coord < hi:
            return r
    return rects[-1]


def _labelled(iet: IntervalExchange) -> List[Tuple[Number, Number, Number]]:
    # zero offsets glue straight across and stay unlabelled
    return [(p.lo, p.hi, p.offset) for p in iet.merged().pieces if p.offset != 0]


def _at_label_depth(surface: FlatSurfaceModel, label_depth: Optional[int]) -> FlatSurfaceModel:
    if label_depth is None or surface.spec is None or not surface.exact or surface.depth <= label_depth:
        return surface
    rebuilt = build_surface(surface.spec, surface.weights, label_depth)
    return teichmuller(rebuilt, surface.time) if surface.time.scale != 1 else rebuilt


def render_svg(surface: FlatSurfaceModel, label_depth: Optional[int] = SVG_LABEL_DEPTH, scale: float = SVG_SCALE,
               margin: float = SVG_MARGIN) -> str:
    """Diagonal rectangles with glued edge pieces labelled ``A_n`` (top/bottom) and ``B_n`` (right/left)."""
    surface = _at_label_depth(surface, label_depth)
    rects = surface.rectangles
    total_w = sum(float(r.width) for r in rects)
    total_h = sum(float(r.height) for r in rects)
    frame = _Frame(total_w, total_h, scale, margin)
    d = draw.Drawing(*frame.size)
    d.append(draw.Rectangle(0, 0, *frame.size, fill=SVG_COLORS["background"]))

    for r in rects:
        x0, x1 = frame.x(r.x0), frame.x(r.x0 + r.width)
        y0, y1 = frame.y(r.y0 + r.height), frame.y(r.y0)
        d.append(draw.Rectangle(x0, y0, x1 - x0, y1 - y0, fill=SVG_COLORS["rectangle"],
                                stroke=SVG_COLORS["outline"], stroke_width=1))
        d.append(draw.Line(x0, y0, x1, y0, stroke=SVG_COLORS["top"], stroke_width=2))
        d.append(draw.Line(x0, y1, x1, y1, stroke=SVG_COLORS["top"], stroke_width=2))
        d.append(draw.Line(x0, y0, x0, y1, stroke=SVG_COLORS["side"], stroke_width=2))
        d.append(draw.Line(x1, y0, x1, y1, stroke=SVG_COLORS["side"], stroke_width=2))
        d.append(draw.Text(f"R{r.index}", SVG_FONT_SIZE, (x0 + x1) / 2, (y0 + y1) / 2, fill=SVG_COLORS["text"],
                           font_family=FONT, text_anchor="middle", dominant_baseline="middle"))

    for n, (lo, hi, offset) in enumerate(_labelled(surface.t_plus), start=1):
        src = _owner(rects, lo, True)
        dst = _owner(rects, lo + offset, True)
        top_y, bottom_y = frame.y(src.y0 + src.height), frame.y(dst.y0)
        for a, b, y, dy in ((lo, hi, top_y, -1), (lo + offset, hi + offset, bottom_y, 1)):
            xa, xb = frame.x(a), frame.x(b)
            for x in (xa, xb):
                d.append(draw.Line(x, y - TICK, x, y + TICK, stroke=SVG_COLORS["tick"], stroke_width=1))
            d.append(draw.Text(f"A{n}", SVG_FONT_SIZE, (xa + xb) / 2, y + dy * (TICK + SVG_FONT_SIZE / 2),
                               fill=SVG_COLORS["top"], font_family=FONT, text_anchor="middle",
                               dominant_baseline="middle"))

    for n, (lo, hi, offset) in enumerate(_labelled(surface.t_minus), start=1):
        src = _owner(rects, lo, False)
        dst = _owner(rects, lo + offset, False)
        right_x, left_x = frame.x(src.x0 + src.width), frame.x(dst.x0)
        for a, b, x, dx, anchor in ((lo, hi, right_x, 1, "start"), (lo + offset, hi + offset, left_x, -1, "end")):
            ya, yb = frame.y(a), frame.y(b)
            for y in (ya, yb):
                d.append(draw.Line(x - TICK, y, x + TICK, y, stroke=SVG_COLORS["tick"], stroke_width=1))
            d.append(draw.Text(f"B{n}", SVG_FONT_SIZE, x + dx * (TICK + 2), (ya + yb) / 2,
                               fill=SVG_COLORS["side"], font_family=FONT, text_anchor=anchor,
                               dominant_baseline="middle"))

    for iet, horizontal in ((surface.t_plus, True), (surface.t_minus, False)):
        for lo, hi in iet.undefined:
            r = _owner(rects, lo, horizontal)
            if horizontal:
                y = frame.y(r.y0 + r.height)
                d.append(draw.Line(frame.x(lo), y, frame.x(hi), y, stroke=SVG_COLORS["tick"],
                                   stroke_width=3, stroke_dasharray="2,2"))
            else:
                x = frame.x(r.x0 + r.width)
                d.append(draw.Line(x, frame.y(lo), x, frame.y(hi), stroke=SVG_COLORS["tick"],
                                   stroke_width=3, stroke_dasharray="2,2"))
    return d.as_svg()


def render_iet_svg(iet: IntervalExchange, scale: float = SVG_SCALE, margin: float = SVG_MARGIN) -> str:
    """Graph of ``x -> T(x)``: one segment per piece; undefined intervals marked on the axis."""
    lo, hi = iet.domain
    length = float(hi - lo) or 1.0
    frame = _Frame(length, length, scale, margin)
    d = draw.Drawing(*frame.size)
    d.append(draw.Rectangle(0, 0, *frame.size, fill=SVG_COLORS["background"]))
    d.append(draw.Rectangle(frame.x(0), frame.y(length), length * frame.unit, length * frame.unit,
                            fill="none", stroke=SVG_COLORS["outline"], stroke_width=1))
    for p in iet.pieces:
        a, b = p.lo - lo, p.hi - lo
        d.append(draw.Line(frame.x(a), frame.y(a + p.offset), frame.x(b), frame.y(b + p.offset),
                           stroke=SVG_COLORS["top"], stroke_width=2))
    for a, b in iet.undefined:
        d.append(draw.Line(frame.x(a - lo), frame.y(0), frame.x(b - lo), frame.y(0),
                           stroke=SVG_COLORS["side"], stroke_width=4))
    d.append(draw.Text(f"depth {iet.depth}, {len(iet.pieces)} pieces", SVG_FONT_SIZE, frame.x(0),
                       frame.margin / 2, fill=SVG_COLORS["text"], font_family=FONT))
    return d.as_svg()
