"""Flat surfaces from welded weighted diagrams: rectangles glued by two interval exchanges, and their flows."""

from bisect import bisect_right
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .config import FLOAT_HIT_TOLERANCE, MAX_REFINE_DEPTH, MAX_TRAJECTORY_SAMPLES, REFINE_STEP
from .diagram import DiagramSpec, half
from .errors import DomainError, ParameterError, WeightError
from .exact_utils import ExactTime, Number, fmt_rational
from .stacking import IntervalExchange, compact_iet, iet_at_depth
from .terminal import ensure_terminal
from .weights import WeightPair, ensure_depth, half_weights

VERTICAL = "vertical"
HORIZONTAL = "horizontal"


@dataclass(frozen=True)
class Rectangle:
    """``R_i`` placed on the diagonal: ``[x0, x0 + width) x [y0, y0 + height)`` in global coordinates."""

    index: int
    x0: Number
    y0: Number
    width: Number
    height: Number

    @property
    def area(self) -> Number:
        return self.width * self.height


@dataclass(frozen=True)
class SurfacePoint:
    rect: int
    x: Number
    y: Number

    def swapped(self) -> "SurfacePoint":
        return SurfacePoint(self.rect, self.y, self.x)

    def __str__(self) -> str:
        return f"{self.rect}:{fmt_rational(self.x)}/{fmt_rational(self.y)}"


@dataclass(frozen=True)
class SingularHitSignal:
    point: SurfacePoint
    elapsed: Number
    reason: str


@dataclass(frozen=True)
class DepthExceededSignal:
    point: SurfacePoint
    elapsed: Number
    suggested_depth: int


FlowResult = Union[SurfacePoint, SingularHitSignal, DepthExceededSignal]


@dataclass(frozen=True)
class Segment:
    """Straight piece of a trajectory inside one rectangle, from time ``t0`` to ``t1``."""

    rect: int
    x0: Number
    y0: Number
    x1: Number
    y1: Number
    t0: Number
    t1: Number


@dataclass(frozen=True)
class Trajectory:
    start: SurfacePoint
    direction: str
    segments: Tuple[Segment, ...]
    end: FlowResult

    @property
    def duration(self) -> Number:
        return self.segments[-1].t1 if self.segments else 0


@dataclass(frozen=True)
class FlatSurfaceModel:
    rectangles: Tuple[Rectangle, ...]
    t_plus: IntervalExchange
    t_minus: IntervalExchange
    depth: int
    exact: bool = True
    time: ExactTime = field(default=ExactTime(Fraction(1)))
    spec: Optional[DiagramSpec] = field(default=None, compare=False, repr=False)
    weights: Optional[WeightPair] = field(default=None, compare=False, repr=False)

    @property
    def tolerance(self) -> float:
        return 0 if self.exact else FLOAT_HIT_TOLERANCE

    def to_dict(self) -> Dict[str, Any]:
        return {
            "depth": self.depth,
            "mode": "exact" if self.exact else "float",
            "area": fmt_rational(area(self)),
            "rectangles": [
                {"index": r.index, "width": fmt_rational(r.width), "height": fmt_rational(r.height)}
                for r in self.rectangles
            ],
            "t_plus_pieces": len(self.t_plus.pieces),
            "t_minus_pieces": len(self.t_minus.pieces),
        }


def _rectangles(widths: Sequence[Number], heights: Sequence[Number]) -> Tuple[Rectangle, ...]:
    out, x, y = [], Fraction(0), Fraction(0)
    for i, (w, h) in enumerate(zip(widths, heights)):
        out.append(Rectangle(i, x, y, w, h))
        x += w
        y += h
    return tuple(out)


def build_surface(spec: DiagramSpec, weights: WeightPair, K: int, mode: str = "exact",
                  compact: bool = True, neg_depth: Optional[int] = None) -> FlatSurfaceModel:
    """Rectangles from ``w+`` and ``w-`` on ``V_0``; top/bottom gluing from the positive half, right/left from the negative half."""
    if not weights.has_minus:
        raise WeightError("a surface needs w- on the negative half")
    if mode not in ("exact", "float"):
        raise ParameterError(f"mode must be 'exact' or 'float', got {mode!r}")
    neg_depth = K if neg_depth is None else neg_depth
    spec, weights = ensure_depth(spec, weights, -neg_depth, K)
    pos, neg = half(spec, 1), half(spec, -1)
    hw_plus, hw_minus = half_weights(weights, 1), half_weights(weights, -1)
    if compact:
        t_plus = compact_iet(pos, hw_plus, K)
        t_minus = compact_iet(neg, hw_minus, neg_depth)
    else:
        t_plus = iet_at_depth(pos, hw_plus, K, periodic_wrap=True)
        t_minus = iet_at_depth(neg, hw_minus, neg_depth, periodic_wrap=True)
    model = FlatSurfaceModel(_rectangles(weights.v0_plus, weights.v0_minus), t_plus, t_minus, K,
                             spec=spec, weights=weights)
    return as_float(model) if mode == "float" else model


def as_float(surface: FlatSurfaceModel) -> FlatSurfaceModel:
    rects = tuple(Rectangle(r.index, float(r.x0), float(r.y0), float(r.width), float(r.height)) for r in surface.rectangles)
    return replace(surface, rectangles=rects, t_plus=surface.t_plus.as_float(), t_minus=surface.t_minus.as_float(), exact=False)


def area(surface: FlatSurfaceModel) -> Number:
    return sum((r.area for r in surface.rectangles), Fraction(0))


def teichmuller(surface: FlatSurfaceModel, t: Union[float, ExactTime]) -> FlatSurfaceModel:
    """Stretch horizontally by ``e^t`` and contract vertically by ``e^-t``."""
    time = t if isinstance(t, ExactTime) else ExactTime.from_float(t)
    if surface.exact:
        stretch, shrink = time.scale, time.inverse
    else:
        stretch, shrink = float(time.scale), float(time.inverse)
    rects = tuple(
        Rectangle(r.index, r.x0 * stretch, r.y0 * shrink, r.width * stretch, r.height * shrink)
        for r in surface.rectangles
    )
    return replace(surface, rectangles=rects, t_plus=surface.t_plus.scaled(stretch),
                   t_minus=surface.t_minus.scaled(shrink), time=surface.time + time)


def validate_point(surface: FlatSurfaceModel, p: SurfacePoint) -> Rectangle:
    if not 0 <= p.rect < len(surface.rectangles):
        raise DomainError(f"no rectangle {p.rect}")
    r = surface.rectangles[p.rect]
    if not (0 <= p.x < r.width and 0 <= p.y < r.height):
        raise DomainError(f"point {p} lies outside rectangle {p.rect} ({fmt_rational(r.width)} x {fmt_rational(r.height)})")
    return r


def _crossing(iet: IntervalExchange, coord: Number, tol: float) -> Tuple[str, Optional[Number]]:
    """Classify a crossing of a glued edge at global ``coord``: regular (with offset), singular or depth."""
    slack = tol * float(iet.length)
    seg = iet.segment_at(coord)
    if seg is None:
        return "singular", None
    left = None
    at_break = False
    if coord == seg[0] or (slack and coord - seg[0] < slack):
        left, at_break = iet.segment_before(seg[0]), True
    elif slack and seg[1] - coord < slack:
        left, seg, at_break = seg, iet.segment_at(seg[1]), True
        if seg is None:
            return "singular", None
    if seg[2] is None:
        return "depth", None
    if at_break:
        if left is None:
            return "singular", None
        if left[2] is None:
            return "depth", None
        if left[2] != seg[2]:
            return "singular", None
    return "regular", seg[2]


def _locate(starts: List[Number], coord: Number) -> int:
    return bisect_right(starts, coord) - 1


def trajectory(surface: FlatSurfaceModel, p: SurfacePoint, t: Number, direction: str = VERTICAL) -> Trajectory:
    """Unit-speed straight-line motion, crossing glued edges through ``T+`` (vertical) or ``T-`` (horizontal)."""
    if direction not in (VERTICAL, HORIZONTAL):
        raise ParameterError(f"direction must be vertical or horizontal, got {direction!r}")
    if t < 0:
        raise ParameterError("flow time must be nonnegative")
    validate_point(surface, p)
    vertical = direction == VERTICAL
    rects = surface.rectangles
    starts = [r.x0 for r in rects] if vertical else [r.y0 for r in rects]
    iet = surface.t_plus if vertical else surface.t_minus
    tol = surface.tolerance
    segments: List[Segment] = []
    rect, x, y = p.rect, p.x, p.y
    elapsed = Fraction(0) if surface.exact else 0.0
    remaining = t
    while True:
        r = rects[rect]
        along, across, span = (y, x, r.height) if vertical else (x, y, r.width)
        side = r.width if vertical else r.height
        dist = span - along
        if remaining < dist:
            end = along + remaining
            segments.append(_segment(rect, x, y, end, vertical, elapsed, elapsed + remaining))
            return Trajectory(p, direction, tuple(segments), _point(rect, across, end, vertical))
        segments.append(_segment(rect, x, y, span, vertical, elapsed, elapsed + dist))
        elapsed += dist
        remaining -= dist
        here = _point(rect, across, span, vertical)
        slack = tol * float(side)
        if across == 0 or (slack and (across < slack or side - across < slack)):
            return Trajectory(p, direction, tuple(segments), SingularHitSignal(here, elapsed, "corner"))
        coord = (r.x0 if vertical else r.y0) + across
        kind, offset = _crossing(iet, coord, tol)
        if kind == "singular":
            return Trajectory(p, direction, tuple(segments), SingularHitSignal(here, elapsed, "breakpoint"))
        if kind == "depth":
            return Trajectory(p, direction, tuple(segments), DepthExceededSignal(here, elapsed, surface.depth + REFINE_STEP))
        image = coord + offset
        rect = _locate(starts, image)
        local = image - starts[rect]
        if local == 0:
            return Trajectory(p, direction, tuple(segments), SingularHitSignal(_point(rect, local, 0, vertical), elapsed, "corner"))
        x, y = (local, 0) if vertical else (0, local)
        if remaining == 0:
            return Trajectory(p, direction, tuple(segments), SurfacePoint(rect, x, y))


def _point(rect: int, across: Number, along: Number, vertical: bool) -> SurfacePoint:
    return SurfacePoint(rect, across, along) if vertical else SurfacePoint(rect, along, across)


def _segment(rect: int, x: Number, y: Number, end: Number, vertical: bool, t0: Number, t1: Number) -> Segment:
    if vertical:
        return Segment(rect, x, y, x, end, t0, t1)
    return Segment(rect, x, y, end, y, t0, t1)


def refine(surface: FlatSurfaceModel, depth: int) -> FlatSurfaceModel:
    if surface.spec is None or surface.weights is None:
        raise ParameterError("surface carries no diagram to refine")
    rebuilt = build_surface(surface.spec, surface.weights, depth, "exact" if surface.exact else "float")
    if surface.time.scale != 1:
        rebuilt = teichmuller(rebuilt, surface.time)
    return rebuilt


def flow(surface: FlatSurfaceModel, p: SurfacePoint, t: Number, direction: str = VERTICAL,
         auto_refine: bool = False, max_depth: int = MAX_REFINE_DEPTH) -> FlowResult:
    """Point reached after time ``t``, or the signal that stopped the trajectory."""
    result = trajectory(surface, p, t, direction).end
    while auto_refine and isinstance(result, DepthExceededSignal):
        if surface.spec is None or surface.spec.generator is None or result.suggested_depth > max_depth:
            break
        ensure_terminal().info(f"Refining surface to depth {result.suggested_depth}")
        surface = refine(surface, result.suggested_depth)
        # the refined maps agree with the old ones wherever those were defined
        result = trajectory(surface, p, t, direction).end
    return result


@dataclass(frozen=True)
class Box:
    """Axis-parallel region ``[x_lo, x_hi) x [y_lo, y_hi)`` in the global diagonal coordinates."""

    x_lo: Number
    x_hi: Number
    y_lo: Number
    y_hi: Number


def whole_surface(surface: FlatSurfaceModel) -> Box:
    last = surface.rectangles[-1]
    return Box(0, last.x0 + last.width, 0, last.y0 + last.height)


@dataclass(frozen=True)
class BirkhoffResult:
    mean: float
    duration: Number
    samples: Tuple[Tuple[float, int, float, float], ...]
    signal: Optional[Union[SingularHitSignal, DepthExceededSignal]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mean": self.mean,
            "duration": fmt_rational(self.duration),
            "samples": len(self.samples),
            "signal": type(self.signal).__name__ if self.signal else None,
        }


def _overlap(a0: Number, a1: Number, b0: Number, b1: Number) -> Number:
    return max(0, min(a1, b1) - max(a0, b0))


def birkhoff_average(surface: FlatSurfaceModel, p: SurfacePoint, T: Number, box: Box,
                     direction: str = VERTICAL, max_samples: int = MAX_TRAJECTORY_SAMPLES) -> BirkhoffResult:
    """Fraction of the time in ``[0, T]`` the trajectory spends inside ``box``."""
    traj = trajectory(surface, p, T, direction)
    inside = 0
    for s in traj.segments:
        r = surface.rectangles[s.rect]
        gx0, gx1 = r.x0 + s.x0, r.x0 + s.x1
        gy0, gy1 = r.y0 + s.y0, r.y0 + s.y1
        if gx0 == gx1:
            if box.x_lo <= gx0 < box.x_hi:
                inside += _overlap(gy0, gy1, box.y_lo, box.y_hi)
        elif box.y_lo <= gy0 < box.y_hi:
            inside += _overlap(gx0, gx1, box.x_lo, box.x_hi)
    duration = traj.duration
    mean = float(Fraction(inside) / Fraction(duration)) if surface.exact and duration else (
        float(inside) / float(duration) if duration else 1.0)
    step = max(1, len(traj.segments) // max_samples) if max_samples else len(traj.segments) + 1
    samples = tuple(
        (float(s.t0), s.rect, float(s.x0), float(s.y0)) for s in traj.segments[::step]
    )[:max_samples]
    signal = traj.end if not isinstance(traj.end, SurfacePoint) else None
    if signal is not None:
        ensure_terminal().warning(f"Trajectory stopped early at time {fmt_rational(signal.elapsed)}: {type(signal).__name__}")
    return BirkhoffResult(mean, duration, samples, signal)
