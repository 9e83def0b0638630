"""Cutting and stacking: stage-k stacks and depth-K interval exchange maps of one diagram half."""

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .diagram import DiagramSpec, Edge
from .errors import DomainError, WeightError, WindowError
from .exact_utils import Number
from .pathspace import FinitePath, PeriodicChain, path_counts, periodic_chains, validate_path
from .weights import HalfWeights

Interval = Tuple[Number, Number]


@dataclass(frozen=True)
class Column:
    vertex: int
    levels: Tuple[Interval, ...]  # bottom to top
    origins: Tuple[int, ...]  # level-0 vertex each level descends from

    @property
    def width(self) -> Number:
        lo, hi = self.levels[0]
        return hi - lo

    @property
    def height(self) -> int:
        return len(self.levels)


@dataclass(frozen=True)
class StackStage:
    stage: int
    columns: Tuple[Column, ...]

    def top_levels(self) -> List[Interval]:
        return [c.levels[-1] for c in self.columns]

    def total_length(self) -> Number:
        return sum((c.width * c.height for c in self.columns), Fraction(0))


@dataclass(frozen=True)
class Piece:
    lo: Number
    hi: Number
    offset: Number

    @property
    def image(self) -> Interval:
        return (self.lo + self.offset, self.hi + self.offset)

    @property
    def length(self) -> Number:
        return self.hi - self.lo


@dataclass(frozen=True)
class UndefinedSignal:
    x: Number
    reason: str


@dataclass(frozen=True)
class IntervalExchange:
    """Piecewise translation on ``domain``; ``pieces`` and ``undefined`` tile it with half-open intervals."""

    domain: Interval
    pieces: Tuple[Piece, ...]
    undefined: Tuple[Interval, ...]
    depth: int

    @cached_property
    def _segments(self) -> List[Tuple[Number, Number, Optional[Number]]]:
        segs: List[Tuple[Number, Number, Optional[Number]]] = [(p.lo, p.hi, p.offset) for p in self.pieces]
        segs.extend((lo, hi, None) for lo, hi in self.undefined)
        segs.sort(key=lambda s: s[0])
        return segs

    @cached_property
    def _starts(self) -> List[Number]:
        return [s[0] for s in self._segments]

    @property
    def length(self) -> Number:
        return self.domain[1] - self.domain[0]

    def segment_at(self, x: Number) -> Optional[Tuple[Number, Number, Optional[Number]]]:
        """The half-open segment ``[lo, hi)`` holding ``x``, or None past the right end."""
        i = bisect_right(self._starts, x) - 1
        if i < 0:
            return None
        seg = self._segments[i]
        return seg if x < seg[1] else None

    def segment_before(self, x: Number) -> Optional[Tuple[Number, Number, Optional[Number]]]:
        """The segment whose right end is ``x``."""
        i = bisect_right(self._starts, x) - 1
        while i >= 0 and self._segments[i][0] >= x:
            i -= 1
        if i < 0:
            return None
        seg = self._segments[i]
        return seg if seg[1] == x else None

    def scaled(self, factor: Number) -> "IntervalExchange":
        return IntervalExchange(
            (self.domain[0] * factor, self.domain[1] * factor),
            tuple(Piece(p.lo * factor, p.hi * factor, p.offset * factor) for p in self.pieces),
            tuple((lo * factor, hi * factor) for lo, hi in self.undefined),
            self.depth,
        )

    def as_float(self) -> "IntervalExchange":
        return IntervalExchange(
            (float(self.domain[0]), float(self.domain[1])),
            tuple(Piece(float(p.lo), float(p.hi), float(p.offset)) for p in self.pieces),
            tuple((float(lo), float(hi)) for lo, hi in self.undefined),
            self.depth,
        )

    def merged(self) -> "IntervalExchange":
        """Coalesce adjacent pieces with equal offsets."""
        out: List[Piece] = []
        for p in self.pieces:
            if out and out[-1].hi == p.lo and out[-1].offset == p.offset:
                out[-1] = Piece(out[-1].lo, p.hi, p.offset)
            else:
                out.append(p)
        return IntervalExchange(self.domain, tuple(out), self.undefined, self.depth)

    def is_measure_preserving(self) -> bool:
        images = sorted(p.image for p in self.pieces)
        disjoint = all(a[1] <= b[0] for a, b in zip(images, images[1:]))
        inside = all(self.domain[0] <= lo and hi <= self.domain[1] for lo, hi in images)
        covered = sum((p.length for p in self.pieces), Fraction(0)) + sum((hi - lo for lo, hi in self.undefined), Fraction(0))
        return disjoint and inside and covered == self.length


def _cut(interval: Interval, fractions: Sequence[Number]) -> List[Interval]:
    lo, hi = interval
    width = hi - lo
    out, acc = [], Fraction(0)
    for f in fractions:
        a = lo + width * acc
        acc += f
        out.append((a, lo + width * acc))
    return out


def _out_fractions(half_spec: DiagramSpec, hw: HalfWeights, level: int, vertex: int) -> Tuple[Tuple[Edge, ...], List[Number]]:
    outs = half_spec.out_edges(level, vertex)
    fractions = [hw.edge(e) for e in outs]
    if any(f <= 0 for f in fractions) or sum(fractions) != 1:
        raise WeightError(f"outgoing weights of vertex {vertex} at level {level} are not a positive partition of 1")
    return outs, fractions


def _stage_zero(half_spec: DiagramSpec, hw: HalfWeights) -> StackStage:
    if len(hw.v0) != half_spec.count(0):
        raise WeightError(f"{len(hw.v0)} level-0 weights for {half_spec.count(0)} vertices")
    x = Fraction(0)
    columns = []
    for v, w in enumerate(hw.v0):
        if w <= 0:
            raise WeightError(f"level-0 vertex {v} has weight {w}")
        columns.append(Column(v, ((x, x + w),), (v,)))
        x += w
    return StackStage(0, tuple(columns))


def build_stacks(half_spec: DiagramSpec, hw: HalfWeights, K: int) -> List[StackStage]:
    """Stages ``0..K``: cut each column by s-order, restack subcolumns by r-order."""
    if K > half_spec.imax:
        raise WindowError(f"depth {K} exceeds window [0, {half_spec.imax}]", needed=K)
    stages = [_stage_zero(half_spec, hw)]
    for k in range(1, K + 1):
        sub: Dict[Edge, Column] = {}
        for col in stages[-1].columns:
            outs, fractions = _out_fractions(half_spec, hw, k - 1, col.vertex)
            pieces = [_cut(level, fractions) for level in col.levels]
            for j, e in enumerate(outs):
                sub[e] = Column(e.dst, tuple(p[j] for p in pieces), col.origins)
        columns = []
        for u in range(half_spec.count(k)):
            ins = half_spec.in_edges(k, u)
            widths = {sub[e].width for e in ins}
            if len(widths) != 1:
                raise WeightError(f"subcolumns stacked over vertex {u} at level {k} have widths {sorted(widths)}")
            levels: Tuple[Interval, ...] = ()
            origins: Tuple[int, ...] = ()
            for e in ins:
                levels += sub[e].levels
                origins += sub[e].origins
            columns.append(Column(u, levels, origins))
        stages.append(StackStage(k, tuple(columns)))
    return stages


def stable_chains(half_spec: DiagramSpec, hw: HalfWeights, K: int) -> List[PeriodicChain]:
    """Periodic chains whose columns keep their width (edge weights 1 along the chain)."""
    out = []
    for ch in periodic_chains(half_spec, K):
        if all(hw.edge(half_spec.in_edges(ch.merge_level + i, v)[0]) == 1 for i, v in enumerate(ch.vertices) if i > 0):
            out.append(ch)
    return out


def iet_at_depth(half_spec: DiagramSpec, hw: HalfWeights, K: int, periodic_wrap: bool = False,
                 stages: Optional[List[StackStage]] = None) -> IntervalExchange:
    """``f_K``: every non-top level maps onto the level above it."""
    stages = stages or build_stacks(half_spec, hw, K)
    last = stages[K]
    wraps = {ch.terminal for ch in stable_chains(half_spec, hw, K)} if periodic_wrap and K > 0 else set()
    pieces, undefined = [], []
    for col in last.columns:
        for a, b in zip(col.levels, col.levels[1:]):
            pieces.append(Piece(a[0], a[1], b[0] - a[0]))
        top = col.levels[-1]
        if col.vertex in wraps:
            pieces.append(Piece(top[0], top[1], col.levels[0][0] - top[0]))
        else:
            undefined.append(top)
    pieces.sort(key=lambda p: p.lo)
    undefined.sort()
    return IntervalExchange((Fraction(0), sum(hw.v0, Fraction(0))), tuple(pieces), tuple(undefined), K)


def compact_iet(half_spec: DiagramSpec, hw: HalfWeights, K: int, periodic_wrap: bool = True) -> IntervalExchange:
    """The same map as :func:`iet_at_depth`, built only from the junctions between stacked subcolumns."""
    if K > half_spec.imax:
        raise WindowError(f"depth {K} exceeds window [0, {half_spec.imax}]", needed=K)
    base = _stage_zero(half_spec, hw)
    bottom: List[Interval] = [c.levels[0] for c in base.columns]
    top: List[Interval] = list(bottom)
    pieces: List[Piece] = []
    for k in range(1, K + 1):
        sub_bottom: Dict[Edge, Interval] = {}
        sub_top: Dict[Edge, Interval] = {}
        for v in range(half_spec.count(k - 1)):
            outs, fractions = _out_fractions(half_spec, hw, k - 1, v)
            for e, b, t in zip(outs, _cut(bottom[v], fractions), _cut(top[v], fractions)):
                sub_bottom[e], sub_top[e] = b, t
        new_bottom, new_top = [], []
        for u in range(half_spec.count(k)):
            ins = half_spec.in_edges(k, u)
            for e, nxt in zip(ins, ins[1:]):
                t, b = sub_top[e], sub_bottom[nxt]
                if t[1] - t[0] != b[1] - b[0]:
                    raise WeightError(f"subcolumns stacked over vertex {u} at level {k} differ in width")
                pieces.append(Piece(t[0], t[1], b[0] - t[0]))
            new_bottom.append(sub_bottom[ins[0]])
            new_top.append(sub_top[ins[-1]])
        bottom, top = new_bottom, new_top
    wraps = {ch.terminal for ch in stable_chains(half_spec, hw, K)} if periodic_wrap and K > 0 else set()
    undefined = []
    for u, t in enumerate(top):
        if u in wraps:
            pieces.append(Piece(t[0], t[1], bottom[u][0] - t[0]))
        else:
            undefined.append(t)
    pieces.sort(key=lambda p: p.lo)
    undefined.sort()
    return IntervalExchange((Fraction(0), sum(hw.v0, Fraction(0))), tuple(pieces), tuple(undefined), K)


def apply_iet(iet: IntervalExchange, x: Number) -> Union[Number, UndefinedSignal]:
    lo, hi = iet.domain
    if not lo <= x <= hi:
        raise DomainError(f"{x} outside [{lo}, {hi}]")
    seg = iet.segment_at(x)
    if seg is None:
        return UndefinedSignal(x, "right end of the domain")
    if seg[2] is None:
        return UndefinedSignal(x, "top level")
    return x + seg[2]


def path_level_index(half_spec: DiagramSpec, path: FinitePath) -> int:
    """Position of ``path`` in the column over its terminal vertex (0 = bottom)."""
    validate_path(half_spec, path)
    counts = path_counts(half_spec, path.depth)
    idx = 0
    for k, e in enumerate(path.edges, start=1):
        below = sum(counts[k - 1][f.src] for f in half_spec.in_edges(k, e.dst) if f.r_rank < e.r_rank)
        idx += below
    return idx


def interval_of_path(stages: List[StackStage], half_spec: DiagramSpec, path: FinitePath) -> Interval:
    level, vertex = path.terminal if path.edges else (0, path.start)
    return stages[level].columns[vertex].levels[path_level_index(half_spec, path)]
