"""Renormalization: times t_k, the shift of a weighted diagram, and the functoriality check."""

from bisect import bisect_right
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT_SAMPLES, DEFAULT_SEED, MAX_WORKERS, SAMPLE_DENOMINATOR, TELESCOPE_MASS_RATIO
from .diagram import DiagramSpec, Edge, EdgeKey, edge_level, half, heights, make_spec, step_of
from .errors import ParameterError, WindowError
from .exact_utils import ExactTime, fmt_rational
from .stacking import IntervalExchange, UndefinedSignal, apply_iet, build_stacks, compact_iet
from .surface import build_surface
from .terminal import ensure_terminal
from .weights import WeightPair, ensure_depth, half_weights, vertex_weights


def renorm_times(spec: DiagramSpec, weights: WeightPair, K: int) -> List[ExactTime]:
    """``t_0..t_K`` stored as exact scale factors ``e^{t_k}``: level-0 weight total over level-k weight total."""
    spec, weights = ensure_depth(spec, weights, 0, K)
    rows = vertex_weights(half(spec, 1), half_weights(weights, 1), K)
    base = sum(rows[0], Fraction(0))
    return [ExactTime(base / sum(row, Fraction(0))) for row in rows]


@dataclass(frozen=True)
class ShiftedRule:
    """Window generator of a shifted diagram: build the base deeper, then shift."""

    family: Any
    offset: int

    def describe(self) -> str:
        return f"shift {self.offset} of {self.family.describe()}"

    def build(self, depth: int, neg_depth: Optional[int] = None) -> Tuple[DiagramSpec, WeightPair]:
        neg_depth = depth if neg_depth is None else neg_depth
        spec, weights = self.family.build(depth + self.offset, max(neg_depth - self.offset, 0))
        return _shift(spec, weights, self.offset, self)


@dataclass(frozen=True)
class RenormState:
    spec: DiagramSpec
    weights: WeightPair
    k: int
    times: Tuple[ExactTime, ...] = field(compare=False)

    @property
    def scale(self) -> ExactTime:
        return self.times[-1]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k": self.k,
            "window": [self.spec.imin, self.spec.imax],
            "scale": fmt_rational(self.scale.scale),
            "t_k": self.scale.value,
            "widths": [fmt_rational(x) for x in self.weights.v0_plus],
            "heights": [fmt_rational(x) for x in self.weights.v0_minus],
        }


def _shift(spec: DiagramSpec, weights: WeightPair, k: int, generator: Any) -> Tuple[DiagramSpec, WeightPair]:
    if k == 0:
        return spec, weights
    times = renorm_times(spec, weights, k)
    scale = times[k].scale
    ell = vertex_weights(half(spec, 1), half_weights(weights, 1), k)
    h = heights(spec, weights.v0_minus, k)

    counts = {i - k: spec.count(i) for i in spec.levels}
    edges: List[Edge] = []
    w_plus: Dict[EdgeKey, Fraction] = {}
    w_minus: Dict[EdgeKey, Fraction] = {}
    for e in spec.edges:
        if e.level > k:
            moved = Edge(e.level - k, e.src, e.dst, e.r_rank, e.s_rank)
            w_plus[moved.key] = weights.edge_weight(e)
        elif e.level > 0:
            # the transition into old level i now leads away from the new level 0
            moved = Edge(edge_level(e.level - k), e.src, e.dst, e.r_rank, e.s_rank)
            w_minus[moved.key] = Fraction(h[e.level - 1][e.src]) / Fraction(h[e.level][e.dst])
        else:
            moved = Edge(edge_level(step_of(e.level) - k), e.src, e.dst, e.r_rank, e.s_rank)
            w_minus[moved.key] = weights.edge_weight(e)
        edges.append(moved)
    v0_plus = tuple(scale * x for x in ell[k])
    v0_minus = tuple(Fraction(x) / scale for x in h[k])
    return make_spec(counts, edges, generator), WeightPair(v0_plus, w_plus, v0_minus, w_minus)


def shift(spec: DiagramSpec, weights: WeightPair, k: int) -> RenormState:
    """Drop the first ``k`` positive levels into the negative half and rescale by ``e^{+-t_k}``."""
    if k < 0:
        raise ParameterError("shift offset must be nonnegative")
    if not weights.has_minus:
        raise ParameterError("shift needs w- on the negative half")
    spec, weights = ensure_depth(spec, weights, min(spec.imin, 0), max(spec.imax, k))
    if k > spec.imax:
        raise WindowError(f"cannot shift by {k}: window ends at {spec.imax}", needed=k)
    times = tuple(renorm_times(spec, weights, k))
    generator = None
    if spec.generator is not None:
        base = spec.generator
        generator = ShiftedRule(base.family, base.offset + k) if isinstance(base, ShiftedRule) else ShiftedRule(base, k)
    new_spec, new_weights = _shift(spec, weights, k, generator)
    return RenormState(new_spec, new_weights, k, times)


def auto_telescope_cuts(spec: DiagramSpec, weights: WeightPair, K: int, ratio: Fraction = TELESCOPE_MASS_RATIO) -> List[int]:
    """Positive cuts ``0 = m_0 < m_1 < ...`` so each step at least divides total vertex weight by ``1/ratio``."""
    spec, weights = ensure_depth(spec, weights, 0, K)
    rows = vertex_weights(half(spec, 1), half_weights(weights, 1), K)
    mass = [sum(row, Fraction(0)) for row in rows]
    cuts = [0]
    for j in range(1, K + 1):
        if mass[j] <= ratio * mass[cuts[-1]]:
            cuts.append(j)
    return cuts


@dataclass(frozen=True)
class FunctorialityReport:
    k: int
    seed: int
    samples: int
    rectangles_ok: bool
    checked: int
    agreed: int
    skipped: int
    mismatches: Tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.rectangles_ok and not self.mismatches

    def to_dict(self) -> Dict[str, Any]:
        return {
            "success": self.ok,
            "k": self.k,
            "seed": self.seed,
            "samples": self.samples,
            "rectangles_ok": self.rectangles_ok,
            "checked": self.checked,
            "agreed": self.agreed,
            "skipped": self.skipped,
            "mismatches": list(self.mismatches),
        }


class _RegluedSurface:
    """The original surface cut and restacked along its stage-``k`` columns, then deformed by ``t_k``."""

    def __init__(self, spec: DiagramSpec, weights: WeightPair, k: int, K: int, scale: Fraction) -> None:
        pos, neg = half(spec, 1), half(spec, -1)
        hw_plus, hw_minus = half_weights(weights, 1), half_weights(weights, -1)
        self.scale = scale
        self.columns = build_stacks(pos, hw_plus, k)[k].columns
        self.t_plus = compact_iet(pos, hw_plus, K + k)
        self.t_minus = compact_iet(neg, hw_minus, K)
        self.a = _offsets(weights.v0_plus)
        self.b = _offsets(weights.v0_minus)
        self.widths = weights.v0_plus
        self.v0_minus = weights.v0_minus
        # column u as a stack of original-rectangle strips; H[u][m] is the height below level m
        self.H = [_offsets([self.v0_minus[o] for o in col.origins]) for col in self.columns]
        self.level_at: Dict[Fraction, Tuple[int, int]] = {}
        self.bottom_at: Dict[Fraction, int] = {}
        for u, col in enumerate(self.columns):
            for m, (lo, _) in enumerate(col.levels):
                self.level_at[lo] = (u, m)
            self.bottom_at[col.levels[0][0]] = u
        self.rect_x = _offsets([scale * col.width for col in self.columns])
        self.rect_y = _offsets([self._height(u) / scale for u in range(len(self.columns))])

    def _height(self, u: int) -> Fraction:
        return sum((self.v0_minus[o] for o in self.columns[u].origins), Fraction(0))

    def dimensions(self) -> List[Tuple[Fraction, Fraction]]:
        return [(self.scale * col.width, self._height(u) / self.scale) for u, col in enumerate(self.columns)]

    def top_to_bottom(self, X: Fraction) -> Optional[Fraction]:
        u = bisect_right(self.rect_x, X) - 1
        lo, _ = self.columns[u].levels[-1]
        image = apply_iet(self.t_plus, lo + (X - self.rect_x[u]) / self.scale)
        if isinstance(image, UndefinedSignal):
            return None
        i = max(x for x in self.bottom_at if x <= image)
        u2 = self.bottom_at[i]
        return self.rect_x[u2] + (image - i) * self.scale

    def right_to_left(self, Y: Fraction) -> Optional[Fraction]:
        u = bisect_right(self.rect_y, Y) - 1
        y = (Y - self.rect_y[u]) * self.scale
        stack = self.H[u]
        m = bisect_right(stack, y) - 1
        y_local = y - stack[m]
        lo, hi = self.columns[u].levels[m]
        o = self.columns[u].origins[m]
        if hi < self.a[o] + self.widths[o]:
            u2, m2 = self.level_at[hi]
        else:
            image = apply_iet(self.t_minus, self.b[o] + y_local)
            if isinstance(image, UndefinedSignal):
                return None
            o2 = bisect_right(self.b, image) - 1
            y_local = image - self.b[o2]
            u2, m2 = self.level_at[self.a[o2]]
        return self.rect_y[u2] + (self.H[u2][m2] + y_local) / self.scale


def _offsets(values: Sequence[Fraction]) -> List[Fraction]:
    out, acc = [], Fraction(0)
    for v in values:
        out.append(acc)
        acc += v
    return out


def _compare(a_map: IntervalExchange, b_map, coords: Sequence[Fraction], label: str) -> Tuple[int, int, int, List[str]]:
    checked = agreed = skipped = 0
    mismatches: List[str] = []
    for c in coords:
        a = apply_iet(a_map, c)
        b = b_map(c)
        a_undef = isinstance(a, UndefinedSignal)
        if a_undef and b is None:
            skipped += 1
            continue
        checked += 1
        if not a_undef and b is not None and a == b:
            agreed += 1
        else:
            mismatches.append(f"{label} at {fmt_rational(c)}: shifted {fmt_rational(a) if not a_undef else 'undefined'}, "
                              f"restacked {fmt_rational(b) if b is not None else 'undefined'}")
    return checked, agreed, skipped, mismatches


def check_functoriality(spec: DiagramSpec, weights: WeightPair, k: int, samples: int = DEFAULT_SAMPLES,
                        seed: int = DEFAULT_SEED, K: int = 8) -> FunctorialityReport:
    """Compare the surface of ``shift(D, k)`` with the deformed and restacked surface of ``D`` on random rationals."""
    spec, weights = ensure_depth(spec, weights, -K, K + k)
    state = shift(spec, weights, k)
    A = build_surface(state.spec, state.weights, K, neg_depth=K + k)
    B = _RegluedSurface(spec, weights, k, K, state.scale.scale)

    dims_a = [(r.width, r.height) for r in A.rectangles]
    rectangles_ok = dims_a == B.dimensions()

    rng = np.random.default_rng(seed)
    top = [Fraction(int(n), SAMPLE_DENOMINATOR) * A.t_plus.length for n in rng.integers(1, SAMPLE_DENOMINATOR, samples)]
    side = [Fraction(int(n), SAMPLE_DENOMINATOR) * A.t_minus.length for n in rng.integers(1, SAMPLE_DENOMINATOR, samples)]

    with ThreadPoolExecutor(max_workers=MAX_WORKERS) as executor:
        futures = [
            executor.submit(_compare, A.t_plus, B.top_to_bottom, top, "top/bottom"),
            executor.submit(_compare, A.t_minus, B.right_to_left, side, "right/left"),
        ]
        results = [f.result() for f in futures]

    checked = sum(r[0] for r in results)
    agreed = sum(r[1] for r in results)
    skipped = sum(r[2] for r in results)
    mismatches = tuple(m for r in results for m in r[3])
    if skipped:
        ensure_terminal().info(f"Skipped {skipped} sample points lying in undefined top levels")
    return FunctorialityReport(k, seed, samples, rectangles_ok, checked, agreed, skipped, mismatches)
