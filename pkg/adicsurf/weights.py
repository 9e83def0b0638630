"""Weight functions w± on diagrams: axiom checks, vertex weights and cylinder measures."""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from .diagram import DiagramSpec, Edge, EdgeKey, ValidationReport, Violation, half, telescope_with_chains
from .errors import ParameterError, WeightError, WindowError
from .pathspace import FinitePath, periodic_chains, validate_path
from .terminal import ensure_terminal


@dataclass(frozen=True)
class WeightPair:
    """``w+`` on ``V_0`` and positive edges, ``w-`` on ``V_0`` and negative edges (stored edge keys)."""

    v0_plus: Tuple[Fraction, ...]
    w_plus: Mapping[EdgeKey, Fraction] = field(default_factory=dict)
    v0_minus: Tuple[Fraction, ...] = ()
    w_minus: Mapping[EdgeKey, Fraction] = field(default_factory=dict)

    @property
    def has_minus(self) -> bool:
        return bool(self.v0_minus)

    def edge_weight(self, e: Edge) -> Fraction:
        table = self.w_plus if e.level > 0 else self.w_minus
        try:
            return table[e.key]
        except KeyError:
            raise WeightError(f"missing weight on edge {e.key}") from None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "v0_plus": [str(x) for x in self.v0_plus],
            "v0_minus": [str(x) for x in self.v0_minus],
            "edges_plus": len(self.w_plus),
            "edges_minus": len(self.w_minus),
        }


@dataclass(frozen=True)
class HalfWeights:
    """Weights of one half, addressed by edges of that half's own orientation."""

    pair: WeightPair
    sign: int

    @property
    def v0(self) -> Tuple[Fraction, ...]:
        return self.pair.v0_plus if self.sign > 0 else self.pair.v0_minus

    def edge(self, e: Edge) -> Fraction:
        if self.sign > 0:
            table, key = self.pair.w_plus, e.key
        else:
            # the stored s-rank of a negative edge is the half's r-rank
            table, key = self.pair.w_minus, (-e.level, e.dst, e.src, e.r_rank)
        try:
            return table[key]
        except KeyError:
            raise WeightError(f"missing weight on edge {key}") from None


def half_weights(weights: WeightPair, sign: int) -> HalfWeights:
    if sign < 0 and not weights.has_minus:
        raise WeightError("negative half carries no weights")
    return HalfWeights(weights, 1 if sign > 0 else -1)


def ensure_depth(spec: DiagramSpec, weights: WeightPair, lo: int, hi: int) -> Tuple[DiagramSpec, WeightPair]:
    """Return ``(spec, weights)`` regenerated if needed so the window covers ``[lo, hi]``."""
    if spec.covers(lo, hi):
        return spec, weights
    if spec.generator is None:
        raise WindowError(f"window [{spec.imin}, {spec.imax}] does not cover [{lo}, {hi}] and no generator is attached",
                          needed=hi if hi > spec.imax else lo)
    depth, neg_depth = max(hi, spec.imax), max(-lo, -spec.imin)
    ensure_terminal().info(f"Regenerating {spec.generator.describe()} for window [{-neg_depth}, {depth}]")
    return spec.generator.build(depth, neg_depth)


def vertex_weights(half_spec: DiagramSpec, hw: HalfWeights, K: int) -> List[List[Fraction]]:
    """Vertex weights per level ``0..K`` of a singly-infinite half (first in-edge of each vertex)."""
    if K > half_spec.imax:
        raise WindowError(f"depth {K} exceeds window [0, {half_spec.imax}]", needed=K)
    rows = [list(hw.v0)]
    if len(rows[0]) != half_spec.count(0):
        raise WeightError(f"{len(rows[0])} level-0 weights for {half_spec.count(0)} vertices")
    for lvl in range(1, K + 1):
        row = []
        for v in range(half_spec.count(lvl)):
            ins = half_spec.in_edges(lvl, v)
            if not ins:
                raise WeightError(f"vertex {v} of level {lvl} is not reached from level 0")
            row.append(rows[-1][ins[0].src] * hw.edge(ins[0]))
        rows.append(row)
    return rows


def _check_half(half_spec: DiagramSpec, hw: HalfWeights, K: int, name: str,
                decay_threshold: Optional[Fraction]) -> ValidationReport:
    violations: List[Violation] = []
    notes: List[str] = []
    for lvl in range(1, K + 1):
        for e in half_spec.transition(lvl):
            hw.edge(e)  # raises on missing weights

    for v, w in enumerate(hw.v0):
        if w <= 0:
            violations.append(Violation("nonpositive_weight", f"{name}: w(v) = {w} at level 0", level=0, vertex=v))
    for lvl in range(1, K + 1):
        for e in half_spec.transition(lvl):
            if hw.edge(e) <= 0:
                violations.append(Violation("nonpositive_weight", f"{name}: w(e) = {hw.edge(e)} on edge {e.key}", level=lvl, edge=e.key))

    for lvl in range(0, K):
        for v in range(half_spec.count(lvl)):
            total = sum((hw.edge(e) for e in half_spec.out_edges(lvl, v)), Fraction(0))
            if total != 1:
                violations.append(Violation(
                    "outgoing_sum", f"{name}: outgoing weights of vertex {v} at level {lvl} sum to {total}", level=lvl, vertex=v))

    rows = [list(hw.v0)]
    for lvl in range(1, K + 1):
        row: List[Fraction] = []
        for v in range(half_spec.count(lvl)):
            values = {rows[-1][e.src] * hw.edge(e) for e in half_spec.in_edges(lvl, v)}
            if len(values) > 1:
                violations.append(Violation(
                    "path_dependence", f"{name}: paths into vertex {v} at level {lvl} carry weights {sorted(values)}", level=lvl, vertex=v))
            value = min(values) if values else Fraction(0)
            if value <= 0:
                violations.append(Violation("mass_exhausted", f"{name}: vertex {v} at level {lvl} has weight {value}", level=lvl, vertex=v))
            row.append(value)
        rows.append(row)

    if K >= 1:
        chain_vertices = set()
        for ch in periodic_chains(half_spec, K):
            chain_vertices.update((ch.merge_level + i, v) for i, v in enumerate(ch.vertices))
        maxima = []
        for lvl, row in enumerate(rows):
            free = [w for v, w in enumerate(row) if (lvl, v) not in chain_vertices]
            maxima.append(max(free) if free else None)
        seen = [m for m in maxima if m is not None]
        for a, b in zip(seen, seen[1:]):
            if b > a:
                violations.append(Violation("decay", f"{name}: max vertex weight increases from {a} to {b}"))
                break
        if seen:
            notes.append(f"{name}: max minimal-component vertex weight at depth {K} is {seen[-1]}")
            if decay_threshold is not None and seen[-1] > decay_threshold:
                violations.append(Violation("decay", f"{name}: max vertex weight {seen[-1]} above threshold {decay_threshold}"))
    return ValidationReport(tuple(violations), tuple(notes))


def check_weight_conditions(spec: DiagramSpec, weights: WeightPair, K: int,
                            decay_threshold: Optional[Fraction] = None) -> ValidationReport:
    """Exact check of path independence and outgoing normalization to depth ``K``, plus decay surrogate."""
    if K > spec.imax:
        raise WindowError(f"depth {K} exceeds window [{spec.imin}, {spec.imax}]", needed=K)
    report = _check_half(half(spec, 1), half_weights(weights, 1), K, "w+", decay_threshold)
    if weights.has_minus:
        neg = half(spec, -1)
        report = report.merged(_check_half(neg, half_weights(weights, -1), min(K, neg.imax), "w-", None))
        if sum(weights.v0_plus) != 1:
            report = report.merged(ValidationReport((Violation(
                "probability", f"w+ on V_0 sums to {sum(weights.v0_plus)}, not 1", level=0),)))
        area = bi_infinite_mass(weights)
        if area != 1:
            report = report.merged(ValidationReport((Violation(
                "area_normalization", f"sum of w+(v) w-(v) over V_0 is {area}, not 1", level=0),)))
    return report


def telescope_weights(spec: DiagramSpec, weights: WeightPair, cuts: Sequence[int]) -> Tuple[DiagramSpec, WeightPair]:
    """Telescope ``spec`` and carry the weights: a new edge weighs the product along its chain."""
    new_spec, chains = telescope_with_chains(spec, cuts)
    w_plus: Dict[EdgeKey, Fraction] = {}
    w_minus: Dict[EdgeKey, Fraction] = {}
    for key, chain in chains.items():
        value = Fraction(1)
        for e in chain:
            value *= weights.edge_weight(e)
        (w_plus if key[0] > 0 else w_minus)[key] = value
    return new_spec, WeightPair(weights.v0_plus, w_plus, weights.v0_minus, w_minus)


def bi_infinite_mass(weights: WeightPair) -> Fraction:
    if len(weights.v0_plus) != len(weights.v0_minus):
        raise WeightError("w+ and w- disagree on the size of V_0")
    return sum((a * b for a, b in zip(weights.v0_plus, weights.v0_minus)), Fraction(0))


def vertex_weight(spec: DiagramSpec, weights: WeightPair, level: int, vertex: int) -> Fraction:
    """``w(v)`` for a vertex at ``level``; negative levels use ``w-`` on the negative half."""
    sign = 1 if level >= 0 else -1
    half_spec = half(spec, sign)
    depth = abs(level)
    if depth > half_spec.imax:
        raise WindowError(f"level {level} outside window [{spec.imin}, {spec.imax}]", needed=level)
    if not 0 <= vertex < half_spec.count(depth):
        raise ParameterError(f"no vertex {vertex} at level {level}")
    return vertex_weights(half_spec, half_weights(weights, sign), depth)[depth][vertex]


def measure_of_cylinder(spec: DiagramSpec, weights: WeightPair, path: FinitePath) -> Fraction:
    """``w(s(e_1)) * prod w(e_i)`` for a positive-half path from ``V_0``."""
    validate_path(spec, path)
    if not path.edges:
        raise ParameterError("empty path")
    value = weights.v0_plus[path.start]
    for e in path.edges:
        value *= weights.edge_weight(e)
    return value
