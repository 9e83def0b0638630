"""Truncated bi-infinite ordered Bratteli diagrams: validation, incidence matrices, heights, telescoping, welding."""

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ParameterError, WindowError
from .terminal import ensure_terminal

EdgeKey = Tuple[int, int, int, int]


@dataclass(frozen=True)
class Edge:
    """One edge of the stored (bi-infinite) orientation.

    Positive level ``i > 0`` edges run from ``V_{i-1}`` to ``V_i``; negative
    level ``i < 0`` edges run from ``V_i`` to ``V_{i+1}``.  ``r_rank`` ranks the
    edge among edges sharing ``dst``, ``s_rank`` among edges sharing ``src``.
    """

    level: int
    src: int
    dst: int
    r_rank: int
    s_rank: int

    @property
    def key(self) -> EdgeKey:
        return (self.level, self.src, self.dst, self.s_rank)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    level: Optional[int] = None
    vertex: Optional[int] = None
    edge: Optional[EdgeKey] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "code": self.code,
            "message": self.message,
            "level": self.level,
            "vertex": self.vertex,
            "edge": list(self.edge) if self.edge is not None else None,
        }


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[Violation, ...] = ()
    notes: Tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> List[str]:
        return sorted({v.code for v in self.violations})

    def merged(self, other: "ValidationReport") -> "ValidationReport":
        return ValidationReport(self.violations + other.violations, self.notes + other.notes)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "success": self.ok,
            "violations": [v.to_dict() for v in self.violations],
            "notes": list(self.notes),
        }


def edge_level(step: int) -> int:
    """Stored edge level of the transition from level ``step-1`` to ``step``."""
    return step if step > 0 else step - 1


def step_of(level: int) -> int:
    """Inverse of :func:`edge_level`."""
    return level if level > 0 else level + 1


@dataclass(frozen=True)
class DiagramSpec:
    imin: int
    imax: int
    counts: Tuple[int, ...]
    edges: Tuple[Edge, ...]
    generator: Optional[Any] = field(default=None, compare=False, repr=False)

    def count(self, level: int) -> int:
        if not self.imin <= level <= self.imax:
            raise WindowError(f"level {level} outside window [{self.imin}, {self.imax}]", needed=level)
        return self.counts[level - self.imin]

    @property
    def levels(self) -> range:
        return range(self.imin, self.imax + 1)

    @property
    def steps(self) -> range:
        return range(self.imin + 1, self.imax + 1)

    def covers(self, lo: int, hi: int) -> bool:
        return self.imin <= lo and hi <= self.imax

    @cached_property
    def _by_level(self) -> Dict[int, Tuple[Edge, ...]]:
        grouped: Dict[int, List[Edge]] = defaultdict(list)
        for e in self.edges:
            grouped[e.level].append(e)
        return {lvl: tuple(es) for lvl, es in grouped.items()}

    def edges_at(self, level: int) -> Tuple[Edge, ...]:
        return self._by_level.get(level, ())

    def transition(self, step: int) -> Tuple[Edge, ...]:
        """Edges from level ``step-1`` to level ``step``."""
        if not self.imin < step <= self.imax:
            raise WindowError(f"transition into level {step} outside window [{self.imin}, {self.imax}]", needed=step)
        return self.edges_at(edge_level(step))

    @cached_property
    def _in_edges(self) -> Dict[Tuple[int, int], Tuple[Edge, ...]]:
        table: Dict[Tuple[int, int], List[Edge]] = defaultdict(list)
        for e in self.edges:
            table[(step_of(e.level), e.dst)].append(e)
        return {k: tuple(sorted(v, key=lambda e: e.r_rank)) for k, v in table.items()}

    @cached_property
    def _out_edges(self) -> Dict[Tuple[int, int], Tuple[Edge, ...]]:
        table: Dict[Tuple[int, int], List[Edge]] = defaultdict(list)
        for e in self.edges:
            table[(step_of(e.level) - 1, e.src)].append(e)
        return {k: tuple(sorted(v, key=lambda e: e.s_rank)) for k, v in table.items()}

    def in_edges(self, level: int, vertex: int) -> Tuple[Edge, ...]:
        """Edges whose stored range is ``vertex`` at ``level``, in r-order."""
        return self._in_edges.get((level, vertex), ())

    def out_edges(self, level: int, vertex: int) -> Tuple[Edge, ...]:
        """Edges whose stored source is ``vertex`` at ``level``, in s-order."""
        return self._out_edges.get((level, vertex), ())


@dataclass(frozen=True)
class IncidenceMatrix:
    level: int
    matrix: np.ndarray = field(compare=False)

    @property
    def shape(self) -> Tuple[int, int]:
        return tuple(self.matrix.shape)

    def tolist(self) -> List[List[int]]:
        return [[int(x) for x in row] for row in self.matrix]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IncidenceMatrix):
            return NotImplemented
        return self.level == other.level and self.tolist() == other.tolist()


def make_spec(counts: Dict[int, int], edges: Iterable[Edge], generator: Optional[Any] = None) -> DiagramSpec:
    """Build a spec from a level→count map; edges are stored in a canonical order."""
    if not counts:
        raise ParameterError("a diagram needs at least level 0")
    imin, imax = min(counts), max(counts)
    missing = [i for i in range(imin, imax + 1) if i not in counts]
    if missing:
        raise ParameterError(f"levels missing from window: {missing}")
    ordered = tuple(sorted(edges, key=lambda e: (e.level, e.dst, e.r_rank, e.src, e.s_rank)))
    return DiagramSpec(imin, imax, tuple(counts[i] for i in range(imin, imax + 1)), ordered, generator)


def validate_diagram(spec: DiagramSpec) -> ValidationReport:
    violations: List[Violation] = []
    if not spec.imin <= 0 <= spec.imax:
        violations.append(Violation("missing_level_zero", "window does not contain level 0"))
    for i in spec.levels:
        if spec.count(i) < 1:
            violations.append(Violation("empty_level", f"level {i} has no vertices", level=i))

    for e in spec.edges:
        if e.level == 0 or not spec.imin < step_of(e.level) <= spec.imax:
            violations.append(Violation("edge_out_of_window", f"edge at level {e.level} outside window", level=e.level, edge=e.key))

    for step in spec.steps:
        lvl = edge_level(step)
        c_src, c_dst = spec.count(step - 1), spec.count(step)
        in_deg = [0] * c_dst
        out_deg = [0] * c_src
        r_groups: Dict[int, List[int]] = defaultdict(list)
        s_groups: Dict[int, List[int]] = defaultdict(list)
        for e in spec.edges_at(lvl):
            if not (0 <= e.src < c_src and 0 <= e.dst < c_dst):
                violations.append(Violation("vertex_out_of_range", f"edge {e.key} names a missing vertex", level=lvl, edge=e.key))
                continue
            in_deg[e.dst] += 1
            out_deg[e.src] += 1
            r_groups[e.dst].append(e.r_rank)
            s_groups[e.src].append(e.s_rank)
        for v, d in enumerate(in_deg):
            if d == 0:
                violations.append(Violation(
                    "zero_row", f"zero row at level {lvl}: vertex {v} of level {step} receives no edge", level=lvl, vertex=v))
        for v, d in enumerate(out_deg):
            if d == 0:
                violations.append(Violation(
                    "zero_column", f"zero column at level {lvl}: vertex {v} of level {step - 1} emits no edge", level=lvl, vertex=v))
        for v, ranks in r_groups.items():
            if sorted(ranks) != list(range(1, len(ranks) + 1)):
                violations.append(Violation("r_order", f"r-ranks into vertex {v} are {sorted(ranks)}", level=lvl, vertex=v))
        for v, ranks in s_groups.items():
            if sorted(ranks) != list(range(1, len(ranks) + 1)):
                violations.append(Violation("s_order", f"s-ranks out of vertex {v} are {sorted(ranks)}", level=lvl, vertex=v))
    return ValidationReport(tuple(violations))


def ensure_window(spec: DiagramSpec, lo: int, hi: int) -> DiagramSpec:
    """Return ``spec`` or a regenerated spec whose window covers ``[lo, hi]``."""
    if spec.covers(lo, hi):
        return spec
    if spec.generator is None:
        raise WindowError(f"window [{spec.imin}, {spec.imax}] does not cover [{lo}, {hi}] and no generator is attached",
                          needed=hi if hi > spec.imax else lo)
    depth = max(hi, spec.imax)
    neg_depth = max(-lo, -spec.imin)
    ensure_terminal().info(f"Extending window to [{-neg_depth}, {depth}] with {spec.generator.describe()}")
    extended, _ = spec.generator.build(depth, neg_depth)
    return extended


def transition_matrix(spec: DiagramSpec, step: int) -> np.ndarray:
    """Matrix of the transition ``step-1 -> step``, shape ``c_step x c_{step-1}``."""
    m = np.zeros((spec.count(step), spec.count(step - 1)), dtype=object)
    for e in spec.transition(step):
        m[e.dst, e.src] += 1
    return m


def incidence_matrix(spec: DiagramSpec, level: int) -> IncidenceMatrix:
    if level == 0:
        raise WindowError("level 0 carries no edges")
    step = step_of(level)
    if not spec.imin < step <= spec.imax:
        raise WindowError(f"level {level} outside window [{spec.imin}, {spec.imax}]", needed=level)
    return IncidenceMatrix(level, transition_matrix(spec, step))


def heights(spec: DiagramSpec, h0: Sequence[Any], K: int) -> List[Tuple[Any, ...]]:
    """Height vectors ``h^0..h^K`` with ``h^k = F_k h^{k-1}``."""
    if len(h0) != spec.count(0):
        raise ParameterError(f"h0 has length {len(h0)}, level 0 has {spec.count(0)} vertices")
    if any(x <= 0 for x in h0):
        raise ParameterError("h0 entries must be positive")
    spec = ensure_window(spec, min(spec.imin, 0), K)
    h = np.array(list(h0), dtype=object)
    out = [tuple(h.tolist())]
    for k in range(1, K + 1):
        h = transition_matrix(spec, k).dot(h)
        out.append(tuple(h.tolist()))
    return out


def half(spec: DiagramSpec, sign: int) -> DiagramSpec:
    """The singly-infinite positive (``+1``) or negative (``-1``) half in its own orientation."""
    if sign > 0:
        counts = {i: spec.count(i) for i in range(0, spec.imax + 1)}
        return make_spec(counts, (e for e in spec.edges if e.level > 0))
    counts = {j: spec.count(-j) for j in range(0, -spec.imin + 1)}
    flipped = (
        Edge(-e.level, e.dst, e.src, e.s_rank, e.r_rank)
        for e in spec.edges if e.level < 0
    )
    return make_spec(counts, flipped)


def weld(pos: DiagramSpec, neg: DiagramSpec, generator: Optional[Any] = None) -> DiagramSpec:
    """Weld two singly-infinite diagrams along level 0 (vertices identified by rank)."""
    if pos.imin != 0 or neg.imin != 0:
        raise ParameterError("weld expects singly-infinite diagrams starting at level 0")
    if pos.count(0) != neg.count(0):
        raise ParameterError(f"cannot weld: |V+_0|={pos.count(0)} but |V-_0|={neg.count(0)}")
    counts = {i: pos.count(i) for i in range(0, pos.imax + 1)}
    counts.update({-j: neg.count(j) for j in range(1, neg.imax + 1)})
    edges = list(pos.edges)
    edges.extend(Edge(-e.level, e.dst, e.src, e.s_rank, e.r_rank) for e in neg.edges)
    return make_spec(counts, edges, generator)


def restrict(spec: DiagramSpec, lo: int, hi: int) -> DiagramSpec:
    """Restrict the window to ``[lo, hi]`` (``lo <= 0 <= hi``)."""
    if not (lo <= 0 <= hi) or not spec.covers(lo, hi):
        raise WindowError(f"cannot restrict window [{spec.imin}, {spec.imax}] to [{lo}, {hi}]")
    counts = {i: spec.count(i) for i in range(lo, hi + 1)}
    kept = (e for e in spec.edges if lo < step_of(e.level) <= hi)
    return make_spec(counts, kept, spec.generator)


def _segments(spec: DiagramSpec, a: int, b: int) -> Iterator[Tuple[Edge, ...]]:
    """All edge chains from level ``a`` to level ``b`` (``a < b``)."""
    def walk(level: int, vertex: int, prefix: Tuple[Edge, ...]) -> Iterator[Tuple[Edge, ...]]:
        if level == b:
            yield prefix
            return
        for e in spec.out_edges(level, vertex):
            yield from walk(level + 1, e.dst, prefix + (e,))

    for v in range(spec.count(a)):
        yield from walk(a, v, ())


def telescope(spec: DiagramSpec, cuts: Sequence[int]) -> DiagramSpec:
    """Telescope between consecutive ``cuts``; orders compose lexicographically."""
    return telescope_with_chains(spec, cuts)[0]


def telescope_with_chains(spec: DiagramSpec, cuts: Sequence[int]) -> Tuple[DiagramSpec, Dict[EdgeKey, Tuple[Edge, ...]]]:
    """Like :func:`telescope`, also mapping each new edge key to the chain of old edges it replaces."""
    cuts = list(cuts)
    if 0 not in cuts:
        raise ParameterError("telescoping cuts must contain 0")
    if any(b <= a for a, b in zip(cuts, cuts[1:])):
        raise ParameterError("telescoping cuts must be strictly increasing")
    if not spec.covers(cuts[0], cuts[-1]):
        raise WindowError(f"cuts {cuts[0]}..{cuts[-1]} outside window [{spec.imin}, {spec.imax}]")

    zero = cuts.index(0)
    counts = {t - zero: spec.count(c) for t, c in enumerate(cuts)}
    edges: List[Edge] = []
    replaced: Dict[EdgeKey, Tuple[Edge, ...]] = {}
    for t in range(1, len(cuts)):
        a, b = cuts[t - 1], cuts[t]
        chains = list(_segments(spec, a, b))
        by_dst: Dict[int, List[int]] = defaultdict(list)
        by_src: Dict[int, List[int]] = defaultdict(list)
        for idx, chain in enumerate(chains):
            by_dst[chain[-1].dst].append(idx)
            by_src[chain[0].src].append(idx)
        r_rank: Dict[int, int] = {}
        s_rank: Dict[int, int] = {}
        for members in by_dst.values():
            # the edge nearest the range is the most significant
            members.sort(key=lambda i: tuple(e.r_rank for e in reversed(chains[i])))
            r_rank.update({i: n + 1 for n, i in enumerate(members)})
        for members in by_src.values():
            members.sort(key=lambda i: tuple(e.s_rank for e in chains[i]))
            s_rank.update({i: n + 1 for n, i in enumerate(members)})
        lvl = edge_level(t - zero)
        for i, chain in enumerate(chains):
            e = Edge(lvl, chain[0].src, chain[-1].dst, r_rank[i], s_rank[i])
            edges.append(e)
            replaced[e.key] = chain
    return make_spec(counts, edges), replaced


def stationary_period(spec: DiagramSpec, first: int = 1, min_repeats: int = 2) -> Optional[int]:
    """Smallest period P such that positive transitions ``first..imax`` repeat with period P."""
    steps = list(range(first, spec.imax + 1))
    if not steps:
        return None

    def signature(step: int) -> Tuple[Any, ...]:
        return (
            spec.count(step - 1),
            spec.count(step),
            tuple(sorted((e.src, e.dst, e.r_rank, e.s_rank) for e in spec.transition(step))),
        )

    sigs = [signature(s) for s in steps]
    for period in range(1, len(sigs) // min_repeats + 1):
        if all(sigs[i] == sigs[i - period] for i in range(period, len(sigs))):
            return period
    return None
