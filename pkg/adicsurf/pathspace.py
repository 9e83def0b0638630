"""Finite paths, the Vershik successor, extremal paths and the component decomposition."""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Set, Tuple, Union

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .config import COMPONENT_LOOKAHEAD, COMPONENT_TAIL_FRACTION
from .diagram import DiagramSpec, Edge, ensure_window, stationary_period
from .errors import ParameterError, WindowError


@dataclass(frozen=True)
class FinitePath:
    """Edges ``e_1..e_n`` of the positive orientation, starting at level ``start_level``."""

    edges: Tuple[Edge, ...]
    start_level: int = 0

    @property
    def depth(self) -> int:
        return len(self.edges)

    @property
    def start(self) -> int:
        return self.edges[0].src if self.edges else -1

    @property
    def terminal(self) -> Tuple[int, int]:
        if not self.edges:
            raise ParameterError("empty path has no terminal vertex")
        return (self.start_level + len(self.edges), self.edges[-1].dst)

    def digits(self) -> str:
        ranks = [e.r_rank for e in self.edges]
        if all(r < 10 for r in ranks):
            return "".join(str(r) for r in ranks)
        return ".".join(str(r) for r in ranks)


@dataclass(frozen=True)
class MaximalSignal:
    path: FinitePath


@dataclass(frozen=True)
class PeriodicChain:
    terminal: int
    merge_level: int
    merge_vertex: int
    period: int
    vertices: Tuple[int, ...]  # chain vertex at levels merge_level..depth


@dataclass(frozen=True)
class Component:
    kind: str  # "minimal" | "periodic"
    terminals: Tuple[int, ...]
    supports: Dict[int, Tuple[int, ...]] = field(compare=False)
    merge_level: Optional[int] = None
    merge_vertex: Optional[int] = None
    period: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "terminals": list(self.terminals),
            "supports": {str(k): list(v) for k, v in sorted(self.supports.items())},
            "merge_level": self.merge_level,
            "merge_vertex": self.merge_vertex,
            "period": self.period,
        }


@dataclass(frozen=True)
class ComponentDecomposition:
    depth: int
    components: Tuple[Component, ...]

    @property
    def minimal(self) -> List[Component]:
        return [c for c in self.components if c.kind == "minimal"]

    @property
    def periodic(self) -> List[Component]:
        return [c for c in self.components if c.kind == "periodic"]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "depth": self.depth,
            "as_of_depth": self.depth,
            "minimal": len(self.minimal),
            "periodic": len(self.periodic),
            "components": [c.to_dict() for c in self.components],
        }


@dataclass(frozen=True)
class ExtremalPaths:
    depth: int
    minimal: Tuple[FinitePath, ...]
    maximal: Tuple[FinitePath, ...]
    extendable_min: int
    extendable_max: int

    @property
    def balanced(self) -> bool:
        return self.extendable_min == self.extendable_max


def _check_depth(spec: DiagramSpec, depth: int) -> None:
    if depth < 0 or depth > spec.imax:
        raise WindowError(f"depth {depth} outside window [0, {spec.imax}]", needed=depth)


def validate_path(spec: DiagramSpec, path: FinitePath) -> None:
    """Raise :class:`ParameterError` unless ``path`` is a chain of in-window edges."""
    if path.start_level != 0:
        raise ParameterError("paths must start at level 0")
    _check_depth(spec, path.depth)
    for i, e in enumerate(path.edges, start=1):
        if e.level != i or e not in spec.in_edges(i, e.dst):
            raise ParameterError(f"edge {i} of the path is not an edge of level {i}")
        if i > 1 and path.edges[i - 2].dst != e.src:
            raise ParameterError(f"edges {i - 1} and {i} are not adjacent")


def minimal_path_into(spec: DiagramSpec, level: int, vertex: int) -> FinitePath:
    edges: List[Edge] = []
    for lvl in range(level, 0, -1):
        e = spec.in_edges(lvl, vertex)[0]
        edges.append(e)
        vertex = e.src
    return FinitePath(tuple(reversed(edges)))


def maximal_path_into(spec: DiagramSpec, level: int, vertex: int) -> FinitePath:
    edges: List[Edge] = []
    for lvl in range(level, 0, -1):
        e = spec.in_edges(lvl, vertex)[-1]
        edges.append(e)
        vertex = e.src
    return FinitePath(tuple(reversed(edges)))


def path_counts(spec: DiagramSpec, depth: int) -> List[List[int]]:
    """Number of paths from ``V_0`` to every vertex, per level ``0..depth``."""
    _check_depth(spec, depth)
    counts = [[1] * spec.count(0)]
    for lvl in range(1, depth + 1):
        row = [0] * spec.count(lvl)
        for e in spec.transition(lvl):
            row[e.dst] += counts[-1][e.src]
        counts.append(row)
    return counts


def iter_paths(spec: DiagramSpec, depth: int) -> Iterator[FinitePath]:
    """All depth-``depth`` paths, grouped by terminal vertex, each group in increasing r-order."""
    _check_depth(spec, depth)

    def into(level: int, vertex: int) -> Iterator[Tuple[Edge, ...]]:
        if level == 0:
            yield ()
            return
        for e in spec.in_edges(level, vertex):
            for prefix in into(level - 1, e.src):
                yield prefix + (e,)

    for v in range(spec.count(depth)):
        for edges in into(depth, v):
            yield FinitePath(edges)


def iter_path_chunks(spec: DiagramSpec, depth: int, chunk_size: int = 1024) -> Iterator[List[FinitePath]]:
    chunk: List[FinitePath] = []
    for p in iter_paths(spec, depth):
        chunk.append(p)
        if len(chunk) >= chunk_size:
            yield chunk
            chunk = []
    if chunk:
        yield chunk


def _single_child(spec: DiagramSpec, step: int, vertex: int) -> Optional[int]:
    for e in spec.out_edges(step - 1, vertex):
        if len(spec.in_edges(step, e.dst)) == 1:
            return e.dst
    return None


def _tail_period(spec: DiagramSpec) -> Optional[Tuple[int, int]]:
    """``(first, period)`` of the earliest stationary tail of the positive transitions, if the window shows one."""
    for first in range(1, spec.imax):
        period = stationary_period(spec, first)
        if period is not None:
            return first, period
    return None


def _persists(spec: DiagramSpec, depth: int, vertex: int, tail: Optional[Tuple[int, int]]) -> bool:
    """Whether an in-degree-one ray continues from ``vertex`` at ``depth`` through the window and its stationary tail."""
    for step in range(depth + 1, spec.imax + 1):
        vertex = _single_child(spec, step, vertex)
        if vertex is None:
            return False
    if tail is None:
        return depth < spec.imax
    _, period = tail
    step = spec.imax + 1 - period
    seen: Set[Tuple[int, int]] = set()
    while (step, vertex) not in seen:
        seen.add((step, vertex))
        vertex = _single_child(spec, step, vertex)
        if vertex is None:
            return False
        step = step + 1 if step < spec.imax else spec.imax + 1 - period
    return True


def periodic_chains(spec: DiagramSpec, depth: int) -> List[PeriodicChain]:
    """Chains of in-degree-one vertices ending at level ``depth`` that persist beyond it (finite tail classes).

    A chain counts only if it continues through every window level past ``depth`` and, when the window
    shows a stationary tail, through that tail as well. With no level past ``depth`` and no stationary
    tail nothing is certified.
    """
    _check_depth(spec, depth)
    if depth == 0:
        return []
    counts = path_counts(spec, depth)
    tail = _tail_period(spec)
    chains: List[PeriodicChain] = []
    for u in range(spec.count(depth)):
        level, v = depth, u
        trail = [u]
        while level > 0 and len(spec.in_edges(level, v)) == 1:
            v = spec.in_edges(level, v)[0].src
            level -= 1
            trail.append(v)
        if level < depth and _persists(spec, depth, u, tail):
            chains.append(PeriodicChain(u, level, v, counts[level][v], tuple(reversed(trail))))
    return chains


def with_lookahead(spec: DiagramSpec, depth: int, levels: int = COMPONENT_LOOKAHEAD) -> DiagramSpec:
    """``spec``, regenerated when it has a generator so that ``levels`` positive levels lie past ``depth``."""
    if spec.generator is None:
        return spec
    return ensure_window(spec, min(spec.imin, 0), depth + levels)


def _ancestors(spec: DiagramSpec, level: int, vertices: Set[int]) -> Dict[int, Tuple[int, ...]]:
    out: Dict[int, Tuple[int, ...]] = {level: tuple(sorted(vertices))}
    current = set(vertices)
    for lvl in range(level, 0, -1):
        current = {e.src for v in current for e in spec.in_edges(lvl, v)}
        out[lvl - 1] = tuple(sorted(current))
    return out


def components(spec: DiagramSpec, depth: int, tail_fraction=COMPONENT_TAIL_FRACTION) -> ComponentDecomposition:
    """Minimal and periodic components of the positive half, as of ``depth``."""
    if depth < 2:
        raise ParameterError("components need depth >= 2")
    _check_depth(spec, depth)
    chains = periodic_chains(spec, depth)
    on_chain: Set[Tuple[int, int]] = set()
    for ch in chains:
        for offset, v in enumerate(ch.vertices):
            on_chain.add((ch.merge_level + offset, v))

    lo = depth - max(1, math.ceil(depth * tail_fraction))
    nodes = [(lvl, v) for lvl in range(lo, depth + 1) for v in range(spec.count(lvl)) if (lvl, v) not in on_chain]
    index = {node: i for i, node in enumerate(nodes)}
    rows, cols = [], []
    for lvl in range(lo + 1, depth + 1):
        for e in spec.transition(lvl):
            a, b = index.get((lvl - 1, e.src)), index.get((lvl, e.dst))
            if a is not None and b is not None:
                rows.append(a)
                cols.append(b)
    n = len(nodes)
    labels: List[int] = []
    if n:
        graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
        _, labels = connected_components(graph, directed=False)

    groups: Dict[int, List[Tuple[int, int]]] = {}
    for node, label in zip(nodes, labels):
        groups.setdefault(int(label), []).append(node)

    found: List[Component] = []
    for members in groups.values():
        terminals = sorted(v for lvl, v in members if lvl == depth)
        if not terminals:
            continue
        supports: Dict[int, Tuple[int, ...]] = {}
        for lvl in range(lo, depth + 1):
            supports[lvl] = tuple(sorted(v for l2, v in members if l2 == lvl))
        below = _ancestors(spec, lo, set(supports[lo])) if supports[lo] else {}
        for lvl, vs in below.items():
            supports.setdefault(lvl, vs)
        found.append(Component("minimal", tuple(terminals), supports))
    for ch in chains:
        supports = {ch.merge_level + i: (v,) for i, v in enumerate(ch.vertices)}
        for lvl, vs in _ancestors(spec, ch.merge_level, {ch.merge_vertex}).items():
            supports.setdefault(lvl, vs)
        found.append(Component("periodic", (ch.terminal,), supports, ch.merge_level, ch.merge_vertex, ch.period))
    found.sort(key=lambda c: (c.terminals[0], c.kind))
    return ComponentDecomposition(depth, tuple(found))


def successor(spec: DiagramSpec, path: FinitePath) -> Union[FinitePath, MaximalSignal]:
    """Depth-preserving Vershik successor (lexicographic in the r-order)."""
    validate_path(spec, path)
    edges = path.edges
    for i, e in enumerate(edges):
        level = i + 1
        siblings = spec.in_edges(level, e.dst)
        if e.r_rank < len(siblings):
            bumped = siblings[e.r_rank]
            prefix = minimal_path_into(spec, level - 1, bumped.src)
            return FinitePath(prefix.edges + (bumped,) + edges[i + 1:])
    if path.depth and any(ch.terminal == path.terminal[1] for ch in periodic_chains(spec, path.depth)):
        return minimal_path_into(spec, *path.terminal)
    return MaximalSignal(path)


def min_max_paths(spec: DiagramSpec, depth: int) -> ExtremalPaths:
    _check_depth(spec, depth)
    minimal = tuple(minimal_path_into(spec, depth, v) for v in range(spec.count(depth)))
    maximal = tuple(maximal_path_into(spec, depth, v) for v in range(spec.count(depth)))

    def extendable(pick_max: bool) -> int:
        ok = [True] * spec.count(spec.imax)
        for lvl in range(spec.imax - 1, depth - 1, -1):
            row = [False] * spec.count(lvl)
            for e in spec.transition(lvl + 1):
                siblings = spec.in_edges(lvl + 1, e.dst)
                extreme = e.r_rank == (len(siblings) if pick_max else 1)
                if extreme and ok[e.dst]:
                    row[e.src] = True
            ok = row
        return sum(ok)

    return ExtremalPaths(depth, minimal, maximal, extendable(False), extendable(True))
