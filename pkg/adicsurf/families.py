"""Parameterized generators for the worked example diagrams."""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .diagram import DiagramSpec, Edge, EdgeKey, make_spec, weld
from .errors import ParameterError
from .exact_utils import parse_rational
from .sequences import IntSequence, parse_sequence
from .weights import WeightPair


@dataclass
class _Half:
    """One singly-infinite half in its own orientation, with weights keyed by half edge keys."""

    counts: List[int]
    edges: List[Edge] = field(default_factory=list)
    weights: Dict[EdgeKey, Fraction] = field(default_factory=dict)
    v0: Tuple[Fraction, ...] = ()

    def add(self, level: int, src: int, dst: int, r: int, s: int, w: Fraction) -> None:
        e = Edge(level, src, dst, r, s)
        self.edges.append(e)
        self.weights[e.key] = w

    def spec(self) -> DiagramSpec:
        return make_spec(dict(enumerate(self.counts)), self.edges)


@dataclass(frozen=True)
class FamilyParams:
    """A named family with its textual parameters; also the window generator of the specs it builds."""

    name: str
    args: Tuple[str, ...] = ()

    def describe(self) -> str:
        return " ".join((self.name,) + self.args)

    def build(self, depth: int, neg_depth: Optional[int] = None) -> Tuple[DiagramSpec, WeightPair]:
        try:
            builder = FAMILIES[self.name]
        except KeyError:
            raise ParameterError(f"unknown family {self.name!r}; known: {', '.join(sorted(FAMILIES))}") from None
        if depth < 0:
            raise ParameterError("depth must be nonnegative")
        neg_depth = depth if neg_depth is None else neg_depth
        pos, neg = builder(self.args, depth, neg_depth)
        return _assemble(pos, neg, self)

    def base_factor(self) -> "FamilyParams":
        """Probability-space base of a tower construction (the family itself otherwise)."""
        if self.name == "hajian_kakutani":
            return FamilyParams("odometer", ("2",))
        return self


def generate(family: FamilyParams, depth: int, neg_depth: Optional[int] = None) -> Tuple[DiagramSpec, WeightPair]:
    return family.build(depth, neg_depth)


def parse_family(words: Sequence[str]) -> FamilyParams:
    if not words:
        raise ParameterError("missing family name")
    name = words[0]
    if name not in FAMILIES:
        raise ParameterError(f"unknown family {name!r}; known: {', '.join(sorted(FAMILIES))}")
    return FamilyParams(name, tuple(words[1:]))


def _assemble(pos: _Half, neg: _Half, generator: FamilyParams) -> Tuple[DiagramSpec, WeightPair]:
    spec = weld(pos.spec(), neg.spec(), generator)
    w_minus = {(-e.level, e.dst, e.src, e.r_rank): neg.weights[e.key] for e in neg.edges}
    return spec, WeightPair(pos.v0, dict(pos.weights), neg.v0, w_minus)


def _identity_half(c0: int, depth: int) -> _Half:
    half = _Half([c0] * (depth + 1), v0=tuple(Fraction(1) for _ in range(c0)))
    for k in range(1, depth + 1):
        for v in range(c0):
            half.add(k, v, v, 1, 1, Fraction(1))
    return half


def _arg(args: Sequence[str], i: int, default: Optional[str], name: str) -> str:
    if i < len(args):
        return args[i]
    if default is None:
        raise ParameterError(f"missing parameter {name}")
    return default


def _int_arg(args: Sequence[str], i: int, default: Optional[str], name: str, minimum: int) -> int:
    raw = _arg(args, i, default, name)
    try:
        value = int(raw)
    except ValueError:
        raise ParameterError(f"{name} must be an integer, got {raw!r}") from None
    if value < minimum:
        raise ParameterError(f"{name} must be >= {minimum}, got {value}")
    return value


def _seq_value(seq: IntSequence, k: int, name: str) -> int:
    value = seq(k)
    if value < 1:
        raise ParameterError(f"{name}_{k} = {value} must be >= 1")
    return value


def _odometer_half(p: int, depth: int) -> _Half:
    half = _Half([1] * (depth + 1), v0=(Fraction(1),))
    for k in range(1, depth + 1):
        for j in range(1, p + 1):
            half.add(k, 0, 0, j, j, Fraction(1, p))
    return half


def _odometer(args, depth, neg_depth):
    p = _int_arg(args, 0, "2", "p", 2)
    return _odometer_half(p, depth), _identity_half(1, neg_depth)


def _chamanara(args, depth, neg_depth):
    p = _int_arg(args, 0, "2", "p", 2)
    return _odometer_half(p, depth), _odometer_half(p, neg_depth)


def _disjoint(args, depth, neg_depth):
    ps = (_int_arg(args, 0, "2", "p", 2), _int_arg(args, 1, "3", "q", 2))
    half = _Half([2] * (depth + 1), v0=(Fraction(1, 2), Fraction(1, 2)))
    for k in range(1, depth + 1):
        for v, p in enumerate(ps):
            for j in range(1, p + 1):
                half.add(k, v, v, j, j, Fraction(1, p))
    return half, _identity_half(2, neg_depth)


def _spacer_half(depth: int, cuts: Callable[[int], int], spacers: Callable[[int, int], int],
                 main_width: Fraction, exhaustible: bool = False) -> _Half:
    """Rank-one cutting and stacking: vertex 0 is the main column, vertex 1 the spacer reservoir."""
    if not 0 < main_width < 1:
        raise ParameterError(f"main column width must lie in (0, 1), got {main_width}")
    half = _Half([2] * (depth + 1), v0=(main_width, 1 - main_width))
    ell, reservoir = main_width, 1 - main_width
    for n in range(1, depth + 1):
        r = cuts(n)
        counts = [spacers(n, j) for j in range(1, r + 1)]
        if any(c < 0 for c in counts):
            raise ParameterError(f"negative spacer count at stage {n}")
        ell = ell / r
        total = sum(counts)
        to_main = ell / reservoir if reservoir > 0 else Fraction(1, 2)
        to_spacer = 1 - total * to_main
        if to_spacer <= 0 and not exhaustible:
            raise ParameterError(f"spacer reservoir exhausted at stage {n}; use a smaller main column width")
        reservoir -= total * ell
        rank, s_spacer = 1, 1
        for j, count in enumerate(counts, start=1):
            half.add(n, 0, 0, rank, j, Fraction(1, r))
            rank += 1
            for _ in range(count):
                half.add(n, 1, 0, rank, s_spacer, to_main)
                rank += 1
                s_spacer += 1
        half.add(n, 1, 1, 1, s_spacer, to_spacer)
    return half


def _chacon(args, depth, neg_depth):
    pattern = (0, 1, 0)
    pos = _spacer_half(depth, lambda n: 3, lambda n, j: pattern[j - 1], Fraction(2, 3))
    return pos, _identity_half(2, neg_depth)


def _staircase(args, depth, neg_depth):
    r_rule = parse_sequence(_arg(args, 0, "k+1", "r"))
    s_rule = parse_sequence(_arg(args, 1, "k", "s"))
    main_width = parse_rational(_arg(args, 2, "1/5", "main_width"))
    pos = _spacer_half(depth, lambda n: _seq_value(r_rule, n, "r"), lambda n, j: s_rule(j), main_width)
    return pos, _identity_half(2, neg_depth)


def _hajian_kakutani(args, depth, neg_depth):
    # tower over the dyadic odometer; the spacer reservoir runs dry at stage 2
    pos = _spacer_half(depth, lambda n: 2, lambda n, j: 2 ** (n - 1) if j == 2 else 0, Fraction(1, 2), exhaustible=True)
    return pos, _identity_half(2, neg_depth)


def _pascal(args, depth, neg_depth):
    p = parse_rational(_arg(args, 0, "1/2", "p"))
    if not 0 < p < 1:
        raise ParameterError(f"pascal weight p must lie in (0, 1), got {p}")
    half = _Half([i + 1 for i in range(depth + 1)], v0=(Fraction(1),))
    for i in range(1, depth + 1):
        for k in range(i + 1):
            if k >= 1:
                half.add(i, k - 1, k, 1, 2, 1 - p)
            if k <= i - 1:
                half.add(i, k, k, 2 if k >= 1 else 1, 1, p)
    return half, _identity_half(1, neg_depth)


def _symmetric_layer(half: _Half, level: int, p: int, n: int) -> None:
    weight = Fraction(1, n + p - 1)
    r_next = [1] * p
    for src in range(p):
        s = 1
        for dst in range(p):
            for _ in range(n if dst == src else 1):
                half.add(level, src, dst, r_next[dst], s, weight)
                r_next[dst] += 1
                s += 1


def _symmetric(args, depth, neg_depth):
    p = _int_arg(args, 0, "2", "p", 1)
    n_rule = parse_sequence(_arg(args, 1, "2", "n"))
    root = _arg(args, 2, "single", "root")
    if root == "single":
        half = _Half([1] + [p] * depth, v0=(Fraction(1),))
        if depth >= 1:
            for dst in range(p):
                half.add(1, 0, dst, 1, dst + 1, Fraction(1, p))
        for level in range(2, depth + 1):
            _symmetric_layer(half, level, p, _seq_value(n_rule, level - 1, "n"))
        return half, _identity_half(1, neg_depth)
    if root == "full":
        half = _Half([p] * (depth + 1), v0=tuple(Fraction(1, p) for _ in range(p)))
        for level in range(1, depth + 1):
            _symmetric_layer(half, level, p, _seq_value(n_rule, level, "n"))
        neg = _identity_half(p, neg_depth)
        return half, neg
    raise ParameterError(f"symmetric root must be 'single' or 'full', got {root!r}")


def _explosive(args, depth, neg_depth):
    p_rule = parse_sequence(_arg(args, 0, "k+1", "p"))
    n_rule = parse_sequence(_arg(args, 1, "2", "n"))
    counts = [1] + [_seq_value(p_rule, k, "p") for k in range(1, depth + 1)]
    half = _Half(counts, v0=(Fraction(1),))
    if depth >= 1:
        for dst in range(counts[1]):
            half.add(1, 0, dst, 1, dst + 1, Fraction(1, counts[1]))
    for k in range(2, depth + 1):
        n = _seq_value(n_rule, k - 1, "n")
        weight = Fraction(1, n * counts[k])
        for dst in range(counts[k]):
            r = 1
            for src in range(counts[k - 1]):
                for m in range(n):
                    half.add(k, src, dst, r, dst * n + m + 1, weight)
                    r += 1
    return half, _identity_half(1, neg_depth)


def _column_list(raw: str, name: str, parse) -> List:
    try:
        values = [parse(x) for x in raw.split(",") if x.strip()]
    except (ValueError, ParameterError):
        raise ParameterError(f"bad {name} list: {raw!r}") from None
    if not values:
        raise ParameterError(f"empty {name} list")
    return values


def _initial_columns(args) -> Tuple[List[int], List[Fraction]]:
    heights = _column_list(_arg(args, 0, "1,1", "heights"), "heights", int)
    widths = _column_list(_arg(args, 1, "1/2,1/2", "widths"), "widths", parse_rational)
    if len(heights) != len(widths):
        raise ParameterError("heights and widths must list the same columns")
    if any(h < 1 for h in heights) or any(w <= 0 for w in widths):
        raise ParameterError("column heights and widths must be positive")
    if sum(h * w for h, w in zip(heights, widths)) != 1:
        raise ParameterError("initial columns must satisfy sum(h * w) = 1")
    return heights, widths


def _independent_cas(args, depth, neg_depth):
    heights, widths = _initial_columns(args)
    if len(set(widths)) != 1:
        raise ParameterError("independent stacking needs columns of equal width")
    q = len(heights)
    if max(heights) > 1 and depth < 1:
        raise ParameterError("depth must be at least 1 when initial columns are taller than 1")
    if max(heights) > 1:
        # preliminary level: one level-0 vertex per interval, stacked into the initial columns
        v0 = tuple(w for h, w in zip(heights, widths) for _ in range(h))
        half = _Half([len(v0), q], v0=v0)
        src = 0
        for col, h in enumerate(heights):
            for r in range(1, h + 1):
                half.add(1, src, col, r, 1, Fraction(1))
                src += 1
        start = 1
    else:
        half = _Half([q], v0=tuple(widths))
        start = 0
    columns = q
    for level in range(start + 1, depth + 1):
        half.counts.append(columns * columns)
        weight = Fraction(1, 2 * columns)
        for i in range(columns):
            for j in range(columns):
                dst = i * columns + j
                half.add(level, i, dst, 1, j + 1, weight)
                half.add(level, j, dst, 2, columns + i + 1, weight)
        columns *= columns
    return half, _identity_half(len(half.v0), neg_depth)


def _bowman(args, depth, neg_depth):
    # TODO: add the edge multiset of the Arnoux-Yoccoz-Bowman diagram, eventually stationary under a 2x / (1/2) automorphism
    raise ParameterError("the bowman family has no published edge data; it cannot be generated")


def shields_entropy(heights: Sequence[int], widths: Sequence[Fraction]) -> Tuple[Fraction, int, float]:
    """``(w(C_0), q_0, w(C_0) log q_0)`` for the initial columns of an independent cutting and stacking."""
    heights, widths = list(heights), [Fraction(w) for w in widths]
    if not heights or len(heights) != len(widths):
        raise ParameterError("heights and widths must list the same, nonempty columns")
    if any(h < 1 for h in heights) or any(w <= 0 for w in widths):
        raise ParameterError("column heights and widths must be positive")
    if sum(h * w for h, w in zip(heights, widths)) != 1:
        raise ParameterError("initial columns must satisfy sum(h * w) = 1")
    total = sum(widths, Fraction(0))
    q0 = len(heights)
    return total, q0, float(total) * math.log(q0)


FAMILIES: Dict[str, Callable] = {
    "odometer": _odometer,
    "chamanara": _chamanara,
    "disjoint": _disjoint,
    "chacon": _chacon,
    "staircase": _staircase,
    "hajian_kakutani": _hajian_kakutani,
    "pascal": _pascal,
    "symmetric": _symmetric,
    "explosive": _explosive,
    "independent_cas": _independent_cas,
    "bowman": _bowman,
}
