"""Reader and writer for the line-oriented ``.bdg`` diagram format.

A document is either a family shorthand::

    family chacon depth 8

or an explicit window::

    levels -1 2
    level -1 1
    level 0 1
    edge 1 0 0 1 1 w=1/2
    w0+ 0 1
    w0- 0 1

Edges are written in stored orientation (``edge <level> <src> <dst> <r-rank> <s-rank>``).
Blank lines and ``#`` comments are ignored.
"""

from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from .diagram import DiagramSpec, Edge, EdgeKey, make_spec
from .errors import AdicSurfError, DiagramFormatError
from .exact_utils import fmt_rational, parse_rational
from .families import FamilyParams, generate, parse_family
from .weights import WeightPair

Parsed = Tuple[DiagramSpec, Optional[WeightPair]]


def _int(word: str, what: str, errors: List[str], lineno: int) -> Optional[int]:
    try:
        return int(word)
    except ValueError:
        errors.append(f"line {lineno}: {what} must be an integer, got {word!r}")
        return None


def _rational(word: str, what: str, errors: List[str], lineno: int) -> Optional[Fraction]:
    try:
        return parse_rational(word)
    except AdicSurfError:
        errors.append(f"line {lineno}: {what} must be a rational p/q, got {word!r}")
        return None


def _family(words: List[str], lineno: int) -> Parsed:
    errors: List[str] = []
    rest = words[1:]
    neg_depth = None
    if len(rest) >= 2 and rest[-2] == "negdepth":
        neg_depth = _int(rest[-1], "negdepth", errors, lineno)
        rest = rest[:-2]
    if len(rest) < 3 or rest[-2] != "depth":
        errors.append(f"line {lineno}: expected 'family <name> <params...> depth <K>'")
        raise DiagramFormatError(errors)
    depth = _int(rest[-1], "depth", errors, lineno)
    if errors:
        raise DiagramFormatError(errors)
    try:
        return generate(parse_family(rest[:-2]), depth, neg_depth)
    except AdicSurfError as exc:
        raise DiagramFormatError([f"line {lineno}: {exc}"]) from exc


def parse_bdg(text: str) -> Parsed:
    """Parse a document into ``(spec, weights)``; weights are None when no ``w0+`` line is present."""
    errors: List[str] = []
    window: Optional[Tuple[int, int]] = None
    counts: Dict[int, int] = {}
    edges: List[Edge] = []
    keys: Dict[EdgeKey, int] = {}
    edge_weights: Dict[EdgeKey, Fraction] = {}
    v0: Dict[str, Dict[int, Fraction]] = {"w0+": {}, "w0-": {}}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        kind = words[0]
        if kind == "family":
            if window is not None or counts or edges:
                errors.append(f"line {lineno}: family shorthand cannot be mixed with explicit levels")
                continue
            return _family(words, lineno)
        if kind == "levels":
            if len(words) != 3:
                errors.append(f"line {lineno}: expected 'levels <imin> <imax>'")
                continue
            lo, hi = _int(words[1], "imin", errors, lineno), _int(words[2], "imax", errors, lineno)
            if lo is not None and hi is not None:
                if not lo <= 0 <= hi:
                    errors.append(f"line {lineno}: window [{lo}, {hi}] must contain level 0")
                window = (lo, hi)
        elif kind == "level":
            if len(words) != 3:
                errors.append(f"line {lineno}: expected 'level <i> <count>'")
                continue
            i, c = _int(words[1], "level", errors, lineno), _int(words[2], "count", errors, lineno)
            if i is None or c is None:
                continue
            if window is None:
                errors.append(f"line {lineno}: 'level' before the 'levels' header")
            elif not window[0] <= i <= window[1]:
                errors.append(f"line {lineno}: level {i} outside window [{window[0]}, {window[1]}]")
            elif i in counts:
                errors.append(f"line {lineno}: level {i} declared twice")
            elif c < 1:
                errors.append(f"line {lineno}: level {i} needs at least one vertex")
            else:
                counts[i] = c
        elif kind == "edge":
            weight_word = words[6] if len(words) == 7 else None
            if len(words) not in (6, 7) or (weight_word is not None and not weight_word.startswith("w=")):
                errors.append(f"line {lineno}: expected 'edge <level> <src> <dst> <r-rank> <s-rank> [w=<p>/<q>]'")
                continue
            nums = [_int(w, name, errors, lineno) for w, name in zip(words[1:6], ("level", "src", "dst", "r-rank", "s-rank"))]
            if None in nums:
                continue
            e = Edge(*nums)
            if e.level == 0:
                errors.append(f"line {lineno}: edges have nonzero levels")
                continue
            if e.key in keys:
                errors.append(f"line {lineno}: duplicate edge {e.key} (first on line {keys[e.key]})")
                continue
            keys[e.key] = lineno
            edges.append(e)
            if weight_word is not None:
                w = _rational(weight_word[2:], "edge weight", errors, lineno)
                if w is not None:
                    edge_weights[e.key] = w
        elif kind in v0:
            if len(words) != 3:
                errors.append(f"line {lineno}: expected '{kind} <vertex> <p>/<q>'")
                continue
            v, w = _int(words[1], "vertex", errors, lineno), _rational(words[2], "weight", errors, lineno)
            if v is not None and w is not None:
                v0[kind][v] = w
        else:
            errors.append(f"line {lineno}: unknown keyword {kind!r}")

    if window is None and not errors:
        errors.append("missing 'levels <imin> <imax>' header")
    if window is not None:
        missing = [i for i in range(window[0], window[1] + 1) if i not in counts]
        if missing:
            errors.append(f"levels without a 'level' line: {missing}")
    if errors:
        raise DiagramFormatError(errors)

    spec = make_spec(counts, edges)
    for kind, table in v0.items():
        if table and sorted(table) != list(range(spec.count(0))):
            errors.append(f"{kind} must give one weight per level-0 vertex 0..{spec.count(0) - 1}")
    if errors:
        raise DiagramFormatError(errors)
    if not v0["w0+"]:
        return spec, None

    w_plus = {k: w for k, w in edge_weights.items() if k[0] > 0}
    w_minus = {k: w for k, w in edge_weights.items() if k[0] < 0}
    plus = tuple(v0["w0+"][v] for v in range(spec.count(0)))
    minus = tuple(v0["w0-"][v] for v in range(spec.count(0))) if v0["w0-"] else ()
    return spec, WeightPair(plus, w_plus, minus, w_minus)


def load_bdg(path: Union[str, Path]) -> Parsed:
    return parse_bdg(Path(path).read_text(encoding="utf-8"))


def format_bdg(spec: DiagramSpec, weights: Optional[WeightPair] = None, shorthand: bool = False) -> str:
    """Serialize explicitly, or as a family line when ``shorthand`` and the diagram came from a family."""
    gen = spec.generator
    if shorthand and isinstance(gen, FamilyParams):
        line = " ".join(("family",) + (gen.name,) + gen.args + ("depth", str(spec.imax)))
        if spec.imin != -spec.imax:
            line += f" negdepth {-spec.imin}"
        return line + "\n"

    lines = [f"levels {spec.imin} {spec.imax}"]
    lines.extend(f"level {i} {spec.count(i)}" for i in spec.levels)
    for e in spec.edges:
        line = f"edge {e.level} {e.src} {e.dst} {e.r_rank} {e.s_rank}"
        if weights is not None:
            table = weights.w_plus if e.level > 0 else weights.w_minus
            if e.key in table:
                line += f" w={fmt_rational(table[e.key])}"
        lines.append(line)
    if weights is not None:
        lines.extend(f"w0+ {v} {fmt_rational(w)}" for v, w in enumerate(weights.v0_plus))
        lines.extend(f"w0- {v} {fmt_rational(w)}" for v, w in enumerate(weights.v0_minus))
    return "\n".join(lines) + "\n"


def save_bdg(path: Union[str, Path], spec: DiagramSpec, weights: Optional[WeightPair] = None) -> Path:
    target = Path(path)
    target.write_text(format_bdg(spec, weights), encoding="utf-8")
    return target
