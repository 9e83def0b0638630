"""Command-line interface: generate, inspect and analyse weighted ordered Bratteli diagrams."""

import argparse
import json
import shlex
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .bdg_format import format_bdg, load_bdg, parse_bdg
from .config import (
    DEFAULT_DEPTH, DEFAULT_ETA, DEFAULT_SAMPLES, DEFAULT_SEED, EPSILON_POLICIES, EXIT_DEPTH, EXIT_OK,
    EXIT_VALIDATION, MAX_REFINE_DEPTH, SAMPLE_DENOMINATOR, SVG_LABEL_DEPTH, TUNNEL_SEARCH_BOUND,
)
from .diagram import DiagramSpec, half, validate_diagram
from .ergodicity import verdict
from .errors import AdicSurfError, DiagramFormatError, ParameterError, WeightError, WindowError
from .exact_utils import ExactTime, fmt_rational, parse_rational
from .families import FamilyParams, generate, parse_family, shields_entropy
from .pathspace import components, iter_paths, min_max_paths, with_lookahead
from .render import render_iet_svg, render_svg
from .renorm import check_functoriality, shift
from .stacking import compact_iet, iet_at_depth
from .surface import (
    HORIZONTAL, VERTICAL, DepthExceededSignal, SingularHitSignal, SurfacePoint, area, build_surface, refine,
    teichmuller, trajectory,
)
from .terminal import ensure_terminal
from .weights import WeightPair, check_weight_conditions, ensure_depth, half_weights

Loaded = Tuple[DiagramSpec, Optional[WeightPair]]


def _emit(args: argparse.Namespace, payload: Dict[str, Any], lines: Sequence[str]) -> None:
    if args.json:
        print(json.dumps({"seed": args.seed, **payload}, indent=2))
    else:
        print(f"# {args.command} seed={args.seed}")
        for line in lines:
            print(line)


def _write(path: Optional[str], text: str) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
        ensure_terminal().success(f"Wrote {path}")
    else:
        sys.stdout.write(text)


def _load(args: argparse.Namespace) -> Loaded:
    if args.family:
        family = parse_family(shlex.split(args.family))
        depth = args.depth if args.depth is not None else DEFAULT_DEPTH
        return generate(family, depth)
    if args.input and args.input != "-":
        return load_bdg(args.input)
    return parse_bdg(sys.stdin.read())


def _depth(args: argparse.Namespace, spec: DiagramSpec) -> int:
    return args.depth if args.depth is not None else spec.imax


def _weighted(loaded: Loaded) -> Tuple[DiagramSpec, WeightPair]:
    spec, weights = loaded
    if weights is None:
        raise WeightError("this command needs weights (w0+/w0- lines and w= on edges)")
    return spec, weights


def parse_point(text: str) -> SurfacePoint:
    """``rect:x,y`` or ``rect:x/y`` with rational coordinates (``p/q`` allowed in the comma form)."""
    rect, sep, coords = text.partition(":")
    if not sep:
        raise ParameterError(f"point {text!r} is not rect:x,y")
    if "," in coords:
        x, _, y = coords.partition(",")
    elif coords.count("/") == 1:
        x, _, y = coords.partition("/")
    else:
        raise ParameterError(f"point {text!r}: use rect:x,y when coordinates are fractions")
    try:
        index = int(rect)
    except ValueError:
        raise ParameterError(f"rectangle index must be an integer, got {rect!r}") from None
    return SurfacePoint(index, parse_rational(x), parse_rational(y))


def cmd_gen(args: argparse.Namespace) -> int:
    family = FamilyParams(args.name, tuple(args.params))
    spec, weights = generate(family, args.depth, args.neg_depth)
    text = format_bdg(spec, weights, shorthand=args.shorthand)
    if args.name == "independent_cas":
        heights = [int(h) for h in (args.params[0] if args.params else "1,1").split(",")]
        widths = [parse_rational(w) for w in (args.params[1] if len(args.params) > 1 else "1/2,1/2").split(",")]
        total, q0, value = shields_entropy(heights, widths)
        text = f"# entropy w(C_0)={fmt_rational(total)} q0={q0} value={value:.12g}\n" + text
    _write(args.output, text)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    spec, weights = _load(args)
    K = _depth(args, spec)
    report = validate_diagram(spec)
    if weights is not None:
        threshold = parse_rational(args.decay_threshold) if args.decay_threshold else None
        report = report.merged(check_weight_conditions(spec, weights, min(K, spec.imax), threshold))
    lines = [f"{v.code} level={v.level} vertex={v.vertex} edge={v.edge}: {v.message}" for v in report.violations]
    lines.extend(f"note: {n}" for n in report.notes)
    lines.append("valid" if report.ok else f"invalid ({len(report.violations)} violations)")
    _emit(args, report.to_dict(), lines)
    return EXIT_OK if report.ok else EXIT_VALIDATION


def cmd_paths(args: argparse.Namespace) -> int:
    spec, _ = _load(args)
    K = _depth(args, spec)
    pos = half(spec, 1)
    if args.components:
        decomposition = components(half(with_lookahead(spec, K), 1), K)
        lines = [
            f"{c.kind} terminals={list(c.terminals)}"
            + (f" merge=({c.merge_level},{c.merge_vertex}) period={c.period}" if c.kind == "periodic" else "")
            for c in decomposition.components
        ]
        _emit(args, decomposition.to_dict(), lines)
        return EXIT_OK
    if args.extremal:
        ext = min_max_paths(pos, K)
        lines = [f"min {p.terminal[1]} {p.digits()}" for p in ext.minimal]
        lines += [f"max {p.terminal[1]} {p.digits()}" for p in ext.maximal]
        lines.append(f"extendable min={ext.extendable_min} max={ext.extendable_max} balanced={ext.balanced}")
        payload = {
            "minimal": [p.digits() for p in ext.minimal],
            "maximal": [p.digits() for p in ext.maximal],
            "balanced": ext.balanced,
        }
        _emit(args, payload, lines)
        return EXIT_OK
    digits = [p.digits() for p in iter_paths(pos, K)]
    _emit(args, {"depth": K, "paths": digits}, digits)
    return EXIT_OK


def cmd_iet(args: argparse.Namespace) -> int:
    spec, weights = _weighted(_load(args))
    K = _depth(args, spec)
    sign = -1 if args.negative else 1
    lo, hi = (-K, spec.imax) if args.negative else (min(spec.imin, 0), K)
    spec, weights = ensure_depth(spec, weights, lo, hi)
    half_spec, hw = half(spec, sign), half_weights(weights, sign)
    if args.compact:
        iet = compact_iet(half_spec, hw, K, periodic_wrap=args.wrap)
    else:
        iet = iet_at_depth(half_spec, hw, K, periodic_wrap=args.wrap)
    lines = [
        f"{fmt_rational(p.lo)} {fmt_rational(p.hi)} -> {fmt_rational(p.lo + p.offset)} {fmt_rational(p.hi + p.offset)}"
        for p in iet.pieces
    ]
    lines.extend(f"# undefined {fmt_rational(lo)} {fmt_rational(hi)}" for lo, hi in iet.undefined)
    payload = {
        "depth": K,
        "pieces": [[fmt_rational(p.lo), fmt_rational(p.hi), fmt_rational(p.offset)] for p in iet.pieces],
        "undefined": [[fmt_rational(lo), fmt_rational(hi)] for lo, hi in iet.undefined],
    }
    _emit(args, payload, lines)
    if args.svg:
        _write(args.svg, render_iet_svg(iet))
    return EXIT_OK


def _surface(args: argparse.Namespace):
    spec, weights = _weighted(_load(args))
    K = _depth(args, spec)
    surface = build_surface(spec, weights, K, args.mode, compact=not args.full)
    if args.teichmuller:
        surface = teichmuller(surface, float(parse_rational(args.teichmuller)))
    return surface


def cmd_surface(args: argparse.Namespace) -> int:
    surface = _surface(args)
    lines = [
        f"R{r.index} x0={fmt_rational(r.x0)} y0={fmt_rational(r.y0)} "
        f"width={fmt_rational(r.width)} height={fmt_rational(r.height)}"
        for r in surface.rectangles
    ]
    lines.append(f"area {fmt_rational(area(surface))}")
    _emit(args, surface.to_dict(), lines)
    return EXIT_OK


def cmd_flow(args: argparse.Namespace) -> int:
    surface = _surface(args)
    if args.start == "random":
        rng = np.random.default_rng(args.seed)
        index = int(rng.integers(len(surface.rectangles)))
        r = surface.rectangles[index]
        x, y = (Fraction(int(n), SAMPLE_DENOMINATOR) for n in rng.integers(1, SAMPLE_DENOMINATOR, 2))
        p = SurfacePoint(index, x * r.width, y * r.height)
    else:
        p = parse_point(args.start)
    if not surface.exact:
        p = SurfacePoint(p.rect, float(p.x), float(p.y))
    t = parse_rational(args.time) if surface.exact else float(parse_rational(args.time))
    direction = VERTICAL if args.dir in ("v", VERTICAL) else HORIZONTAL
    traj = trajectory(surface, p, t, direction)
    while (args.auto_refine and isinstance(traj.end, DepthExceededSignal) and surface.spec.generator is not None
           and traj.end.suggested_depth <= args.max_depth):
        ensure_terminal().info(f"Refining surface to depth {traj.end.suggested_depth}")
        surface = refine(surface, traj.end.suggested_depth)
        traj = trajectory(surface, p, t, direction)
    end = traj.end

    lines = [f"{fmt_rational(s.t0)} {s.rect} {fmt_rational(s.x0)} {fmt_rational(s.y0)}" for s in traj.segments]
    if isinstance(end, SurfacePoint):
        lines.append(f"{fmt_rational(t)} {end.rect} {fmt_rational(end.x)} {fmt_rational(end.y)}")
        status, code = "ok", EXIT_OK
    elif isinstance(end, SingularHitSignal):
        lines.append(f"# singular {end.reason} at {end.point} after {fmt_rational(end.elapsed)}")
        status, code = "singular", EXIT_OK
    else:
        lines.append(f"# depth exceeded at {end.point} after {fmt_rational(end.elapsed)}; "
                     f"suggested depth {end.suggested_depth}")
        status, code = "depth_exceeded", EXIT_DEPTH
    payload = {
        "start": str(p),
        "time": fmt_rational(t),
        "direction": direction,
        "status": status,
        "end": str(end.point if not isinstance(end, SurfacePoint) else end),
        "segments": [[fmt_rational(s.t0), s.rect, fmt_rational(s.x0), fmt_rational(s.y0)] for s in traj.segments],
    }
    _emit(args, payload, lines)
    return code


def cmd_shift(args: argparse.Namespace) -> int:
    spec, weights = _weighted(_load(args))
    state = shift(spec, weights, args.k)
    payload = state.to_dict()
    lines = [f"{key} {value}" for key, value in payload.items()]
    lines.extend(f"t_{i} {t.value:.12g}" for i, t in enumerate(state.times))
    _emit(args, payload, lines)
    if args.output:
        _write(args.output, format_bdg(state.spec, state.weights))
    return EXIT_OK


def cmd_functoriality(args: argparse.Namespace) -> int:
    spec, weights = _weighted(_load(args))
    K = _depth(args, spec)
    report = check_functoriality(spec, weights, args.k, args.samples, args.seed, K)
    lines = [f"{key} {value}" for key, value in report.to_dict().items() if key != "mismatches"]
    lines.extend(f"mismatch {m}" for m in report.mismatches)
    _emit(args, report.to_dict(), lines)
    return EXIT_OK if report.ok else EXIT_VALIDATION


# same names as the keys of a criterion row in --json output
CRITERION_COLUMNS = (
    ("k", 3), ("Delta+", 6), ("Delta-", 6), ("delta", 10), ("sigma", 10), ("epsilon", 10), ("summand", 12),
    ("partial_sum", 12),
)


def _table_line(cells) -> str:
    return " ".join(f"{cell:>{width}}" for cell, (_, width) in zip(cells, CRITERION_COLUMNS))


def _cell(value: Optional[Fraction]) -> str:
    return "-" if value is None else f"{float(value):.6g}"


def cmd_criterion(args: argparse.Namespace) -> int:
    spec, weights = _weighted(_load(args))
    base = spec.generator.base_factor() if isinstance(spec.generator, FamilyParams) else None
    if base is not None and base != spec.generator:
        ensure_terminal().info(f"Applying the criterion to the base factor {base.describe()}")
        spec, weights = generate(base, spec.imax, -spec.imin)
    K = _depth(args, spec)
    eta = parse_rational(args.eta)
    report = verdict(spec, weights, eta, K, args.family_hint, args.policy, args.search_bound,
                     telescoped=not args.no_telescope)
    lines = [_table_line(name for name, _ in CRITERION_COLUMNS)]
    for r in report.rows:
        lines.append(_table_line([
            str(r.k), str(r.tunnel_plus), str(r.tunnel_minus), _cell(r.delta), _cell(r.sigma),
            f"{r.epsilon:.4g}", _cell(r.summand), _cell(r.partial_sum),
        ]))
    if report.cuts:
        lines.append(f"telescoped at {list(report.cuts)}: partial sum "
                     f"{_cell(report.telescoped_rows[-1].partial_sum) if report.telescoped_rows else '-'}")
    lines.extend(f"# {why}" for why in report.rationale)
    lines.append(f"verdict {report.verdict}")
    _emit(args, report.to_dict(), lines)
    return EXIT_OK


def cmd_render(args: argparse.Namespace) -> int:
    spec, weights = _weighted(_load(args))
    K = _depth(args, spec)
    surface = build_surface(spec, weights, K)
    if args.teichmuller:
        surface = teichmuller(surface, ExactTime.from_float(float(parse_rational(args.teichmuller))))
    _write(args.output, render_svg(surface, args.label_depth))
    return EXIT_OK


def _input_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", nargs="?", help="`.bdg` file (default: stdin)")
    p.add_argument("--family", help='family instead of a file, e.g. "chacon" or "symmetric 2 3"')
    p.add_argument("--depth", type=int, default=None, help="truncation depth K")


def _surface_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("exact", "float"), default="exact")
    p.add_argument("--full", action="store_true", help="use per-level pieces instead of column junctions")
    p.add_argument("--teichmuller", help="deform by the diagonal flow for time t")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bratteli-surfaces", description=__doc__)
    parser.add_argument("--json", action="store_true", help="print reports as JSON")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--quiet", action="store_true", help="do not echo log lines to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a family diagram as .bdg")
    p.add_argument("name")
    p.add_argument("params", nargs="*")
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--neg-depth", type=int, default=None)
    p.add_argument("--shorthand", action="store_true", help="write a one-line family document")
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser("validate", help="check structure and weight axioms")
    _input_options(p)
    p.add_argument("--decay-threshold")
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("paths", help="list depth-K paths as r-rank digit strings")
    _input_options(p)
    p.add_argument("--components", action="store_true")
    p.add_argument("--extremal", action="store_true")
    p.set_defaults(handler=cmd_paths)

    p = sub.add_parser("iet", help="interval exchange of the positive (or negative) half")
    _input_options(p)
    p.add_argument("--compact", action="store_true")
    p.add_argument("--wrap", action="store_true", help="glue stable periodic columns top to bottom")
    p.add_argument("--negative", action="store_true")
    p.add_argument("--svg")
    p.set_defaults(handler=cmd_iet)

    p = sub.add_parser("surface", help="rectangles of the flat surface")
    _input_options(p)
    _surface_options(p)
    p.set_defaults(handler=cmd_surface)

    p = sub.add_parser("flow", help="vertical or horizontal straight-line flow")
    _input_options(p)
    _surface_options(p)
    p.add_argument("--start", required=True, help="rect:x,y or rect:x/y, or 'random'")
    p.add_argument("--time", required=True)
    p.add_argument("--dir", choices=("v", "h", VERTICAL, HORIZONTAL), default="v")
    p.add_argument("--auto-refine", action="store_true")
    p.add_argument("--max-depth", type=int, default=MAX_REFINE_DEPTH)
    p.set_defaults(handler=cmd_flow)

    p = sub.add_parser("shift", help="renormalize by k levels")
    _input_options(p)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_shift)

    p = sub.add_parser("functoriality", help="compare shifted and restacked surfaces on sample points")
    _input_options(p)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.set_defaults(handler=cmd_functoriality)

    p = sub.add_parser("criterion", help="summability criterion for ergodicity")
    _input_options(p)
    p.add_argument("--eta", default=fmt_rational(DEFAULT_ETA))
    p.add_argument("--family-hint", default="", help="growth declarations, e.g. n=bounded or p=power:1/3,n=bounded")
    p.add_argument("--policy", choices=EPSILON_POLICIES, default="maximal")
    p.add_argument("--search-bound", type=int, default=TUNNEL_SEARCH_BOUND)
    p.add_argument("--no-telescope", action="store_true")
    p.set_defaults(handler=cmd_criterion)

    p = sub.add_parser("render", help="SVG picture of the surface")
    _input_options(p)
    p.add_argument("--label-depth", type=int, default=SVG_LABEL_DEPTH)
    p.add_argument("--teichmuller")
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_render)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    terminal = ensure_terminal()
    terminal.echo = not args.quiet
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except DiagramFormatError as exc:
        for line in exc.diagnostics:
            terminal.error(line)
        return EXIT_VALIDATION
    except WindowError as exc:
        terminal.error(str(exc))
        return EXIT_DEPTH
    except AdicSurfError as exc:
        terminal.error(str(exc))
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
