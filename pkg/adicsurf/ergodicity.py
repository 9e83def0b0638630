"""Tunneling distances, the summability criterion for ergodicity and its verdicts."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .config import DEFAULT_ETA, EPSILON_POLICIES, MAX_WORKERS, TUNNEL_SEARCH_BOUND
from .diagram import DiagramSpec, ensure_window, half, heights, stationary_period, transition_matrix
from .errors import ParameterError
from .exact_utils import fmt_rational
from .pathspace import components, periodic_chains, with_lookahead
from .renorm import auto_telescope_cuts
from .sequences import Growth, IntSequence, parse_hints, parse_sequence
from .terminal import ensure_terminal
from .weights import WeightPair, ensure_depth, half_weights, telescope_weights, vertex_weights

FINITE = "finite"
EXCEEDS_BOUND = "exceeds_bound"
INFINITE = "infinite"

VERDICTS = (
    "ergodic_by_stationarity",
    "ergodic_by_eventual_stationarity",
    "ergodic_by_closed_form",
    "inconclusive",
    "obstructed",
)


@dataclass(frozen=True)
class TunnelValue:
    status: str
    value: Optional[int] = None

    @property
    def finite(self) -> bool:
        return self.status == FINITE

    def __str__(self) -> str:
        if self.finite:
            return str(self.value)
        return "inf" if self.status == INFINITE else f">{self.value}"


@dataclass(frozen=True)
class Tunneling:
    k: int
    plus: TunnelValue
    minus: TunnelValue


def _support(spec: DiagramSpec, step: int) -> np.ndarray:
    return (transition_matrix(spec, step) > 0).astype(np.int64)


def _extend(spec: DiagramSpec, lo: int, hi: int) -> Optional[DiagramSpec]:
    if spec.covers(lo, hi):
        return spec
    if spec.generator is None:
        return None
    return ensure_window(spec, min(lo, spec.imin), max(hi, spec.imax))


def _search(spec: DiagramSpec, k: int, bound: int, forward: bool,
            chained: bool) -> Tuple[TunnelValue, DiagramSpec]:
    size = spec.count(k)
    B = np.eye(size, dtype=np.int64)
    first: Optional[np.ndarray] = None
    stationary = True
    seen = set()
    for m in range(1, bound + 1):
        step = k + m if forward else k - m + 1
        lo, hi = (k, k + m) if forward else (k - m, k)
        extended = _extend(spec, lo, hi if forward else spec.imax)
        if extended is None:
            ensure_terminal().warning(f"Tunneling search at level {k} stopped at the window edge after {m - 1} levels")
            return TunnelValue(EXCEEDS_BOUND, m - 1), spec
        spec = extended
        T = _support(spec, step)
        if first is None:
            first = T
        elif first.shape != T.shape or not np.array_equal(first, T):
            stationary = False
        B = (T @ B > 0).astype(np.int64) if forward else (B @ T > 0).astype(np.int64)
        gram = B.T @ B if forward else B @ B.T
        if _connected(gram > 0, chained):
            return TunnelValue(FINITE, m), spec
        if stationary:
            state = (B.shape, B.tobytes())
            if state in seen:
                return TunnelValue(INFINITE), spec
            seen.add(state)
    return TunnelValue(EXCEEDS_BOUND, bound), spec


def _connected(adjacency: np.ndarray, chained: bool) -> bool:
    if not chained:
        return bool(adjacency.all())
    n, _ = connected_components(csr_matrix(adjacency.astype(np.int8)), directed=False)
    return n == 1


def tunneling(spec: DiagramSpec, k: int, search_bound: int = TUNNEL_SEARCH_BOUND, chained: bool = False) -> Tunneling:
    """``Delta+(k)`` and ``Delta-(k)`` by positivity of incidence-matrix products."""
    if search_bound < 1:
        raise ParameterError("search bound must be >= 1")
    spec.count(k)
    plus, spec = _search(spec, k, search_bound, True, chained)
    minus, _ = _search(spec, k, search_bound, False, chained)
    return Tunneling(k, plus, minus)


def _walk(spec: DiagramSpec, level: int, vertex: int, m: int, forward: bool) -> Iterator[int]:
    """Endpoint of every explicit path of length ``m`` leaving ``vertex``."""
    if m == 0:
        yield vertex
        return
    if forward:
        for e in spec.out_edges(level, vertex):
            yield from _walk(spec, level + 1, e.dst, m - 1, forward)
    else:
        for e in spec.in_edges(level, vertex):
            yield from _walk(spec, level - 1, e.src, m - 1, forward)


def tunneling_brute_force(spec: DiagramSpec, k: int, search_bound: int = 6) -> Tunneling:
    """Path-pair search: every two level-``k`` vertices must share a descendant (ancestor) ``m`` levels away."""
    values = []
    for forward in (True, False):
        found = TunnelValue(EXCEEDS_BOUND, search_bound)
        for m in range(1, search_bound + 1):
            lo, hi = (k, k + m) if forward else (k - m, k)
            if not spec.covers(lo, hi):
                found = TunnelValue(EXCEEDS_BOUND, m - 1)
                break
            ends = [set(_walk(spec, k, v, m, forward)) for v in range(spec.count(k))]
            if all(a & b for a in ends for b in ends):
                found = TunnelValue(FINITE, m)
                break
        values.append(found)
    return Tunneling(k, values[0], values[1])


@dataclass(frozen=True)
class CriterionRow:
    k: int
    vertices: int
    tunnel_plus: TunnelValue
    tunnel_minus: TunnelValue
    scale: Fraction
    delta_plus: Optional[Fraction]
    delta_minus: Optional[Fraction]
    delta: Optional[Fraction]
    sigma: Fraction
    eps_sq: Fraction
    eta_constraint_ok: bool
    summand: Optional[Fraction]
    partial_sum: Fraction = Fraction(0)

    @property
    def epsilon(self) -> float:
        return math.sqrt(self.eps_sq)

    def to_dict(self) -> Dict[str, Any]:
        def opt(x: Optional[Fraction]) -> Optional[str]:
            return fmt_rational(x) if x is not None else None

        return {
            "k": self.k,
            "vertices": self.vertices,
            "Delta+": str(self.tunnel_plus),
            "Delta-": str(self.tunnel_minus),
            "delta_plus": opt(self.delta_plus),
            "delta_minus": opt(self.delta_minus),
            "delta": opt(self.delta),
            "sigma": fmt_rational(self.sigma),
            "epsilon": self.epsilon,
            "eta_constraint_ok": self.eta_constraint_ok,
            "summand": opt(self.summand),
            "partial_sum": fmt_rational(self.partial_sum),
        }


@dataclass(frozen=True)
class ErgodicityReport:
    eta: Fraction
    policy: str
    depth: int
    rows: Tuple[CriterionRow, ...]
    telescoped_rows: Tuple[CriterionRow, ...] = ()
    cuts: Tuple[int, ...] = ()
    verdict: str = "inconclusive"
    rationale: Tuple[str, ...] = field(default=())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eta": fmt_rational(self.eta),
            "policy": self.policy,
            "depth": self.depth,
            "as_of_depth": self.depth,
            "rows": [r.to_dict() for r in self.rows],
            "telescoping_cuts": list(self.cuts),
            "telescoped_rows": [r.to_dict() for r in self.telescoped_rows],
            "verdict": self.verdict,
            "rationale": list(self.rationale),
        }


def _level_minimum(spec: DiagramSpec, weights: WeightPair, level: int, h: List[Tuple[Any, ...]]) -> Fraction:
    """Smallest w- extent at ``level``: column heights for ``level >= 0``, vertex weights of ``w-`` below 0."""
    if level >= 0:
        return min(Fraction(x) for x in h[level])
    neg = half(spec, -1)
    rows = vertex_weights(neg, half_weights(weights, -1), -level)
    return min(rows[-level])


def _eps_sq(policy: str, eta: Fraction, sigma: Fraction, cap: Fraction) -> Fraction:
    if policy == "maximal":
        return min(eta / (2 * sigma), cap) ** 2
    return min(eta / (4 * sigma * sigma), cap * cap)


def _row(spec: DiagramSpec, weights: WeightPair, tun: Tunneling, eta: Fraction, policy: str,
         ell: List[List[Fraction]], h: List[Tuple[Any, ...]]) -> CriterionRow:
    k = tun.k
    scale = sum(ell[0], Fraction(0)) / sum(ell[k], Fraction(0))
    ell_bar = [scale * x for x in ell[k]]
    h_bar = [Fraction(x) / scale for x in h[k]]
    sigma = 1 + sum(h_bar, Fraction(0))

    delta_plus = None
    if tun.plus.finite and k + tun.plus.value < len(ell):
        delta_plus = scale * min(ell[k + tun.plus.value]) / 2
    delta_minus = None
    if tun.minus.finite and k - tun.minus.value >= spec.imin:
        delta_minus = _level_minimum(spec, weights, k - tun.minus.value, h) / scale / 2
    candidates = [d for d in (delta_plus, delta_minus) if d is not None]
    delta = min(candidates) if candidates else None
    if delta is not None and delta_minus is None:
        ensure_terminal().info(f"Level {k}: Delta- unavailable, delta falls back to the forward term")

    cap = min(min(h_bar) / 2, min(ell_bar) / 2)
    eps_sq = _eps_sq(policy, eta, sigma, cap)
    eta_ok = 4 * eps_sq * sigma * sigma <= eta * eta
    vertices = spec.count(k)
    summand = None
    if vertices == 1:
        summand = 1 / (sigma / eps_sq) ** 2
    elif delta is not None:
        summand = 1 / (sigma / eps_sq + (vertices - 1) / delta) ** 2
    return CriterionRow(k, vertices, tun.plus, tun.minus, scale, delta_plus, delta_minus, delta,
                        sigma, eps_sq, eta_ok, summand)


def criterion_terms(spec: DiagramSpec, weights: WeightPair, eta: Fraction = DEFAULT_ETA, K: int = 8,
                    policy: str = "maximal", search_bound: int = TUNNEL_SEARCH_BOUND) -> List[CriterionRow]:
    """Rows ``k = 1..K``: tunneling, ``delta_k``, ``sigma_k``, ``epsilon_k``, summand and partial sum."""
    if policy not in EPSILON_POLICIES:
        raise ParameterError(f"epsilon policy must be one of {EPSILON_POLICIES}, got {policy!r}")
    if eta <= 0:
        raise ParameterError("eta must be positive")
    if not weights.has_minus:
        raise ParameterError("the criterion needs w- on V_0")
    spec, weights = ensure_depth(spec, weights, min(spec.imin, 0), K)
    with ThreadPoolExecutor(max_workers=MAX_WORKERS) as executor:
        tunnels = list(executor.map(lambda k: tunneling(spec, k, search_bound), range(1, K + 1)))
    hi = max([K] + [t.k + t.plus.value for t in tunnels if t.plus.finite])
    lo = min([spec.imin, 0] + [t.k - t.minus.value for t in tunnels if t.minus.finite])
    spec, weights = ensure_depth(spec, weights, lo, hi)
    ell = vertex_weights(half(spec, 1), half_weights(weights, 1), hi)
    h = heights(spec, weights.v0_minus, K)

    total = Fraction(0)
    rows = []
    for tun in tunnels:
        row = _row(spec, weights, tun, eta, policy, ell, h)
        if row.summand is not None:
            total += row.summand
        rows.append(replace(row, partial_sum=total))
    return rows


def _periodic_weights_decay(spec: DiagramSpec, weights: WeightPair, K: int) -> bool:
    pos, hw = half(spec, 1), half_weights(weights, 1)
    for ch in periodic_chains(pos, K):
        for i, v in enumerate(ch.vertices[1:], start=1):
            if hw.edge(pos.in_edges(ch.merge_level + i, v)[0]) >= 1:
                return False
    return True


def _family_of(spec: DiagramSpec) -> Optional[Any]:
    gen = spec.generator
    while gen is not None and hasattr(gen, "family") and not hasattr(gen, "args"):
        gen = gen.family
    return gen


# position and default of the sequence parameters of the closed-form families
_SEQUENCE_ARGS = {
    "symmetric": {"n": (1, "2")},
    "explosive": {"p": (0, "k+1"), "n": (1, "2")},
}


def _growth_of(family: Any, name: str, hints: Dict[str, Growth]) -> Growth:
    if name in hints:
        return hints[name]
    index, default = _SEQUENCE_ARGS[family.name][name]
    text = family.args[index] if index < len(family.args) else default
    return parse_sequence(text).growth


def closed_form_divergence(family: Any, hints: Dict[str, Growth]) -> Optional[Tuple[bool, str]]:
    """Whether the closed-form series of a symmetric or explosive family diverges, from declared growth."""
    name = getattr(family, "name", None)
    if name == "symmetric":
        n = _growth_of(family, "n", hints)
        why = f"symmetric family with n ~ {n.describe()}: the series diverges iff n_k grows at most like k^(1/2)"
        return n.at_most_power(Fraction(1, 2)), why
    if name == "explosive":
        p, n = _growth_of(family, "p", hints), _growth_of(family, "n", hints)
        if "exp" in (p.kind, n.kind):
            return False, "explosive family with exponential growth: the series converges"
        a, b = p.exponent, n.exponent
        return max(6 * a, 2 * (a + b)) <= 1, f"explosive family with p ~ k^{a}, n ~ k^{b}: diverges iff max(6a, 2(a+b)) <= 1"
    return None


def verdict(spec: DiagramSpec, weights: WeightPair, eta: Fraction = DEFAULT_ETA, K: int = 8,
            family_hint: str = "", policy: str = "maximal", search_bound: int = TUNNEL_SEARCH_BOUND,
            telescoped: bool = True) -> ErgodicityReport:
    """Criterion rows plus the first certified verdict: obstruction, closed form, stationarity, eventual stationarity."""
    if spec.generator is None and K >= spec.imax:
        # the top level of a fixed window has no forward room to tunnel
        K = max(1, spec.imax - 1)
    rows = criterion_terms(spec, weights, eta, K, policy, search_bound)
    spec, weights = ensure_depth(spec, weights, min(spec.imin, 0), K)
    rationale: List[str] = [f"as of depth {K}"]

    cuts: Tuple[int, ...] = ()
    telescoped_rows: List[CriterionRow] = []
    if telescoped:
        positive = auto_telescope_cuts(spec, weights, K)
        if len(positive) > 2 and positive != list(range(0, K + 1)):
            cuts = tuple(list(range(spec.imin, 0)) + positive)
            t_spec, t_weights = telescope_weights(spec, weights, cuts)
            telescoped_rows = criterion_terms(t_spec, t_weights, eta, len(positive) - 2, policy, search_bound)

    def report(name: str) -> ErgodicityReport:
        return ErgodicityReport(eta, policy, K, tuple(rows), tuple(telescoped_rows), cuts, name, tuple(rationale))

    if any(r.tunnel_plus.status == INFINITE for r in rows):
        rationale.append("Delta+ is infinite: level vertices never tunnel")
        return report("obstructed")
    ahead = with_lookahead(spec, K)
    if K >= 2:
        minimal = components(half(ahead, 1), K).minimal
        if len(minimal) > 1:
            rationale.append(f"{len(minimal)} minimal components")
            return report("obstructed")

    hints = parse_hints(family_hint) if family_hint else {}
    closed = closed_form_divergence(_family_of(spec), hints)
    if closed is not None:
        diverges, why = closed
        rationale.append(why)
        if diverges:
            return report("ergodic_by_closed_form")
    elif hints:
        ensure_terminal().warning("Family hint ignored: the diagram is not a symmetric or explosive family")

    plus_finite = all(r.tunnel_plus.finite for r in rows)
    decays = _periodic_weights_decay(ahead, weights, K)
    if plus_finite and decays:
        if stationary_period(spec, 1) is not None:
            rationale.append("positive transitions are stationary and Delta+ is finite")
            return report("ergodic_by_stationarity")
        for first in range(2, K):
            period = stationary_period(spec, first)
            if period is not None:
                rationale.append(f"transitions are stationary from level {first} with period {period}")
                return report("ergodic_by_eventual_stationarity")
    if not plus_finite:
        rationale.append("Delta+ exceeds the search bound at some level")
    if not decays:
        rationale.append("a periodic component keeps positive weight")
    rationale.append(f"partial sum S_{K} = {float(rows[-1].partial_sum) if rows else 0.0:.6g}")
    return report("inconclusive")


def symmetric_closed_forms(p: int, n: IntSequence, k: int) -> Dict[str, Fraction]:
    """Level-``k`` quantities of the single-root symmetric family, from the product formulas."""
    prod = math.prod(n(i) + p - 1 for i in range(1, k))
    forms = {
        "ell": Fraction(1, p * prod),
        "height": Fraction(prod),
        "scale": Fraction(prod),
        "sigma": Fraction(p + 1),
        "delta_plus": Fraction(1, 2 * p * (n(k) + p - 1)),
    }
    if k >= 2:
        forms["delta_minus"] = Fraction(1, 2 * (n(k - 1) + p - 1))
    return forms


def explosive_closed_forms(p: IntSequence, n: IntSequence, k: int) -> Dict[str, Fraction]:
    """Level-``k`` quantities of the explosive family, from the product formulas."""
    prod = math.prod(n(i) * p(i) for i in range(1, k))
    forms = {
        "ell": Fraction(1, p(k) * prod),
        "height": Fraction(prod),
        "scale": Fraction(prod),
        "sigma": Fraction(p(k) + 1),
        "delta_plus": Fraction(1, 2 * p(k + 1) * n(k) * p(k)),
    }
    if k >= 2:
        forms["delta_minus"] = Fraction(1, 2 * n(k - 1) * p(k - 1))
    return forms
