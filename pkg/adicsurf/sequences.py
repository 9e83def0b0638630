"""Integer sequence rules for family parameters and growth declarations for family hints."""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Tuple

from .errors import ParameterError

_LINEAR = re.compile(r"^(?:(\d+)\s*\*\s*)?k\s*(?:([+-])\s*(\d+))?$")
_EXP = re.compile(r"^(\d+)\s*\^\s*k$")


@dataclass(frozen=True)
class Growth:
    """Declared asymptotic class of a sequence: ``bounded``, ``power`` (k^exponent) or ``exp``."""

    kind: str
    exponent: Fraction = Fraction(0)

    def describe(self) -> str:
        if self.kind == "power":
            return f"power:{self.exponent}"
        return self.kind

    def at_most_power(self, bound: Fraction) -> bool:
        if self.kind == "bounded":
            return True
        if self.kind == "power":
            return self.exponent <= bound
        return False


@dataclass(frozen=True)
class IntSequence:
    kind: str  # constant | linear | exp | periodic
    params: Tuple[int, ...]
    text: str

    def __call__(self, k: int) -> int:
        if self.kind == "constant":
            return self.params[0]
        if self.kind == "linear":
            a, b = self.params
            return a * k + b
        if self.kind == "exp":
            return self.params[0] ** k
        return self.params[(k - 1) % len(self.params)]

    @property
    def growth(self) -> Growth:
        if self.kind in ("constant", "periodic"):
            return Growth("bounded")
        if self.kind == "linear":
            return Growth("power", Fraction(1)) if self.params[0] else Growth("bounded")
        return Growth("exp") if self.params[0] > 1 else Growth("bounded")

    def __str__(self) -> str:
        return self.text


def parse_sequence(text: str) -> IntSequence:
    """Parse ``3``, ``k+1``, ``2*k+1``, ``2^k`` or ``periodic:2,3``."""
    raw = text.strip().replace(" ", "")
    if raw.isdigit():
        return IntSequence("constant", (int(raw),), raw)
    if raw.startswith("periodic:"):
        try:
            values = tuple(int(x) for x in raw[len("periodic:"):].split(",") if x)
        except ValueError:
            raise ParameterError(f"bad periodic sequence: {text!r}") from None
        if not values:
            raise ParameterError(f"empty periodic sequence: {text!r}")
        return IntSequence("periodic", values, raw)
    m = _LINEAR.match(raw)
    if m:
        a = int(m.group(1)) if m.group(1) else 1
        b = int(m.group(3)) if m.group(3) else 0
        if m.group(2) == "-":
            b = -b
        return IntSequence("linear", (a, b), raw)
    m = _EXP.match(raw)
    if m:
        return IntSequence("exp", (int(m.group(1)),), raw)
    raise ParameterError(f"unknown sequence rule: {text!r}")


def parse_growth(text: str) -> Growth:
    raw = text.strip()
    if raw == "bounded":
        return Growth("bounded")
    if raw == "exp":
        return Growth("exp")
    if raw.startswith("power:"):
        try:
            exponent = Fraction(raw[len("power:"):])
        except (ValueError, ZeroDivisionError):
            raise ParameterError(f"bad growth exponent: {text!r}") from None
        if exponent < 0:
            raise ParameterError("growth exponent must be nonnegative")
        return Growth("power", exponent) if exponent else Growth("bounded")
    raise ParameterError(f"unknown growth declaration: {text!r}")


def parse_hints(text: str) -> Dict[str, Growth]:
    """``n=bounded,p=power:1/3`` -> {"n": Growth, "p": Growth}."""
    hints: Dict[str, Growth] = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        name, sep, value = part.partition("=")
        if not sep or not name:
            raise ParameterError(f"family hint {part!r} is not name=growth")
        hints[name.strip()] = parse_growth(value)
    return hints
