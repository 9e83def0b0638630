"""Rational parsing/formatting and exact scale factors."""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import ParameterError

Number = Union[Fraction, float]


def parse_rational(text: str) -> Fraction:
    """Parse `p/q`, an integer or a decimal literal into an exact Fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"not a rational number: {text!r}") from exc


def fmt_rational(value: Number) -> str:
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    return repr(float(value))


@dataclass(frozen=True)
class ExactTime:
    """A time t stored through its exact scale factor e^t."""

    scale: Fraction

    def __post_init__(self) -> None:
        if self.scale <= 0:
            raise ParameterError("scale factor must be positive")

    @property
    def inverse(self) -> Fraction:
        return 1 / self.scale

    @property
    def value(self) -> float:
        return math.log(self.scale.numerator) - math.log(self.scale.denominator)

    @classmethod
    def from_float(cls, t: float) -> "ExactTime":
        # the binary expansion of exp(t) is exact, so e^{-t} := 1/scale keeps area exact
        return cls(Fraction(math.exp(t)))

    def __add__(self, other: "ExactTime") -> "ExactTime":
        return ExactTime(self.scale * other.scale)

    def __sub__(self, other: "ExactTime") -> "ExactTime":
        return ExactTime(self.scale / other.scale)

    def __lt__(self, other: "ExactTime") -> bool:
        return self.scale < other.scale

    def __le__(self, other: "ExactTime") -> bool:
        return self.scale <= other.scale
