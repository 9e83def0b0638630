"""Tests for sequence rules and growth declarations."""

from fractions import Fraction

import pytest

from adicsurf.errors import ParameterError
from adicsurf.sequences import Growth, parse_growth, parse_hints, parse_sequence


class TestSequences:
    @pytest.mark.parametrize("text,kind,values", [
        ("3", "constant", [3, 3, 3]),
        ("k+1", "linear", [2, 3, 4]),
        ("2*k+1", "linear", [3, 5, 7]),
        ("k - 1", "linear", [0, 1, 2]),
        ("2^k", "exp", [2, 4, 8]),
        ("periodic:2,3", "periodic", [2, 3, 2]),
    ])
    def test_rules(self, text, kind, values):
        seq = parse_sequence(text)
        assert seq.kind == kind
        assert [seq(k) for k in (1, 2, 3)] == values

    def test_growth_classes(self):
        assert parse_sequence("7").growth == Growth("bounded")
        assert parse_sequence("periodic:1,4").growth == Growth("bounded")
        assert parse_sequence("k+1").growth == Growth("power", Fraction(1))
        assert parse_sequence("2^k").growth == Growth("exp")
        assert parse_sequence("1^k").growth == Growth("bounded")

    @pytest.mark.parametrize("text", ["", "k^2", "periodic:", "periodic:a", "log k"])
    def test_rejects_unknown_rules(self, text):
        with pytest.raises(ParameterError):
            parse_sequence(text)

    def test_str_is_the_normalised_text(self):
        assert str(parse_sequence("k + 1")) == "k+1"


class TestGrowth:
    def test_declarations(self):
        assert parse_growth("bounded") == Growth("bounded")
        assert parse_growth("exp") == Growth("exp")
        assert parse_growth("power:1/3") == Growth("power", Fraction(1, 3))
        assert parse_growth("power:0") == Growth("bounded")

    def test_power_bound(self):
        assert Growth("bounded").at_most_power(Fraction(1, 6))
        assert Growth("power", Fraction(1, 6)).at_most_power(Fraction(1, 6))
        assert not Growth("power", Fraction(1, 2)).at_most_power(Fraction(1, 6))
        assert not Growth("exp").at_most_power(Fraction(10))

    def test_describe(self):
        assert Growth("power", Fraction(1, 2)).describe() == "power:1/2"
        assert Growth("exp").describe() == "exp"

    @pytest.mark.parametrize("text", ["linear", "power:x", "power:-1", "power:1/0"])
    def test_rejects_bad_declarations(self, text):
        with pytest.raises(ParameterError):
            parse_growth(text)


class TestHints:
    def test_several_names(self):
        hints = parse_hints("n=bounded, p=power:1/3")
        assert hints == {"n": Growth("bounded"), "p": Growth("power", Fraction(1, 3))}

    def test_empty(self):
        assert parse_hints("") == {}

    @pytest.mark.parametrize("text", ["n", "=bounded", "n=huge"])
    def test_rejects_malformed_hints(self, text):
        with pytest.raises(ParameterError):
            parse_hints(text)
