"""Tests for cutting and stacking and the interval exchanges it produces."""

from fractions import Fraction

import pytest

from adicsurf.diagram import half
from adicsurf.errors import DomainError, WeightError
from adicsurf.pathspace import FinitePath, iter_paths, successor
from adicsurf.stacking import (
    Piece, UndefinedSignal, apply_iet, build_stacks, compact_iet, iet_at_depth, interval_of_path, stable_chains,
)
from adicsurf.weights import half_weights

from .conftest import make_family


def _positive(spec, weights):
    return half(spec, 1), half_weights(weights, 1)


def _van_der_corput_offset(x):
    n = 0
    while x >= 1 - Fraction(1, 2 ** (n + 1)):
        n += 1
    return Fraction(3, 2 ** (n + 1)) - 1


class TestStacks:
    def test_chacon_columns(self, chacon):
        stages = build_stacks(*_positive(*chacon), 2)
        main, spacer = stages[2].columns
        assert (main.height, spacer.height) == (13, 1)
        assert main.width == Fraction(2, 27)
        assert stages[2].total_length() == 1

    def test_levels_tile_the_interval(self, pascal):
        stages = build_stacks(*_positive(*pascal), 5)
        levels = sorted(lv for col in stages[5].columns for lv in col.levels)
        assert levels[0][0] == 0 and levels[-1][1] == 1
        assert all(a[1] == b[0] for a, b in zip(levels, levels[1:]))

    def test_exhausted_reservoir_cannot_be_stacked(self):
        spec, weights = make_family("hajian_kakutani", depth=3)
        with pytest.raises(WeightError):
            build_stacks(*_positive(spec, weights), 3)


class TestOdometerExchange:
    def test_matches_van_der_corput(self):
        spec, weights = make_family("odometer", "2", depth=10)
        iet = iet_at_depth(*_positive(spec, weights), 10)
        assert len(iet.pieces) == 1023
        assert iet.undefined == ((1 - Fraction(1, 1024), Fraction(1)),)
        for piece in iet.pieces:
            assert piece.offset == _van_der_corput_offset(piece.lo)

    def test_apply(self, odometer):
        iet = iet_at_depth(*_positive(*odometer), 3)
        assert apply_iet(iet, Fraction(3, 4)) == Fraction(1, 8)
        assert apply_iet(iet, Fraction(0)) == Fraction(1, 2)

    def test_top_level_is_undefined(self, odometer):
        iet = iet_at_depth(*_positive(*odometer), 1)
        result = apply_iet(iet, Fraction(1, 2))
        assert isinstance(result, UndefinedSignal)
        assert isinstance(apply_iet(iet, Fraction(1)), UndefinedSignal)

    def test_outside_domain(self, odometer):
        iet = iet_at_depth(*_positive(*odometer), 3)
        with pytest.raises(DomainError):
            apply_iet(iet, Fraction(3, 2))


class TestCompactExchange:
    def test_chamanara_junctions(self, chamanara):
        iet = compact_iet(*_positive(*chamanara), 4)
        assert [p.length for p in iet.pieces] == [Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 16)]
        assert iet.undefined == ((Fraction(15, 16), Fraction(1)),)

    def test_agrees_with_per_level_map(self):
        for name, args, depth in [("odometer", (), 6), ("chacon", (), 4), ("pascal", ("1/3",), 5),
                                  ("staircase", (), 3), ("symmetric", ("2", "3"), 4)]:
            spec, weights = make_family(name, *args, depth=depth)
            pos, hw = _positive(spec, weights)
            full = iet_at_depth(pos, hw, depth).merged()
            compact = compact_iet(pos, hw, depth, periodic_wrap=False).merged()
            assert full.pieces == compact.pieces, name
            assert full.undefined == compact.undefined, name

    def test_chacon_stage_two(self, chacon):
        iet = iet_at_depth(*_positive(*chacon), 2)
        assert len(iet.pieces) == 12
        assert len(iet.undefined) == 2

    def test_measure_preserving(self, pascal):
        assert compact_iet(*_positive(*pascal), 6).is_measure_preserving()
        assert iet_at_depth(*_positive(*pascal), 6).is_measure_preserving()


class TestStableChains:
    def test_identity_half_wraps(self, odometer):
        spec, weights = odometer
        neg, hw = half(spec, -1), half_weights(weights, -1)
        assert len(stable_chains(neg, hw, 4)) == 1
        iet = compact_iet(neg, hw, 4)
        assert iet.pieces == (Piece(Fraction(0), Fraction(1), Fraction(0)),)
        assert iet.undefined == ()

    def test_decaying_spacer_chain_does_not_wrap(self, chacon):
        assert stable_chains(*_positive(*chacon), 4) == []


class TestNesting:
    @pytest.mark.parametrize("name,args,depth", [
        ("odometer", ("2",), 10),
        ("chamanara", (), 10),
        ("pascal", ("1/3",), 10),
        ("symmetric", ("2", "2"), 8),
        ("chacon", (), 7),
        ("disjoint", (), 7),
    ])
    def test_deeper_exchange_extends_shallower(self, name, args, depth):
        spec, weights = make_family(name, *args, depth=depth)
        pos, hw = _positive(spec, weights)
        coarse = iet_at_depth(pos, hw, 1)
        for K in range(2, depth + 1):
            fine = iet_at_depth(pos, hw, K)
            merged = fine.merged()
            for piece in coarse.pieces:
                lo, hi, offset = merged.segment_at(piece.lo)
                assert offset == piece.offset, (name, K, piece)
                assert hi >= piece.hi, (name, K, piece)
            undefined = sum((hi - lo for lo, hi in fine.undefined), Fraction(0))
            assert undefined <= sum((hi - lo for lo, hi in coarse.undefined), Fraction(0))
            coarse = fine


class TestConjugacy:
    @pytest.mark.parametrize("name,args,depth", [
        ("odometer", ("2",), 8),
        ("odometer", ("3",), 8),
        ("chamanara", (), 8),
        ("disjoint", (), 8),
        ("chacon", (), 8),
        ("pascal", ("1/3",), 8),
        ("symmetric", ("2", "2"), 8),
        ("explosive", (), 4),
        ("staircase", (), 5),
        ("independent_cas", (), 3),
    ])
    def test_exchange_is_the_successor(self, name, args, depth):
        spec, weights = make_family(name, *args, depth=depth)
        pos, hw = _positive(spec, weights)
        for n in range(1, depth + 1):
            stages = build_stacks(pos, hw, n)
            iet = iet_at_depth(pos, hw, n, stages=stages)
            for path in iter_paths(pos, n):
                lo, hi = interval_of_path(stages, pos, path)
                _, _, offset = iet.segment_at(lo)
                if offset is None:
                    continue
                nxt = successor(pos, path)
                assert isinstance(nxt, FinitePath)
                assert interval_of_path(stages, pos, nxt) == (lo + offset, hi + offset)
