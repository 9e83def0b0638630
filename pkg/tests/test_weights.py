"""Tests for weight functions: axioms, vertex weights, cylinders and telescoping."""

from fractions import Fraction

import pytest

from adicsurf.bdg_format import parse_bdg
from adicsurf.diagram import half
from adicsurf.errors import WeightError, WindowError
from adicsurf.pathspace import FinitePath, iter_paths, successor
from adicsurf.weights import (
    WeightPair, bi_infinite_mass, check_weight_conditions, half_weights, measure_of_cylinder, telescope_weights,
    vertex_weight, vertex_weights,
)

from .conftest import make_family

BAD_ODOMETER = """
levels -1 2
level -1 1
level 0 1
level 1 1
level 2 1
edge 1 0 0 1 1 w=1/3
edge 1 0 0 2 2 w=1/3
edge 2 0 0 1 1 w=1/2
edge 2 0 0 2 2 w=1/2
edge -1 0 0 1 1 w=1
w0+ 0 1
w0- 0 1
"""


class TestWeightConditions:
    def test_bundled_families_pass(self):
        for name, args in [("odometer", ()), ("chamanara", ()), ("chacon", ()), ("disjoint", ()),
                           ("staircase", ()), ("pascal", ("1/3",)), ("symmetric", ("2", "3")),
                           ("explosive", ())]:
            spec, weights = make_family(name, *args, depth=4)
            report = check_weight_conditions(spec, weights, 4)
            assert report.ok, (name, report.codes())

    def test_independent_stacking_passes(self):
        spec, weights = make_family("independent_cas", "1,2", "1/3,1/3", depth=2)
        assert check_weight_conditions(spec, weights, 2).ok

    def test_outgoing_sum_violation(self):
        spec, weights = parse_bdg(BAD_ODOMETER)
        report = check_weight_conditions(spec, weights, 2)
        assert "outgoing_sum" in report.codes()
        assert any("2/3" in v.message for v in report.violations)

    def test_hajian_kakutani_reservoir_runs_dry(self):
        spec, weights = make_family("hajian_kakutani", depth=4)
        codes = check_weight_conditions(spec, weights, 4).codes()
        assert "nonpositive_weight" in codes

    def test_decay_threshold(self, odometer):
        spec, weights = odometer
        assert check_weight_conditions(spec, weights, 8, decay_threshold=Fraction(1, 100)).ok
        report = check_weight_conditions(spec, weights, 3, decay_threshold=Fraction(1, 100))
        assert report.codes() == ["decay"]

    def test_depth_outside_window(self, odometer):
        spec, weights = odometer
        with pytest.raises(WindowError):
            check_weight_conditions(spec, weights, spec.imax + 1)


class TestVertexWeights:
    def test_chacon_main_vertex(self, chacon):
        spec, weights = chacon
        assert vertex_weight(spec, weights, 1, 0) == Fraction(2, 9)
        assert vertex_weight(spec, weights, 1, 1) == Fraction(1, 9)

    def test_symmetric_level_weights(self, symmetric):
        spec, weights = symmetric
        rows = vertex_weights(half(spec, 1), half_weights(weights, 1), 6)
        for k in range(1, 7):
            assert rows[k] == [Fraction(1, 2 * 3 ** (k - 1))] * 2

    def test_pascal_weights(self, pascal):
        spec, weights = pascal
        p = Fraction(1, 3)
        for i in range(1, 7):
            for k in range(i + 1):
                assert vertex_weight(spec, weights, i, k) == p ** (i - k) * (1 - p) ** k

    def test_negative_levels_use_w_minus(self, chamanara):
        spec, weights = chamanara
        assert vertex_weight(spec, weights, -3, 0) == Fraction(1, 8)

    def test_missing_negative_weights(self, odometer):
        spec, weights = odometer
        with pytest.raises(WeightError):
            half_weights(WeightPair(weights.v0_plus, weights.w_plus), -1)


class TestCylinders:
    def test_odometer_depth_three(self, odometer):
        spec, weights = odometer
        pos = half(spec, 1)
        for path in iter_paths(pos, 3):
            assert measure_of_cylinder(spec, weights, path) == Fraction(1, 8)

    def test_pascal_cylinder_rule(self, pascal):
        spec, weights = pascal
        p = Fraction(1, 3)
        for path in iter_paths(half(spec, 1), 5):
            stays = sum(1 for e in path.edges if e.src == e.dst)
            assert measure_of_cylinder(spec, weights, path) == p ** stays * (1 - p) ** (5 - stays)

    def test_mass_is_conserved_at_every_depth(self, chacon):
        spec, weights = chacon
        pos = half(spec, 1)
        for depth in range(1, 6):
            total = sum(measure_of_cylinder(spec, weights, q) for q in iter_paths(pos, depth))
            assert total == 1

    def test_successor_preserves_pascal_measure(self):
        for p in ("1/3", "1/2"):
            spec, weights = make_family("pascal", p, depth=8)
            pos = half(spec, 1)
            for path in iter_paths(pos, 8):
                nxt = successor(pos, path)
                if isinstance(nxt, FinitePath):
                    assert measure_of_cylinder(spec, weights, nxt) == measure_of_cylinder(spec, weights, path)


class TestTelescopeWeights:
    def test_telescoped_odometer(self, chamanara):
        spec, weights = chamanara
        t_spec, t_weights = telescope_weights(spec, weights, [-2, 0, 2, 4])
        assert all(w == Fraction(1, 4) for w in t_weights.w_plus.values())
        assert all(w == Fraction(1, 4) for w in t_weights.w_minus.values())
        assert check_weight_conditions(t_spec, t_weights, 2).ok

    def test_area(self, chacon, disjoint):
        assert bi_infinite_mass(chacon[1]) == 1
        assert bi_infinite_mass(disjoint[1]) == 1
