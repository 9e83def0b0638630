"""Tests for diagram specs: validation, incidence matrices, heights, halves and telescoping."""

import numpy as np
import pytest

from adicsurf.diagram import (
    Edge, edge_level, ensure_window, half, heights, incidence_matrix, make_spec, restrict, stationary_period,
    step_of, telescope, telescope_with_chains, validate_diagram, weld,
)
from adicsurf.errors import ParameterError, WindowError

from .conftest import make_family


def _make_two_level_spec(**overrides):
    counts = {0: 1, 1: 1}
    edges = [Edge(1, 0, 0, 1, 1), Edge(1, 0, 0, 2, 2)]
    counts.update(overrides.get("counts", {}))
    return make_spec(counts, overrides.get("edges", edges))


class TestLevels:
    def test_edge_level_round_trip(self):
        for step in range(-5, 6):
            if step == 0:
                continue
            assert step_of(edge_level(step)) == step

    def test_negative_edge_levels_skip_zero(self):
        assert edge_level(1) == 1
        assert edge_level(0) == -1
        assert edge_level(-2) == -3

    def test_count_outside_window_raises(self, odometer):
        spec, _ = odometer
        with pytest.raises(WindowError):
            spec.count(spec.imax + 1)


class TestValidation:
    def test_bundled_families_are_valid(self):
        for name, args in [("odometer", ()), ("chamanara", ()), ("chacon", ()), ("disjoint", ()),
                           ("staircase", ()), ("pascal", ()), ("symmetric", ("3", "k+1")),
                           ("explosive", ()), ("hajian_kakutani", ())]:
            spec, _ = make_family(name, *args, depth=5)
            report = validate_diagram(spec)
            assert report.ok, (name, report.codes())

    def test_zero_row(self):
        spec = _make_two_level_spec(counts={1: 2})
        assert "zero_row" in validate_diagram(spec).codes()

    def test_zero_column(self):
        edges = [Edge(1, 0, 0, 1, 1)]
        spec = make_spec({0: 2, 1: 1}, edges)
        assert "zero_column" in validate_diagram(spec).codes()

    def test_bad_rank_sequence(self):
        spec = _make_two_level_spec(edges=[Edge(1, 0, 0, 1, 1), Edge(1, 0, 0, 3, 2)])
        assert validate_diagram(spec).codes() == ["r_order"]

    def test_missing_levels_rejected(self):
        with pytest.raises(ParameterError):
            make_spec({0: 1, 2: 1}, [])


class TestIncidence:
    def test_chacon_matrix(self, chacon):
        spec, _ = chacon
        assert incidence_matrix(spec, 1).tolist() == [[3, 1], [0, 1]]

    def test_chacon_heights(self, chacon):
        spec, _ = chacon
        h = heights(spec, (1, 1), 3)
        assert h[1:] == [(4, 1), (13, 1), (40, 1)]

    def test_symmetric_full_root_heights(self):
        spec, _ = make_family("symmetric", "2", "2", "full", depth=6)
        for k, h in enumerate(heights(spec, (1, 1), 6)):
            assert h == (3 ** k, 3 ** k)

    @pytest.mark.parametrize("name,args", [
        ("chacon", ()), ("pascal", ("1/3",)), ("symmetric", ("3", "k+1")), ("explosive", ()), ("staircase", ()),
        ("disjoint", ()),
    ])
    def test_heights_match_matrix_product(self, name, args):
        spec, _ = make_family(name, *args, depth=6)
        rng = np.random.default_rng(11)
        h0 = tuple(int(x) for x in rng.integers(1, 20, spec.count(0)))
        product = np.identity(spec.count(0), dtype=object)
        for k, h in enumerate(heights(spec, h0, 6)):
            if k:
                step = np.zeros((spec.count(k), spec.count(k - 1)), dtype=object)
                for e in spec.edges_at(k):
                    step[e.dst, e.src] += 1
                product = step.dot(product)
            assert h == tuple(product.dot(np.array(h0, dtype=object)).tolist())

    def test_level_zero_has_no_matrix(self, odometer):
        spec, _ = odometer
        with pytest.raises(WindowError):
            incidence_matrix(spec, 0)

    def test_heights_reject_bad_h0(self, chacon):
        spec, _ = chacon
        with pytest.raises(ParameterError):
            heights(spec, (1,), 2)
        with pytest.raises(ParameterError):
            heights(spec, (1, 0), 2)


class TestHalves:
    def test_weld_of_halves_restores_spec(self, chamanara):
        spec, _ = chamanara
        assert weld(half(spec, 1), half(spec, -1)) == spec

    def test_negative_half_reverses_orientation(self, chacon):
        spec, _ = chacon
        neg = half(spec, -1)
        assert neg.imin == 0 and neg.imax == -spec.imin
        assert all(e.level > 0 for e in neg.edges)
        assert validate_diagram(neg).ok

    def test_weld_rejects_mismatched_level_zero(self, odometer, disjoint):
        with pytest.raises(ParameterError):
            weld(half(odometer[0], 1), half(disjoint[0], -1))

    def test_restrict(self, odometer):
        spec, _ = odometer
        small = restrict(spec, -2, 3)
        assert (small.imin, small.imax) == (-2, 3)
        assert validate_diagram(small).ok
        with pytest.raises(WindowError):
            restrict(spec, 1, 3)


class TestWindow:
    def test_ensure_window_regenerates(self, odometer):
        spec, _ = odometer
        wider = ensure_window(spec, -12, 12)
        assert (wider.imin, wider.imax) == (-12, 12)

    def test_ensure_window_without_generator(self):
        spec = _make_two_level_spec()
        with pytest.raises(WindowError):
            ensure_window(spec, 0, 4)


class TestTelescope:
    def test_odometer_telescopes_to_base_four(self, odometer):
        spec, _ = odometer
        t = telescope(spec, [-1, 0, 2, 4])
        assert t.imax == 2 and t.imin == -1
        assert incidence_matrix(t, 1).tolist() == [[4]]
        assert validate_diagram(t).ok

    def test_chains_compose_in_lexicographic_order(self, odometer):
        spec, _ = odometer
        t, chains = telescope_with_chains(spec, [0, 2])
        by_rank = sorted(t.edges_at(1), key=lambda e: e.r_rank)
        # the edge nearest the range is most significant
        ranks = [tuple(e.r_rank for e in chains[e.key]) for e in by_rank]
        assert ranks == [(1, 1), (2, 1), (1, 2), (2, 2)]

    @pytest.mark.parametrize("name,args", [("chacon", ()), ("pascal", ("1/3",)), ("symmetric", ("2", "2"))])
    def test_telescoping_composes(self, name, args):
        spec, _ = make_family(name, *args, depth=8, neg_depth=4)
        outer = [-4, -2, -1, 0, 1, 3, 4, 6, 8]
        inner = [-3, -1, 0, 2, 5]
        zero = outer.index(0)
        composed = [outer[zero + b] for b in inner]
        assert composed == [-4, -1, 0, 3, 8]
        assert telescope(telescope(spec, outer), inner) == telescope(spec, composed)

    def test_bad_cuts(self, odometer):
        spec, _ = odometer
        with pytest.raises(ParameterError):
            telescope(spec, [1, 2])
        with pytest.raises(ParameterError):
            telescope(spec, [0, 2, 2])


class TestStationarity:
    def test_stationary_families(self, odometer, chacon):
        assert stationary_period(odometer[0]) == 1
        assert stationary_period(chacon[0]) == 1

    def test_symmetric_single_root_is_eventually_stationary(self):
        spec, _ = make_family("symmetric", "2", "3")
        assert stationary_period(spec, 1) is None
        assert stationary_period(spec, 2) == 1

    def test_growing_family_is_not_stationary(self):
        spec, _ = make_family("symmetric", "2", "k+1")
        assert stationary_period(spec, 2) is None
