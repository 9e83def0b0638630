"""Tests for flat surfaces: rectangles, area, the diagonal deformation and straight-line flows."""

from fractions import Fraction

import numpy as np
import pytest

from adicsurf.config import SAMPLE_DENOMINATOR
from adicsurf.errors import DomainError, ParameterError, WeightError
from adicsurf.exact_utils import ExactTime
from adicsurf.stacking import UndefinedSignal, apply_iet
from adicsurf.surface import (
    HORIZONTAL, Box, DepthExceededSignal, SingularHitSignal, SurfacePoint, area, birkhoff_average, build_surface,
    flow, teichmuller, trajectory, whole_surface,
)
from adicsurf.weights import WeightPair

from .conftest import make_family

WELDED = [
    ("odometer", ()), ("chamanara", ()), ("disjoint", ()), ("chacon", ()), ("staircase", ()),
    ("pascal", ("1/3",)), ("symmetric", ("2", "3")), ("symmetric", ("3", "2", "full")), ("explosive", ()),
    ("independent_cas", ("1,2", "1/3,1/3")),
]


class TestRectangles:
    def test_chamanara_is_a_unit_square(self, chamanara):
        surface = build_surface(*chamanara, 4)
        (r,) = surface.rectangles
        assert (r.width, r.height) == (1, 1)

    def test_chacon_rectangles(self, chacon):
        surface = build_surface(*chacon, 4)
        assert [(r.width, r.height) for r in surface.rectangles] == [(Fraction(2, 3), 1), (Fraction(1, 3), 1)]
        assert surface.rectangles[1].x0 == Fraction(2, 3)
        assert surface.rectangles[1].y0 == 1

    @pytest.mark.parametrize("name,args", WELDED)
    def test_area_is_one(self, name, args):
        depth = 2 if name == "independent_cas" else 4
        spec, weights = make_family(name, *args, depth=depth)
        surface = build_surface(spec, weights, depth)
        assert area(surface) == 1

    def test_area_survives_deformation(self, chacon):
        surface = build_surface(*chacon, 4)
        rng = np.random.default_rng(7)
        for t in rng.uniform(-3, 3, 10):
            assert area(teichmuller(surface, float(t))) == 1

    def test_needs_negative_weights(self, odometer):
        spec, weights = odometer
        with pytest.raises(WeightError):
            build_surface(spec, WeightPair(weights.v0_plus, weights.w_plus), 4)

    def test_unknown_mode(self, odometer):
        with pytest.raises(ParameterError):
            build_surface(*odometer, 4, mode="interval")


class TestDeformation:
    def test_exact_time_composes(self, chamanara):
        surface = build_surface(*chamanara, 4)
        twice = teichmuller(teichmuller(surface, ExactTime(Fraction(2))), ExactTime(Fraction(3)))
        (r,) = twice.rectangles
        assert (r.width, r.height) == (6, Fraction(1, 6))
        assert twice.time.scale == 6
        assert twice.t_plus.length == 6


class TestFlow:
    def test_chamanara_vertical_step(self, chamanara):
        surface = build_surface(*chamanara, 6)
        end = flow(surface, SurfacePoint(0, Fraction(1, 3), Fraction(0)), Fraction(1))
        assert end == SurfacePoint(0, Fraction(5, 6), Fraction(0))

    def test_flow_inside_a_rectangle(self, chacon):
        surface = build_surface(*chacon, 4)
        end = flow(surface, SurfacePoint(0, Fraction(1, 5), Fraction(1, 10)), Fraction(1, 2))
        assert end == SurfacePoint(0, Fraction(1, 5), Fraction(3, 5))

    def test_breakpoint_is_singular(self, chamanara):
        surface = build_surface(*chamanara, 6)
        end = flow(surface, SurfacePoint(0, Fraction(1, 2), Fraction(0)), Fraction(1))
        assert isinstance(end, SingularHitSignal)
        assert end.reason == "breakpoint"

    def test_corner_is_singular(self, chamanara):
        surface = build_surface(*chamanara, 6)
        end = flow(surface, SurfacePoint(0, Fraction(0), Fraction(1, 2)), Fraction(1))
        assert isinstance(end, SingularHitSignal)
        assert end.reason == "corner"

    def test_depth_exceeded_and_refined(self, chamanara):
        surface = build_surface(*chamanara, 2)
        start = SurfacePoint(0, Fraction(25, 32), Fraction(0))
        shallow = flow(surface, start, Fraction(1))
        assert isinstance(shallow, DepthExceededSignal)
        assert shallow.suggested_depth > 2
        refined = flow(surface, start, Fraction(1), auto_refine=True)
        assert refined == SurfacePoint(0, Fraction(5, 32), Fraction(0))

    @pytest.mark.parametrize("depth", [2, 6])
    def test_column_junction_is_a_breakpoint(self, chamanara, depth):
        # offsets -5/8 and -13/16 meet at 7/8
        surface = build_surface(*chamanara, depth)
        end = flow(surface, SurfacePoint(0, Fraction(7, 8), Fraction(0)), Fraction(1), auto_refine=True)
        assert isinstance(end, SingularHitSignal)
        assert end.reason == "breakpoint"
        assert end.elapsed == 1

    def test_horizontal_uses_the_negative_half(self, chamanara):
        surface = build_surface(*chamanara, 6)
        end = flow(surface, SurfacePoint(0, Fraction(0), Fraction(1, 3)), Fraction(1), direction=HORIZONTAL)
        assert end == SurfacePoint(0, Fraction(0), Fraction(5, 6))

    def test_trajectory_segments(self, chamanara):
        surface = build_surface(*chamanara, 6)
        traj = trajectory(surface, SurfacePoint(0, Fraction(1, 3), Fraction(1, 2)), Fraction(3, 2))
        assert [s.t1 for s in traj.segments] == [Fraction(1, 2), Fraction(3, 2)]
        assert traj.segments[1].x0 == Fraction(5, 6)

    def test_point_outside(self, chamanara):
        surface = build_surface(*chamanara, 4)
        with pytest.raises(DomainError):
            flow(surface, SurfacePoint(0, Fraction(2), Fraction(0)), Fraction(1))
        with pytest.raises(ParameterError):
            flow(surface, SurfacePoint(0, Fraction(1, 3), Fraction(0)), Fraction(-1))


class TestReturnMap:
    @pytest.mark.parametrize("name,args", [
        ("chacon", ()), ("staircase", ()), ("pascal", ("1/3",)), ("symmetric", ("3", "2", "full")),
    ])
    def test_return_to_the_bottoms_is_the_positive_exchange(self, name, args):
        spec, weights = make_family(name, *args, depth=6)
        surface = build_surface(spec, weights, 6)
        starts = [r.x0 for r in surface.rectangles]
        rng = np.random.default_rng(5)
        for _ in range(100):
            r = surface.rectangles[int(rng.integers(len(surface.rectangles)))]
            x = r.width * Fraction(int(rng.integers(1, SAMPLE_DENOMINATOR)), SAMPLE_DENOMINATOR)
            end = flow(surface, SurfacePoint(r.index, x, Fraction(0)), r.height)
            image = apply_iet(surface.t_plus, r.x0 + x)
            if isinstance(image, UndefinedSignal):
                assert isinstance(end, DepthExceededSignal)
                continue
            j = max(i for i, s in enumerate(starts) if s <= image)
            assert end == SurfacePoint(j, image - starts[j], Fraction(0))

    def test_horizontal_is_the_swapped_vertical(self):
        spec, weights = make_family("chamanara", "2", depth=10)
        surface = build_surface(spec, weights, 10)
        rng = np.random.default_rng(17)
        for _ in range(100):
            x, y = (Fraction(int(n), SAMPLE_DENOMINATOR) for n in rng.integers(1, SAMPLE_DENOMINATOR, 2))
            t = Fraction(int(rng.integers(1, 4 * SAMPLE_DENOMINATOR)), SAMPLE_DENOMINATOR)
            p = SurfacePoint(0, x, y)
            horizontal = flow(surface, p, t, direction=HORIZONTAL)
            vertical = flow(surface, p.swapped(), t)
            if isinstance(vertical, SurfacePoint):
                assert horizontal == vertical.swapped()
            else:
                assert type(horizontal) is type(vertical)
                assert horizontal.point == vertical.point.swapped()
                assert horizontal.elapsed == vertical.elapsed


class TestBirkhoff:
    def test_left_half_of_chamanara(self):
        spec, weights = make_family("chamanara", "2", depth=40)
        surface = build_surface(spec, weights, 40, mode="float")
        rng = np.random.default_rng(2024)
        x, y = rng.random(2)
        result = birkhoff_average(surface, SurfacePoint(0, float(x), float(y)), 10_000.0, Box(0, 0.5, 0, 1))
        assert result.signal is None
        assert result.mean == pytest.approx(0.5, abs=0.02)

    def test_whole_surface(self, chacon):
        surface = build_surface(*chacon, 6)
        result = birkhoff_average(surface, SurfacePoint(0, Fraction(1, 7), Fraction(0)), Fraction(5, 2),
                                  whole_surface(surface))
        assert result.mean == pytest.approx(1.0)
