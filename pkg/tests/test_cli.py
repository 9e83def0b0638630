"""Tests for the command-line interface, driven through ``main``."""

import json
from fractions import Fraction

import pytest

from adicsurf.bdg_format import load_bdg
from adicsurf.cli import main, parse_point
from adicsurf.config import EXIT_DEPTH, EXIT_OK, EXIT_VALIDATION
from adicsurf.errors import ParameterError
from adicsurf.surface import SurfacePoint

from .test_weights import BAD_ODOMETER


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out.splitlines()


@pytest.fixture
def bdg_file(tmp_path):
    def write(text, name="diagram.bdg"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return write


class TestGen:
    def test_shorthand_to_stdout(self, capsys):
        code, lines = _run(capsys, "gen", "pascal", "1/3", "--depth", "4", "--shorthand")
        assert code == EXIT_OK
        assert lines == ["family pascal 1/3 depth 4"]

    def test_writes_a_loadable_file(self, capsys, tmp_path):
        target = tmp_path / "chacon.bdg"
        assert main(["gen", "chacon", "--depth", "3", "-o", str(target)]) == EXIT_OK
        spec, weights = load_bdg(target)
        assert spec.imax == 3
        assert weights.v0_plus == (Fraction(2, 3), Fraction(1, 3))

    def test_independent_stacking_reports_entropy(self, capsys):
        _, lines = _run(capsys, "gen", "independent_cas", "--depth", "1")
        assert lines[0].startswith("# entropy w(C_0)=1 q0=2 value=0.6931")


class TestValidate:
    def test_valid_family(self, capsys):
        code, lines = _run(capsys, "validate", "--family", "chacon", "--depth", "4")
        assert code == EXIT_OK
        assert lines[0] == "# validate seed=0"
        assert lines[-1] == "valid"

    def test_bad_weights(self, capsys, bdg_file):
        code, lines = _run(capsys, "validate", bdg_file(BAD_ODOMETER))
        assert code == EXIT_VALIDATION
        assert any(line.startswith("outgoing_sum") for line in lines)
        assert lines[-1].startswith("invalid")

    def test_malformed_file(self, capsys, bdg_file):
        code = main(["validate", bdg_file("levels 0 1\nfrob\n")])
        assert code == EXIT_VALIDATION
        assert "unknown keyword" in capsys.readouterr().err

    def test_unknown_family(self, capsys):
        assert main(["validate", "--family", "torus"]) == EXIT_VALIDATION


class TestPaths:
    def test_odometer_paths(self, capsys):
        code, lines = _run(capsys, "paths", "--family", "odometer 2", "--depth", "2")
        assert code == EXIT_OK
        assert lines[1:] == ["11", "21", "12", "22"]

    def test_components_as_json(self, capsys):
        _, lines = _run(capsys, "--json", "paths", "--family", "chacon", "--depth", "4", "--components")
        payload = json.loads("\n".join(lines))
        assert (payload["minimal"], payload["periodic"]) == (1, 1)

    def test_rays_at_the_requested_depth_are_certified(self, capsys):
        _, lines = _run(capsys, "--json", "paths", "--family", "pascal 1/3", "--depth", "6", "--components")
        payload = json.loads("\n".join(lines))
        assert (payload["minimal"], payload["periodic"]) == (1, 2)

    def test_depth_outside_the_file_window(self, capsys, bdg_file):
        assert main(["paths", bdg_file(BAD_ODOMETER), "--depth", "5"]) == EXIT_DEPTH


class TestIet:
    def test_odometer_piece_count(self, capsys):
        code, lines = _run(capsys, "--json", "iet", "--family", "odometer 2", "--depth", "8")
        payload = json.loads("\n".join(lines))
        assert code == EXIT_OK
        assert len(payload["pieces"]) == 255
        assert payload["undefined"] == [["255/256", "1"]]

    def test_seed_is_echoed(self, capsys):
        _, lines = _run(capsys, "--json", "--seed", "5", "iet", "--family", "odometer 2", "--depth", "3")
        assert json.loads("\n".join(lines))["seed"] == 5

    def test_needs_weights(self, capsys, bdg_file):
        text = "levels 0 1\nlevel 0 1\nlevel 1 1\nedge 1 0 0 1 1\n"
        assert main(["iet", bdg_file(text)]) == EXIT_VALIDATION

    def test_svg_output(self, capsys, tmp_path):
        target = tmp_path / "iet.svg"
        main(["iet", "--family", "chamanara", "--depth", "4", "--compact", "--svg", str(target)])
        assert "<svg" in target.read_text(encoding="utf-8")


class TestSurfaceAndFlow:
    def test_surface_area(self, capsys):
        code, lines = _run(capsys, "surface", "--family", "chacon", "--depth", "4")
        assert code == EXIT_OK
        assert lines[-1] == "area 1"

    def test_vertical_flow(self, capsys):
        code, lines = _run(capsys, "flow", "--family", "chamanara", "--depth", "6", "--start", "0:1/3,0", "--time", "1")
        assert code == EXIT_OK
        assert lines[-1] == "1 0 5/6 0"

    def test_depth_exceeded(self, capsys):
        code, lines = _run(capsys, "flow", "--family", "chamanara", "--depth", "2", "--start", "0:25/32,0",
                           "--time", "1")
        assert code == EXIT_DEPTH
        assert lines[-1].startswith("# depth exceeded")

    def test_auto_refine(self, capsys):
        code, lines = _run(capsys, "flow", "--family", "chamanara", "--depth", "2", "--start", "0:25/32,0",
                           "--time", "1", "--auto-refine")
        assert code == EXIT_OK
        assert lines[-1] == "1 0 5/32 0"


class TestCriterion:
    def test_closed_form_verdict(self, capsys):
        code, lines = _run(capsys, "criterion", "--family", "symmetric 2 3", "--depth", "6",
                           "--family-hint", "n=bounded")
        assert code == EXIT_OK
        assert lines[-1] == "verdict ergodic_by_closed_form"

    def test_obstructed(self, capsys):
        _, lines = _run(capsys, "--json", "criterion", "--family", "disjoint", "--depth", "6")
        assert json.loads("\n".join(lines))["verdict"] == "obstructed"

    def test_table_columns_match_json_keys(self, capsys):
        argv = ["criterion", "--family", "chacon", "--depth", "4"]
        _, lines = _run(capsys, *argv)
        header = lines[1].split()
        assert header == ["k", "Delta+", "Delta-", "delta", "sigma", "epsilon", "summand", "partial_sum"]
        _, lines = _run(capsys, "--json", *argv)
        row = json.loads("\n".join(lines))["rows"][0]
        assert set(header) <= set(row)


class TestRender:
    def test_svg_file(self, capsys, tmp_path):
        target = tmp_path / "chamanara.svg"
        assert main(["render", "--family", "chamanara", "--depth", "6", "-o", str(target)]) == EXIT_OK
        text = target.read_text(encoding="utf-8")
        assert "<svg" in text and "A1" in text


class TestPoints:
    def test_comma_form(self):
        assert parse_point("0:1/3,0") == SurfacePoint(0, Fraction(1, 3), Fraction(0))

    def test_slash_form(self):
        assert parse_point("2:1/4") == SurfacePoint(2, Fraction(1), Fraction(4))

    @pytest.mark.parametrize("text", ["1/3,0", "a:1,2", "0:1/2/3"])
    def test_rejects_bad_points(self, text):
        with pytest.raises(ParameterError):
            parse_point(text)
