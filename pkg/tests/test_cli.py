import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from heisgeo.cli import main, parse_point, UsageError
from heisgeo.convexity import scan_for_witness, t_coord_field
from heisgeo.core import HPoint
from heisgeo.geodesics import Segment, connect, generating_geodesic, sample_arc
from heisgeo.serialize import (
    arc_from_json,
    arc_to_json,
    fmt,
    point_from_json,
    point_to_json,
    polyline_from_csv,
    polyline_to_csv,
    report_to_json,
    witness_from_json,
    witness_to_json,
)


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


class TestSerialization:
    def test_fmt(self):
        assert fmt(1.0) == "1"
        assert fmt(-0.0) == "0"
        assert float(fmt(math.pi)) == math.pi
        assert fmt(0.1) == "0.10000000000000001"

    def test_point_round_trip(self):
        p = HPoint([0.1, -2.5], [1e-300, 3], 7.25)
        assert point_from_json(json.loads(json.dumps(point_to_json(p)))) == p

    def test_point_json_validation(self):
        with pytest.raises(ValueError):
            point_from_json({"x": [1]})
        with pytest.raises(ValueError):
            point_from_json({"n": 2, "x": [1], "y": [0], "t": 0})

    def test_arc_round_trip(self):
        (g,) = connect(HPoint([1, 0.3], [0, 2], 1), HPoint([0, -1], [1, 0.5], -2))
        h = arc_from_json(json.loads(json.dumps(arc_to_json(g))))
        assert h.base == g.base and np.array_equal(h.W, g.W) and h.s_end == g.s_end
        s = Segment(HPoint.origin(1), HPoint([1], [2], 0))
        assert arc_from_json(arc_to_json(s)).b == s.b
        with pytest.raises(ValueError):
            arc_from_json({"kind": "helix"})

    def test_polyline_csv_round_trip(self):
        c = sample_arc(generating_geodesic(1.3, 2), 17)
        d = polyline_from_csv(polyline_to_csv(c))
        assert np.array_equal(d.params, c.params)
        assert np.array_equal(d.x, c.x) and np.array_equal(d.y, c.y) and np.array_equal(d.t, c.t)
        assert polyline_to_csv(c).splitlines()[0] == "s,x1,x2,y1,y2,t"

    def test_witness_round_trip(self):
        rep = scan_for_witness(t_coord_field(), trials=10, seed=7)
        doc = json.loads(json.dumps(report_to_json(rep)))
        assert doc["verdict"] == "violation"
        assert set(doc["witness"]) >= {"s1", "s2", "lambda", "lhs", "rhs", "geodesic"}
        w = witness_from_json(doc["witness"])
        assert w.replay(t_coord_field()) == pytest.approx((rep.witness.lhs, rep.witness.rhs), abs=1e-12)
        assert witness_to_json(w) == doc["witness"]


class TestParsePoint:
    def test_forms(self):
        assert parse_point("(0,0,1)") == HPoint([0], [0], 1)
        assert parse_point("1,2,3,4,5") == HPoint([1, 2], [3, 4], 5)
        assert parse_point('{"n":1,"x":[0],"y":[2],"t":1}') == HPoint([0], [2], 1)
        assert parse_point("origin") is None
        assert parse_point("origin", 2) == HPoint.origin(2)

    def test_errors(self):
        for bad in ("1,2", "a,b,c", "{bad json", "1,2,3,4"):
            with pytest.raises(UsageError):
                parse_point(bad)
        with pytest.raises(UsageError):
            parse_point("1,2,3", 2)


class TestGeodesicCommand:
    def test_axis_target(self):
        code, out, _ = run("geodesic", "--from", "origin", "--to", "(0,0,1)")
        assert code == 0
        doc = json.loads(out)
        assert doc["geodesics"][0]["s_end"] == 2 * math.pi
        assert doc["length"] == pytest.approx(math.sqrt(math.pi), abs=1e-12)
        last = doc["polyline"]["points"][-1]
        assert max(abs(last["x"][0]), abs(last["y"][0]), abs(last["t"] - 1)) < 1e-9
        assert "note" in doc

    def test_planar_target_is_segment(self):
        code, out, _ = run("geodesic", "--from", "origin", "--to", "1,0,0")
        doc = json.loads(out)
        assert code == 0 and doc["geodesics"][0]["kind"] == "segment" and doc["length"] == 1.0

    def test_csv_last_row_is_target(self):
        code, out, _ = run("geodesic", "--from", "0.5,-1,0.2,0.3,1", "--to", "-1,0.4,1,0.1,-0.5",
                           "--format", "csv", "--samples", "33")
        assert code == 0
        c = polyline_from_csv(out)
        assert len(c) == 33
        last = c.points[-1].as_array()
        np.testing.assert_allclose(last, [-1, 0.4, 1, 0.1, -0.5], atol=1e-9)

    def test_byte_identical(self):
        args = ("geodesic", "--from", "1,0,0", "--to", "0,1,0", "--format", "csv")
        assert run(*args)[1] == run(*args)[1]

    def test_identical_endpoints(self):
        code, _, err = run("geodesic", "--from", "1,2,3", "--to", "1,2,3")
        assert code == 2 and "identical" in err

    def test_parse_errors(self):
        assert run("geodesic", "--from", "1,2", "--to", "1,2,3")[0] == 1
        assert run("geodesic", "--from", "1,2,3", "--to", "1,2,3,4,5")[0] == 1
        assert run("geodesic", "--to", "1,2,3")[0] == 1
        assert run("geodesic", "--from", "origin", "--to", "1,2,3", "--samples", "1")[0] == 1
        assert run("frobnicate")[0] == 1


class TestDistanceCommand:
    def test_values(self):
        assert run("distance", "--from", "origin", "--to", "(0,0,1)")[1] == fmt(math.sqrt(math.pi)) + "\n"
        assert run("distance", "--from", "origin", "--to", "(1,0,0)")[1] == "1\n"
        assert run("distance", "--from", "origin", "--to", "origin")[1] == "0\n"

    def test_symmetric(self):
        a = float(run("distance", "--from", "1,0,0", "--to", "0,1,0")[1])
        b = float(run("distance", "--from", "0,1,0", "--to", "1,0,0")[1])
        assert a == pytest.approx(b, abs=1e-12)


class TestBubbleCommand:
    def test_rows_and_closing_points(self):
        for n, gt, gs in ((1, 8, 33), (2, 3, 5)):
            code, out, _ = run("bubble", "--T", "2", "--n", str(n), "--grid-theta", str(gt), "--grid-s", str(gs))
            assert code == 0
            lines = out.strip().splitlines()
            assert len(lines) - 1 == gt**n * gs
            rows = np.array([line.split(",") for line in lines[1:]], dtype=float)
            closing = rows[np.isclose(rows[:, n], 2 * math.pi)]
            assert np.all(np.abs(closing[:, n + 1 : -1]) < 1e-15)
            assert np.allclose(closing[:, -1], 2.0, atol=1e-15)

    def test_symmetry_flag(self):
        code, _, err = run("bubble", "--check-symmetry", "--samples", "50")
        assert code == 0 and err.startswith("symmetry-check: pass")

    def test_limits(self):
        assert run("bubble", "--n", "3")[0] == 1
        assert run("bubble", "--T", "0")[0] == 2


class TestHullCommand:
    def test_default_depth(self):
        code, out, err = run("hull-growth")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "m,r_m,r_m_sq,ratio,eq01_margin,pass"
        assert len(lines) == 51
        first = lines[1].split(",")
        assert float(first[1]) == pytest.approx(math.sqrt(1 / (4 * math.pi)), abs=1e-15)
        assert first[3:] == ["", "", ""]
        assert all(line.endswith(",true") for line in lines[3:])
        assert "all_pass=true" in err and err.strip().endswith("=57")

    def test_overflow_is_domain_error(self):
        assert run("hull-growth", "--depth", "2000")[0] == 2

    def test_small_depth(self):
        assert run("hull-growth", "--depth", "3")[0] == 1


class TestConvexityCommand:
    def test_const(self):
        code, out, _ = run("convexity-check", "--function", "const", "--trials", "50")
        assert code == 0 and json.loads(out) == {"verdict": "convex-on-samples", "witness": None, "trials": 50}

    def test_height(self):
        code, out, _ = run("convexity-check", "--function", "t-coord", "--seed", "7")
        doc = json.loads(out)
        assert code == 0 and doc["verdict"] == "violation"
        w = witness_from_json(doc["witness"])
        lhs, rhs = w.replay(t_coord_field())
        assert lhs == pytest.approx(doc["witness"]["lhs"], abs=1e-12)
        assert lhs > rhs + 1e-9

    def test_unknown(self):
        assert run("convexity-check", "--function", "sin")[0] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "heisgeo", "distance", "--from", "origin", "--to", "1,0,0"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "1\n"


def test_env_tolerance_reaches_cli(monkeypatch):
    monkeypatch.setenv("HEIS_GEO_TOL", "1e-3")
    code, _, err = run("bubble", "--check-symmetry", "--samples", "5")
    assert code == 0 and "pass" in err
