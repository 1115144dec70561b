import csv
import math
import re
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from ntlf.analysis import FourierWidthProfile, FrequencyGrid, SParameterSweep, analyze
from ntlf.errors import InvalidArgumentError
from ntlf.formats import (
    read_touchstone,
    write_geometry_svg,
    write_profile_csv,
    write_report_json,
    write_touchstone,
)
from ntlf.microstrip import Substrate, width_for_impedance
from ntlf.objective import enforce_end_width

SUB = Substrate(3.5, 762e-6)
SVG_NS = "{http://www.w3.org/2000/svg}"


def data_lines(path):
    return [ln for ln in path.read_text().splitlines() if ln and ln[0] not in "!#"]


def polygon_points(path):
    root = ET.parse(path).getroot()
    poly = root.find(f"{SVG_NS}polygon")
    pts = np.array([[float(v) for v in p.split(",")] for p in poly.get("points").split()])
    return root, pts


class TestTouchstone:
    def test_layout(self, tmp_path, profile1, grid):
        sweep = analyze(profile1, SUB, grid, 50.0)
        path = write_touchstone(sweep, tmp_path / "a.s2p")
        lines = path.read_text().splitlines()
        assert lines[0].startswith("! ")
        assert lines[1] == "# HZ S RI R 50"
        rows = data_lines(path)
        assert len(rows) == 120
        first = rows[0].split()
        assert len(first) == 9
        assert float(first[0]) == grid.points[0]
        # s12 columns repeat s21
        assert first[3:5] == first[5:7]

    def test_single_frequency(self, tmp_path, profile1):
        sweep = analyze(profile1, SUB, FrequencyGrid([1e9]), 50.0)
        text = write_touchstone(sweep, tmp_path / "one.s2p").read_text().splitlines()
        assert len([ln for ln in text if not ln.startswith("!")]) == 2

    def test_matched_line_zero_reflection(self, tmp_path, grid):
        prof = FourierWidthProfile.uniform(0.1, width_for_impedance(50.0, 3.5), 5)
        path = write_touchstone(analyze(prof, SUB, grid, 50.0), tmp_path / "m.s2p")
        for row in data_lines(path):
            cols = row.split()
            assert abs(float(cols[1])) < 1e-9 and abs(float(cols[2])) < 1e-9

    def test_round_trip(self, tmp_path, profile1, grid):
        sweep = analyze(profile1, SUB, grid, 50.0)
        back = read_touchstone(write_touchstone(sweep, tmp_path / "r.s2p"))
        assert np.array_equal(back.frequencies, sweep.frequencies)
        for name in ("s11", "s21", "s22"):
            assert np.max(np.abs(getattr(back, name) - getattr(sweep, name))) < 1e-9
        assert back.z_ref == 50.0

    def test_significant_digits(self, tmp_path, profile1, grid):
        path = write_touchstone(analyze(profile1, SUB, grid, 50.0), tmp_path / "d.s2p")
        for field in data_lines(path)[5].split()[1:]:
            mantissa = re.match(r"-?(\d\.\d+)e", field).group(1)
            assert len(mantissa) - 1 >= 9

    def test_unitarity_of_rows(self, tmp_path, profile2, grid):
        path = write_touchstone(analyze(profile2, SUB, grid, 50.0), tmp_path / "u.s2p")
        for row in data_lines(path):
            v = [float(x) for x in row.split()]
            power = v[1] ** 2 + v[2] ** 2 + v[3] ** 2 + v[4] ** 2
            assert abs(power - 1) < 1e-6

    def test_deterministic(self, tmp_path, profile1, grid):
        sweep = analyze(profile1, SUB, grid, 50.0)
        a = write_touchstone(sweep, tmp_path / "1.s2p").read_bytes()
        b = write_touchstone(sweep, tmp_path / "2.s2p").read_bytes()
        assert a == b

    def test_empty_sweep(self, tmp_path):
        empty = SParameterSweep(np.array([]), np.array([]), np.array([]), np.array([]), 50.0)
        with pytest.raises(InvalidArgumentError):
            write_touchstone(empty, tmp_path / "e.s2p")

    def test_unwritable(self, tmp_path, profile1):
        sweep = analyze(profile1, SUB, FrequencyGrid([1e9]), 50.0)
        with pytest.raises(OSError):
            write_touchstone(sweep, tmp_path / "missing" / "x.s2p")

    def test_reader_formats(self, tmp_path):
        text = "! ma\n# GHZ S MA R 75\n1 0.5 90 1 0 1 0 0.5 -90\n"
        (tmp_path / "ma.s2p").write_text(text)
        s = read_touchstone(tmp_path / "ma.s2p")
        assert s.frequencies[0] == 1e9
        assert s.z_ref == 75.0
        assert s.s11[0] == pytest.approx(0.5j, abs=1e-15)
        (tmp_path / "db.s2p").write_text("# MHZ S DB\n10 -6.0206 0 0 0 0 0 0 0\n")
        s = read_touchstone(tmp_path / "db.s2p")
        assert abs(s.s11[0]) == pytest.approx(0.5, rel=1e-5)


class TestProfileCsv:
    def test_three_samples(self, tmp_path, profile1):
        path = write_profile_csv(profile1, SUB, 3, tmp_path / "p.csv")
        rows = list(csv.reader(path.open()))
        assert rows[0] == ["z_m", "w_over_h", "z0_ohms", "eps_eff"]
        z = [float(r[0]) for r in rows[1:]]
        wh = [float(r[1]) for r in rows[1:]]
        assert z == [0.0, 0.05, 0.1]
        assert wh == pytest.approx([2.220, 0.364, 2.220], abs=5e-4)
        assert abs(wh[0] - wh[-1]) < 1e-12

    def test_dense(self, tmp_path, profile1):
        path = write_profile_csv(profile1, SUB, 1001, tmp_path / "p.csv")
        text = path.read_bytes()
        assert b"\r" not in text
        assert text.count(b"\n") == 1002

    def test_endpoint_rows_match_port(self, tmp_path, spec1):
        prof = enforce_end_width(np.linspace(-0.3, 0.3, 10), spec1, SUB)
        rows = list(csv.reader(write_profile_csv(prof, SUB, 11, tmp_path / "e.csv").open()))
        assert float(rows[1][2]) == pytest.approx(50.0, rel=1e-9)
        assert float(rows[-1][2]) == pytest.approx(50.0, rel=1e-9)

    def test_samples_checked(self, tmp_path, profile1):
        with pytest.raises(InvalidArgumentError):
            write_profile_csv(profile1, SUB, 1, tmp_path / "p.csv")


class TestGeometrySvg:
    def test_uniform_is_rectangle(self, tmp_path):
        prof = FourierWidthProfile.uniform(0.1, 2.0, 3)
        _, pts = polygon_points(write_geometry_svg(prof, SUB, tmp_path / "u.svg"))
        half_mm = 0.5 * 2.0 * SUB.h * 1e3
        assert np.allclose(np.abs(pts[:, 1]), half_mm, atol=1e-6)
        assert pts[:, 0].min() == 0.0 and pts[:, 0].max() == pytest.approx(100.0)

    def test_waist_matches_profile(self, tmp_path, profile1):
        root, pts = polygon_points(write_geometry_svg(profile1, SUB, tmp_path / "g.svg"))
        assert root.get("version") == "1.1"
        top = pts[: len(pts) // 2]
        assert len(top) >= 501
        dense = profile1.evaluate(np.linspace(0, 0.1, 20001)).min()
        waist = 2 * np.abs(top[:, 1]).min() / (SUB.h * 1e3)
        assert waist == pytest.approx(dense, rel=1e-3)

    def test_mirror(self, tmp_path, profile1):
        _, a = polygon_points(write_geometry_svg(profile1, SUB, tmp_path / "a.svg"))
        _, b = polygon_points(write_geometry_svg(profile1.mirrored(), SUB, tmp_path / "b.svg"))
        n = len(a) // 2
        assert np.allclose(a[:n, 1], b[:n, 1][::-1], atol=2e-6)

    def test_scale_annotation(self, tmp_path, profile1):
        root, _ = polygon_points(write_geometry_svg(profile1, SUB, tmp_path / "s.svg"))
        assert root.find(f"{SVG_NS}line[@id='scale']") is not None
        label = root.find(f"{SVG_NS}text").text
        assert label.endswith("mm (line length 100 mm)")

    def test_sample_floor(self, tmp_path, profile1):
        with pytest.raises(InvalidArgumentError):
            write_geometry_svg(profile1, SUB, tmp_path / "x.svg", samples=500)


class TestReportJson:
    def test_sorted_and_stable(self, tmp_path):
        p = write_report_json({"b": 1, "a": [1.5, math.pi]}, tmp_path / "r.json")
        text = p.read_text()
        assert text.index('"a"') < text.index('"b"')
        assert text.endswith("\n")
