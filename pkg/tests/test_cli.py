"""Tests for the command line interface, job specs, and exporters."""

import json
import math

import numpy as np
import pytest

from flexoct import cli
from flexoct.builders import build_type1
from flexoct.cli import (JobSpec, ParseError, ValidationError, export_frames,
                         load_spec, read_obj, write_obj)
from flexoct.flexion import DriveSpec, FlexionPath, flex_path
from flexoct.octahedron import EDGE_ORDER, edge_lengths, regular_octahedron

EXAMPLE_T1 = {"A": [1, 0, 0.5], "B": [0.1, 1, -0.4], "F": [0.7, -0.8, 0.1]}


def write_spec(tmp_path, obj, name="job.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return p


class TestLoadSpec:
    def test_minimal_build(self, tmp_path):
        spec = load_spec(write_spec(tmp_path, {
            "command": "build-type1", "points": EXAMPLE_T1}))
        assert spec.command == "build-type1"
        assert spec.payload["axis_direction"] == [0, 0, 1]  # default filled

    def test_unknown_key_rejected(self, tmp_path):
        with pytest.raises(ValidationError):
            load_spec(write_spec(tmp_path, {
                "command": "build-type1", "points": EXAMPLE_T1, "bogus": 1}))
        with pytest.raises(ValidationError):
            load_spec(write_spec(tmp_path, {
                "command": "build-type1", "points": EXAMPLE_T1,
                "drive": {"max_steps": 3}}))  # drive belongs to flex/verify only

    def test_negative_edge_length_names_field(self, tmp_path):
        lengths = {e: 1.0 for e in EDGE_ORDER}
        lengths["BC"] = -2.0
        with pytest.raises(ValidationError) as err:
            load_spec(write_spec(tmp_path, {
                "command": "classify", "edge_lengths": lengths}))
        assert "edge_lengths.BC" in str(err.value)

    def test_positions_take_precedence_with_warning(self, tmp_path):
        r = regular_octahedron()
        raw = {"command": "classify",
               "positions": r.as_dict(),
               "edge_lengths": {e: 1.0 for e in EDGE_ORDER}}
        with pytest.warns(UserWarning, match="precedence"):
            spec = load_spec(write_spec(tmp_path, raw))
        assert "positions" in spec.payload

    def test_parse_error_has_location(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"command": "fourbar",\n  "sides": [1, 1, 1, ]}')
        with pytest.raises(ParseError) as err:
            load_spec(p)
        assert "line 2" in str(err.value)

    def test_unknown_command(self, tmp_path):
        with pytest.raises(ValidationError):
            load_spec(write_spec(tmp_path, {"command": "explode"}))


class TestObjRoundTrip:
    def test_coordinates_survive(self, tmp_path, rng):
        from conftest import random_generic_realization
        r = random_generic_realization(rng)
        write_obj(r, tmp_path / "frame.obj")
        back = read_obj(tmp_path / "frame.obj")
        assert np.array_equal(back.points, r.points)  # repr round-trips exactly

    def test_edge_lengths_reproduced(self, tmp_path):
        r = build_type1(EXAMPLE_T1["A"], EXAMPLE_T1["B"], EXAMPLE_T1["F"])
        write_obj(r, tmp_path / "frame.obj")
        el0 = edge_lengths(r)
        el1 = edge_lengths(read_obj(tmp_path / "frame.obj"))
        for e in EDGE_ORDER:
            assert abs(el1[e] - el0[e]) <= 1e-9 * el0[e]

    def test_face_block(self, tmp_path):
        write_obj(regular_octahedron(), tmp_path / "frame.obj")
        lines = (tmp_path / "frame.obj").read_text().splitlines()
        faces = [ln for ln in lines if ln.startswith("f ")]
        assert faces[0] == "f 1 2 3"   # ABC
        assert faces[1] == "f 4 5 6"   # DEF
        assert len(faces) == 8


class TestExportFrames:
    def test_three_frames(self, tmp_path):
        r = build_type1((1, 0, 0.5), (0.1, 1, -0.4), (0.7, -0.8, 0.1))
        path = flex_path(r, drive=DriveSpec(max_steps=2))
        files = export_frames(path, tmp_path / "out")
        assert "frame_0000.obj" in files and "frame_0002.obj" in files
        csv = (tmp_path / "out" / "path.csv").read_text().splitlines()
        assert len(csv) == 4  # header + 3 rows
        assert csv[0].split(",")[2] == "dih_AB"

    def test_empty_path(self, tmp_path):
        files = export_frames(FlexionPath(frames=[]), tmp_path / "out")
        assert files == ["path.csv"]
        csv = (tmp_path / "out" / "path.csv").read_text().splitlines()
        assert len(csv) == 1


class TestRun:
    def test_fourbar_prints_coefficients(self, tmp_path, capsys):
        spec = write_spec(tmp_path, {"command": "fourbar", "sides": [1, 1, 1, 1]})
        code = cli.main(["fourbar", "--spec", str(spec), "--out", str(tmp_path / "o")])
        assert code == 0
        out = capsys.readouterr().out
        assert "(8" in out and "-4" in out
        summary = json.loads((tmp_path / "o" / "summary.json").read_text())
        assert summary["schema"] == 1
        assert summary["coefficients"] == [8, 0, -4.0, 0, 0]

    def test_build_type1(self, tmp_path):
        spec = write_spec(tmp_path, {"command": "build-type1",
                                     "points": EXAMPLE_T1})
        code = cli.main(["build-type1", "--spec", str(spec),
                         "--out", str(tmp_path / "o")])
        assert code == 0
        assert (tmp_path / "o" / "realization.obj").exists()
        summary = json.loads((tmp_path / "o" / "summary.json").read_text())
        assert summary["realization"]["matches_type1"]
        assert summary["realization"]["flex_dimension"] == 1

    def test_flex_on_mirror_exits_2(self, tmp_path):
        spec = write_spec(tmp_path, {
            "command": "flex",
            "source": {"command": "build-type1-mirror", "points": EXAMPLE_T1},
            "drive": {"max_steps": 10}})
        code = cli.main(["flex", "--spec", str(spec), "--out", str(tmp_path / "o")])
        assert code == 2
        summary = json.loads((tmp_path / "o" / "summary.json").read_text())
        assert summary["status"] == "error"
        assert summary["error"]["type"] == "NotFlexible"

    def test_verify_on_type1(self, tmp_path):
        spec = write_spec(tmp_path, {
            "command": "verify",
            "source": {"command": "build-type1", "points": EXAMPLE_T1},
            "drive": {"max_steps": 25}})
        code = cli.main(["verify", "--spec", str(spec), "--out", str(tmp_path / "o")])
        assert code == 0
        assert (tmp_path / "o" / "verify_report.json").exists()
        assert (tmp_path / "o" / "opposite_dihedrals.csv").exists()
        report = json.loads((tmp_path / "o" / "verify_report.json").read_text())
        assert all(t["relation"] in ("equal", "supplementary")
                   for t in report["opposite_dihedrals"])
        assert report["mannheim_residuals"]["ABC"]["max"] <= 1e-6

    def test_invalid_spec_exits_1(self, tmp_path):
        spec = write_spec(tmp_path, {"command": "fourbar", "sides": [1, 1, 1]})
        assert cli.main(["fourbar", "--spec", str(spec),
                         "--out", str(tmp_path / "o")]) == 1

    def test_command_mismatch(self, tmp_path, capsys):
        spec = write_spec(tmp_path, {"command": "fourbar", "sides": [1, 1, 1, 1]})
        assert cli.main(["classify", "--spec", str(spec)]) == 1
        assert "fourbar" in capsys.readouterr().err

    def test_classify_by_lengths(self, tmp_path):
        spec = write_spec(tmp_path, {
            "command": "classify",
            "edge_lengths": {e: 1.0 for e in EDGE_ORDER}})
        code = cli.main(["classify", "--spec", str(spec),
                         "--out", str(tmp_path / "o")])
        assert code == 0
        summary = json.loads((tmp_path / "o" / "summary.json").read_text())
        assert summary["matches_type1"] is True
        assert summary["violations"] == []

    def test_sweep(self, tmp_path):
        spec = write_spec(tmp_path, [
            {"command": "fourbar", "sides": [1, 1, 1, 1]},
            {"command": "fourbar", "sides": [1, 2, 1.5, 1]}])
        code = cli.main(["fourbar", "--spec", str(spec),
                         "--out", str(tmp_path / "o"), "--jobs", "2"])
        assert code == 0
        assert (tmp_path / "o" / "case_000" / "summary.json").exists()
        assert (tmp_path / "o" / "case_001" / "summary.json").exists()

    def test_steps_override(self, tmp_path):
        spec = write_spec(tmp_path, {
            "command": "flex",
            "source": {"command": "build-type1", "points": EXAMPLE_T1},
            "drive": {"max_steps": 500}})
        code = cli.main(["flex", "--spec", str(spec), "--out", str(tmp_path / "o"),
                         "--steps", "5"])
        assert code == 0
        summary = json.loads((tmp_path / "o" / "summary.json").read_text())
        assert summary["frames"] == 6
