import json

import numpy as np
import pytest
from click.testing import CliRunner

from linestab.cli import main, preset_scene, render_figure
from linestab.sextic import Triple, trace_curves


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, args):
    return runner.invoke(main, args, catch_exceptions=False)


class TestGenerateScene:
    def test_preset_round_trip(self, runner, tmp_path):
        out = tmp_path / "scene.json"
        r = invoke(runner, ["generate-scene", "--preset", "collinear", "--out", str(out)])
        assert r.exit_code == 0
        doc = json.loads(out.read_text())
        assert doc["dimension"] == 3
        assert len(doc["balls"]) == 3

    def test_random_scene_deterministic(self, runner, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for path in (a, b):
            r = invoke(
                runner,
                ["generate-scene", "--n", "4", "--dim", "3", "--seed", "5", "--out", str(path)],
            )
            assert r.exit_code == 0
        assert a.read_text() == b.read_text()

    def test_transversal_direction_recorded(self, runner, tmp_path):
        out = tmp_path / "s.json"
        r = invoke(
            runner,
            ["generate-scene", "--n", "4", "--with-transversal", "--seed", "2", "--out", str(out)],
        )
        assert r.exit_code == 0
        doc = json.loads(out.read_text())
        assert len(doc["transversal_direction"]) == 3


class TestCheckConvexity:
    def test_collinear_scene_passes(self, runner, tmp_path):
        scene = tmp_path / "c.json"
        invoke(runner, ["generate-scene", "--preset", "collinear", "--out", str(scene)])
        r = runner.invoke(
            main,
            [
                "check-convexity", "--scene", str(scene),
                "--samples", "2000", "--pairs", "500", "--seed", "1",
            ],
        )
        assert r.exit_code == 0
        doc = json.loads(r.output)
        assert doc["verdicts"]["pass"] is True
        assert doc["verdicts"]["violation_count"] == 0
        assert doc["schema_version"] == 1
        assert doc["config"]["seed"] == 1

    def test_overlap_panel_fails_entry_semantics(self, runner, tmp_path):
        scene = tmp_path / "ov.json"
        invoke(
            runner,
            ["generate-scene", "--preset", "transition-overlapping", "--out", str(scene)],
        )
        r = runner.invoke(
            main,
            [
                "check-convexity", "--scene", str(scene),
                "--order", "0,1,2", "--order-semantics", "entry",
                "--samples", "2048", "--pairs", "1200", "--seed", "1",
            ],
        )
        assert r.exit_code == 1
        doc = json.loads(r.output)
        assert doc["verdicts"]["violation_count"] >= 1

    def test_malformed_scene_is_usage_error(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"dimension": 3, "balls": [oops')
        r = runner.invoke(main, ["check-convexity", "--scene", str(bad)])
        assert r.exit_code == 2
        assert "line 1" in r.output and "column" in r.output

    def test_unknown_flag_rejected(self, runner):
        r = runner.invoke(main, ["check-convexity", "--scene", "x.json", "--bogus"])
        assert r.exit_code == 2

    def test_bad_order_rejected(self, runner, tmp_path):
        scene = tmp_path / "c.json"
        invoke(runner, ["generate-scene", "--preset", "collinear", "--out", str(scene)])
        r = runner.invoke(
            main, ["check-convexity", "--scene", str(scene), "--order", "0,0,2"]
        )
        assert r.exit_code == 2


class TestVerifyIdentities:
    def test_small_run_passes(self, runner):
        r = runner.invoke(main, ["verify-identities", "--trials", "3", "--seed", "42"])
        assert r.exit_code == 0
        doc = json.loads(r.output)
        assert doc["verdicts"]["pass"] is True
        assert len(doc["verdicts"]["identities"]) == 6

    def test_byte_identical_reports(self, runner, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for path in (a, b):
            r = runner.invoke(
                main,
                ["verify-identities", "--trials", "2", "--seed", "3", "--out", str(path)],
            )
            assert r.exit_code == 0
        assert a.read_bytes() == b.read_bytes()


class TestComponentsAndPermutations:
    def test_two_permutation_preset(self, runner, tmp_path):
        scene = tmp_path / "two.json"
        invoke(runner, ["generate-scene", "--preset", "two-permutations", "--out", str(scene)])
        r = runner.invoke(
            main,
            ["count-components", "--scene", str(scene), "--samples", "20000", "--seed", "0"],
        )
        assert r.exit_code == 0
        doc = json.loads(r.output)
        assert doc["verdicts"]["components"]["count"] == 2
        assert doc["verdicts"]["permutations"] == 2
        assert doc["verdicts"]["components_equal_permutations"] is True

    def test_enumerate_collinear(self, runner, tmp_path):
        scene = tmp_path / "c.json"
        invoke(runner, ["generate-scene", "--preset", "collinear", "--out", str(scene)])
        r = runner.invoke(
            main,
            ["enumerate-permutations", "--scene", str(scene), "--samples", "2000"],
        )
        assert r.exit_code == 0
        doc = json.loads(r.output)
        assert doc["verdicts"]["count"] == 1


class TestProbeFlex:
    def test_disjoint_demo_passes(self, runner, tmp_path):
        scene = tmp_path / "f.json"
        invoke(runner, ["generate-scene", "--preset", "flexdemo-disjoint", "--out", str(scene)])
        r = runner.invoke(
            main,
            ["probe-flex", "--scene", str(scene), "--boundary-samples", "60", "--seed", "0"],
        )
        assert r.exit_code == 0
        doc = json.loads(r.output)
        assert doc["verdicts"]["pass"] is True
        assert doc["verdicts"]["min_margin"] > 0

    def test_overlapping_demo_fails(self, runner, tmp_path):
        scene = tmp_path / "f.json"
        invoke(
            runner,
            ["generate-scene", "--preset", "flexdemo-overlapping", "--out", str(scene)],
        )
        r = runner.invoke(
            main,
            ["probe-flex", "--scene", str(scene), "--boundary-samples", "60", "--seed", "0"],
        )
        assert r.exit_code == 1
        # the violation exit still carries a well-formed report
        doc = json.loads(r.output)
        assert doc["verdicts"]["pass"] is False
        bad = [
            s for s in doc["verdicts"]["samples"]
            if s["disjointness_ok"] is False
            or (s["margin"] is not None and s["margin"] <= 0)
        ]
        assert bad

    def test_needs_three_balls(self, runner, tmp_path):
        scene = tmp_path / "s.json"
        invoke(
            runner,
            ["generate-scene", "--n", "4", "--seed", "0", "--out", str(scene)],
        )
        r = runner.invoke(main, ["probe-flex", "--scene", str(scene)])
        assert r.exit_code == 2


class TestClassifyBoundary:
    def test_demo_scene_agrees(self, runner, tmp_path):
        scene = tmp_path / "f.json"
        invoke(runner, ["generate-scene", "--preset", "flexdemo-disjoint", "--out", str(scene)])
        r = runner.invoke(
            main,
            ["classify-boundary", "--scene", str(scene), "--chart", "u2", "--directions", "6"],
        )
        assert r.exit_code == 0
        doc = json.loads(r.output)
        assert doc["verdicts"]["disagreements"] == 0
        assert len(doc["verdicts"]["classifications"]) >= 1

    def test_explicit_off_curve_direction_is_usage_error(self, runner, tmp_path):
        scene = tmp_path / "f.json"
        invoke(runner, ["generate-scene", "--preset", "flexdemo-disjoint", "--out", str(scene)])
        r = runner.invoke(
            main,
            ["classify-boundary", "--scene", str(scene), "--direction", "0.2,0.9,0.1"],
        )
        assert r.exit_code == 2
        assert "not on the sextic" in r.output


class TestReportSchema:
    def test_every_reporting_command_validates(self, runner, tmp_path):
        scene = tmp_path / "c.json"
        invoke(runner, ["generate-scene", "--preset", "collinear", "--out", str(scene)])
        demo = tmp_path / "f.json"
        invoke(runner, ["generate-scene", "--preset", "flexdemo-disjoint", "--out", str(demo)])
        commands = [
            ["check-convexity", "--scene", str(scene), "--samples", "1024", "--pairs", "100"],
            ["enumerate-permutations", "--scene", str(scene), "--samples", "1000"],
            ["count-components", "--scene", str(scene), "--samples", "1000"],
            ["probe-flex", "--scene", str(demo), "--boundary-samples", "20"],
            ["verify-identities", "--trials", "1"],
            ["classify-boundary", "--scene", str(demo), "--chart", "u2", "--directions", "2"],
        ]
        for args in commands:
            r = runner.invoke(main, args)
            assert r.exit_code in (0, 1), (args, r.output)
            doc = json.loads(r.output)
            assert doc["schema_version"] == 1
            assert doc["command"] == args[0]
            assert isinstance(doc["config"], dict)
            assert isinstance(doc["verdicts"], dict)
            assert "timings" not in doc  # deterministic by default

    def test_timings_flag_adds_block(self, runner):
        r = runner.invoke(main, ["verify-identities", "--trials", "1", "--timings"])
        doc = json.loads(r.output)
        assert "timings" in doc and doc["timings"]["seconds"] > 0


class TestTraceCurves:
    def test_csv_schema(self, runner, tmp_path):
        scene = tmp_path / "c.json"
        invoke(runner, ["generate-scene", "--preset", "collinear", "--out", str(scene)])
        out = tmp_path / "trace.csv"
        r = runner.invoke(
            main,
            [
                "trace-curves", "--scene", str(scene), "--chart", "u1",
                "--grid", "100", "--out", str(out),
            ],
        )
        assert r.exit_code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "curve,chart,x,y"
        assert any(line.startswith("pair01") for line in lines[1:])

    def test_svg_colors_and_hatching(self, runner, tmp_path):
        scene = tmp_path / "f.json"
        invoke(runner, ["generate-scene", "--preset", "flexdemo-disjoint", "--out", str(scene)])
        out = tmp_path / "fig.svg"
        r = runner.invoke(
            main,
            [
                "trace-curves", "--scene", str(scene), "--chart", "u2",
                "--format", "svg", "--grid", "100", "--out", str(out),
            ],
        )
        assert r.exit_code == 0
        svg = out.read_text()
        assert svg.startswith("<svg")
        assert "#cc0000" in svg  # sextic in red
        assert "#000000" in svg  # Hessian in black
        assert "#c8a2c8" in svg  # hatched feasible region strokes

    def test_empty_traces_still_valid_svg(self):
        traces = trace_curves(
            Triple.from_scene(preset_scene("collinear")), chart="u1", grid=24, extent=0.01
        )
        traces.curves = {k: [] for k in traces.curves}
        svg = render_figure(traces)
        assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")

    def test_deterministic_output(self, runner, tmp_path):
        scene = tmp_path / "c.json"
        invoke(runner, ["generate-scene", "--preset", "collinear", "--out", str(scene)])
        outs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            r = runner.invoke(
                main,
                ["trace-curves", "--scene", str(scene), "--grid", "80", "--out", str(out)],
            )
            assert r.exit_code == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
