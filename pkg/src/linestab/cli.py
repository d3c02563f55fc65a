"""Command-line surface: scene generation, experiments, certificates, figures.

Every command emits a schema-versioned JSON report (stdout or --out) whose
content is byte-identical across runs for the same command, seed and scene;
wall-clock timings are added only on request so the determinism contract
holds by default.  Exit code 0 means all checked properties hold, 1 reports
a property violation with witnesses, 2 a usage error.
"""
from __future__ import annotations

import json
import math
import os
import sys
import time

# honor the thread-count override before any BLAS-backed import happens
if os.environ.get("LINESTAB_THREADS"):
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, os.environ["LINESTAB_THREADS"])

import click
import numpy as np

from . import cone as cone_mod
from . import flexprobe, polyid, sextic
from .geom import (
    Ball,
    Direction,
    Scene,
    SceneError,
    SolverError,
    random_disjoint_scene,
    random_scene_with_transversal,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

CURVE_COLORS = {
    "sigma": "#cc0000",
    "hessian": "#000000",
    "pair01": "#1f4fd8",
    "pair02": "#1a8f1a",
    "pair12": "#808080",
}

# Frozen demonstration scenes, both of the "second ball slides toward the
# first" form.  The transition family is spread out; its overlapping member
# has a non-convex entry-order cone (order 0,1,2) while the disjoint member
# has none.  The flexdemo family is compact, so its cone boundary carries
# sextic arcs: the disjoint member keeps all sextic-Hessian intersections
# strictly interior, the overlapping member pulls them onto the boundary.
_TRANSITION_RADII = (1.864, 0.952, 0.772)
_TRANSITION_THIRD = (-3.484, 1.766, 0.0)
_TRANSITION_T = {"disjoint": 3.2, "tangent": 2.816, "overlapping": 1.544}

_FLEXDEMO_THIRD = (1.1, 2.2, 0.0)
_FLEXDEMO_T = {"disjoint": 2.2, "tangent": 2.0, "overlapping": 1.95}


def _transition_scene(kind: str) -> Scene:
    t = _TRANSITION_T[kind]
    r = _TRANSITION_RADII
    return Scene(
        3,
        (
            Ball([0.0, 0.0, 0.0], r[0]),
            Ball([t, 0.0, 0.0], r[1]),
            Ball(list(_TRANSITION_THIRD), r[2]),
        ),
        allow_overlap=(kind != "disjoint"),
    )


def _flexdemo_scene(kind: str) -> Scene:
    t = _FLEXDEMO_T[kind]
    return Scene(
        3,
        (
            Ball([0.0, 0.0, 0.0], 1.0),
            Ball([t, 0.0, 0.0], 1.0),
            Ball(list(_FLEXDEMO_THIRD), 1.0),
        ),
        allow_overlap=(kind != "disjoint"),
    )


def preset_scene(name: str) -> Scene:
    """Built-in demonstration scenes used by tests and figure reproduction."""
    if name == "collinear":
        return Scene(
            3,
            (Ball([0, 0, 0], 1.0), Ball([4, 0, 0], 1.0), Ball([8, 0, 0], 1.0)),
        )
    if name == "pinned":
        return Scene(
            3,
            (Ball([0, 1, 0], 1.0), Ball([3, -1, 0], 1.0), Ball([6, 1.5, 0], 1.5)),
        )
    if name == "two-permutations":
        return Scene(
            3,
            (
                Ball([2.04, 1.47, 2.0], 1.11),
                Ball([-0.75, 1.91, 1.2], 0.69),
                Ball([0.0, -33.0, 0.0], 33.0),
            ),
        )
    if name.startswith("transition-"):
        kind = name.split("-", 1)[1]
        if kind in _TRANSITION_T:
            return _transition_scene(kind)
    if name.startswith("flexdemo-"):
        kind = name.split("-", 1)[1]
        if kind in _FLEXDEMO_T:
            return _flexdemo_scene(kind)
    raise SceneError(f"unknown preset {name!r}")


PRESET_NAMES = (
    "collinear",
    "pinned",
    "two-permutations",
    "transition-disjoint",
    "transition-tangent",
    "transition-overlapping",
    "flexdemo-disjoint",
    "flexdemo-tangent",
    "flexdemo-overlapping",
)


def _load_scene(path: str) -> Scene:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise click.ClickException(f"scene file not found: {path}")
    except json.JSONDecodeError as exc:
        raise _UsageError(
            f"malformed scene JSON at {path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        )
    try:
        return Scene.from_json_dict(data)
    except SceneError as exc:
        raise _UsageError(f"invalid scene {path}: {exc}")


class _UsageError(click.ClickException):
    exit_code = EXIT_USAGE


def _emit_report(report: dict, out: str | None, timings: dict | None) -> None:
    if timings is not None:
        report = dict(report)
        report["timings"] = timings
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report_skeleton(command: str, config: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
    }


def _parse_order(order: str | None, n: int) -> tuple[int, ...]:
    if order is None:
        return tuple(range(n))
    try:
        parts = tuple(int(x) for x in order.replace(",", " ").split())
    except ValueError:
        raise _UsageError(f"cannot parse order {order!r}")
    if sorted(parts) != list(range(n)):
        raise _UsageError(f"order {order!r} is not a permutation of 0..{n - 1}")
    return parts


@click.group()
def main():
    """Line transversals to disjoint balls: sextics, cones, certificates."""


@main.command("generate-scene")
@click.option("--preset", type=click.Choice(PRESET_NAMES), default=None)
@click.option("--n", type=int, default=3, show_default=True)
@click.option("--dim", type=int, default=3, show_default=True)
@click.option("--rmin", type=float, default=1.0, show_default=True)
@click.option("--rmax", type=float, default=2.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--with-transversal", is_flag=True, default=False)
@click.option("--out", type=str, default=None, help="scene JSON path (default stdout)")
def generate_scene(preset, n, dim, rmin, rmax, seed, with_transversal, out):
    """Write a scene JSON: a preset or a random disjoint family."""
    try:
        if preset:
            scene = preset_scene(preset)
            extra = {"preset": preset}
        elif with_transversal:
            scene, direction = random_scene_with_transversal(n, dim, (rmin, rmax), seed)
            extra = {"transversal_direction": [float(x) for x in direction.components]}
        else:
            scene = random_disjoint_scene(n, dim, (rmin, rmax), seed)
            extra = {}
    except (SceneError, SolverError) as exc:
        raise _UsageError(str(exc))
    doc = scene.to_json_dict()
    doc.update(extra)
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


@main.command("check-convexity")
@click.option("--scene", "scene_path", required=True, type=str)
@click.option("--order", type=str, default=None, help="meeting order, e.g. '0,1,2'")
@click.option("--samples", type=int, default=4096, show_default=True)
@click.option("--pairs", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tol", type=float, default=1e-9, show_default=True, envvar="LINESTAB_TOL")
@click.option(
    "--order-semantics",
    type=click.Choice(["center", "entry"]),
    default="center",
    show_default=True,
)
@click.option("--out", type=str, default=None)
@click.option("--timings", is_flag=True, default=False)
def check_convexity(scene_path, order, samples, pairs, seed, tol, order_semantics, out, timings):
    """Geodesic-midpoint convexity certification for one ordered cone."""
    t0 = time.perf_counter()
    scene = _load_scene(scene_path)
    order_t = _parse_order(order, len(scene))
    query = cone_mod.OrderedQuery(scene, order_t)
    rep = cone_mod.cone_convexity_check(
        query, pairs=pairs, tol=tol, seed=seed, lattice=samples,
        order_semantics=order_semantics,
    )
    report = _report_skeleton(
        "check-convexity",
        {
            "scene": scene_path,
            "order": list(order_t),
            "samples": samples,
            "pairs": pairs,
            "seed": seed,
            "tol": tol,
            "order_semantics": order_semantics,
        },
    )
    report["verdicts"] = rep.to_json_dict()
    _emit_report(report, out, {"seconds": time.perf_counter() - t0} if timings else None)
    sys.exit(EXIT_OK if rep.passed else EXIT_VIOLATION)


@main.command("enumerate-permutations")
@click.option("--scene", "scene_path", required=True, type=str)
@click.option("--samples", type=int, default=20000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tol", type=float, default=1e-9, show_default=True, envvar="LINESTAB_TOL")
@click.option("--out", type=str, default=None)
@click.option("--timings", is_flag=True, default=False)
def enumerate_permutations(scene_path, samples, seed, tol, out, timings):
    """Catalog geometric permutations with witness directions."""
    t0 = time.perf_counter()
    scene = _load_scene(scene_path)
    cat = cone_mod.enumerate_geometric_permutations(scene, samples=samples, seed=seed, tol=tol)
    report = _report_skeleton(
        "enumerate-permutations",
        {"scene": scene_path, "samples": samples, "seed": seed, "tol": tol},
    )
    report["verdicts"] = cat.to_json_dict()
    _emit_report(report, out, {"seconds": time.perf_counter() - t0} if timings else None)
    sys.exit(EXIT_OK)


@main.command("count-components")
@click.option("--scene", "scene_path", required=True, type=str)
@click.option("--samples", type=int, default=20000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tol", type=float, default=1e-9, show_default=True, envvar="LINESTAB_TOL")
@click.option("--out", type=str, default=None)
@click.option("--timings", is_flag=True, default=False)
def count_components_cmd(scene_path, samples, seed, tol, out, timings):
    """Count transversal components; must equal the permutation count."""
    t0 = time.perf_counter()
    scene = _load_scene(scene_path)
    sset = cone_mod.sample_scene(scene, samples, seed=seed, tol=tol)
    comp = cone_mod.count_components(scene, samples=samples, seed=seed, tol=tol, sample_set=sset)
    cat = cone_mod.enumerate_geometric_permutations(
        scene, samples=samples, seed=seed, tol=tol, sample_set=sset
    )
    agree = comp.count == len(cat)
    report = _report_skeleton(
        "count-components",
        {"scene": scene_path, "samples": samples, "seed": seed, "tol": tol},
    )
    report["verdicts"] = {
        "components": comp.to_json_dict(),
        "permutations": len(cat),
        "components_equal_permutations": agree,
    }
    _emit_report(report, out, {"seconds": time.perf_counter() - t0} if timings else None)
    sys.exit(EXIT_OK if agree else EXIT_VIOLATION)


@main.command("probe-flex")
@click.option("--scene", "scene_path", required=True, type=str)
@click.option("--boundary-samples", type=int, default=200, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tol", type=float, default=1e-9, show_default=True, envvar="LINESTAB_TOL")
@click.option("--out", type=str, default=None)
@click.option("--timings", is_flag=True, default=False)
def probe_flex(scene_path, boundary_samples, seed, tol, out, timings):
    """Flex-freeness certificate over sampled cone boundary directions."""
    t0 = time.perf_counter()
    scene = _load_scene(scene_path)
    if len(scene) != 3:
        raise _UsageError("probe-flex needs a scene of exactly three balls")
    triple = sextic.Triple.from_scene(scene)
    rep = flexprobe.certify_flex_free(
        triple, boundary_samples=boundary_samples, seed=seed, tol=tol
    )
    report = _report_skeleton(
        "probe-flex",
        {
            "scene": scene_path,
            "scene_data": scene.to_json_dict(),
            "boundary_samples": boundary_samples,
            "seed": seed,
            "tol": tol,
        },
    )
    report["verdicts"] = rep.to_json_dict()
    _emit_report(report, out, {"seconds": time.perf_counter() - t0} if timings else None)
    sys.exit(EXIT_OK if rep.passed else EXIT_VIOLATION)


@main.command("verify-identities")
@click.option("--trials", type=int, default=100, show_default=True)
@click.option("--height", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--out", type=str, default=None)
@click.option("--timings", is_flag=True, default=False)
def verify_identities(trials, height, seed, out, timings):
    """Exact rational verification of the six pipeline identities."""
    t0 = time.perf_counter()
    rep = polyid.schwartz_zippel_suite(trials=trials, height=height, seed=seed)
    report = _report_skeleton(
        "verify-identities", {"trials": trials, "height": height, "seed": seed}
    )
    report["verdicts"] = rep.to_json_dict()
    _emit_report(report, out, {"seconds": time.perf_counter() - t0} if timings else None)
    sys.exit(EXIT_OK if rep.passed else EXIT_VIOLATION)


@main.command("classify-boundary")
@click.option("--scene", "scene_path", required=True, type=str)
@click.option("--direction", type=str, default=None, help="explicit 'x,y,z' on the sextic")
@click.option("--directions", "n_directions", type=int, default=8, show_default=True,
              help="number of traced sextic directions to classify")
@click.option("--chart", type=click.Choice(["u1", "u2", "u3"]), default="u3", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=str, default=None)
@click.option("--timings", is_flag=True, default=False)
def classify_boundary(scene_path, direction, n_directions, chart, seed, out, timings):
    """Classify sextic directions: cone boundary iff crossing the triangle."""
    t0 = time.perf_counter()
    scene = _load_scene(scene_path)
    if len(scene) != 3:
        raise _UsageError("classify-boundary needs a scene of exactly three balls")
    triple = sextic.Triple.from_scene(scene)
    dirs: list[np.ndarray] = []
    if direction is not None:
        try:
            vec = np.array([float(x) for x in direction.replace(",", " ").split()])
        except ValueError:
            raise _UsageError(f"cannot parse direction {direction!r}")
        dirs.append(vec)
    else:
        traces = sextic.trace_curves(triple, chart=chart, grid=160, extent=2.5)
        pts = [p for poly in traces.curves["sigma"] for p in poly]
        if not pts:
            raise _UsageError("no sextic points traced in this chart; try another chart")
        step = max(1, len(pts) // n_directions)
        for p in pts[::step][:n_directions]:
            dirs.append(sextic.chart_point_to_direction(chart, p[0], p[1]))
    results = []
    disagreements = 0
    for vec in dirs:
        try:
            cls = cone_mod.classify_boundary_direction(triple, Direction(vec))
        except SceneError as exc:
            if direction is not None:
                # an explicitly supplied direction must satisfy the
                # precondition; traced directions may straddle the tolerance
                raise _UsageError(str(exc))
            results.append({"direction": [float(x) for x in vec], "error": str(exc)})
            continue
        entry = {
            "direction": [float(x) for x in vec / np.linalg.norm(vec)],
            "on_boundary": cls.on_boundary,
            "crosses_triangle": cls.crosses_triangle,
            "probe_feasible_fraction": cls.feasible_probe_fraction,
            "tag": cls.tag,
        }
        if cls.on_boundary is not None and cls.crosses_triangle is not None:
            entry["agree"] = cls.on_boundary == cls.crosses_triangle
            if not entry["agree"]:
                disagreements += 1
        results.append(entry)
    report = _report_skeleton(
        "classify-boundary",
        {"scene": scene_path, "chart": chart, "seed": seed, "directions": len(dirs)},
    )
    report["verdicts"] = {"classifications": results, "disagreements": disagreements}
    _emit_report(report, out, {"seconds": time.perf_counter() - t0} if timings else None)
    sys.exit(EXIT_OK if disagreements == 0 else EXIT_VIOLATION)


@main.command("trace-curves")
@click.option("--scene", "scene_path", required=True, type=str)
@click.option("--chart", type=click.Choice(["u1", "u2", "u3"]), default="u3", show_default=True)
@click.option("--grid", type=int, default=200, show_default=True)
@click.option("--extent", type=float, default=2.0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "svg"]), default="csv", show_default=True)
@click.option("--hatch-samples", type=int, default=3000, show_default=True,
              help="direction samples for the feasible-region hatching (svg)")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=str, default=None)
def trace_curves_cmd(scene_path, chart, grid, extent, fmt, hatch_samples, seed, out):
    """Trace sextic, Hessian and pair conics in an affine direction chart."""
    scene = _load_scene(scene_path)
    if len(scene) != 3:
        raise _UsageError("trace-curves needs a scene of exactly three balls")
    triple = sextic.Triple.from_scene(scene)
    traces = sextic.trace_curves(triple, chart=chart, grid=grid, extent=extent)
    if fmt == "csv":
        rows = traces.to_csv_rows()
        text = "\n".join(",".join(str(c) for c in row) for row in rows) + "\n"
    else:
        feas = _chart_feasible_points(scene, chart, extent, hatch_samples)
        text = render_figure(traces, feasible_points=feas)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    sys.exit(EXIT_OK)


def _chart_feasible_points(scene: Scene, chart: str, extent: float, count: int) -> np.ndarray:
    """Feasible directions of the scene mapped into the chart plane."""
    side = max(8, int(math.sqrt(count)))
    xs = np.linspace(-extent, extent, side)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    dirs = np.array([sextic.chart_point_to_direction(chart, x, y) for x, y in pts])
    dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
    slacks = cone_mod.minimax_slack_batch(scene.centers, scene.radii, dirs)
    return pts[slacks <= 0.0]


def render_figure(
    traces: sextic.CurveTraces,
    feasible_points: np.ndarray | None = None,
    size: int = 600,
) -> str:
    """Render curve traces as a standalone SVG with the fixed color scheme.

    Colors: sextic red, Hessian black, pair conics blue/green/gray; the
    feasible direction region is hatched with short diagonal strokes.  An
    empty trace set still yields a valid SVG skeleton.
    """
    ext = traces.extent

    def to_px(x, y):
        return (
            (x + ext) / (2 * ext) * size,
            size - (y + ext) / (2 * ext) * size,
        )

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {size} {size}" '
        f'width="{size}" height="{size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    if feasible_points is not None and len(feasible_points):
        h = size / 160.0
        strokes = []
        for x, y in feasible_points:
            px, py = to_px(float(x), float(y))
            strokes.append(f"M{px - h:.1f} {py + h:.1f}L{px + h:.1f} {py - h:.1f}")
        parts.append(
            f'<path d="{" ".join(strokes)}" stroke="#c8a2c8" stroke-width="0.8" fill="none"/>'
        )
    for name, polylines in traces.curves.items():
        color = CURVE_COLORS.get(name, "#444444")
        for poly in polylines:
            if len(poly) < 2:
                continue
            coords = " ".join(
                f"{to_px(float(x), float(y))[0]:.2f},{to_px(float(x), float(y))[1]:.2f}"
                for x, y in poly
            )
            parts.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.4"/>'
            )
    y0 = 18
    for name, color in CURVE_COLORS.items():
        if name in traces.curves:
            parts.append(
                f'<text x="10" y="{y0}" font-size="13" fill="{color}">{name}</text>'
            )
            y0 += 16
    parts.append(f'<text x="10" y="{size - 8}" font-size="11" fill="#333">chart {traces.chart}, '
                 f'extent {traces.extent}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


if __name__ == "__main__":
    main()
