import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linestab.geom import (
    Ball,
    Direction,
    ProjectedDisk,
    Scene,
    SceneError,
    SolverError,
    disks_common_point,
    orthonormal_basis_of_complement,
    project_to_orthogonal_plane,
    random_disjoint_scene,
    random_scene_with_transversal,
    scene_classification,
    transversal_order,
)
from conftest import collinear_scene, line_entry_parameters


class TestValidation:
    def test_radius_must_be_positive(self):
        with pytest.raises(SceneError):
            Ball([0, 0, 0], 0.0)
        with pytest.raises(SceneError):
            Ball([0, 0, 0], -1.0)

    def test_overlap_rejected_without_flag(self):
        with pytest.raises(SceneError, match="disjoint"):
            Scene(3, (Ball([0, 0, 0], 1.0), Ball([1, 0, 0], 1.0)))

    def test_overlap_allowed_with_flag(self):
        sc = Scene(3, (Ball([0, 0, 0], 1.0), Ball([1, 0, 0], 1.0)), allow_overlap=True)
        assert sc.overlapping_pairs() == [(0, 1)]

    def test_dimension_mismatch(self):
        with pytest.raises(SceneError):
            Scene(3, (Ball([0, 0], 1.0),))

    def test_zero_direction_rejected(self):
        with pytest.raises(SceneError):
            Direction([0.0, 0.0, 0.0])


class TestSceneJson:
    def test_round_trip_exact(self, tmp_path):
        scene = random_disjoint_scene(4, 3, (0.5, 2.0), seed=3)
        path = tmp_path / "scene.json"
        scene.save(path)
        back = Scene.load(path)
        assert back.dimension == scene.dimension
        np.testing.assert_array_equal(back.centers, scene.centers)
        np.testing.assert_array_equal(back.radii, scene.radii)

    def test_schema_fields(self):
        doc = collinear_scene().to_json_dict()
        assert doc["dimension"] == 3
        assert doc["order_is_significant"] is True
        assert len(doc["balls"]) == 3
        assert set(doc["balls"][0]) == {"center", "radius"}


class TestProjection:
    def test_collinear_axis_projection(self):
        # projecting along the line of centers collapses all disks onto one
        disks = project_to_orthogonal_plane(collinear_scene(), Direction([1, 0, 0]))
        for d in disks:
            np.testing.assert_allclose(d.center2, 0.0, atol=1e-12)
            assert d.radius == 1.0

    def test_z_axis_projection_is_xy(self):
        disks = project_to_orthogonal_plane(collinear_scene(), Direction([0, 0, 1]))
        centers = np.array([d.center2 for d in disks])
        np.testing.assert_allclose(
            np.sort(np.linalg.norm(centers - centers[0], axis=1)), [0, 4, 8], atol=1e-12
        )

    def test_rotation_invariance(self, rng):
        scene = random_disjoint_scene(4, 3, (0.5, 1.5), seed=9)
        u = rng.normal(size=3)
        Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        rotated = Scene(3, tuple(Ball(Q @ b.center, b.radius) for b in scene.balls))
        d1 = project_to_orthogonal_plane(scene, Direction(u))
        d2 = project_to_orthogonal_plane(rotated, Direction(Q @ u))
        c1 = np.array([d.center2 for d in d1])
        c2 = np.array([d.center2 for d in d2])
        for i in range(len(c1)):
            for j in range(len(c1)):
                assert np.isclose(
                    np.linalg.norm(c1[i] - c1[j]), np.linalg.norm(c2[i] - c2[j]), atol=1e-9
                )

    def test_projection_contracts_distances(self, rng):
        scene = random_disjoint_scene(5, 4, (0.5, 1.5), seed=11)
        for _ in range(20):
            u = Direction(rng.normal(size=4))
            disks = project_to_orthogonal_plane(scene, u)
            c2 = np.array([d.center2 for d in disks])
            for i in range(5):
                for j in range(i + 1, 5):
                    orig = np.linalg.norm(scene.balls[i].center - scene.balls[j].center)
                    proj = np.linalg.norm(c2[i] - c2[j])
                    assert proj <= orig + 1e-12

    def test_perpendicular_edge_preserves_distance(self):
        scene = Scene(3, (Ball([0, 0, 0], 1.0), Ball([0, 5, 0], 1.0)))
        disks = project_to_orthogonal_plane(scene, Direction([1, 0, 0]))
        d = np.linalg.norm(disks[0].center2 - disks[1].center2)
        assert np.isclose(d, 5.0, atol=1e-12)

    def test_basis_is_orthonormal_and_deterministic(self, rng):
        for d in (2, 3, 4, 6):
            u = rng.normal(size=d)
            B1 = orthonormal_basis_of_complement(u)
            B2 = orthonormal_basis_of_complement(u)
            np.testing.assert_array_equal(B1, B2)
            np.testing.assert_allclose(B1 @ B1.T, np.eye(d - 1), atol=1e-12)
            np.testing.assert_allclose(B1 @ (u / np.linalg.norm(u)), 0.0, atol=1e-12)


def brute_force_grid_minimax(centers, radii, resolution=201):
    """Plain dense-grid evaluation of min_x max_i (|x-c_i| - r_i).

    No refinement: the value is exact up to one grid cell (the objective is
    1-Lipschitz), which makes the error bound explicit.
    """
    centers = np.asarray(centers, dtype=float)
    radii = np.asarray(radii, dtype=float)
    lo = centers.min(axis=0) - radii.max()
    hi = centers.max(axis=0) + radii.max()
    axes = [np.linspace(lo[k], hi[k], resolution) for k in range(centers.shape[1])]
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.column_stack([g.ravel() for g in grids])
    vals = np.max(
        np.linalg.norm(pts[:, None, :] - centers[None, :, :], axis=2) - radii[None, :],
        axis=1,
    )
    cell = float(np.linalg.norm([(hi[k] - lo[k]) / (resolution - 1) for k in range(2)]))
    return float(np.min(vals)), cell


def simplex_minimax(centers, radii, starts=8):
    """Independent high-accuracy oracle: multi-start downhill simplex."""
    from scipy.optimize import minimize

    centers = np.asarray(centers, dtype=float)
    radii = np.asarray(radii, dtype=float)

    def f(x):
        return float(np.max(np.linalg.norm(centers - x, axis=1) - radii))

    best = math.inf
    rng = np.random.default_rng(1234)
    inits = [centers.mean(axis=0)] + [
        rng.uniform(centers.min(axis=0), centers.max(axis=0)) for _ in range(starts)
    ]
    for x0 in inits:
        m = minimize(
            f, x0, method="Nelder-Mead",
            options={"xatol": 1e-13, "fatol": 1e-14, "maxiter": 8000},
        )
        best = min(best, float(m.fun))
    return best


class TestDisksCommonPoint:
    def test_two_unit_disks_midpoint(self):
        res = disks_common_point(
            [ProjectedDisk([0.0, 0.0], 1.0), ProjectedDisk([1.0, 0.0], 1.0)]
        )
        np.testing.assert_allclose(res.point, [0.5, 0.0], atol=1e-9)
        assert np.isclose(res.slack, -0.5, atol=1e-12)

    def test_equilateral_side3_infeasible(self):
        pts = [(0, 0), (3, 0), (1.5, 1.5 * math.sqrt(3))]
        res = disks_common_point([ProjectedDisk(p, 1.0) for p in pts])
        # optimum at circumcenter; slack = circumradius - 1 = sqrt(3) - 1
        assert res.slack > 0
        assert np.isclose(res.slack, math.sqrt(3) - 1, atol=1e-9)

    def test_feasibility_flips_at_sqrt3(self):
        # circumradius of an equilateral triangle with side s is s/sqrt(3);
        # three unit disks at its vertices share a point iff s <= sqrt(3)
        for s, feasible in ((math.sqrt(3) - 1e-3, True), (math.sqrt(3) + 1e-3, False)):
            pts = [(0, 0), (s, 0), (s / 2, s * math.sqrt(3) / 2)]
            res = disks_common_point([ProjectedDisk(p, 1.0) for p in pts])
            assert (res.slack <= 0) == feasible
            # analytic: optimum at the circumcenter, slack = s/sqrt(3) - 1
            assert abs(res.slack - (s / math.sqrt(3) - 1.0)) <= 1e-12

    def test_matches_brute_force_on_random_instances(self, rng):
        for trial in range(12):
            n = int(rng.integers(2, 7))
            centers = rng.uniform(-3, 3, size=(n, 2))
            radii = rng.uniform(0.2, 2.0, size=n)
            res = disks_common_point(
                [ProjectedDisk(c, r) for c, r in zip(centers, radii)]
            )
            grid_val, cell = brute_force_grid_minimax(centers, radii)
            assert res.slack <= grid_val + 1e-12  # grid points are upper bounds
            assert grid_val <= res.slack + cell   # 1-Lipschitz grid error bound
            # independent high-accuracy oracle
            assert abs(res.slack - simplex_minimax(centers, radii)) <= 1e-8

    def test_empty_input_rejected(self):
        with pytest.raises(SolverError):
            disks_common_point([])

    def test_optimality_certificate(self, rng):
        # at the optimum, zero lies in the convex hull of the active cone
        # gradients (or the point coincides with a deepest center)
        for trial in range(15):
            n = int(rng.integers(2, 7))
            centers = rng.uniform(-3, 3, size=(n, 2))
            radii = rng.uniform(0.2, 2.0, size=n)
            res = disks_common_point(
                [ProjectedDisk(c, r) for c, r in zip(centers, radii)]
            )
            g = np.linalg.norm(centers - res.point, axis=1) - radii
            active = np.nonzero(g >= res.slack - 1e-9)[0]
            dists = np.linalg.norm(centers[active] - res.point, axis=1)
            if np.any(dists < 1e-9):
                continue  # optimum at a center: the single-disk case
            grads = (res.point - centers[active]) / dists[:, None]
            # least-squares convex combination of gradients closest to zero
            k = len(active)
            A = np.vstack([grads.T, np.ones(k)])
            b = np.concatenate([np.zeros(2), [1.0]])
            lam, *_ = np.linalg.lstsq(A, b, rcond=None)
            lam = np.clip(lam, 0, None)
            if lam.sum() > 0:
                lam /= lam.sum()
            resid = np.linalg.norm(grads.T @ lam)
            assert resid <= 1e-6, (trial, resid, k)


class TestTransversalOrder:
    def test_axis_order(self):
        res = transversal_order(collinear_scene(), Direction([1, 0, 0]))
        assert res.order == (0, 1, 2)
        assert not res.is_tied

    def test_reversed_axis(self):
        res = transversal_order(collinear_scene(), Direction([-1, 0, 0]))
        assert res.order == (2, 1, 0)

    def test_tie_reported(self):
        res = transversal_order(collinear_scene(), Direction([0, 0, 1]))
        assert res.is_tied

    def test_entry_point_oracle(self):
        # a real transversal's entry order must match the center-key order
        for seed in range(5):
            scene, direction = random_scene_with_transversal(4, 3, (0.6, 1.4), seed=seed)
            entries = line_entry_parameters([0, 0, 0], direction.components, scene)
            assert all(e is not None for e in entries)
            oracle = tuple(int(i) for i in np.argsort(entries))
            assert transversal_order(scene, direction).order == oracle


class TestSceneClassification:
    def test_thinly_distributed(self):
        s = 5.0
        pts = [(0, 0, 0), (s, 0, 0), (s / 2, s * math.sqrt(3) / 2, 0)]
        flags = scene_classification(Scene(3, tuple(Ball(p, 1.0) for p in pts)))
        assert flags.thinly_distributed
        assert flags.pairwise_inflatable

    def test_inflatable_but_not_thin(self):
        s = math.sqrt(4.5)
        pts = [(0, 0, 0), (s, 0, 0), (s / 2, s * math.sqrt(3) / 2, 0)]
        flags = scene_classification(Scene(3, tuple(Ball(p, 1.0) for p in pts)))
        assert flags.pairwise_inflatable
        assert not flags.thinly_distributed

    def test_collinear_detection(self):
        assert scene_classification(collinear_scene()).collinear_centers
        sc = Scene(3, (Ball([0, 0, 0], 1.0), Ball([4, 0, 0], 1.0), Ball([2, 5, 0], 1.0)))
        assert not scene_classification(sc).collinear_centers


class TestGenerators:
    def test_determinism(self):
        a = random_disjoint_scene(3, 3, (1.0, 1.0), seed=7)
        b = random_disjoint_scene(3, 3, (1.0, 1.0), seed=7)
        np.testing.assert_array_equal(a.centers, b.centers)
        np.testing.assert_array_equal(a.radii, b.radii)

    def test_generated_scenes_disjoint(self):
        for seed in range(8):
            scene = random_disjoint_scene(5, 3, (0.5, 2.0), seed=seed)
            assert not scene.overlapping_pairs()

    def test_transversal_constraint(self):
        scene, direction = random_scene_with_transversal(5, 4, (1.0, 3.0), seed=1)
        disks = project_to_orthogonal_plane(scene, direction)
        assert disks_common_point(disks).slack <= 0
        # the ordered query along the construction direction is feasible
        from linestab.cone import OrderedQuery, direction_feasible

        order = transversal_order(scene, direction).order
        assert direction_feasible(OrderedQuery(scene, order), direction).feasible

    def test_with_transversal_kwarg(self):
        a = random_disjoint_scene(4, 3, (0.8, 1.5), seed=6, with_transversal=True)
        b, _ = random_scene_with_transversal(4, 3, (0.8, 1.5), seed=6)
        np.testing.assert_array_equal(a.centers, b.centers)

    def test_collinear_center_direction_always_feasible(self):
        scene = collinear_scene()
        disks = project_to_orthogonal_plane(scene, Direction([1, 0, 0]))
        res = disks_common_point(disks)
        assert res.slack <= 0
        assert transversal_order(scene, Direction([1, 0, 0])).order == (0, 1, 2)

    def test_bad_arguments(self):
        with pytest.raises(SceneError):
            random_disjoint_scene(0, 3, (1.0, 2.0), seed=0)
        with pytest.raises(SceneError):
            random_disjoint_scene(3, 1, (1.0, 2.0), seed=0)
        with pytest.raises(SceneError):
            random_disjoint_scene(3, 3, (2.0, 1.0), seed=0)


@settings(max_examples=25, deadline=None)
@given(
    seed=st.integers(0, 10_000),
    ux=st.floats(-1, 1, allow_nan=False),
    uy=st.floats(-1, 1, allow_nan=False),
    uz=st.floats(0.1, 1, allow_nan=False),
)
def test_projection_isometry_property(seed, ux, uy, uz):
    scene = random_disjoint_scene(3, 3, (0.5, 1.5), seed=seed % 50)
    u = Direction([ux, uy, uz])
    disks = project_to_orthogonal_plane(scene, u)
    c2 = np.array([d.center2 for d in disks])
    for i in range(3):
        for j in range(i + 1, 3):
            proj = np.linalg.norm(c2[i] - c2[j])
            orig = np.linalg.norm(scene.balls[i].center - scene.balls[j].center)
            assert proj <= orig + 1e-9
            edge = scene.balls[j].center - scene.balls[i].center
            cos = abs(np.dot(edge, u.components)) / np.linalg.norm(edge)
            if cos < 1e-9:  # edge perpendicular to the direction
                assert np.isclose(proj, orig, atol=1e-9)
