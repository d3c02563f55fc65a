"""Euclidean primitives for ball scenes in R^d.

Balls, ordered scenes, directions on the unit sphere, orthogonal projection
onto a direction's complement, planar disk feasibility (a convex minimax
problem) and scene classification / generation used throughout the library.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

DISJOINTNESS_MARGIN = 1e-6
DEFAULT_FEASIBILITY_TOL = 1e-10
DIRECTION_NORM_TOL = 1e-12


class SceneError(ValueError):
    """Raised when scene data violates the documented invariants."""


class SolverError(RuntimeError):
    """Raised when a numerical routine cannot produce a trustworthy answer."""


def _as_vector(x, name="vector"):
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise SceneError(f"{name} must be a 1-d sequence, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise SceneError(f"{name} has non-finite entries")
    return v


@dataclass(frozen=True)
class Ball:
    """Closed ball given by its center and (positive) radius."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _as_vector(self.center, "center"))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0:
            raise SceneError(f"radius must be positive, got {self.radius}")

    @property
    def dimension(self) -> int:
        return self.center.shape[0]

    @property
    def squared_radius(self) -> float:
        return self.radius * self.radius


@dataclass(frozen=True)
class Scene:
    """Ordered family of balls; the list order is the prescribed meeting order.

    Pairwise strict disjointness is enforced unless ``allow_overlap`` is set,
    which exists only for tangent/overlapping demonstration scenes.
    """

    dimension: int
    balls: tuple[Ball, ...]
    allow_overlap: bool = False

    def __post_init__(self):
        object.__setattr__(self, "balls", tuple(self.balls))
        if self.dimension < 2:
            raise SceneError("dimension must be at least 2")
        if not self.balls:
            raise SceneError("scene needs at least one ball")
        for b in self.balls:
            if b.dimension != self.dimension:
                raise SceneError(
                    f"ball of dimension {b.dimension} in scene of dimension {self.dimension}"
                )
        if not self.allow_overlap:
            bad = self.overlapping_pairs()
            if bad:
                raise SceneError(f"balls are not pairwise disjoint: pairs {bad}")

    def overlapping_pairs(self) -> list[tuple[int, int]]:
        bad = []
        for i, j in itertools.combinations(range(len(self.balls)), 2):
            bi, bj = self.balls[i], self.balls[j]
            if np.linalg.norm(bi.center - bj.center) <= bi.radius + bj.radius:
                bad.append((i, j))
        return bad

    def __len__(self) -> int:
        return len(self.balls)

    @property
    def centers(self) -> np.ndarray:
        return np.array([b.center for b in self.balls])

    @property
    def radii(self) -> np.ndarray:
        return np.array([b.radius for b in self.balls])

    def diameter(self) -> float:
        """Diameter of the union of the balls (used for tolerance scaling)."""
        if len(self.balls) == 1:
            return 2.0 * self.balls[0].radius
        best = 0.0
        for i, j in itertools.combinations(range(len(self.balls)), 2):
            bi, bj = self.balls[i], self.balls[j]
            d = np.linalg.norm(bi.center - bj.center) + bi.radius + bj.radius
            best = max(best, d)
        return best

    def to_json_dict(self) -> dict:
        out = {
            "dimension": self.dimension,
            "order_is_significant": True,
            "balls": [
                {"center": [float(x) for x in b.center], "radius": float(b.radius)}
                for b in self.balls
            ],
        }
        if self.allow_overlap:
            out["allow_overlap"] = True
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "Scene":
        try:
            dim = int(data["dimension"])
            balls = tuple(
                Ball(np.array(b["center"], dtype=float), float(b["radius"]))
                for b in data["balls"]
            )
        except (KeyError, TypeError) as exc:
            raise SceneError(f"malformed scene JSON: {exc}") from exc
        return cls(dim, balls, allow_overlap=bool(data.get("allow_overlap", False)))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Scene":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


@dataclass(frozen=True)
class Direction:
    """Unit vector on S^{d-1}.  Antipodal identification is always explicit."""

    components: np.ndarray
    tolerance: float = DIRECTION_NORM_TOL

    def __post_init__(self):
        v = _as_vector(self.components, "direction")
        n = np.linalg.norm(v)
        if n == 0.0:
            raise SceneError("cannot normalize the zero vector")
        if abs(n - 1.0) > self.tolerance:
            v = v / n
        object.__setattr__(self, "components", v)

    @property
    def dimension(self) -> int:
        return self.components.shape[0]

    def antipode(self) -> "Direction":
        return Direction(-self.components, self.tolerance)

    def angle_to(self, other: "Direction") -> float:
        c = float(np.clip(np.dot(self.components, other.components), -1.0, 1.0))
        return math.acos(c)


@dataclass(frozen=True)
class ProjectedDisk:
    """Disk in the orthogonal complement of a direction; radius is preserved."""

    center2: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center2", _as_vector(self.center2, "center2"))


def orthonormal_basis_of_complement(u: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of u^perp, rows are the basis vectors.

    The standard basis axis with the largest |u| component is dropped and the
    remaining axes are Gram-Schmidt orthogonalized against u in index order,
    which pins the basis uniquely for reproducibility.
    """
    u = _as_vector(u, "direction")
    n = np.linalg.norm(u)
    if n == 0.0:
        raise SceneError("cannot normalize the zero vector")
    u = u / n
    d = u.shape[0]
    drop = int(np.argmax(np.abs(u)))
    rows = []
    for axis in range(d):
        if axis == drop:
            continue
        v = np.zeros(d)
        v[axis] = 1.0
        v -= np.dot(v, u) * u
        for r in rows:
            v -= np.dot(v, r) * r
        nv = np.linalg.norm(v)
        if nv < 1e-14:
            raise SolverError("basis construction collapsed; direction malformed")
        rows.append(v / nv)
    return np.array(rows)


def project_to_orthogonal_plane(scene: Scene, u: Direction) -> list[ProjectedDisk]:
    """Orthogonal projection of every ball onto u^perp, radii preserved."""
    basis = orthonormal_basis_of_complement(u.components)
    return [
        ProjectedDisk(basis @ b.center, b.radius)
        for b in scene.balls
    ]


# ---------------------------------------------------------------------------
# Disk feasibility: minimize f(x) = max_i (|x - c_i| - r_i).
#
# The minimizer is supported on at most dim+1 disks, and for a support of size
# k it lies in the affine hull of the k centers, where the equal-value system
# reduces to k-2 linear equations plus one quadratic.  Enumerating every
# candidate support and evaluating f at each algebraic solution therefore
# yields the exact optimum (up to roundoff), deterministically.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MinimaxResult:
    """Optimal point and value of the disk minimax problem.

    ``slack`` is f(x*) = max_i (|x*-c_i| - r_i): nonpositive means the disks
    have a common point, and -slack is the depth of the intersection.
    """

    point: np.ndarray
    slack: float

    def feasible(self, tol: float = DEFAULT_FEASIBILITY_TOL) -> bool:
        return self.slack <= tol


def _support_candidates(centers: np.ndarray, radii: np.ndarray) -> list[np.ndarray]:
    n, dim = centers.shape
    cands: list[np.ndarray] = [centers[i] for i in range(n)]
    max_k = min(n, dim + 1)
    for k in range(2, max_k + 1):
        for subset in itertools.combinations(range(n), k):
            i = subset[0]
            rest = list(subset[1:])
            D = centers[rest] - centers[i]          # (k-1, dim)
            G = D @ D.T
            d2 = np.diag(G)
            r = radii[list(subset)]
            b0 = 0.5 * (d2 - r[1:] ** 2 + r[0] ** 2)
            b1 = r[1:] - r[0]
            scale = max(float(np.max(np.abs(G))), 1e-30)
            try:
                a0 = np.linalg.solve(G, b0)
                a1 = np.linalg.solve(G, b1)
            except np.linalg.LinAlgError:
                continue
            if not (np.all(np.isfinite(a0)) and np.all(np.isfinite(a1))):
                continue
            # |x - c_i|^2 = (t + r_i)^2 along the affine family x(t)
            qa = float(a1 @ G @ a1) - 1.0
            qb = -2.0 * (float(a0 @ G @ a1) + r[0])
            qc = float(a0 @ G @ a0) - r[0] ** 2
            ts: list[float] = []
            if abs(qa) > 1e-14:
                disc = qb * qb - 4.0 * qa * qc
                if disc >= 0.0:
                    sq = math.sqrt(disc)
                    ts = [(-qb + sq) / (2 * qa), (-qb - sq) / (2 * qa)]
            elif abs(qb) > 1e-14 * scale:
                ts = [-qc / qb]
            for t in ts:
                alpha = a0 - t * a1
                cands.append(centers[i] + alpha @ D)
    return cands


def disks_common_point(
    disks: Sequence[ProjectedDisk], tol: float = DEFAULT_FEASIBILITY_TOL
) -> MinimaxResult:
    """Solve the convex minimax problem min_x max_i (|x - c_i| - r_i).

    Returns the minimizing point and its slack; the disks have a common point
    iff slack <= tol.  The solve enumerates all candidate support sets (the
    optimum is supported on at most dim+1 disks) and is exact up to roundoff,
    so it is deterministic and needs no iteration cap.
    """
    if not disks:
        raise SolverError("need at least one disk")
    centers = np.array([d.center2 for d in disks], dtype=float)
    radii = np.array([d.radius for d in disks], dtype=float)
    if centers.ndim != 2:
        raise SolverError("disk centers must share a common dimension")
    best_point = None
    best_val = math.inf
    for x in _support_candidates(centers, radii):
        val = float(np.max(np.linalg.norm(centers - x, axis=1) - radii))
        if val < best_val:
            best_val = val
            best_point = x
    if best_point is None or not math.isfinite(best_val):
        raise SolverError("no finite candidate produced by support enumeration")
    return MinimaxResult(np.asarray(best_point, dtype=float), best_val)


# ---------------------------------------------------------------------------
# Meeting order along a direction.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrderResult:
    """Indices sorted by <c_i, u> plus any near-ties at the given tolerance."""

    order: tuple[int, ...]
    ties: tuple[tuple[int, int], ...]

    @property
    def is_tied(self) -> bool:
        return bool(self.ties)


def transversal_order(scene: Scene, u: Direction, tie_tol: Optional[float] = None) -> OrderResult:
    """Meeting order of the balls along direction u.

    For disjoint balls the order in which a transversal of direction u meets
    them equals the order of the center projections <c_i, u>; chord midpoints
    are the projections of the centers onto the line.
    """
    if tie_tol is None:
        tie_tol = 1e-9 * scene.diameter()
    keys = scene.centers @ u.components
    order = tuple(int(i) for i in np.argsort(keys, kind="stable"))
    ties = []
    for a, b in zip(order, order[1:]):
        if abs(keys[a] - keys[b]) < tie_tol:
            ties.append((a, b))
    return OrderResult(order, tuple(ties))


@dataclass(frozen=True)
class SceneFlags:
    thinly_distributed: bool
    pairwise_inflatable: bool
    collinear_centers: bool


def scene_classification(scene: Scene, rank_tol: float = 1e-9) -> SceneFlags:
    """Classify a scene: thin distribution, pairwise inflatability, collinearity.

    Thinly distributed: every center distance is at least twice the sum of the
    two radii.  Pairwise inflatable: every squared center distance is at least
    twice the sum of the two squared radii.
    """
    thin = True
    inflatable = True
    for i, j in itertools.combinations(range(len(scene.balls)), 2):
        bi, bj = scene.balls[i], scene.balls[j]
        d2 = float(np.dot(bi.center - bj.center, bi.center - bj.center))
        if math.sqrt(d2) < 2.0 * (bi.radius + bj.radius):
            thin = False
        if d2 < 2.0 * (bi.radius ** 2 + bj.radius ** 2):
            inflatable = False
    centers = scene.centers
    rel = centers - centers[0]
    if len(scene.balls) <= 2:
        collinear = True
    else:
        sv = np.linalg.svd(rel, compute_uv=False)
        scale = sv[0] if sv[0] > 0 else 1.0
        collinear = bool(np.sum(sv > rank_tol * scale) <= 1)
    return SceneFlags(thin, inflatable, collinear)


# ---------------------------------------------------------------------------
# Scene generation.
# ---------------------------------------------------------------------------


def _random_unit(rng: np.random.Generator, d: int) -> np.ndarray:
    while True:
        v = rng.normal(size=d)
        n = np.linalg.norm(v)
        if n > 1e-12:
            return v / n


def random_disjoint_scene(
    n: int,
    d: int,
    radius_range: tuple[float, float],
    seed: int,
    margin: float = DISJOINTNESS_MARGIN,
    max_rejects: int = 10000,
    with_transversal: bool = False,
) -> Scene:
    """Reproducible random scene of n pairwise disjoint balls in R^d.

    ``with_transversal`` constrains the construction so a common transversal
    exists (see random_scene_with_transversal for the witness direction).
    """
    if with_transversal:
        scene, _ = random_scene_with_transversal(n, d, radius_range, seed, margin)
        return scene
    r_min, r_max = radius_range
    if n < 1 or d < 2 or not (0 < r_min <= r_max):
        raise SceneError("bad generator arguments")
    rng = np.random.default_rng(seed)
    box = 2.5 * r_max * max(n, 2)
    for _ in range(max_rejects):
        radii = rng.uniform(r_min, r_max, size=n)
        centers = rng.uniform(-box / 2, box / 2, size=(n, d))
        ok = True
        for i, j in itertools.combinations(range(n), 2):
            if np.linalg.norm(centers[i] - centers[j]) <= radii[i] + radii[j] + margin:
                ok = False
                break
        if ok:
            return Scene(d, tuple(Ball(centers[i], radii[i]) for i in range(n)))
    raise SolverError(
        f"could not place {n} disjoint balls in {max_rejects} attempts "
        f"(box {box:.3g}, radii in {radius_range})"
    )


def random_scene_with_transversal(
    n: int,
    d: int,
    radius_range: tuple[float, float],
    seed: int,
    margin: float = DISJOINTNESS_MARGIN,
) -> tuple[Scene, Direction]:
    """Random disjoint scene guaranteed to admit a transversal, plus a witness.

    Centers are placed close to a random line (offset below half the radius),
    so the line itself meets every ball; spacing along the line guarantees
    strict disjointness without rejection loops.
    """
    r_min, r_max = radius_range
    if n < 1 or d < 2 or not (0 < r_min <= r_max):
        raise SceneError("bad generator arguments")
    rng = np.random.default_rng(seed)
    axis = _random_unit(rng, d)
    basis = orthonormal_basis_of_complement(axis)
    radii = rng.uniform(r_min, r_max, size=n)
    balls = []
    t = 0.0
    prev_r = None
    for i in range(n):
        if prev_r is not None:
            t += prev_r + radii[i] + margin + rng.uniform(0.1, 1.0) * r_max
        off = rng.uniform(-0.4, 0.4) * radii[i]
        perp = rng.normal(size=d - 1)
        pn = np.linalg.norm(perp)
        perp = perp / pn if pn > 1e-12 else np.zeros(d - 1)
        center = t * axis + off * (perp @ basis)
        balls.append(Ball(center, radii[i]))
        prev_r = radii[i]
    return Scene(d, tuple(balls)), Direction(axis)
