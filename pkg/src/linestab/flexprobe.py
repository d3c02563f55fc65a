"""Flex certification for boundary arcs of direction cones.

A tangent direction on the cone boundary is probed by projecting the three
balls along it: the projected centers form a triangle with the projected
tangent as an interior point, and the Hessian of the direction sextic at the
probe direction splits into a nonpositive quadratic part H2 and a nonnegative
quartic part H4 in the lift heights.  Pairwise disjointness of the balls
forces H2 + H4 > 0, i.e. no flex or singularity on the boundary arc, and the
split admits a closed-form separation certificate on a canonical hyperboloid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from .geom import Ball, Direction, ProjectedDisk, SceneError, disks_common_point
from .sextic import Triple

STRICTNESS_FLOOR = 1e-12


@dataclass(frozen=True)
class LiftedConfig:
    """Planar triangle + interior point + lift heights.

    Triangle vertices are (0,0,0), (a,0,0), (b,c,0); the interior point has
    barycentric weights p (normalized to sum 1 on construction); lifting the
    vertices by x_k along the third axis produces ball centers whose radii are
    the distances from the interior point to the vertices.
    """

    a: float
    b: float
    c: float
    weights: np.ndarray
    lifts: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        x = np.asarray(self.lifts, dtype=float)
        if w.shape != (3,) or x.shape != (3,):
            raise SceneError("weights and lifts must have length 3")
        if not (self.a > 0 and self.c > 0):
            raise SceneError("triangle must be nondegenerate: a > 0 and c > 0")
        if not np.all(w > 0):
            raise SceneError("barycentric weights must be positive")
        object.__setattr__(self, "weights", w / w.sum())
        object.__setattr__(self, "lifts", x)

    @property
    def triangle(self) -> np.ndarray:
        return np.array([[0.0, 0.0, 0.0], [self.a, 0.0, 0.0], [self.b, self.c, 0.0]])

    @property
    def interior_point(self) -> np.ndarray:
        return self.weights @ self.triangle

    @property
    def v_vectors(self) -> np.ndarray:
        """v_k = interior point minus vertex k."""
        return self.interior_point[None, :] - self.triangle

    @property
    def squared_radii(self) -> np.ndarray:
        v = self.v_vectors
        return np.einsum("ij,ij->i", v, v)

    @property
    def radii(self) -> np.ndarray:
        return np.sqrt(self.squared_radii)

    @property
    def q_edges(self) -> np.ndarray:
        """q_k = p_k r_k; the three form a triangle since sum p_k v_k = 0."""
        return self.weights * self.radii

    @property
    def z_gaps(self) -> np.ndarray:
        """z_k = (x_i - x_j)^2 cyclically."""
        x = self.lifts
        return np.array([(x[1] - x[2]) ** 2, (x[2] - x[0]) ** 2, (x[0] - x[1]) ** 2])

    def q_triangle_ok(self) -> bool:
        q = np.sort(self.q_edges)
        return bool(q[0] + q[1] > q[2])

    def lifted_triple(self) -> Triple:
        """The ball triple this configuration parametrizes."""
        tri = self.triangle
        r = self.radii
        balls = tuple(
            Ball(tri[k] + np.array([0.0, 0.0, self.lifts[k]]), r[k]) for k in range(3)
        )
        return Triple(balls, allow_overlap=True)

    @classmethod
    def from_plane_data(cls, vertices2, point2, lifts) -> "LiftedConfig":
        """Build from an arbitrary planar triangle and interior point.

        The input frame is canonicalized: vertex 0 moves to the origin,
        vertex 1 onto the positive first axis, and the triangle is reflected
        if needed so the third vertex has positive second coordinate.
        """
        P = np.asarray(vertices2, dtype=float)
        pt = np.asarray(point2, dtype=float)
        if P.shape != (3, 2) or pt.shape != (2,):
            raise SceneError("need three 2-d vertices and one 2-d point")
        d1 = P[1] - P[0]
        a = float(np.linalg.norm(d1))
        if a <= 0:
            raise SceneError("degenerate triangle edge")
        e1 = d1 / a
        e2 = np.array([-e1[1], e1[0]])
        d2 = P[2] - P[0]
        b = float(np.dot(d2, e1))
        c = float(np.dot(d2, e2))
        if c < 0:
            c = -c
            e2 = -e2
        if c <= 0:
            raise SceneError("collinear triangle vertices")
        rel = pt - P[0]
        px, py = float(np.dot(rel, e1)), float(np.dot(rel, e2))
        # barycentric weights of (px, py) w.r.t. (0,0), (a,0), (b,c)
        w2 = py / c
        w1 = (px - b * w2) / a
        w0 = 1.0 - w1 - w2
        if min(w0, w1, w2) <= 0:
            raise SceneError("point is not interior to the triangle")
        return cls(a=a, b=b, c=c, weights=np.array([w0, w1, w2]), lifts=np.asarray(lifts, dtype=float))


def gram_from_barycentrics(cfg: LiftedConfig) -> np.ndarray:
    """Pairwise inner products <v_i, v_j> from weights and edge lengths q.

    Off-diagonal entries are (q_k^2 - q_i^2 - q_j^2) / (2 p_i p_j); diagonal
    entries are the squared radii.  The result annihilates the weight vector
    and is positive semidefinite of rank <= 2.
    """
    p = cfg.weights
    q2 = cfg.q_edges ** 2
    s = cfg.squared_radii
    G = np.zeros((3, 3))
    for k in range(3):
        G[k, k] = s[k]
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        G[i, j] = G[j, i] = (q2[k] - q2[i] - q2[j]) / (2.0 * p[i] * p[j])
    return G


@dataclass(frozen=True)
class QInvariant:
    Q: float
    Delta: float
    degenerate: bool


def q_invariant(cfg: LiftedConfig) -> QInvariant:
    """The symmetric invariant Q = sum(2 q_i^2 q_j^2 - q_k^4) and Delta.

    Delta = Q / (4 prod p_k^2) equals a^2 c^2, four times the squared triangle
    area; Q factors Heron-style, so it is positive exactly when the q_k obey
    the strict triangle inequality.
    """
    q2 = cfg.q_edges ** 2
    Q = float(
        2 * (q2[0] * q2[1] + q2[0] * q2[2] + q2[1] * q2[2]) - np.sum(q2 ** 2)
    )
    p = cfg.weights
    Delta = Q / (4.0 * float(np.prod(p) ** 2))
    return QInvariant(Q=Q, Delta=Delta, degenerate=Q <= 0)


@dataclass(frozen=True)
class HessianSplit:
    """Decomposition of the sextic Hessian at the probe direction (0,0,1).

    H2 <= 0 and H4 >= 0 always; H_total = prefactor * (H2 + H4) equals the
    Hessian determinant of the lifted triple's sextic at (0,0,1).
    """

    H2: float
    H4: float
    prefactor: float

    @property
    def H_total(self) -> float:
        return self.prefactor * (self.H2 + self.H4)

    @property
    def margin(self) -> float:
        return self.H2 + self.H4

    @property
    def normalized_margin(self) -> float:
        scale = abs(self.H2) + abs(self.H4)
        if scale == 0.0:
            return 0.0
        return (self.H4 + self.H2) / scale


def lifted_hessian_decomposition(cfg: LiftedConfig) -> HessianSplit:
    """Split the probe Hessian into its quadratic and quartic lift parts."""
    p = cfg.weights
    s = cfg.squared_radii
    x = cfg.lifts
    a2c2 = cfg.a ** 2 * cfg.c ** 2
    h2 = 0.0
    h4 = 0.0
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        h2 += p[i] * p[j] * (x[i] - x[j]) ** 2
        h4 += p[k] ** 3 * s[k] * (x[i] - x[k]) ** 2 * (x[j] - x[k]) ** 2
    H2 = -a2c2 * float(np.prod(p)) * h2
    prefactor = (2 ** 12) * (5 ** 2) * cfg.a ** 6 * cfg.c ** 6
    return HessianSplit(H2=H2, H4=float(h4), prefactor=prefactor)


# ---------------------------------------------------------------------------
# Canonical coordinates: the separation of the disjointness octant from the
# two-sheeted hyperboloid carrying flexes.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CanonicalCoords:
    """Canonical q-parameters of a configuration.

    Houses the linear coefficients a_k = Q / (4 q_i^2 q_j^2), the center
    offsets beta_k = (a_i + a_j - a_k)/2 and the hyperboloid constant
    Q^3 / (4^3 prod q_k^4).
    """

    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        if q.shape != (3,):
            raise SceneError("need three q values")
        if not np.all(q > 0):
            raise SceneError("q values must be positive")
        object.__setattr__(self, "q", q)

    @classmethod
    def from_config(cls, cfg: LiftedConfig) -> "CanonicalCoords":
        return cls(cfg.q_edges)

    @cached_property
    def Q(self) -> float:
        q2 = self.q ** 2
        return float(2 * (q2[0] * q2[1] + q2[0] * q2[2] + q2[1] * q2[2]) - np.sum(q2 ** 2))

    @cached_property
    def linear_coeffs(self) -> np.ndarray:
        q2 = self.q ** 2
        return np.array([self.Q / (4.0 * q2[(k + 1) % 3] * q2[(k + 2) % 3]) for k in range(3)])

    @cached_property
    def beta(self) -> np.ndarray:
        a = self.linear_coeffs
        return np.array([(a[(k + 1) % 3] + a[(k + 2) % 3] - a[k]) / 2.0 for k in range(3)])

    @cached_property
    def hyperboloid_constant(self) -> float:
        return self.Q ** 3 / (64.0 * float(np.prod(self.q ** 4)))

    def triangle_ok(self) -> bool:
        q = np.sort(self.q)
        return bool(q[0] + q[1] > q[2])

    def octant_vertex(self) -> np.ndarray:
        """Vertex of the disjointness octant: V_k = 1 - ((q_i - q_j)/q_k)^2."""
        q = self.q
        return np.array(
            [1.0 - ((q[(k + 1) % 3] - q[(k + 2) % 3]) / q[k]) ** 2 for k in range(3)]
        )


@dataclass(frozen=True)
class StarHValue:
    value: float
    asymptotic: float  # sum t_i t_j of the translated coordinates
    constant: float    # hyperboloid constant
    t: np.ndarray
    plane_sum: float   # sum t_k, positive on the octant side


def star_h_canonical(coords: CanonicalCoords, w) -> StarHValue:
    """Evaluate *H(w) = sum w_i w_j - sum a_k w_k and its translated form."""
    w = np.asarray(w, dtype=float)
    a = coords.linear_coeffs
    sym = float(w[0] * w[1] + w[0] * w[2] + w[1] * w[2])
    value = sym - float(np.dot(a, w))
    t = w - coords.beta
    asym = float(t[0] * t[1] + t[0] * t[2] + t[1] * t[2])
    return StarHValue(
        value=value,
        asymptotic=asym,
        constant=coords.hyperboloid_constant,
        t=t,
        plane_sum=float(np.sum(t)),
    )


def w_from_lifts(cfg: LiftedConfig) -> np.ndarray:
    """Map lift gaps into hyperboloid coordinates: p_i p_j z_k = q_k^2 w_k."""
    p = cfg.weights
    z = cfg.z_gaps
    q2 = cfg.q_edges ** 2
    return np.array(
        [p[(k + 1) % 3] * p[(k + 2) % 3] * z[k] / q2[k] for k in range(3)]
    )


def disjointness_thresholds(cfg: LiftedConfig) -> np.ndarray:
    """Lower bounds on z_k equivalent to pairwise ball disjointness.

    Ill-conditioned when a barycentric weight vanishes (the division by
    p_i p_j); prefer rebuilt_pair_gaps for numerical checks near edges.
    """
    p = cfg.weights
    q = cfg.q_edges
    out = []
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        out.append((q[k] ** 2 - (q[i] - q[j]) ** 2) / (p[i] * p[j]))
    return np.array(out)


def rebuilt_pair_gaps(cfg: LiftedConfig) -> np.ndarray:
    """Pairwise gaps |c_i - c_j| - (r_i + r_j) of the rebuilt ball triple.

    Equivalent to the z-threshold inequalities but evaluated directly from
    ball coordinates, which stays well conditioned at edge configurations.
    Component k is the gap of the pair (i, j) opposite to k.
    """
    tri = cfg.triangle
    x = cfg.lifts
    r = cfg.radii
    out = []
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        d2 = float(np.dot(tri[i] - tri[j], tri[i] - tri[j])) + (x[i] - x[j]) ** 2
        out.append(math.sqrt(d2) - (r[i] + r[j]))
    return np.array(out)


@dataclass(frozen=True)
class OctantCertificate:
    vertex: np.ndarray
    star_h_at_vertex: float
    factored_value: float
    plane_lhs: float
    plane_rhs: float
    passed: bool
    boundary_case: bool


def certify_octant_separation(coords: CanonicalCoords, rel_tol: float = 1e-10) -> OctantCertificate:
    """Certificate that the disjointness octant misses the flex hyperboloid.

    Checks that *H at the octant vertex matches its closed-form factorization
    3 prod(q_i + q_j - q_k)^2 / (4 prod q_k^2), that it is strictly positive,
    and that the vertex lies strictly on the octant side of the center plane.
    A tight triangle inequality (tangent balls) is reported as a boundary
    case, not a failure of the identity.
    """
    q = coords.q
    V = coords.octant_vertex()
    direct = star_h_canonical(coords, V).value
    prod_factor = 1.0
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        prod_factor *= (q[i] + q[j] - q[k]) ** 2
    factored = 3.0 * prod_factor / (4.0 * float(np.prod(q ** 2)))
    scale = max(abs(direct), abs(factored), 1e-300)
    identity_ok = abs(direct - factored) <= rel_tol * scale

    plane_lhs = float(np.sum(V))
    plane_rhs = coords.Q * float(np.sum(q ** 2)) / (8.0 * float(np.prod(q ** 2)))
    boundary = not coords.triangle_ok() or factored <= STRICTNESS_FLOOR * max(1.0, abs(plane_rhs))
    passed = identity_ok and direct > 0 and plane_lhs > plane_rhs and not boundary
    return OctantCertificate(
        vertex=V,
        star_h_at_vertex=direct,
        factored_value=factored,
        plane_lhs=plane_lhs,
        plane_rhs=plane_rhs,
        passed=passed,
        boundary_case=boundary,
    )


# ---------------------------------------------------------------------------
# End-to-end flex-freeness certification for a triple of balls.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FlexSample:
    direction: np.ndarray
    margin: Optional[float]
    normalized_margin: Optional[float]
    skipped: Optional[str]
    disjointness_ok: Optional[bool]


@dataclass(frozen=True)
class FlexFreeReport:
    samples: tuple[FlexSample, ...]
    min_margin: Optional[float]
    min_normalized_margin: Optional[float]
    probed: int
    skipped: int
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "probed": self.probed,
            "skipped": self.skipped,
            "min_margin": self.min_margin,
            "min_normalized_margin": self.min_normalized_margin,
            "pass": self.passed,
            "samples": [
                {
                    "direction": [float(x) for x in s.direction],
                    "margin": s.margin,
                    "normalized_margin": s.normalized_margin,
                    "skipped": s.skipped,
                    "disjointness_ok": s.disjointness_ok,
                }
                for s in self.samples
            ],
        }


def _rotation_to_axis(u: np.ndarray) -> np.ndarray:
    """Deterministic rotation sending unit u to (0, 0, 1)."""
    e3 = np.array([0.0, 0.0, 1.0])
    c = float(np.dot(u, e3))
    if c > 1.0 - 1e-14:
        return np.eye(3)
    if c < -1.0 + 1e-14:
        return np.diag([1.0, -1.0, -1.0])
    axis = np.cross(u, e3)
    s = np.linalg.norm(axis)
    axis = axis / s
    K = np.array(
        [[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]]
    )
    return np.eye(3) + s * K + (1 - c) * (K @ K)


def lifted_config_for_direction(triple: Triple, u: Direction) -> LiftedConfig:
    """Projected configuration of a boundary direction as a LiftedConfig.

    The direction is rotated onto the third axis; projected centers give the
    triangle, the minimax point of the projected disks gives the interior
    point, and the rotated center heights give the lifts.  Raises SceneError
    when the minimax point is not interior to the projected triangle.
    """
    R = _rotation_to_axis(u.components)
    rc = triple.centers @ R.T
    verts2 = rc[:, :2]
    lifts = rc[:, 2]
    disks = [ProjectedDisk(verts2[k], triple.balls[k].radius) for k in range(3)]
    res = disks_common_point(disks)
    return LiftedConfig.from_plane_data(verts2, res.point, lifts)


def certify_flex_free(
    triple: Triple,
    boundary_samples: int = 200,
    seed: int = 0,
    tol: float = 1e-9,
) -> FlexFreeReport:
    """Certify that sampled cone boundary directions admit no flex.

    Boundary directions of every direction cone of the triple are located by
    bisection; at each one the projected configuration is built and the probe
    Hessian split is evaluated.  Directions whose projection point is not
    interior to the triangle of projected centers (bitangent arcs) are
    skipped with a tag.
    """
    from . import cone as cone_mod

    dirs = cone_mod.boundary_directions_for_triple(
        triple, boundary_samples, seed=seed, tol=tol
    )
    samples: list[FlexSample] = []
    margins = []
    nmargins = []
    skipped = 0
    for uvec in dirs:
        try:
            cfg = lifted_config_for_direction(triple, Direction(uvec))
        except SceneError as exc:
            samples.append(FlexSample(uvec, None, None, str(exc), None))
            skipped += 1
            continue
        split = lifted_hessian_decomposition(cfg)
        gaps = rebuilt_pair_gaps(cfg)
        scale = max(float(np.max(cfg.radii)), 1.0)
        z_ok = bool(np.all(gaps >= -1e-6 * scale))
        samples.append(
            FlexSample(
                uvec, float(split.margin), float(split.normalized_margin), None, z_ok
            )
        )
        margins.append(float(split.margin))
        nmargins.append(float(split.normalized_margin))
    probed = len(margins)
    min_margin = min(margins) if margins else None
    min_nmargin = min(nmargins) if nmargins else None
    all_disjoint_ok = all(s.disjointness_ok for s in samples if s.disjointness_ok is not None)
    passed = bool(
        probed > 0
        and min_margin is not None
        and min_margin > 0.0
        and all_disjoint_ok
    )
    return FlexFreeReport(
        samples=tuple(samples),
        min_margin=min_margin,
        min_normalized_margin=min_nmargin,
        probed=probed,
        skipped=skipped,
        passed=passed,
    )
