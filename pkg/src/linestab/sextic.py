"""Direction sextic of three balls in R^3.

The directions of common tangent lines to three spheres form a degree-6
projective curve.  It is evaluated here through a bordered 5x5 determinant
whose entries are quadratic forms in the direction, and expanded once per
triple into the 28 coefficients of the ternary sextic so that the Hessian
determinant, curve tracing and exact identity testing all share one source.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .geom import Ball, Direction, Scene, SceneError

SIGMA_TOL = 1e-8
RANK_TOL = 1e-10


# ---------------------------------------------------------------------------
# Small trivariate polynomial toolkit, generic over the coefficient type
# (float for numerics, fractions.Fraction for the exact identity suite).
# ---------------------------------------------------------------------------


class DirectionPoly:
    """Polynomial in the direction components (u1, u2, u3).

    Stored sparsely as {(i, j, k): coeff}.  Coefficients may be floats or
    exact rationals; all arithmetic goes through Python operators so both
    work.  Construction keeps homogeneity when the inputs are homogeneous.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Optional[dict] = None):
        self.coeffs = dict(coeffs) if coeffs else {}

    @classmethod
    def constant(cls, value) -> "DirectionPoly":
        if value == 0:
            return cls()
        return cls({(0, 0, 0): value})

    @classmethod
    def linear(cls, vec) -> "DirectionPoly":
        """The linear form <vec, u>."""
        c = {}
        for axis, v in enumerate(vec):
            if v != 0:
                ex = [0, 0, 0]
                ex[axis] = 1
                c[tuple(ex)] = v
        return cls(c)

    @classmethod
    def norm_sq(cls, one=1.0) -> "DirectionPoly":
        """The quadratic form q(u) = <u, u>; `one` fixes the scalar type."""
        return cls({(2, 0, 0): one, (0, 2, 0): one, (0, 0, 2): one})

    @property
    def degree(self) -> int:
        if not self.coeffs:
            return 0
        return max(sum(e) for e in self.coeffs)

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e in self.coeffs}
        return len(degs) <= 1

    def __add__(self, other: "DirectionPoly") -> "DirectionPoly":
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = out.get(e, 0) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return DirectionPoly(out)

    def __sub__(self, other: "DirectionPoly") -> "DirectionPoly":
        return self + (-other)

    def __neg__(self) -> "DirectionPoly":
        return DirectionPoly({e: -c for e, c in self.coeffs.items()})

    def __mul__(self, other: "DirectionPoly") -> "DirectionPoly":
        out: dict = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                s = out.get(e, 0) + c1 * c2
                if s == 0:
                    out.pop(e, None)
                else:
                    out[e] = s
        return DirectionPoly(out)

    def scale(self, factor) -> "DirectionPoly":
        if factor == 0:
            return DirectionPoly()
        return DirectionPoly({e: c * factor for e, c in self.coeffs.items()})

    def diff(self, axis: int) -> "DirectionPoly":
        out = {}
        for e, c in self.coeffs.items():
            if e[axis] == 0:
                continue
            ne = list(e)
            ne[axis] -= 1
            out[tuple(ne)] = c * e[axis]
        return DirectionPoly(out)

    def __call__(self, u1, u2, u3):
        total = 0
        for (i, j, k), c in self.coeffs.items():
            total = total + c * u1 ** i * u2 ** j * u3 ** k
        return total

    def eval_grid(self, U1: np.ndarray, U2: np.ndarray, U3: np.ndarray) -> np.ndarray:
        total = np.zeros(np.broadcast(U1, U2, U3).shape)
        for (i, j, k), c in self.coeffs.items():
            total += float(c) * U1 ** i * U2 ** j * U3 ** k
        return total

    def max_abs_coeff(self) -> float:
        if not self.coeffs:
            return 0.0
        return max(abs(float(c)) for c in self.coeffs.values())

    def __repr__(self) -> str:
        return f"DirectionPoly({len(self.coeffs)} terms, degree {self.degree})"


def poly_det(matrix: Sequence[Sequence[DirectionPoly]]) -> DirectionPoly:
    """Determinant of a square matrix of polynomials, by cofactor expansion."""
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    total = DirectionPoly()
    for col in range(n):
        entry = matrix[0][col]
        if not entry.coeffs:
            continue
        minor = [
            [row[c] for c in range(n) if c != col]
            for row in matrix[1:]
        ]
        term = entry * poly_det(minor)
        total = total + term if col % 2 == 0 else total - term
    return total


# ---------------------------------------------------------------------------
# The triple of balls and its sextic.
# ---------------------------------------------------------------------------


@dataclass
class Triple:
    """Three balls in R^3 with cached sextic data.

    ``allow_overlap`` admits tangent/intersecting configurations for the
    transition demonstrations; everything algebraic still applies to them.
    """

    balls: tuple[Ball, Ball, Ball]
    allow_overlap: bool = False

    def __post_init__(self):
        self.balls = tuple(self.balls)
        if len(self.balls) != 3:
            raise SceneError("a Triple holds exactly three balls")
        for b in self.balls:
            if b.dimension != 3:
                raise SceneError("Triple balls must live in R^3")
        if not self.allow_overlap:
            for i, j in itertools.combinations(range(3), 2):
                bi, bj = self.balls[i], self.balls[j]
                if np.linalg.norm(bi.center - bj.center) <= bi.radius + bj.radius:
                    raise SceneError(f"balls {i},{j} are not disjoint")

    @classmethod
    def from_scene(cls, scene: Scene, indices=(0, 1, 2)) -> "Triple":
        balls = tuple(scene.balls[i] for i in indices)
        return cls(balls, allow_overlap=scene.allow_overlap)

    @property
    def centers(self) -> np.ndarray:
        return np.array([b.center for b in self.balls])

    @property
    def squared_radii(self) -> np.ndarray:
        return np.array([b.squared_radius for b in self.balls])

    def edge(self, i: int, j: int) -> np.ndarray:
        return self.balls[j].center - self.balls[i].center

    def edge_norm_sq(self, i: int, j: int) -> float:
        e = self.edge(i, j)
        return float(np.dot(e, e))

    @cached_property
    def collinear_centers(self) -> bool:
        e1 = self.edge(0, 1)
        e2 = self.edge(0, 2)
        cross = np.cross(e1, e2)
        scale = np.linalg.norm(e1) * np.linalg.norm(e2)
        return bool(np.linalg.norm(cross) <= 1e-12 * max(scale, 1e-30))

    @cached_property
    def sigma(self) -> DirectionPoly:
        """The 28-coefficient expansion of the direction sextic."""
        c = self.centers
        s = self.squared_radii
        return sigma_from_geometry(c[0], c[1], c[2], s[0], s[1], s[2])

    @cached_property
    def sigma_scale(self) -> float:
        return max(self.sigma.max_abs_coeff(), 1e-300)

    @cached_property
    def hessian_entries(self) -> list[list[DirectionPoly]]:
        """Second partials of the sextic: a symmetric 3x3 matrix of quartics."""
        firsts = [self.sigma.diff(a) for a in range(3)]
        rows = []
        for a in range(3):
            row = []
            for b in range(3):
                row.append(firsts[a].diff(b) if b >= a else rows[b][a])
            rows.append(row)
        return rows


def sigma_from_geometry(c0, c1, c2, s0, s1, s2) -> DirectionPoly:
    """Expand the direction sextic for centers c_k and squared radii s_k.

    Works for float or exact rational inputs; the scalar type of the centers
    decides the coefficient type.
    """
    one = c0[0] - c0[0] + 1 if hasattr(c0[0], "denominator") else 1.0
    q = DirectionPoly.norm_sq(one)

    def t_form(ca, cb):
        e = [cb[axis] - ca[axis] for axis in range(3)]
        delta = sum(x * x for x in e)
        lin = DirectionPoly.linear(e)
        return q.scale(delta) - lin * lin

    t01 = t_form(c0, c1)
    t02 = t_form(c0, c2)
    t12 = t_form(c1, c2)
    qs = [q.scale(s0), q.scale(s1), q.scale(s2)]
    one_p = DirectionPoly.constant(one)
    zero_p = DirectionPoly()
    m = [
        [zero_p, one_p, one_p, one_p, one_p],
        [one_p, zero_p, qs[0], qs[1], qs[2]],
        [one_p, qs[0], zero_p, t01, t02],
        [one_p, qs[1], t01, zero_p, t12],
        [one_p, qs[2], t02, t12, zero_p],
    ]
    return poly_det(m)


def cayley_matrix(triple: Triple, u: np.ndarray) -> np.ndarray:
    """Numeric 5x5 bordered matrix whose determinant is sigma(u)."""
    u = np.asarray(u, dtype=float)
    q = float(np.dot(u, u))
    s = triple.squared_radii

    def t(i, j):
        e = triple.edge(i, j)
        return triple.edge_norm_sq(i, j) * q - float(np.dot(e, u)) ** 2

    t01, t02, t12 = t(0, 1), t(0, 2), t(1, 2)
    return np.array(
        [
            [0.0, 1.0, 1.0, 1.0, 1.0],
            [1.0, 0.0, q * s[0], q * s[1], q * s[2]],
            [1.0, q * s[0], 0.0, t01, t02],
            [1.0, q * s[1], t01, 0.0, t12],
            [1.0, q * s[2], t02, t12, 0.0],
        ]
    )


def eval_sigma(triple: Triple, u) -> float:
    """Value of the direction sextic at u (any nonzero scale of u)."""
    u = np.asarray(u, dtype=float)
    if float(np.dot(u, u)) == 0.0:
        raise SceneError("sigma is undefined at the zero vector")
    return float(np.linalg.det(cayley_matrix(triple, u)))


def eval_sigma_expanded(triple: Triple, u) -> float:
    u = np.asarray(u, dtype=float)
    return float(triple.sigma(u[0], u[1], u[2]))


def eval_hessian_sigma(triple: Triple, u) -> float:
    """Determinant of the matrix of second partials of the sextic at u.

    Computed from the exact coefficient expansion of the sextic followed by
    coefficientwise differentiation, never by finite differences.
    """
    u = np.asarray(u, dtype=float)
    H = np.array(
        [[triple.hessian_entries[a][b](u[0], u[1], u[2]) for b in range(3)] for a in range(3)],
        dtype=float,
    )
    return float(np.linalg.det(H))


def sigma_on_curve(triple: Triple, u, tol: float = SIGMA_TOL) -> bool:
    """Whether u lies on the sextic, scaled by the coefficient norm."""
    u = np.asarray(u, dtype=float)
    n = np.linalg.norm(u)
    if n == 0:
        return False
    un = u / n
    return abs(eval_sigma(triple, un)) <= tol * triple.sigma_scale


# ---------------------------------------------------------------------------
# Tangent line recovery for a direction on the sextic.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Line3:
    """Line {point + t*direction} with point chosen orthogonal to direction."""

    point: np.ndarray
    direction: np.ndarray

    def distance_to(self, x) -> float:
        w = np.asarray(x, dtype=float) - self.point
        proj = np.dot(w, self.direction) * self.direction
        return float(np.linalg.norm(w - proj))


@dataclass(frozen=True)
class CircleFamily:
    """One-parameter family of tangent lines: all lines of direction `axis`
    at distance `radius` from the point `center` (rotational symmetry)."""

    center: np.ndarray
    axis: np.ndarray
    radius: float


@dataclass(frozen=True)
class TangentRecovery:
    lines: tuple[Line3, ...]
    family: Optional[CircleFamily]
    residual: float

    @property
    def is_family(self) -> bool:
        return self.family is not None


def tangent_lines_for_direction(
    triple: Triple,
    u: Direction,
    sigma_tol: float = SIGMA_TOL,
    rank_tol: float = RANK_TOL,
) -> TangentRecovery:
    """Recover the affine common tangent line(s) with direction u.

    Requires sigma(u) ~ 0.  Centers are translated so the first sits at the
    origin; the tangent's foot point p then solves two center equations plus
    <p, u> = 0, and must satisfy <p, p> = s_0.  Rank-deficient systems yield
    a line of candidate feet (0, 1 or 2 solutions after the sphere condition)
    or, for the axial collinear case, a full circle family.
    """
    uv = u.components
    if not sigma_on_curve(triple, uv, sigma_tol):
        val = eval_sigma(triple, uv) / triple.sigma_scale
        raise SceneError(
            f"direction is not on the sextic: normalized sigma value {val:.3e}"
        )
    c0 = triple.balls[0].center
    c1 = triple.balls[1].center - c0
    c2 = triple.balls[2].center - c0
    s = triple.squared_radii
    q = float(np.dot(uv, uv))

    def a_i(ci, si):
        e_cross = np.cross(ci, uv)
        t0i = float(np.dot(e_cross, e_cross))
        return t0i + (s[0] - si) * q

    A = np.array([c1, c2, uv])
    rhs = np.array([a_i(c1, s[1]) / (2 * q), a_i(c2, s[2]) / (2 * q), 0.0])
    U, sv, Vt = np.linalg.svd(A)
    scale = sv[0] if sv[0] > 0 else 1.0
    rank = int(np.sum(sv > rank_tol * scale))

    if rank >= 3:
        p = Vt.T @ ((U.T @ rhs) / sv)
        resid = abs(float(np.dot(p, p)) - s[0])
        if resid > 1e-5 * max(s[0], 1.0):
            # the linear system's unique foot misses the sphere: no real
            # tangent with this direction at the working tolerance
            return TangentRecovery((), None, resid)
        base = p + c0
        foot = base - np.dot(base, uv) * uv
        return TangentRecovery((Line3(point=foot, direction=uv),), None, resid)

    if rank == 2:
        # particular solution + nullspace direction, then the sphere condition
        inv = np.where(sv > rank_tol * scale, 1.0 / np.where(sv == 0, 1.0, sv), 0.0)
        p0 = Vt.T @ (inv * (U.T @ rhs))
        w = Vt[2]
        resid = float(np.linalg.norm(A @ p0 - rhs))
        aq = float(np.dot(w, w))
        bq = 2.0 * float(np.dot(p0, w))
        cq = float(np.dot(p0, p0)) - s[0]
        disc = bq * bq - 4 * aq * cq
        lines = []
        if resid <= 1e-6 * max(1.0, float(np.linalg.norm(rhs))) and disc >= 0:
            for sign in (1.0, -1.0) if disc > 0 else (1.0,):
                t = (-bq + sign * math.sqrt(disc)) / (2 * aq)
                p = p0 + t * w
                base = p + c0
                foot = base - np.dot(base, uv) * uv
                lines.append(Line3(point=foot, direction=uv))
        return TangentRecovery(tuple(lines), None, resid)

    # rank <= 1: axial symmetry, a full circle of tangent feet
    family = CircleFamily(center=c0.copy(), axis=uv.copy(), radius=math.sqrt(s[0]))
    return TangentRecovery((), family, 0.0)


# ---------------------------------------------------------------------------
# Pair cones: the conic of inner special bitangent directions.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticFormOnDirections:
    """Symmetric 3x3 form M; the conic is {u : u^T M u = 0}.

    For a disjoint pair, u^T M u < 0 exactly on the directions admitting a
    transversal to both balls; the zero set is the inner bitangent conic.
    """

    matrix: np.ndarray
    degenerate: bool = False

    def value(self, u) -> float:
        u = np.asarray(u, dtype=float)
        return float(u @ self.matrix @ u)

    @property
    def signature(self) -> tuple[int, int, int]:
        ev = np.linalg.eigvalsh(self.matrix)
        scale = max(np.max(np.abs(ev)), 1e-30)
        pos = int(np.sum(ev > 1e-12 * scale))
        neg = int(np.sum(ev < -1e-12 * scale))
        return (pos, neg, 3 - pos - neg)


def pair_cone_quadratic(ball_i: Ball, ball_j: Ball) -> QuadraticFormOnDirections:
    """Quadratic form whose negative side is the pair's feasible directions.

    A direction admits a transversal to both balls iff the projected centers
    are within r_i + r_j, i.e. t_ij(u) <= (r_i + r_j)^2 q(u); the form is
    u^T M u = t_ij(u) - (r_i + r_j)^2 q(u).
    """
    e = ball_j.center - ball_i.center
    delta = float(np.dot(e, e))
    rr = (ball_i.radius + ball_j.radius) ** 2
    M = (delta - rr) * np.eye(3) - np.outer(e, e)
    degenerate = delta <= rr  # overlapping or tangent pair: all of P^2 feasible
    return QuadraticFormOnDirections(M, degenerate=degenerate)


# ---------------------------------------------------------------------------
# Curve tracing: marching squares with bisection refinement on grid edges.
# ---------------------------------------------------------------------------

CHART_AXES = {"u1": 0, "u2": 1, "u3": 2}


def chart_point_to_direction(chart: str, x: float, y: float) -> np.ndarray:
    axis = CHART_AXES[chart]
    u = [0.0, 0.0, 0.0]
    others = [a for a in range(3) if a != axis]
    u[axis] = 1.0
    u[others[0]] = x
    u[others[1]] = y
    return np.array(u)


def _bisect_edge(f, p_neg, p_pos, refine_tol):
    """Bisection along the segment from a negative-value to a positive-value
    endpoint until the bracket is below refine_tol."""
    a = np.asarray(p_neg, dtype=float)
    b = np.asarray(p_pos, dtype=float)
    for _ in range(80):
        if np.linalg.norm(b - a) <= refine_tol:
            break
        mid = 0.5 * (a + b)
        v = f(mid[0], mid[1])
        if v < 0:
            a = mid
        elif v > 0:
            b = mid
        else:
            return mid
    return 0.5 * (a + b)


# marching-squares segment table: corner bits (bl, br, tr, tl) -> edge pairs,
# edges indexed 0=bottom 1=right 2=top 3=left
_MS_CASES = {
    1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)],
    6: [(0, 2)], 7: [(3, 2)], 8: [(2, 3)],
    9: [(0, 2)], 11: [(1, 2)], 12: [(1, 3)],
    13: [(0, 1)], 14: [(3, 0)],
}


def _trace_zero_set(f, xs, ys, values, refine_tol):
    """Marching squares over precomputed grid values, returning polylines."""
    gx, gy = len(xs), len(ys)
    V = np.where(values == 0.0, 1e-300, values)
    sign = V > 0

    h_cross: dict[tuple[int, int], tuple[float, float]] = {}
    v_cross: dict[tuple[int, int], tuple[float, float]] = {}
    for iy in range(gy):
        for ix in range(gx - 1):
            if sign[ix, iy] != sign[ix + 1, iy]:
                p1 = (xs[ix], ys[iy])
                p2 = (xs[ix + 1], ys[iy])
                if V[ix, iy] > 0:
                    p1, p2 = p2, p1
                pt = _bisect_edge(f, p1, p2, refine_tol)
                h_cross[(ix, iy)] = (float(pt[0]), float(pt[1]))
    for iy in range(gy - 1):
        for ix in range(gx):
            if sign[ix, iy] != sign[ix, iy + 1]:
                p1 = (xs[ix], ys[iy])
                p2 = (xs[ix], ys[iy + 1])
                if V[ix, iy] > 0:
                    p1, p2 = p2, p1
                pt = _bisect_edge(f, p1, p2, refine_tol)
                v_cross[(ix, iy)] = (float(pt[0]), float(pt[1]))

    segments = []
    for ix in range(gx - 1):
        for iy in range(gy - 1):
            code = (
                (1 if sign[ix, iy] else 0)
                | (2 if sign[ix + 1, iy] else 0)
                | (4 if sign[ix + 1, iy + 1] else 0)
                | (8 if sign[ix, iy + 1] else 0)
            )
            if code in (0, 15):
                continue
            edge_pt = {
                0: h_cross.get((ix, iy)),
                1: v_cross.get((ix + 1, iy)),
                2: h_cross.get((ix, iy + 1)),
                3: v_cross.get((ix, iy)),
            }
            if code in (5, 10):
                # saddle: disambiguate with the cell center sign
                cx = 0.5 * (xs[ix] + xs[ix + 1])
                cy = 0.5 * (ys[iy] + ys[iy + 1])
                center_pos = f(cx, cy) > 0
                if code == 5:
                    pairs = [(3, 2), (0, 1)] if center_pos else [(3, 0), (1, 2)]
                else:
                    pairs = [(0, 3), (1, 2)] if not center_pos else [(3, 2), (0, 1)]
            else:
                pairs = _MS_CASES[code]
            for e1, e2 in pairs:
                a, b = edge_pt[e1], edge_pt[e2]
                if a is not None and b is not None:
                    segments.append((a, b))

    return _chain_segments(segments)


def _chain_segments(segments):
    """Link shared-endpoint segments into ordered polylines."""
    def key(p):
        return (round(p[0], 12), round(p[1], 12))

    adj: dict[tuple, list] = {}
    for a, b in segments:
        adj.setdefault(key(a), []).append((a, b))
        adj.setdefault(key(b), []).append((b, a))

    used = set()
    polylines = []
    for a, b in segments:
        if (key(a), key(b)) in used or (key(b), key(a)) in used:
            continue
        chain = [a, b]
        used.add((key(a), key(b)))
        # extend forward then backward
        for forward in (True, False):
            while True:
                tip = chain[-1] if forward else chain[0]
                ext = None
                for s, t in adj.get(key(tip), []):
                    if (key(s), key(t)) in used or (key(t), key(s)) in used:
                        continue
                    ext = (s, t)
                    break
                if ext is None:
                    break
                used.add((key(ext[0]), key(ext[1])))
                if forward:
                    chain.append(ext[1])
                else:
                    chain.insert(0, ext[1])
        polylines.append(np.array(chain))
    return polylines


@dataclass
class CurveTraces:
    """Zero-set polylines per curve in one affine chart of direction space."""

    chart: str
    extent: float
    curves: dict[str, list[np.ndarray]]

    def to_csv_rows(self):
        rows = [("curve", "chart", "x", "y")]
        for name, polys in self.curves.items():
            for comp, pts in enumerate(polys):
                label = f"{name}:{comp}"
                for x, y in pts:
                    rows.append((label, self.chart, repr(float(x)), repr(float(y))))
        return rows


def trace_curves(
    triple: Triple,
    chart: str = "u3",
    grid: int = 200,
    extent: float = 2.0,
    refine_tol: float = 1e-10,
) -> CurveTraces:
    """Trace sextic, Hessian and the three pair conics in an affine chart.

    The chart "uk" is the plane u_k = 1.  Vertices are refined by bisection
    along grid edges; components smaller than the grid resolution may be
    missed, which is a documented limitation rather than an error.
    """
    if chart not in CHART_AXES:
        raise SceneError(f"unknown chart {chart!r}; use one of {sorted(CHART_AXES)}")
    xs = np.linspace(-extent, extent, grid)
    ys = np.linspace(-extent, extent, grid)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    axis = CHART_AXES[chart]
    others = [a for a in range(3) if a != axis]
    comps = [None, None, None]
    comps[axis] = np.ones_like(X)
    comps[others[0]] = X
    comps[others[1]] = Y
    U1, U2, U3 = comps

    curves: dict[str, list[np.ndarray]] = {}

    sig = triple.sigma
    sig_scale = triple.sigma_scale

    def sigma_pt(x, y):
        u = chart_point_to_direction(chart, x, y)
        return float(sig(u[0], u[1], u[2])) / sig_scale

    sig_grid = sig.eval_grid(U1, U2, U3) / sig_scale
    curves["sigma"] = _trace_zero_set(sigma_pt, xs, ys, sig_grid, refine_tol)

    hess = triple.hessian_entries
    h_scale = max(max(p.max_abs_coeff() for row in hess for p in row) ** 3, 1e-300)

    def hessian_pt(x, y):
        u = chart_point_to_direction(chart, x, y)
        H = np.array([[hess[a][b](u[0], u[1], u[2]) for b in range(3)] for a in range(3)])
        return float(np.linalg.det(H)) / h_scale

    h_grids = [[hess[a][b].eval_grid(U1, U2, U3) for b in range(3)] for a in range(3)]
    Hg = np.stack([np.stack(row, axis=-1) for row in h_grids], axis=-2)
    hess_grid = np.linalg.det(Hg) / h_scale
    curves["hessian"] = _trace_zero_set(hessian_pt, xs, ys, hess_grid, refine_tol)

    for (i, j) in ((0, 1), (0, 2), (1, 2)):
        form = pair_cone_quadratic(triple.balls[i], triple.balls[j])
        name = f"pair{i}{j}"
        if form.degenerate:
            curves[name] = []
            continue
        M = form.matrix
        scale = max(np.max(np.abs(M)), 1e-30)

        def conic_pt(x, y, M=M, scale=scale):
            u = chart_point_to_direction(chart, x, y)
            return float(u @ M @ u) / scale

        G = np.zeros_like(X)
        comps_list = [U1, U2, U3]
        for a in range(3):
            for b in range(3):
                G += M[a, b] * comps_list[a] * comps_list[b]
        curves[name] = _trace_zero_set(conic_pt, xs, ys, G / scale, refine_tol)

    return CurveTraces(chart=chart, extent=extent, curves=curves)
