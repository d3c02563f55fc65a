"""Direction cones of ordered ball scenes.

Feasibility of a direction (order-respecting transversal existence),
geodesic-midpoint convexity certification, geometric permutation
enumeration, connected component counting on the direction sphere,
boundary classification against the triangle of centers, and the planar
pinning predicate.

The bulk feasibility engine vectorizes the disk minimax solve over batches
of directions: all candidate support sets are enumerated through projected
Gram matrices, so no per-direction Python work is needed.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .geom import (
    Direction,
    ProjectedDisk,
    Scene,
    SceneError,
    disks_common_point,
    project_to_orthogonal_plane,
    transversal_order,
)
from .sextic import Triple, tangent_lines_for_direction

DEFAULT_TOL = 1e-9


def scene_from_triple(triple: Triple) -> Scene:
    return Scene(3, triple.balls, allow_overlap=triple.allow_overlap)


# ---------------------------------------------------------------------------
# Sphere sampling.
# ---------------------------------------------------------------------------


def fibonacci_sphere(count: int) -> np.ndarray:
    """Deterministic quasi-uniform lattice on S^2 (golden angle spiral)."""
    i = np.arange(count)
    z = 1.0 - (2.0 * i + 1.0) / count
    phi = i * math.pi * (3.0 - math.sqrt(5.0))
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def sample_directions(d: int, count: int, seed: int = 0) -> tuple[np.ndarray, str]:
    """Quasi-uniform direction sample of S^{d-1} plus the scheme label.

    d = 3 uses the Fibonacci lattice; higher dimensions fall back to seeded
    normalized Gaussians, which are equally deterministic under the seed.
    """
    if d == 3:
        return fibonacci_sphere(count), "fibonacci"
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(count, d))
    n = np.linalg.norm(v, axis=1, keepdims=True)
    n[n == 0] = 1.0
    return v / n, "gaussian"


def lattice_spacing(d: int, count: int) -> float:
    """Mean angular spacing of a `count`-point sample of S^{d-1}."""
    if d == 3:
        return math.sqrt(4.0 * math.pi / count)
    if d == 4:
        return (2.0 * math.pi ** 2 / count) ** (1.0 / 3.0)
    # general sphere measure, adequate for spacing estimates
    area = 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)
    return (area / count) ** (1.0 / (d - 1))


# ---------------------------------------------------------------------------
# Batched minimax slack over directions.
# ---------------------------------------------------------------------------


def _solve_batched(G: np.ndarray, B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Solve G x = b for stacks of small SPD-ish systems with singular guard.

    Returns solutions and a validity mask; singular systems are flagged
    invalid instead of raising.
    """
    m, k, _ = G.shape
    scale = np.max(np.abs(G), axis=(1, 2))
    scale = np.where(scale == 0, 1.0, scale)
    det = np.linalg.det(G)
    ok = np.isfinite(det) & (np.abs(det) > 1e-13 * scale ** k)
    Gs = np.where(ok[:, None, None], G, np.eye(k)[None, :, :])
    X = np.linalg.solve(Gs, B[..., None])[..., 0]
    return X, ok


def minimax_slack_batch(
    centers: np.ndarray, radii: np.ndarray, U: np.ndarray
) -> np.ndarray:
    """Slack of the projected-disk minimax problem for each direction row.

    For direction u the balls project to disks in u^perp; the returned value
    is min_x max_i (|x - c_i,proj| - r_i), computed by enumerating candidate
    support sets on projected Gram matrices (exact up to roundoff).
    """
    U = np.asarray(U, dtype=float)
    centers = np.asarray(centers, dtype=float)
    radii = np.asarray(radii, dtype=float)
    m, d = U.shape
    n = centers.shape[0]
    CU = centers @ U.T                       # (n, m)
    G0 = centers @ centers.T                 # (n, n)
    G = G0[None, :, :] - CU.T[:, :, None] * CU.T[:, None, :]   # (m, n, n)
    diag = np.einsum("mii->mi", G)           # (m, n)

    best = np.full(m, np.inf)

    def consider(lam: np.ndarray, valid: Optional[np.ndarray] = None):
        # lam: (m, n) affine weights of the candidate point over the centers
        nonlocal best
        Gl = np.einsum("mab,mb->ma", G, lam)
        quad = np.einsum("ma,ma->m", lam, Gl)
        dist2 = quad[:, None] - 2.0 * Gl + diag
        dist = np.sqrt(np.clip(dist2, 0.0, None))
        f = np.max(dist - radii[None, :], axis=1)
        if valid is not None:
            f = np.where(valid, f, np.inf)
        best = np.minimum(best, f)

    # single-disk candidates
    for i in range(n):
        lam = np.zeros((m, n))
        lam[:, i] = 1.0
        consider(lam)

    max_k = min(n, d)  # optimum supported on at most (d-1)+1 projected disks
    for k in range(2, max_k + 1):
        for subset in itertools.combinations(range(n), k):
            i = subset[0]
            rest = list(subset[1:])
            # projected Gram of the edge vectors c_rest - c_i
            Gs = (
                G[:, rest][:, :, rest]
                - G[:, rest][:, :, [i] * (k - 1)]
                - G[:, [i] * (k - 1)][:, :, rest]
                + G[:, i, i][:, None, None]
            )
            d2 = np.einsum("mll->ml", Gs)
            r = radii[list(subset)]
            b0 = 0.5 * (d2 - r[1:] ** 2 + r[0] ** 2)
            b1 = np.broadcast_to(r[1:] - r[0], (m, k - 1))
            a0, ok0 = _solve_batched(Gs, b0)
            a1, ok1 = _solve_batched(Gs, b1.copy())
            ok = ok0 & ok1
            qa = np.einsum("ml,mlk,mk->m", a1, Gs, a1) - 1.0
            qb = -2.0 * (np.einsum("ml,mlk,mk->m", a0, Gs, a1) + r[0])
            qc = np.einsum("ml,mlk,mk->m", a0, Gs, a0) - r[0] ** 2
            disc = qb * qb - 4.0 * qa * qc
            has_roots = ok & (disc >= 0.0)
            sq = np.sqrt(np.clip(disc, 0.0, None))
            lin = np.abs(qa) <= 1e-14
            with np.errstate(divide="ignore", invalid="ignore"):
                t_lin = np.where(np.abs(qb) > 0, -qc / qb, np.nan)
                roots = [
                    np.where(lin, t_lin, (-qb + sq) / (2.0 * qa)),
                    np.where(lin, t_lin, (-qb - sq) / (2.0 * qa)),
                ]
            for t in roots:
                valid = has_roots & np.isfinite(t)
                alpha = a0 - t[:, None] * a1
                lam = np.zeros((m, n))
                lam[:, rest] = alpha
                lam[:, i] = 1.0 - np.sum(alpha, axis=1)
                lam = np.where(valid[:, None], lam, 0.0)
                consider(lam, valid)

    return best


def order_keys_batch(centers: np.ndarray, U: np.ndarray) -> np.ndarray:
    return U @ centers.T  # (m, n)


def realized_orders_batch(
    centers: np.ndarray, U: np.ndarray, tie_tol: float
) -> tuple[np.ndarray, np.ndarray]:
    """Argsort orders (m, n) and a tie mask for each direction row."""
    keys = order_keys_batch(centers, U)
    orders = np.argsort(keys, axis=1, kind="stable")
    sorted_keys = np.take_along_axis(keys, orders, axis=1)
    ties = np.any(np.diff(sorted_keys, axis=1) < tie_tol, axis=1)
    return orders, ties


@dataclass
class ConeSampleSet:
    """Feasibility data of a direction sample for one scene."""

    directions: np.ndarray
    slacks: np.ndarray
    orders: np.ndarray
    ties: np.ndarray
    seed: int
    scheme: str
    tol: float

    @property
    def feasible(self) -> np.ndarray:
        return (self.slacks <= self.tol) & ~self.ties

    def feasible_for_order(self, order: Sequence[int]) -> np.ndarray:
        want = np.asarray(order)
        return self.feasible & np.all(self.orders == want[None, :], axis=1)


def sample_scene(
    scene: Scene,
    samples: int,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    extra_directions: Optional[np.ndarray] = None,
    chunk: int = 200_000,
) -> ConeSampleSet:
    """Sample the direction sphere and record slack/order for each direction."""
    U, scheme = sample_directions(scene.dimension, samples, seed)
    if extra_directions is not None and len(extra_directions):
        U = np.vstack([U, np.asarray(extra_directions, dtype=float)])
    centers = scene.centers
    radii = scene.radii
    tie_tol = 1e-9 * scene.diameter()
    slacks = np.empty(len(U))
    orders = np.empty((len(U), len(scene)), dtype=np.int64)
    ties = np.empty(len(U), dtype=bool)
    for lo in range(0, len(U), chunk):
        hi = min(lo + chunk, len(U))
        slacks[lo:hi] = minimax_slack_batch(centers, radii, U[lo:hi])
        orders[lo:hi], ties[lo:hi] = realized_orders_batch(centers, U[lo:hi], tie_tol)
    return ConeSampleSet(U, slacks, orders, ties, seed, scheme, tol)


# ---------------------------------------------------------------------------
# Single-direction feasibility (reference path via the explicit projection).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrderedQuery:
    """A scene with a prescribed meeting order (orientation-sensitive)."""

    scene: Scene
    order: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(int(i) for i in self.order))
        if sorted(self.order) != list(range(len(self.scene))):
            raise SceneError(f"order {self.order} is not a permutation of the balls")

    def reversed(self) -> "OrderedQuery":
        return OrderedQuery(self.scene, tuple(reversed(self.order)))


@dataclass(frozen=True)
class FeasibilityVerdict:
    feasible: bool
    slack: float
    realized_order: tuple[int, ...]
    tie: bool
    point: Optional[np.ndarray] = None


def direction_feasible(
    query: OrderedQuery,
    u: Direction,
    tol: float = DEFAULT_TOL,
    order_semantics: str = "center",
) -> FeasibilityVerdict:
    """Order-respecting transversal existence along u.

    Feasible iff the projected disks share a point (minimax slack <= tol)
    and the realized meeting order equals the queried order.  A tie in the
    order keys is reported as indeterminate, never as feasible.  See
    cone_convexity_check for the order_semantics switch; "center" is the
    contract default.
    """
    disks = project_to_orthogonal_plane(query.scene, u)
    res = disks_common_point(disks)
    order_res = transversal_order(query.scene, u)
    if order_semantics == "entry":
        order_ok = entry_order_feasible(query.scene, u.components, query.order, tol)
        tie = False
    else:
        order_ok = not order_res.is_tied and order_res.order == query.order
        tie = order_res.is_tied
    feasible = res.slack <= tol and order_ok
    return FeasibilityVerdict(
        feasible=feasible,
        slack=res.slack,
        realized_order=order_res.order,
        tie=tie,
        point=res.point,
    )


def feasibility_batch(
    query: OrderedQuery, U: np.ndarray, tol: float = DEFAULT_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """(feasible mask, slacks) for rows of U against the ordered query."""
    scene = query.scene
    U = np.asarray(U, dtype=float)
    slacks = minimax_slack_batch(scene.centers, scene.radii, U)
    orders, ties = realized_orders_batch(scene.centers, U, 1e-9 * scene.diameter())
    want = np.asarray(query.order)
    mask = (slacks <= tol) & ~ties & np.all(orders == want[None, :], axis=1)
    return mask, slacks


# ---------------------------------------------------------------------------
# Entry-order feasibility.
#
# For disjoint balls the meeting order along any transversal equals the order
# of the center projections <c_i, u>, independent of which transversal is
# chosen.  For overlapping balls the two notions differ: the entry order
# (first boundary crossing per ball) depends on the transversal, and it is
# the entry-order cones that lose convexity in the overlap transition.  The
# default semantics everywhere is "center" (identical to "entry" on disjoint
# scenes); "entry" exists for the overlap demonstrations.
# ---------------------------------------------------------------------------


def _entry_order_margin(
    scene: Scene, u: np.ndarray, order: Sequence[int], grid: int = 25
) -> float:
    """Best margin over transversals of direction u for the entry order.

    Positive: some transversal meets the balls in the given entry order
    (with that much separation between consecutive entry times); negative:
    no sampled transversal does.  Returns -inf when no transversal exists.
    """
    from .geom import orthonormal_basis_of_complement

    u = np.asarray(u, dtype=float)
    basis = orthonormal_basis_of_complement(u)
    C2 = scene.centers @ basis.T
    radii = scene.radii
    k = scene.centers @ u
    lo = np.max(C2 - radii[:, None], axis=0)
    hi = np.min(C2 + radii[:, None], axis=0)
    pts = [np.asarray(disks_common_point(
        [ProjectedDisk(C2[i], radii[i]) for i in range(len(radii))]
    ).point)]
    if np.all(lo <= hi):
        xs = np.linspace(lo[0], hi[0], grid)
        ys = np.linspace(lo[1], hi[1], grid)
        X, Y = np.meshgrid(xs, ys)
        pts.append(np.column_stack([X.ravel(), Y.ravel()]))
    P = np.vstack([p.reshape(-1, 2) for p in pts])
    d2 = np.sum((P[:, None, :] - C2[None, :, :]) ** 2, axis=2)
    inside = np.all(d2 <= radii[None, :] ** 2 + 1e-12, axis=1)
    if not np.any(inside):
        return -math.inf
    P = P[inside]
    d2 = d2[inside]
    entry = k[None, :] - np.sqrt(np.clip(radii[None, :] ** 2 - d2, 0.0, None))
    seq = entry[:, list(order)]
    margins = np.min(np.diff(seq, axis=1), axis=1)
    best = int(np.argmax(margins))
    result = float(margins[best])

    # polish the best transversal with a local pattern search
    x = P[best].copy()
    step = 0.25 * float(np.min(radii))
    for _ in range(40):
        improved = False
        for dx in ((step, 0), (-step, 0), (0, step), (0, -step)):
            cand = x + np.array(dx)
            cd2 = np.sum((cand[None, :] - C2) ** 2, axis=1)
            if np.any(cd2 > radii ** 2 + 1e-12):
                continue
            centry = k - np.sqrt(np.clip(radii ** 2 - cd2, 0.0, None))
            m = float(np.min(np.diff(centry[list(order)])))
            if m > result:
                result = m
                x = cand
                improved = True
        if not improved:
            step *= 0.5
            if step < 1e-9:
                break
    return result


def entry_order_feasible(
    scene: Scene, u, order: Sequence[int], tol: float = DEFAULT_TOL
) -> bool:
    """Whether some transversal of direction u meets the balls in this entry order."""
    return _entry_order_margin(scene, np.asarray(u, dtype=float), order) >= -tol


# ---------------------------------------------------------------------------
# Convexity certification by geodesic midpoints.
# ---------------------------------------------------------------------------


@dataclass
class MidpointViolation:
    u: np.ndarray
    v: np.ndarray
    midpoint: np.ndarray
    slack: float
    order_mismatch: bool


@dataclass
class ConvexityReport:
    tested_pairs: int
    violations: list[MidpointViolation]
    min_midpoint_margin: Optional[float]
    feasible_samples: int
    inconclusive: bool

    @property
    def passed(self) -> bool:
        return not self.inconclusive and not self.violations

    def to_json_dict(self) -> dict:
        return {
            "tested_pairs": self.tested_pairs,
            "violations": [
                {
                    "u": [float(x) for x in v.u],
                    "v": [float(x) for x in v.v],
                    "midpoint": [float(x) for x in v.midpoint],
                    "slack": v.slack,
                    "order_mismatch": v.order_mismatch,
                }
                for v in self.violations[:32]
            ],
            "violation_count": len(self.violations),
            "min_midpoint_margin": self.min_midpoint_margin,
            "feasible_samples": self.feasible_samples,
            "inconclusive": self.inconclusive,
            "pass": self.passed,
        }


def cone_convexity_check(
    query: OrderedQuery,
    pairs: int = 1000,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    lattice: int = 4096,
    order_semantics: str = "center",
) -> ConvexityReport:
    """Sample feasible direction pairs and test their geodesic midpoints.

    For a strictly convex cone every midpoint of feasible directions is
    feasible; near-boundary pairs additionally get strictly interior
    midpoints, which the min midpoint margin tracks.  Fewer than two
    feasible samples make the check inconclusive.

    ``order_semantics`` chooses how the meeting order of a direction is
    decided: "center" (projections of centers; the library default) or
    "entry" (first boundary crossing of some transversal).  The two agree
    on disjoint scenes; only entry-order cones lose convexity when balls
    overlap.
    """
    if order_semantics not in ("center", "entry"):
        raise SceneError(f"unknown order semantics {order_semantics!r}")
    scene = query.scene
    sset = sample_scene(scene, lattice, seed=seed, tol=tol)
    if order_semantics == "center":
        mask = sset.feasible_for_order(query.order)
    else:
        candidates = np.nonzero(sset.slacks <= tol)[0]
        mask = np.zeros(len(sset.directions), dtype=bool)
        for m in candidates:
            mask[m] = entry_order_feasible(scene, sset.directions[m], query.order, tol)
    F = sset.directions[mask]
    fslacks = sset.slacks[mask]
    if len(F) < 2:
        return ConvexityReport(0, [], None, len(F), inconclusive=True)

    rng = np.random.default_rng(seed + 1)
    ii = rng.integers(0, len(F), size=pairs)
    jj = rng.integers(0, len(F), size=pairs)
    same = ii == jj
    jj = np.where(same, (jj + 1) % len(F), jj)

    # bias one third of the pairs toward the boundary (largest slack) to
    # exercise strictness where it is tightest, and one third toward LOCAL
    # boundary pairs whose midpoints hug the boundary arc; local pairs are
    # what detect a concave dimple
    k_bd = max(2, len(F) // 5)
    boundary_idx = np.argsort(fslacks)[-k_bd:]
    nb = pairs // 3
    ii[:nb] = boundary_idx[rng.integers(0, k_bd, size=nb)]
    jj[:nb] = boundary_idx[rng.integers(0, k_bd, size=nb)]
    spacing = lattice_spacing(scene.dimension, lattice)
    cos_lo = math.cos(min(14.0 * spacing, math.pi * 0.9))
    cos_hi = math.cos(min(1.5 * spacing, math.pi * 0.5))
    B = F[boundary_idx]
    dots = np.clip(B @ B.T, -1.0, 1.0)
    for slot in range(nb, min(2 * nb, pairs)):
        a = int(rng.integers(0, k_bd))
        near = np.nonzero((dots[a] >= cos_lo) & (dots[a] <= cos_hi))[0]
        b = int(near[rng.integers(0, len(near))]) if len(near) else int(rng.integers(0, k_bd))
        ii[slot] = boundary_idx[a]
        jj[slot] = boundary_idx[b]
    bad = ii == jj
    jj = np.where(bad, (jj + 1) % len(F), jj)

    u = F[ii]
    v = F[jj]
    mids = u + v
    norms = np.linalg.norm(mids, axis=1)
    good = norms > 1e-9  # angular distance < pi, guaranteed for one convex cone
    mids = mids[good] / norms[good, None]
    u, v = u[good], v[good]

    slacks = minimax_slack_batch(scene.centers, scene.radii, mids)
    if order_semantics == "center":
        orders, ties = realized_orders_batch(scene.centers, mids, 1e-9 * scene.diameter())
        want = np.asarray(query.order)
        order_ok = ~ties & np.all(orders == want[None, :], axis=1)
    else:
        order_ok = np.zeros(len(mids), dtype=bool)
        for m in np.nonzero(slacks <= tol)[0]:
            order_ok[m] = entry_order_feasible(scene, mids[m], query.order, tol)
    ok = (slacks <= tol) & order_ok

    bad_idx = np.nonzero(~ok)[0]
    if order_semantics == "entry" and len(bad_idx):
        # double-check reported violations at higher transversal resolution
        confirmed = []
        for m in bad_idx:
            if slacks[m] > tol:
                confirmed.append(m)
            elif _entry_order_margin(scene, mids[m], query.order, grid=60) < -tol:
                confirmed.append(m)
        bad_idx = np.array(confirmed, dtype=int)
        ok = np.ones(len(mids), dtype=bool)
        ok[bad_idx] = False

    violations = [
        MidpointViolation(u[m], v[m], mids[m], float(slacks[m]), not bool(order_ok[m]))
        for m in bad_idx
    ]
    margin = float(np.min(-slacks)) if len(slacks) else None
    return ConvexityReport(
        tested_pairs=int(len(mids)),
        violations=violations,
        min_midpoint_margin=margin,
        feasible_samples=int(len(F)),
        inconclusive=False,
    )


# ---------------------------------------------------------------------------
# Geometric permutations and components.
# ---------------------------------------------------------------------------


def canonical_permutation(order: Sequence[int]) -> tuple[int, ...]:
    fwd = tuple(int(i) for i in order)
    rev = tuple(reversed(fwd))
    return min(fwd, rev)


@dataclass
class PermutationEntry:
    permutation: tuple[int, ...]
    witness: np.ndarray
    witness_order: tuple[int, ...]
    witness_slack: float
    sample_count: int


@dataclass
class PermutationCatalog:
    entries: dict[tuple[int, ...], PermutationEntry]
    samples: int
    seed: int

    def __len__(self) -> int:
        return len(self.entries)

    def to_json_dict(self) -> dict:
        return {
            "count": len(self.entries),
            "samples": self.samples,
            "seed": self.seed,
            "permutations": [
                {
                    "permutation": list(e.permutation),
                    "witness": [float(x) for x in e.witness],
                    "witness_order": list(e.witness_order),
                    "witness_slack": e.witness_slack,
                    "sample_count": e.sample_count,
                }
                for e in self.entries.values()
            ],
        }


def enumerate_geometric_permutations(
    scene: Scene,
    samples: int = 20000,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    sample_set: Optional[ConeSampleSet] = None,
) -> PermutationCatalog:
    """Catalog of geometric permutations discovered by direction sampling.

    Orderings are identified with their reversals; each entry keeps the
    deepest-slack witness direction.  Cones thinner than the sampling
    density can be missed, which is reported through the sample counts.
    """
    sset = sample_set if sample_set is not None else sample_scene(
        scene, samples, seed=seed, tol=tol
    )
    feas = sset.feasible
    entries: dict[tuple[int, ...], PermutationEntry] = {}
    idxs = np.nonzero(feas)[0]
    for m in idxs:
        order = tuple(int(i) for i in sset.orders[m])
        canon = canonical_permutation(order)
        cur = entries.get(canon)
        if cur is None:
            entries[canon] = PermutationEntry(
                canon, sset.directions[m].copy(), order, float(sset.slacks[m]), 1
            )
        else:
            cur.sample_count += 1
            if sset.slacks[m] < cur.witness_slack:
                cur.witness = sset.directions[m].copy()
                cur.witness_order = order
                cur.witness_slack = float(sset.slacks[m])
    return PermutationCatalog(entries, samples, seed)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


@dataclass
class ComponentReport:
    count: int
    cluster_sizes: list[int]
    angular_radius: float
    undersampled: bool

    def to_json_dict(self) -> dict:
        return {
            "count": self.count,
            "cluster_sizes": self.cluster_sizes,
            "angular_radius": self.angular_radius,
            "undersampled": self.undersampled,
        }


def count_components(
    scene: Scene,
    samples: int = 20000,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    radius_factor: float = 2.5,
    sample_set: Optional[ConeSampleSet] = None,
) -> ComponentReport:
    """Count connected clusters of feasible directions on the sphere.

    Each feasible sample is canonicalized (antipodal identification of the
    reversed-order witness), then clustered with a neighborhood graph whose
    angular radius is radius_factor times the lattice spacing.  For disjoint
    scenes the count must equal the number of geometric permutations.
    """
    sset = sample_set if sample_set is not None else sample_scene(
        scene, samples, seed=seed, tol=tol
    )
    feas = sset.feasible
    dirs = sset.directions[feas]
    orders = sset.orders[feas]
    if len(dirs) == 0:
        return ComponentReport(0, [], 0.0, undersampled=False)
    canon_dirs = dirs.copy()
    for m in range(len(dirs)):
        order = tuple(int(i) for i in orders[m])
        if order != canonical_permutation(order):
            canon_dirs[m] = -canon_dirs[m]
    theta = radius_factor * lattice_spacing(scene.dimension, len(sset.directions))
    chord = 2.0 * math.sin(min(theta, math.pi) / 2.0)
    tree = cKDTree(canon_dirs)
    uf = _UnionFind(len(canon_dirs))
    for a, b in tree.query_pairs(chord):
        uf.union(a, b)
    roots: dict[int, int] = {}
    for m in range(len(canon_dirs)):
        r = uf.find(m)
        roots[r] = roots.get(r, 0) + 1
    sizes = sorted(roots.values(), reverse=True)
    return ComponentReport(
        count=len(sizes),
        cluster_sizes=sizes,
        angular_radius=theta,
        undersampled=any(s < 10 for s in sizes),
    )


# ---------------------------------------------------------------------------
# Boundary direction location (shared with the flex probe).
# ---------------------------------------------------------------------------


def _geodesic_point(anchor: np.ndarray, tangent: np.ndarray, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    return np.cos(theta)[..., None] * anchor[None, :] + np.sin(theta)[..., None] * tangent


def boundary_directions_for_triple(
    triple: Triple,
    count: int,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    lattice: int = 4096,
) -> np.ndarray:
    """Directions on the cone boundaries of a triple, located by bisection.

    Every discovered cone gets an even share of geodesic rays from an
    interior anchor; each ray is marched to the first infeasible point and
    the crossing is bisected until the bracket is below 1e-12 radians.
    """
    scene = scene_from_triple(triple)
    sset = sample_scene(scene, lattice, seed=seed, tol=tol)
    feas = sset.feasible
    if not np.any(feas):
        return np.zeros((0, 3))
    order_tuples = [tuple(int(i) for i in o) for o in sset.orders]
    cones = sorted({order_tuples[m] for m in np.nonzero(feas)[0]})
    shares = [count // len(cones)] * len(cones)
    for extra in range(count % len(cones)):
        shares[extra] += 1
    out = []
    centers = scene.centers
    radii = scene.radii
    tie_tol = 1e-9 * scene.diameter()
    for order, n_rays in zip(cones, shares):
        if n_rays == 0:
            continue
        mask = feas & np.array([o == order for o in order_tuples])
        idx = np.nonzero(mask)[0]
        anchor_i = idx[np.argmin(sset.slacks[idx])]
        anchor = sset.directions[anchor_i]
        basis = _tangent_basis(anchor)
        phis = 2.0 * math.pi * (np.arange(n_rays) + 0.5) / n_rays
        tangents = np.cos(phis)[:, None] * basis[0] + np.sin(phis)[:, None] * basis[1]

        def feasible_at(theta):
            pts = _geodesic_point(anchor, tangents, theta)
            slacks = minimax_slack_batch(centers, radii, pts)
            orders, ties = realized_orders_batch(centers, pts, tie_tol)
            want = np.asarray(order)
            return (slacks <= tol) & ~ties & np.all(orders == want[None, :], axis=1)

        lo = np.zeros(n_rays)
        hi = np.full(n_rays, np.nan)
        theta = 0.0
        step = 0.02
        alive = np.ones(n_rays, dtype=bool)
        while theta < math.pi - 1e-3 and np.any(alive):
            theta_next = theta + step
            ok = feasible_at(np.full(n_rays, theta_next))
            newly_out = alive & ~ok
            hi[newly_out] = theta_next
            lo[alive & ok] = theta_next
            alive &= ok
            theta = theta_next
        found = ~np.isnan(hi)
        lo_f, hi_f = lo[found], hi[found]
        tg = tangents[found]
        for _ in range(45):
            mid = 0.5 * (lo_f + hi_f)
            pts = _geodesic_point(anchor, tg, mid)
            slacks = minimax_slack_batch(centers, radii, pts)
            orders, ties = realized_orders_batch(centers, pts, tie_tol)
            want = np.asarray(order)
            ok = (slacks <= tol) & ~ties & np.all(orders == want[None, :], axis=1)
            lo_f = np.where(ok, mid, lo_f)
            hi_f = np.where(ok, hi_f, mid)
        pts = _geodesic_point(anchor, tg, 0.5 * (lo_f + hi_f))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        out.extend(pts)
        if len(out) >= count:
            break
    return np.array(out[:count]) if out else np.zeros((0, 3))


def _tangent_basis(u: np.ndarray) -> np.ndarray:
    from .geom import orthonormal_basis_of_complement

    return orthonormal_basis_of_complement(u)


# ---------------------------------------------------------------------------
# Boundary classification against the triangle of centers.
# ---------------------------------------------------------------------------


@dataclass
class LineClassification:
    crosses_triangle: Optional[bool]
    barycentrics: Optional[np.ndarray]
    tag: Optional[str]


@dataclass
class BoundaryClassification:
    on_boundary: Optional[bool]
    crosses_triangle: Optional[bool]
    lines: list[LineClassification]
    feasible_probe_fraction: float
    interior_witness: Optional[np.ndarray]
    tag: Optional[str]


def classify_boundary_direction(
    triple: Triple,
    u: Direction,
    tol: float = DEFAULT_TOL,
    probe_eps: float = 1e-4,
    probes: int = 16,
) -> BoundaryClassification:
    """Classify a sextic direction: cone boundary vs interior.

    ``crosses_triangle`` intersects each recovered tangent line with the
    plane of centers and tests barycentric containment in the triangle of
    centers; ``on_boundary`` comes from an independent empirical probe of
    perturbed directions (feasible on one side only).  The two must agree
    for generic configurations.
    """
    if triple.collinear_centers:
        return BoundaryClassification(
            None, None, [], 0.0, None, tag="collinear centers: no triangle"
        )
    rec = tangent_lines_for_direction(triple, u)
    centers = triple.centers
    normal = np.cross(centers[1] - centers[0], centers[2] - centers[0])
    normal /= np.linalg.norm(normal)
    line_cls: list[LineClassification] = []
    for line in rec.lines:
        denom = float(np.dot(line.direction, normal))
        off = float(np.dot(centers[0] - line.point, normal))
        if abs(denom) < 1e-12:
            tag = (
                "tangent inside plane of centers"
                if abs(off) < 1e-9
                else "tangent parallel to plane of centers"
            )
            line_cls.append(LineClassification(None, None, tag))
            continue
        tstar = off / denom
        X = line.point + tstar * line.direction
        lam = _barycentrics_in_plane(centers, X)
        crosses = bool(np.all(lam >= -1e-9))
        line_cls.append(LineClassification(crosses, lam, None))

    crosses_any = None
    determinate = [lc.crosses_triangle for lc in line_cls if lc.crosses_triangle is not None]
    if determinate:
        crosses_any = any(determinate)

    # empirical probe: feasibility of nearby directions for the realized order
    scene = scene_from_triple(triple)
    order_res = transversal_order(scene, u)
    if order_res.is_tied:
        return BoundaryClassification(
            None, crosses_any, line_cls, 0.0, None, tag="order tie at direction"
        )
    query = OrderedQuery(scene, order_res.order)
    basis = _tangent_basis(u.components)
    phis = 2.0 * math.pi * (np.arange(probes) + 0.5) / probes
    tangents = np.cos(phis)[:, None] * basis[0] + np.sin(phis)[:, None] * basis[1]
    pts = _geodesic_point(u.components, tangents, np.full(probes, probe_eps))
    mask, _ = feasibility_batch(query, pts, tol=tol)
    frac = float(np.mean(mask))
    witness = pts[np.nonzero(mask)[0][0]] if np.any(mask) else None
    if frac >= 1.0:
        on_boundary = False  # interior: every perturbation stays feasible
    elif frac > 0.0:
        on_boundary = True
    else:
        on_boundary = None  # isolated or outside at this resolution
    return BoundaryClassification(
        on_boundary, crosses_any, line_cls, frac, witness, tag=None
    )


def _barycentrics_in_plane(centers: np.ndarray, X: np.ndarray) -> np.ndarray:
    e1 = centers[1] - centers[0]
    e2 = centers[2] - centers[0]
    rel = X - centers[0]
    A = np.array([[e1 @ e1, e1 @ e2], [e1 @ e2, e2 @ e2]])
    b = np.array([rel @ e1, rel @ e2])
    lam12 = np.linalg.solve(A, b)
    return np.array([1.0 - lam12.sum(), lam12[0], lam12[1]])


# ---------------------------------------------------------------------------
# Planar pinning predicate.
# ---------------------------------------------------------------------------


def is_pinned_planar(triple: Triple, tol: float = 1e-9) -> bool:
    """Whether the cone of directions degenerates to a single point.

    True iff some line in the plane of centers is tangent to all three traced
    discs with the middle ball on the opposite side from the outer two.  The
    sign-patterned tangency conditions determine the line normal by a 2x2
    solve; pinning holds exactly when that normal has unit length.
    """
    if triple.collinear_centers:
        return False
    centers = triple.centers
    radii = np.array([b.radius for b in triple.balls])
    e1 = centers[1] - centers[0]
    e2 = centers[2] - centers[0]
    normal = np.cross(e1, e2)
    normal /= np.linalg.norm(normal)
    b1 = e1 - np.dot(e1, normal) * normal
    # orthonormal frame of the plane of centers
    f1 = b1 / np.linalg.norm(b1)
    f2 = np.cross(normal, f1)
    P = np.array([[0.0, 0.0], [e1 @ f1, e1 @ f2], [e2 @ f1, e2 @ f2]])
    for signs in ((1.0, -1.0, 1.0), (-1.0, 1.0, -1.0)):
        rhs = np.array(
            [signs[1] * radii[1] - signs[0] * radii[0],
             signs[2] * radii[2] - signs[0] * radii[0]]
        )
        A = np.array([P[1] - P[0], P[2] - P[0]])
        det = np.linalg.det(A)
        if abs(det) < 1e-12 * max(np.abs(A).max() ** 2, 1e-30):
            continue
        n2 = np.linalg.solve(A, rhs)
        if abs(np.linalg.norm(n2) - 1.0) <= tol:
            return True
    return False
