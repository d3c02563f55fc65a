"""Line transversals to disjoint balls.

Direction sextics of ball triples, Hessian flex certificates, direction-cone
feasibility and convexity, geometric permutations, and exact rational
verification of the underlying algebraic identities.
"""

from .geom import (
    Ball,
    Direction,
    MinimaxResult,
    ProjectedDisk,
    Scene,
    SceneError,
    SolverError,
    disks_common_point,
    project_to_orthogonal_plane,
    random_disjoint_scene,
    random_scene_with_transversal,
    scene_classification,
    transversal_order,
)
from .sextic import (
    CircleFamily,
    DirectionPoly,
    Line3,
    QuadraticFormOnDirections,
    Triple,
    eval_hessian_sigma,
    eval_sigma,
    pair_cone_quadratic,
    tangent_lines_for_direction,
    trace_curves,
)
from .flexprobe import (
    CanonicalCoords,
    LiftedConfig,
    certify_flex_free,
    certify_octant_separation,
    gram_from_barycentrics,
    lifted_hessian_decomposition,
    q_invariant,
    star_h_canonical,
)
from .cone import (
    ConeSampleSet,
    OrderedQuery,
    PermutationCatalog,
    classify_boundary_direction,
    cone_convexity_check,
    count_components,
    direction_feasible,
    enumerate_geometric_permutations,
    is_pinned_planar,
)
from .polyid import (
    ExactScalar,
    IdentitySpec,
    check_identity,
    identity_catalog,
    schwartz_zippel_suite,
)

__version__ = "0.1.0"
