"""MinDist sketches of geometric objects, sensitivity coresets of the
landmark set, online row sampling, and exact polyline reconstruction."""
from __future__ import annotations

from .coreset import (
    Coreset,
    ErrorStats,
    empirical_relative_error,
    identity_coreset,
    sensitive_sample,
    weighted_square_estimate,
)
from .errors import InconsistentSketchError, MindistError, PreconditionError
from .generate import gen_curve, gen_landmarks
from .geometry import (
    Circle,
    Hyperplane,
    Line,
    Ray,
    Segment,
    Trajectory,
    adversarial_pair,
    circle_common_tangents,
    hyperplane_canonical,
    hyperplane_signed_distance,
    point_segment_distance,
    point_trajectory_distance,
    ray_first_disk_entry,
)
from .reconstruct import (
    CurveClassParams,
    GridSpec,
    build_grid,
    determine_order,
    find_critical,
    is_critical,
    merge_overlapping_segments,
    recover,
    validate_curve,
)
from .sensitivity import (
    SensitivityProfile,
    ShapeRegime,
    CQ_bound,
    compute_CQ,
    compute_Cq,
    hyperplane_sensitivities,
    sample_size,
    shape_sensitivity_bound,
    total_sensitivity_bound,
)
from .sketch import LandmarkSet, SketchVector, WeightedSubset, dist_dQ, sketch, subset_distance
from .streaming import (
    DesignMatrix,
    build_design_matrix,
    distance_band,
    median_estimate,
    online_sample,
    online_sample_step,
    spectral_sandwich_check,
)

__version__ = "0.1.0"
