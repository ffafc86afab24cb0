"""Global rigid registration of 3D curves and surfaces.

Initialization-free alignment built on pairs of points augmented with local
differential information (tangents on curves, normals on surfaces): a
closed-form pose from a single matching pair, an invariant 4-parameter pair
descriptor for fast correspondence search, and RANSAC-style
hypothesise-and-test engines for curve-vs-surface, curve-vs-curve and
surface-vs-surface registration.
"""

from .differential import Curve, SurfaceSamples, estimate_normals, estimate_tangents
from .estimators import (
    CurveToCurveRegistration,
    CurveToSurfaceRegistration,
    SurfaceToSurfaceRegistration,
)
from .geometry import (
    Descriptor,
    PointVectorTuple,
    RigidTransform,
    compute_descriptor,
    pose_from_match_cc,
    pose_from_match_cs,
    rotation_error_deg,
    translation_error,
)
from .io import load_curve, load_model, load_transform, save_transform
from .matching import (
    IndexConfig,
    PairIndex,
    build_pair_index,
    extract_pairs_cc,
    load_pair_index,
    query_pair_index,
    save_pair_index,
)
from .registration import (
    RansacParams,
    RegistrationResult,
    TerminationReason,
    register_curve_to_curve,
    register_curve_to_surface,
    register_surface_to_surface,
)

__version__ = "0.1.0"

__all__ = [
    "Curve",
    "SurfaceSamples",
    "estimate_normals",
    "estimate_tangents",
    "Descriptor",
    "PointVectorTuple",
    "RigidTransform",
    "compute_descriptor",
    "pose_from_match_cs",
    "pose_from_match_cc",
    "rotation_error_deg",
    "translation_error",
    "IndexConfig",
    "PairIndex",
    "build_pair_index",
    "query_pair_index",
    "extract_pairs_cc",
    "save_pair_index",
    "load_pair_index",
    "RansacParams",
    "RegistrationResult",
    "TerminationReason",
    "register_curve_to_surface",
    "register_curve_to_curve",
    "register_surface_to_surface",
    "CurveToSurfaceRegistration",
    "CurveToCurveRegistration",
    "SurfaceToSurfaceRegistration",
    "load_model",
    "load_curve",
    "save_transform",
    "load_transform",
]
