"""Scikit-learn style estimator wrappers around the registration engines.

``fit`` consumes the *target* model (offline stage); ``transform`` registers
a *source* and returns its aligned copy. All constructor arguments are plain
parameters, so ``get_params``/``set_params``/``clone`` work as usual and the
estimators compose with sklearn tooling.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .differential import Curve, SurfaceSamples
from .matching import IndexConfig, build_pair_index
from .registration import (
    RansacParams,
    register_curve_to_curve,
    register_curve_to_surface,
    register_surface_to_surface,
)

__all__ = [
    "CurveToSurfaceRegistration",
    "CurveToCurveRegistration",
    "SurfaceToSurfaceRegistration",
]


def _check_points(X, name="X"):
    pts = np.asarray(X, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"{name} must be an (N, 3) array of 3D points")
    if not np.all(np.isfinite(pts)):
        raise ValueError(f"{name} contains non-finite values")
    return pts


def _as_curve(X, smooth_window=0) -> Curve:
    if isinstance(X, Curve):
        curve = X
    else:
        curve = Curve([_check_points(X, "curve")])
    if not curve.has_tangents:
        curve = curve.with_tangents(smooth_window)
    return curve


def _as_surface(X, normals_k=30) -> SurfaceSamples:
    if isinstance(X, SurfaceSamples):
        surf = X
    else:
        surf = SurfaceSamples(_check_points(X, "surface"))
    return surf.with_normals(k=normals_k)


class _RegistrarBase(BaseEstimator):
    """Common parameter handling; subclasses define fit/transform payloads."""

    def __init__(self, inlier_threshold=0.375, max_time=5.0,
                 target_inlier_ratio=0.95, eps=0.5, angular_slack=0.15,
                 tol_simultaneous=0.1, consistency_tol=0.3, tol_len=0.5,
                 tol_ang=0.2, second_vector_tol=0.2, d_min=None,
                 normals_k=30, smooth_window=0, subsample_size=1500,
                 icp_iters=0, random_state=None):
        self.inlier_threshold = inlier_threshold
        self.max_time = max_time
        self.target_inlier_ratio = target_inlier_ratio
        self.eps = eps
        self.angular_slack = angular_slack
        self.tol_simultaneous = tol_simultaneous
        self.consistency_tol = consistency_tol
        self.tol_len = tol_len
        self.tol_ang = tol_ang
        self.second_vector_tol = second_vector_tol
        self.d_min = d_min
        self.normals_k = normals_k
        self.smooth_window = smooth_window
        self.subsample_size = subsample_size
        self.icp_iters = icp_iters
        self.random_state = random_state

    def _ransac_params(self) -> RansacParams:
        return RansacParams(
            inlier_threshold=self.inlier_threshold,
            max_time=self.max_time,
            target_inlier_ratio=self.target_inlier_ratio,
            eps=self.eps,
            angular_slack=self.angular_slack,
            tol_simultaneous=self.tol_simultaneous,
            consistency_tol=self.consistency_tol,
            tol_len=self.tol_len,
            tol_ang=self.tol_ang,
            second_vector_tol=self.second_vector_tol,
            d_min=self.d_min,
            icp_iters=self.icp_iters,
            rng_seed=self.random_state,
        )

    def _finish(self, source_curve_or_points, result):
        self.result_ = result
        self.transform_ = result.transform
        if isinstance(source_curve_or_points, Curve):
            return result.transform.apply(source_curve_or_points.all_points())
        return result.transform.apply(np.asarray(source_curve_or_points, dtype=float))


class CurveToSurfaceRegistration(_RegistrarBase):
    """Global registration of a 3D curve onto a point-sampled surface.

    ``fit(X)`` builds the offline pair index from surface points (N, 3) or a
    :class:`SurfaceSamples`; ``transform(X)`` registers a curve — an (N, 3)
    polyline or a :class:`Curve` — and returns the aligned points. The full
    search outcome is available as ``result_`` and the pose as
    ``transform_``.
    """

    def fit(self, X, y=None):
        surf = _as_surface(X, self.normals_k)
        self.index_ = build_pair_index(
            surf,
            IndexConfig(d_min=self.d_min, subsample_size=self.subsample_size,
                        normals_k=self.normals_k),
            seed=0 if self.random_state is None else self.random_state)
        return self

    def transform(self, X):
        if not hasattr(self, "index_"):
            raise RuntimeError("fit the surface before calling transform")
        curve = _as_curve(X, self.smooth_window)
        result = register_curve_to_surface(curve, self.index_, self._ransac_params())
        return self._finish(curve, result)


class CurveToCurveRegistration(_RegistrarBase):
    """Global registration of one 3D curve onto another (no offline stage)."""

    def fit(self, X, y=None):
        self.target_ = _as_curve(X, self.smooth_window)
        return self

    def transform(self, X):
        if not hasattr(self, "target_"):
            raise RuntimeError("fit the target curve before calling transform")
        source = _as_curve(X, self.smooth_window)
        result = register_curve_to_curve(source, self.target_, self._ransac_params())
        return self._finish(source, result)


class SurfaceToSurfaceRegistration(_RegistrarBase):
    """Global registration between two point-sampled surfaces (normal-based)."""

    def fit(self, X, y=None):
        self.target_ = _as_surface(X, self.normals_k)
        return self

    def transform(self, X):
        if not hasattr(self, "target_"):
            raise RuntimeError("fit the target surface before calling transform")
        source = _as_surface(X, self.normals_k)
        result = register_surface_to_surface(source, self.target_, self._ransac_params())
        return self._finish(source.points, result)
