"""Hypothesise-and-test engines for the three registration variants.

Each hypothesis is a closed-form pose from one matched 2-tuple. The search
draws random source pairs, looks up matching target pairs (offline index for
curve-vs-surface, distance-gated extraction for the same-kind variants) and
computes all candidate poses of a draw in one vectorized batch. Poses are
screened by inlier counts on a fixed subsample of the source points; the
top-screened poses are re-scored exactly against all source points, so every
accepted pose carries its true inlier count. The loop stops at the inlier
target, the time budget, or the draw cap.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.ndimage import distance_transform_edt
from scipy.spatial import cKDTree

from .differential import Curve, SurfaceSamples
from .exceptions import (
    DegenerateBaseline,
    DegenerateElevation,
    NoHypothesisFound,
)
from .geometry import (
    NORMALS,
    TANGENTS,
    PointVectorTuple,
    RigidTransform,
    _batch_pose_cc,
    _batch_pose_cs,
    compute_descriptor,
    rotation_about_axis,
)
from .matching import PairExtractor, PairIndex, query_pair_index_records

__all__ = [
    "RansacParams",
    "RegistrationResult",
    "TerminationReason",
    "count_inliers",
    "register_curve_to_surface",
    "register_curve_to_curve",
    "register_surface_to_surface",
]


class TerminationReason(str, Enum):
    INLIER_TARGET = "inlier_target"
    TIME_BUDGET = "time_budget"
    EXHAUSTED = "exhausted"


@dataclass
class RansacParams:
    """Search parameters shared by all three engines.

    Defaults suit noise-free but *discretized* data (polyline tangents and
    PCA normals carry curvature error, so the angular tolerances cannot be
    machine-tight); noisy data needs looser settings still, and the benchmark
    harness scales them with the noise level.
    """

    inlier_threshold: float = 0.375        # 0.5% of a diameter-75 model
    max_time: float = 5.0
    target_inlier_ratio: float = 0.95
    eps: float = 0.5                       # baseline-length tolerance
    angular_slack: float = 0.15            # widens the inequality box (cs)
    tol_simultaneous: float = 0.1          # simultaneity test (cs)
    consistency_tol: float = 0.3           # null-space check in the cs pose
    tol_len: float = 0.5                   # baseline equality (cc/ss)
    tol_ang: float = 0.2                   # angle equalities (cc/ss)
    second_vector_tol: float = 0.2         # q alignment check in the cc pose
    d_min: float | None = None             # min drawn baseline; None -> 5% diam
    elevation_margin: float = 1e-3
    rng_seed: int | None = None
    max_draws: int | None = None
    max_candidates: int | None = None      # cap per draw, best baseline match
    screen_points: int = 64                # source subsample for screening
    refine_top: int = 10                   # screened poses re-scored exactly
    icp_iters: int = 0                     # local polish of re-scored poses

    def __post_init__(self):
        if self.inlier_threshold <= 0:
            raise ValueError("inlier_threshold must be positive")
        if not (0.0 < self.target_inlier_ratio <= 1.0):
            raise ValueError("target_inlier_ratio must be in (0, 1]")
        if self.max_time < 0:
            raise ValueError("max_time must be >= 0")
        if self.screen_points < 1 or self.refine_top < 1:
            raise ValueError("screen_points and refine_top must be >= 1")


@dataclass
class RegistrationResult:
    transform: RigidTransform
    inlier_count: int
    inlier_ratio: float
    hypotheses_tested: int
    source_pairs_drawn: int
    elapsed: float
    terminated_by: TerminationReason


def count_inliers(transform: RigidTransform, source_points,
                  target_tree: cKDTree, threshold: float) -> int:
    """Number of source points within ``threshold`` of the target after
    applying ``transform`` (nearest-neighbour point-to-point distance)."""
    moved = transform.apply(np.asarray(source_points, dtype=float))
    dist, _ = target_tree.query(moved)
    return int(np.count_nonzero(dist <= threshold))


def _count_raw(R, t, source_points, target_tree, threshold) -> int:
    dist, _ = target_tree.query(source_points @ R.T + t)
    return int(np.count_nonzero(dist <= threshold))


class _DistanceGrid:
    """Voxelized distance field over a target point cloud.

    ``lookup`` returns the distance from each query point's voxel center to
    the nearest occupied voxel center, which differs from the true
    nearest-point distance by at most ``margin``. Used only to rank pose
    hypotheses cheaply; accepted poses are always re-scored exactly.
    """

    def __init__(self, points, cell: float):
        points = np.asarray(points, dtype=float)
        self.cell = float(cell)
        self.margin = math.sqrt(3.0) * self.cell
        pad = 2.0 * self.cell
        self.origin = points.min(axis=0) - pad
        extent = points.max(axis=0) + pad - self.origin
        self.shape = np.maximum(np.ceil(extent / self.cell).astype(int) + 1, 1)
        occupied = np.ones(self.shape, dtype=bool)
        idx = self._indices(points)
        occupied[idx[:, 0], idx[:, 1], idx[:, 2]] = False
        self.field = distance_transform_edt(
            occupied, sampling=self.cell).astype(np.float32)

    def _indices(self, pts):
        idx = np.rint((pts - self.origin) / self.cell).astype(int)
        return np.clip(idx, 0, self.shape - 1)

    def lookup(self, pts) -> np.ndarray:
        idx = self._indices(np.asarray(pts, dtype=float))
        return self.field[idx[:, 0], idx[:, 1], idx[:, 2]]


def _screen_counts(R, t, screen_pts, grid: _DistanceGrid, threshold,
                   chunk: int = 8192) -> np.ndarray:
    """Approximate inlier counts of many poses on a fixed source subsample.

    The distance-field lookup over-accepts by at most the grid margin, so
    these counts only order the hypotheses; exact counting happens on the
    top-ranked ones.
    """
    m = len(screen_pts)
    counts = np.empty(len(R), dtype=np.int64)
    cap = threshold + grid.margin
    for s in range(0, len(R), chunk):
        Rc, tc = R[s:s + chunk], t[s:s + chunk]
        moved = np.einsum("cij,mj->cmi", Rc, screen_pts) + tc[:, None, :]
        dist = grid.lookup(moved.reshape(-1, 3))
        counts[s:s + chunk] = np.count_nonzero(
            dist.reshape(len(Rc), m) <= cap, axis=1)
    return counts


def _icp_polish(R, t, src_pts, target_tree, target_points, target_normals,
                match_radius, iters: int):
    """A few iterations of local rigid alignment against nearest targets.

    With target normals, each round solves the linearized point-to-plane
    problem (more accurate on sparsely sampled smooth targets); without, it
    uses the closed-form point-to-point update (Kabsch). Correspondences
    beyond ``match_radius`` are ignored each round.
    """
    for _ in range(iters):
        moved = src_pts @ R.T + t
        dist, idx = target_tree.query(moved)
        sel = dist <= match_radius
        if np.count_nonzero(sel) < 6:
            break
        mi = idx[sel]
        if target_normals is not None:
            p = moved[sel]
            q = target_points[mi]
            nrm = target_normals[mi]
            resid = np.einsum("ij,ij->i", q - p, nrm)
            A = np.concatenate([np.cross(p, nrm), nrm], axis=1)
            try:
                x, *_ = np.linalg.lstsq(A, resid, rcond=None)
            except np.linalg.LinAlgError:
                break
            omega, dt = x[:3], x[3:]
            angle = np.linalg.norm(omega)
            dR = (np.eye(3) if angle < 1e-15
                  else rotation_about_axis(omega / angle, angle))
            R = dR @ R
            t = dR @ t + dt
        else:
            A = src_pts[sel]
            B = target_points[mi]
            ca, cb = A.mean(axis=0), B.mean(axis=0)
            H = (A - ca).T @ (B - cb)
            U, _, Vt = np.linalg.svd(H)
            d = np.sign(np.linalg.det(Vt.T @ U.T))
            R = Vt.T @ np.diag([1.0, 1.0, d]) @ U.T
            t = cb - R @ ca
    return R, t


def _resolve_d_min(params: RansacParams, points: np.ndarray) -> float:
    if params.d_min is not None:
        return params.d_min
    diag = float(np.linalg.norm(points.max(axis=0) - points.min(axis=0)))
    return 0.05 * diag


def _draw_pair(rng, points, d_min, max_attempts=200):
    n = len(points)
    for _ in range(max_attempts):
        i, j = rng.integers(0, n, size=2)
        if i == j:
            continue
        if np.linalg.norm(points[j] - points[i]) >= d_min:
            return int(i), int(j)
    return None


def _ransac(source_points, source_vectors, kind, batch_for, target_points,
            params: RansacParams,
            target_normals=None) -> RegistrationResult:
    """Shared hypothesise-and-test loop.

    ``batch_for(descriptor, src_tuple)`` returns ``(R, t)`` arrays of all
    candidate poses for a drawn source pair. Single-threaded draw logic,
    fully determined by ``params.rng_seed``.
    """
    rng = np.random.default_rng(params.rng_seed)
    source_points = np.asarray(source_points, dtype=float)
    target_points = np.asarray(target_points, dtype=float)
    n = len(source_points)
    if n < 2:
        raise NoHypothesisFound("source has fewer than 2 points")
    d_min = _resolve_d_min(params, source_points)
    target_count = params.target_inlier_ratio * n

    score_tree = cKDTree(target_points)
    diag = float(np.linalg.norm(target_points.max(axis=0)
                                - target_points.min(axis=0)))
    grid = _DistanceGrid(target_points, cell=max(diag / 96.0, 1e-6))

    # evenly spread screening subsample (deterministic, order-preserving)
    if n > params.screen_points:
        screen_idx = np.linspace(0, n - 1, params.screen_points).round().astype(int)
        screen_pts = source_points[np.unique(screen_idx)]
    else:
        screen_pts = source_points

    best = None  # (count, R, t)
    hypotheses = 0
    draws = 0
    reason = None
    t0 = time.perf_counter()

    while reason is None:
        pair = _draw_pair(rng, source_points, d_min)
        if pair is None:
            reason = TerminationReason.EXHAUSTED
            break
        draws += 1
        i, j = pair
        src = PointVectorTuple(source_points[i], source_points[j],
                               source_vectors[i], source_vectors[j], kind)
        try:
            g = compute_descriptor(src, d_min=0.0,
                                   elevation_margin=params.elevation_margin)
        except (DegenerateBaseline, DegenerateElevation):
            g = None

        if g is not None:
            R, t = batch_for(g, src)
            hypotheses += len(R)
            if len(R):
                counts = _screen_counts(R, t, screen_pts, grid,
                                        params.inlier_threshold)
                order = np.argsort(-counts, kind="stable")[:params.refine_top]
                for k in order:
                    Rk, tk = R[k], t[k]
                    if params.icp_iters:
                        Rk, tk = _icp_polish(
                            Rk, tk, source_points, score_tree, target_points,
                            target_normals, 2.0 * params.inlier_threshold,
                            params.icp_iters)
                    cnt = _count_raw(Rk, tk, source_points, score_tree,
                                     params.inlier_threshold)
                    if best is None or cnt > best[0]:
                        best = (cnt, Rk, tk)
                    if best[0] >= target_count:
                        reason = TerminationReason.INLIER_TARGET
                        break
                    if time.perf_counter() - t0 >= params.max_time:
                        reason = TerminationReason.TIME_BUDGET
                        break

        if reason is None and time.perf_counter() - t0 >= params.max_time:
            reason = TerminationReason.TIME_BUDGET
        if reason is None and params.max_draws is not None and draws >= params.max_draws:
            reason = TerminationReason.EXHAUSTED

    if best is not None and params.icp_iters:
        # squeeze the winner with extra polish rounds; keep it only if the
        # exact count does not drop
        cnt0, R0, t0_ = best
        Rp, tp = R0, t0_
        for factor in (2.0, 1.5, 1.0):
            Rp, tp = _icp_polish(Rp, tp, source_points, score_tree,
                                 target_points, target_normals,
                                 factor * params.inlier_threshold,
                                 2 * params.icp_iters)
        cnt = _count_raw(Rp, tp, source_points, score_tree,
                         params.inlier_threshold)
        if cnt >= cnt0:
            best = (cnt, Rp, tp)

    elapsed = time.perf_counter() - t0
    if best is None:
        raise NoHypothesisFound(
            f"no valid pose hypothesis after {draws} pair draws "
            f"({elapsed:.2f}s, terminated by {reason.value})")
    count, R, t = best
    return RegistrationResult(
        transform=RigidTransform(R, t),
        inlier_count=count,
        inlier_ratio=count / n,
        hypotheses_tested=hypotheses,
        source_pairs_drawn=draws,
        elapsed=elapsed,
        terminated_by=reason,
    )


def register_curve_to_surface(curve: Curve, index: PairIndex,
                              params: RansacParams) -> RegistrationResult:
    """Register a tangent-annotated curve against an offline surface index."""
    if not curve.has_tangents:
        curve = curve.with_tangents()
    pts = curve.all_points()
    tans = curve.all_tangents()

    def batch_for(g, src):
        rec = query_pair_index_records(index, g, params.eps,
                                       params.angular_slack,
                                       params.tol_simultaneous)
        if params.max_candidates is not None and len(rec) > params.max_candidates:
            lam_diff = np.abs(index.gamma[rec, 0] - g.lambda_)
            keep = np.argsort(lam_diff, kind="stable")[:params.max_candidates]
            rec = rec[keep]
        if len(rec) == 0:
            return np.empty((0, 3, 3)), np.empty((0, 3))
        ij = index.pair_ij[rec]
        R, t, ok = _batch_pose_cs(
            src.P, src.d, src.p, src.q,
            index.points[ij[:, 0]], index.points[ij[:, 1]],
            index.normals[ij[:, 0]], index.normals[ij[:, 1]],
            params.consistency_tol)
        return R[ok], t[ok]

    return _ransac(pts, tans, TANGENTS, batch_for, index.points, params,
                   target_normals=index.normals)


def _register_same_kind(src_pts, src_vecs, tgt_pts, tgt_vecs, kind,
                        params: RansacParams,
                        target_normals=None) -> RegistrationResult:
    extractor = PairExtractor(tgt_pts, tgt_vecs, kind)

    def batch_for(g, src):
        a, b, _ = extractor.extract_arrays(g, params.tol_len, params.tol_ang)
        if len(a) == 0:
            return np.empty((0, 3, 3)), np.empty((0, 3))
        R, t, ok = _batch_pose_cc(
            src.P, src.d, src.p, src.q,
            extractor.points[a], extractor.points[b],
            extractor.vectors[a], extractor.vectors[b],
            params.second_vector_tol)
        return R[ok], t[ok]

    return _ransac(src_pts, src_vecs, kind, batch_for, tgt_pts, params,
                   target_normals=target_normals)


def register_curve_to_curve(source: Curve, target: Curve,
                            params: RansacParams) -> RegistrationResult:
    """Register one curve against another; no offline stage is involved."""
    if not source.has_tangents:
        source = source.with_tangents()
    if not target.has_tangents:
        target = target.with_tangents()
    return _register_same_kind(source.all_points(), source.all_tangents(),
                               target.all_points(), target.all_tangents(),
                               TANGENTS, params)


def register_surface_to_surface(source: SurfaceSamples, target: SurfaceSamples,
                                params: RansacParams) -> RegistrationResult:
    """Same pipeline as curve-vs-curve with normals in place of tangents."""
    if not source.has_normals:
        source = source.with_normals()
    if not target.has_normals:
        target = target.with_normals()

    def usable(s):
        if s.valid is None:
            return s.points, s.normals
        return s.points[s.valid], s.normals[s.valid]

    sp, sv = usable(source)
    tp, tv = usable(target)
    return _register_same_kind(sp, sv, tp, tv, NORMALS, params,
                               target_normals=tv)
