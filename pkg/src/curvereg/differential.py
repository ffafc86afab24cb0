"""Normal and tangent estimation on point-sampled surfaces and polylines.

Normals come from the classic plane-PCA recipe: the eigenvector of the
k-nearest-neighbour covariance with the smallest eigenvalue. Tangents are
first-order estimates along ordered polylines (central differences inside,
one-sided at the ends). Signs are unconstrained; the registration machinery
is orientation-free throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .exceptions import DegenerateNeighborhood, SegmentTooShort, TooFewPoints

__all__ = [
    "SurfaceSamples",
    "Curve",
    "estimate_normals",
    "estimate_tangents",
    "smooth_polyline",
]

# a neighbourhood is considered rank-1 (normal undefined) when the middle
# eigenvalue is this far below the largest
_DEGENERATE_RATIO = 1e-8


def estimate_normals(points, k: int = 30):
    """Per-point unit normals from k-nearest-neighbour covariance PCA.

    Returns ``(normals, valid)`` where ``normals`` is (N, 3) and ``valid``
    flags points whose neighbourhood had a well-defined smallest eigenvector
    (invalid rows contain NaN). Raises :class:`TooFewPoints` if there are not
    more than ``k`` points and :class:`DegenerateNeighborhood` if no point has
    a usable normal (e.g. collinear input).
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError("points must have shape (N, 3)")
    n = len(pts)
    if n <= k:
        raise TooFewPoints(f"need more than k={k} points, got {n}")

    tree = cKDTree(pts)
    _, idx = tree.query(pts, k=k)
    nbrs = pts[idx]                      # (N, k, 3)
    centered = nbrs - nbrs.mean(axis=1, keepdims=True)
    cov = np.einsum("nki,nkj->nij", centered, centered) / k
    w, v = np.linalg.eigh(cov)           # ascending eigenvalues

    valid = w[:, 1] > _DEGENERATE_RATIO * np.maximum(w[:, 2], 1e-300)
    if not valid.any():
        raise DegenerateNeighborhood("no point has a well-defined normal")

    normals = v[:, :, 0].copy()
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    normals[~valid] = np.nan
    return normals, valid


def estimate_tangents(segment) -> np.ndarray:
    """Unit tangents along one ordered polyline.

    Interior tangents are central differences; the endpoints use one-sided
    differences. Requires at least 3 points.
    """
    pts = np.asarray(segment, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError("segment must have shape (N, 3)")
    if len(pts) < 3:
        raise SegmentTooShort(f"segment has {len(pts)} points, need >= 3")

    diffs = np.empty_like(pts)
    diffs[1:-1] = pts[2:] - pts[:-2]
    diffs[0] = pts[1] - pts[0]
    diffs[-1] = pts[-1] - pts[-2]
    norms = np.linalg.norm(diffs, axis=1, keepdims=True)
    if np.any(norms < 1e-15):
        raise ValueError("consecutive polyline points coincide")
    return diffs / norms


def smooth_polyline(segment, window: int) -> np.ndarray:
    """Moving-average smoothing of polyline points (odd window, >= 3).

    Shrinks noise before tangent estimation; endpoints use the partial
    window. ``window <= 1`` returns the input unchanged.
    """
    pts = np.asarray(segment, dtype=float)
    if window <= 1:
        return pts.copy()
    if window % 2 == 0:
        raise ValueError("window must be odd")
    half = window // 2
    n = len(pts)
    out = np.empty_like(pts)
    csum = np.concatenate([np.zeros((1, 3)), np.cumsum(pts, axis=0)])
    for i in range(n):
        a, b = max(0, i - half), min(n, i + half + 1)
        out[i] = (csum[b] - csum[a]) / (b - a)
    return out


@dataclass
class SurfaceSamples:
    """Point-sampled surface, optionally with per-point unit normals."""

    points: np.ndarray
    normals: np.ndarray | None = None
    valid: np.ndarray | None = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 3)
        if self.normals is not None:
            self.normals = np.asarray(self.normals, dtype=float).reshape(-1, 3)
            if len(self.normals) != len(self.points):
                raise ValueError("points and normals must have equal length")
        if self.valid is None and self.normals is not None:
            self.valid = np.all(np.isfinite(self.normals), axis=1)

    def __len__(self):
        return len(self.points)

    @property
    def has_normals(self) -> bool:
        return self.normals is not None

    def with_normals(self, k: int = 30) -> "SurfaceSamples":
        """Copy of self with normals estimated (no-op if already present)."""
        if self.has_normals:
            return self
        normals, valid = estimate_normals(self.points, k=k)
        return SurfaceSamples(self.points, normals, valid)

    def transformed(self, transform) -> "SurfaceSamples":
        pts = transform.apply(self.points)
        nrm = None if self.normals is None else self.normals @ transform.R.T
        return SurfaceSamples(pts, nrm, None if self.valid is None else self.valid.copy())


@dataclass
class Curve:
    """Polyline curve: ordered point segments with optional per-point tangents."""

    segments: list = field(default_factory=list)
    tangents: list | None = None

    def __post_init__(self):
        self.segments = [np.asarray(s, dtype=float).reshape(-1, 3) for s in self.segments]
        for s in self.segments:
            if len(s) < 3:
                raise SegmentTooShort("each curve segment needs >= 3 points")

    def __len__(self):
        return sum(len(s) for s in self.segments)

    @property
    def n_segments(self) -> int:
        return len(self.segments)

    @property
    def has_tangents(self) -> bool:
        return self.tangents is not None

    def all_points(self) -> np.ndarray:
        return np.concatenate(self.segments, axis=0)

    def all_tangents(self) -> np.ndarray:
        if not self.has_tangents:
            raise ValueError("tangents not estimated; call with_tangents() first")
        return np.concatenate(self.tangents, axis=0)

    def with_tangents(self, smooth_window: int = 0) -> "Curve":
        """Copy of self with tangents estimated per segment.

        ``smooth_window`` > 1 applies moving-average smoothing to the points
        used for differencing (the stored points are unchanged).
        """
        tangents = []
        for seg in self.segments:
            base = smooth_polyline(seg, smooth_window) if smooth_window > 1 else seg
            tangents.append(estimate_tangents(base))
        out = Curve(self.segments)
        out.tangents = tangents
        return out

    def transformed(self, transform) -> "Curve":
        out = Curve([transform.apply(s) for s in self.segments])
        if self.has_tangents:
            out.tangents = [t @ transform.R.T for t in self.tangents]
        return out
