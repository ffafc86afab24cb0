"""Match conditions and the offline pair index with its online query.

Curve-vs-surface matching uses *inequality* conditions between descriptors
(the cone swept by rotating a tangent must intersect the plane of the normal)
followed by a simultaneity test that both tangent constraints admit a common
rotation angle. Curve-vs-curve matching uses *equality* conditions up to
vector-orientation sign flips.

The offline product is a table of descriptors for all admissible surface
point pairs plus a 3-D R-tree over ``(lambda, phi_first, phi_second)`` with
one extra entry per pair for the switched point-wise correspondence.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .differential import SurfaceSamples
from .exceptions import EmptySurface, NoValidPairs, ParseError
from .geometry import (
    NORMALS,
    Descriptor,
    PointVectorTuple,
    pair_descriptors,
    wrap_angle,
)
from .spatial import RTree3, farthest_point_sampling

__all__ = [
    "IndexConfig",
    "PairIndex",
    "MatchCandidate",
    "check_necessary_cs",
    "check_simultaneous_cs",
    "check_conditions_cc",
    "build_pair_index",
    "query_pair_index",
    "PairExtractor",
    "extract_pairs_cc",
    "save_pair_index",
    "load_pair_index",
]

DIRECT = "direct"
SWITCHED = "switched"

_HALF_PI = np.pi / 2


# ---------------------------------------------------------------------------
# Necessary conditions, curve vs surface (inequalities)
# ---------------------------------------------------------------------------

def necessary_cs_mask(g: Descriptor, gamma_hat: np.ndarray, eps: float,
                      angular_slack: float = 0.0) -> np.ndarray:
    """Vectorized inequality conditions of a curve descriptor against rows of
    surface descriptors ``(lambda, phi_p, phi_q, theta_q)``.

    ``angular_slack`` widens the elevation bounds to tolerate noisy tangent
    estimates (the plain conditions are only necessary for noise-free data).
    """
    gh = np.atleast_2d(np.asarray(gamma_hat, dtype=float))
    lo_p = abs(g.phi_p) - _HALF_PI - angular_slack
    hi_p = _HALF_PI - abs(g.phi_p) + angular_slack
    lo_q = abs(g.phi_q) - _HALF_PI - angular_slack
    hi_q = _HALF_PI - abs(g.phi_q) + angular_slack
    return (
        (np.abs(gh[:, 0] - g.lambda_) <= eps)
        & (gh[:, 1] >= lo_p) & (gh[:, 1] <= hi_p)
        & (gh[:, 2] >= lo_q) & (gh[:, 2] <= hi_q)
    )


def check_necessary_cs(g: Descriptor, gh: Descriptor, eps: float,
                       angular_slack: float = 0.0) -> bool:
    """Scalar form of :func:`necessary_cs_mask`."""
    return bool(necessary_cs_mask(g, gh.as_array()[None, :], eps, angular_slack)[0])


# ---------------------------------------------------------------------------
# Simultaneity test, curve vs surface
# ---------------------------------------------------------------------------

def _cos_arcs(c: np.ndarray, tol: float):
    """Angle arcs (in [0, pi]) where |cos(x) - c| <= tol.

    Returns ``(a, b, feasible)`` with the positive arc [a, b]; the mirrored
    arc [-b, -a] completes the solution set on the circle.
    """
    lo = np.clip(c - tol, -1.0, 1.0)
    hi = np.clip(c + tol, -1.0, 1.0)
    feasible = (c - tol <= 1.0) & (c + tol >= -1.0)
    a = np.arccos(hi)
    b = np.arccos(lo)
    return a, b, feasible


def _arcs_overlap(s1, e1, s2, e2):
    """Whether circular arcs [s1, e1] and [s2, e2] (e >= s) intersect."""
    two_pi = 2.0 * np.pi
    return (np.mod(s2 - s1, two_pi) <= (e1 - s1)) | (np.mod(s1 - s2, two_pi) <= (e2 - s2))


def simultaneous_cs_mask(g: Descriptor, gamma_hat: np.ndarray,
                         tol: float) -> np.ndarray:
    """Whether a common rotation angle satisfies both tangent-in-plane
    constraints, within a tolerance ``tol`` on the cosine equations.

    The first constraint pins ``cos(beta)``, the second pins
    ``cos(beta + theta_hat - theta)``; feasibility is an exact intersection
    test of the corresponding angle arcs on the circle, so it agrees with a
    brute-force sweep of the angle up to grid resolution.
    """
    gh = np.atleast_2d(np.asarray(gamma_hat, dtype=float))
    tp = np.tan(g.phi_p)
    tq = np.tan(g.phi_q)
    c1 = -tp * np.tan(gh[:, 1])
    c2 = -tq * np.tan(gh[:, 2])
    dtheta = gh[:, 3] - g.theta_q

    a1, b1, f1 = _cos_arcs(c1, tol)
    a2, b2, f2 = _cos_arcs(c2, tol)

    # solution sets: {[a1,b1], [-b1,-a1]} vs {[a2,b2], [-b2,-a2]} - dtheta
    s2a, e2a = a2 - dtheta, b2 - dtheta
    s2b, e2b = -b2 - dtheta, -a2 - dtheta
    hit = (
        _arcs_overlap(a1, b1, s2a, e2a)
        | _arcs_overlap(a1, b1, s2b, e2b)
        | _arcs_overlap(-b1, -a1, s2a, e2a)
        | _arcs_overlap(-b1, -a1, s2b, e2b)
    )
    return f1 & f2 & hit


def check_simultaneous_cs(g: Descriptor, gh: Descriptor, tol: float) -> bool:
    """Scalar form of :func:`simultaneous_cs_mask`."""
    return bool(simultaneous_cs_mask(g, gh.as_array()[None, :], tol)[0])


# ---------------------------------------------------------------------------
# Equality conditions, curve vs curve / surface vs surface
# ---------------------------------------------------------------------------

def conditions_cc_mask(g: Descriptor, gamma_hat: np.ndarray, tol_len: float,
                       tol_ang: float) -> np.ndarray:
    """Equality match conditions between same-kind descriptors.

    Vectors are non-oriented, so all four sign assignments of the two target
    vectors are admitted; flipping either vector also shifts the azimuth by
    pi, which is what makes the sign choices jointly consistent with a single
    rigid motion.
    """
    gh = np.atleast_2d(np.asarray(gamma_hat, dtype=float))
    ok_len = np.abs(gh[:, 0] - g.lambda_) <= tol_len

    ok_any = np.zeros(len(gh), dtype=bool)
    for sp in (1.0, -1.0):
        for sq in (1.0, -1.0):
            shift = 0.0 if sp == sq else np.pi
            ok = (
                (np.abs(g.phi_p - sp * gh[:, 1]) <= tol_ang)
                & (np.abs(g.phi_q - sq * gh[:, 2]) <= tol_ang)
                & (np.abs(wrap_angle(g.theta_q - (gh[:, 3] + shift))) <= tol_ang)
            )
            ok_any |= ok
    return ok_len & ok_any


def check_conditions_cc(g: Descriptor, gh: Descriptor, tol_len: float,
                        tol_ang: float) -> bool:
    """Scalar form of :func:`conditions_cc_mask`."""
    return bool(conditions_cc_mask(g, gh.as_array()[None, :], tol_len, tol_ang)[0])


# ---------------------------------------------------------------------------
# Offline pair index
# ---------------------------------------------------------------------------

@dataclass
class IndexConfig:
    """Build parameters of the offline pair index.

    ``d_min``/``d_max`` bound admissible baselines (defaults: 5% and 100% of
    the bounding-box diagonal). ``subsample_size`` caps the number of indexed
    surface points via farthest-point sampling.
    """

    d_min: float | None = None
    d_max: float | None = None
    subsample_size: int = 1500
    elevation_margin: float = 1e-3
    normals_k: int = 30

    def to_dict(self):
        return {
            "d_min": self.d_min, "d_max": self.d_max,
            "subsample_size": self.subsample_size,
            "elevation_margin": self.elevation_margin,
            "normals_k": self.normals_k,
        }


@dataclass(frozen=True)
class MatchCandidate:
    """A surface (or target) pair matching a queried descriptor.

    ``i``/``j`` are target point indices in correspondence order: the first
    query point corresponds to ``i``, the second to ``j``. ``order`` records
    whether this is the direct or the switched entry of the unordered pair.
    """

    i: int
    j: int
    order: str
    gamma: np.ndarray
    record: int = -1


class PairIndex:
    """Offline pair table plus a 3-D R-tree over descriptor prefixes.

    Built by :func:`build_pair_index`; immutable afterwards and safe for
    concurrent queries.
    """

    def __init__(self, points, normals, pair_ij, gamma, mirrored, config: IndexConfig):
        self.points = np.asarray(points, dtype=float)
        self.normals = np.asarray(normals, dtype=float)
        self.pair_ij = np.asarray(pair_ij, dtype=np.int32)
        self.gamma = np.asarray(gamma, dtype=float)
        self.mirrored = np.asarray(mirrored, dtype=bool)
        self.config = config
        self.tree = RTree3(self.gamma[:, :3])

    def __len__(self):
        return len(self.gamma)

    def candidate(self, record: int) -> MatchCandidate:
        i, j = self.pair_ij[record]
        order = SWITCHED if self.mirrored[record] else DIRECT
        return MatchCandidate(int(i), int(j), order, self.gamma[record], record)

    def surface_tuple(self, cand: MatchCandidate) -> PointVectorTuple:
        return PointVectorTuple(
            self.points[cand.i], self.points[cand.j],
            self.normals[cand.i], self.normals[cand.j], NORMALS)


def build_pair_index(surface: SurfaceSamples, config: IndexConfig | None = None,
                     seed: int = 0) -> PairIndex:
    """Build the offline index from a surface with estimated normals.

    The surface is subsampled with farthest-point sampling when larger than
    ``config.subsample_size``. Every unordered pair with an admissible
    baseline and non-degenerate elevations contributes two records: the
    direct descriptor and the descriptor of the switched correspondence
    (computed by actually swapping the tuple, which negates *both* elevations
    and exchanges their slots relative to the direct entry).
    """
    config = config or IndexConfig()
    if len(surface) == 0:
        raise EmptySurface("cannot index an empty surface")
    if not surface.has_normals:
        surface = surface.with_normals(k=config.normals_k)

    pts = surface.points
    nrm = surface.normals
    if surface.valid is not None:
        pts = pts[surface.valid]
        nrm = nrm[surface.valid]
    if len(pts) < 2:
        raise EmptySurface("fewer than 2 usable surface samples")

    if config.subsample_size and len(pts) > config.subsample_size:
        sel = farthest_point_sampling(pts, config.subsample_size, seed=seed)
        pts, nrm = pts[sel], nrm[sel]

    diag = float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))
    d_min = config.d_min if config.d_min is not None else 0.05 * diag
    d_max = config.d_max if config.d_max is not None else diag

    iu, ju = np.triu_indices(len(pts), k=1)
    g_dir, ok_dir = pair_descriptors(pts[iu], pts[ju], nrm[iu], nrm[ju])
    g_sw, ok_sw = pair_descriptors(pts[ju], pts[iu], nrm[ju], nrm[iu])

    lam = g_dir[:, 0]
    elev_cap = _HALF_PI - config.elevation_margin
    keep = (
        ok_dir & ok_sw
        & (lam >= d_min) & (lam <= d_max)
        & (np.abs(g_dir[:, 1]) <= elev_cap)
        & (np.abs(g_dir[:, 2]) <= elev_cap)
    )
    if not keep.any():
        raise NoValidPairs("no point pair passed the baseline/elevation gates")

    iu, ju = iu[keep], ju[keep]
    gamma = np.concatenate([g_dir[keep], g_sw[keep]])
    pair_ij = np.concatenate([
        np.stack([iu, ju], axis=1),
        np.stack([ju, iu], axis=1),
    ]).astype(np.int32)
    mirrored = np.concatenate([
        np.zeros(len(iu), dtype=bool), np.ones(len(iu), dtype=bool)])

    resolved = IndexConfig(d_min, d_max, config.subsample_size,
                           config.elevation_margin, config.normals_k)
    return PairIndex(pts, nrm, pair_ij, gamma, mirrored, resolved)


def query_pair_index_records(index: PairIndex, g: Descriptor, eps: float,
                             angular_slack: float = 0.0,
                             tol_simultaneous: float = 1e-6) -> np.ndarray:
    """Record indices of all indexed pairs matching a curve descriptor.

    An R-tree box query over ``(lambda, phi_first, phi_second)`` shortlists
    records; the exact inequality and simultaneity predicates are then
    re-applied, so the result equals a linear scan with the same predicates.
    """
    lo = np.array([g.lambda_ - eps,
                   abs(g.phi_p) - _HALF_PI - angular_slack,
                   abs(g.phi_q) - _HALF_PI - angular_slack])
    hi = np.array([g.lambda_ + eps,
                   _HALF_PI - abs(g.phi_p) + angular_slack,
                   _HALF_PI - abs(g.phi_q) + angular_slack])
    rec = index.tree.query_box(lo, hi)
    if len(rec) == 0:
        return rec
    gh = index.gamma[rec]
    mask = necessary_cs_mask(g, gh, eps, angular_slack)
    mask &= simultaneous_cs_mask(g, gh, tol_simultaneous)
    return rec[mask]


def query_pair_index(index: PairIndex, g: Descriptor, eps: float,
                     angular_slack: float = 0.0,
                     tol_simultaneous: float = 1e-6) -> list[MatchCandidate]:
    """Candidate objects for all indexed pairs matching a curve descriptor.

    Convenience wrapper over :func:`query_pair_index_records`.
    """
    rec = query_pair_index_records(index, g, eps, angular_slack, tol_simultaneous)
    return [index.candidate(int(r)) for r in rec]


# ---------------------------------------------------------------------------
# Linear-time pair extraction for same-kind targets
# ---------------------------------------------------------------------------

class PairExtractor:
    """Distance-gated pair extraction over a fixed target point set.

    Pairs at baseline ``lambda +- tol_len`` are found with a spatial search
    over the target points; both correspondence orders are screened with the
    equality conditions. Reused across RANSAC draws, so the k-d structure is
    built once.
    """

    def __init__(self, points, vectors, kind: str):
        self.points = np.asarray(points, dtype=float)
        self.vectors = np.asarray(vectors, dtype=float)
        self.kind = kind
        self.tree = cKDTree(self.points) if len(self.points) else None

    def extract_arrays(self, g: Descriptor, tol_len: float, tol_ang: float):
        """Matching target pairs as index arrays ``(i, j, switched)``.

        ``i``/``j`` are in correspondence order (first/second query point);
        both orders of each unordered pair are screened independently.
        """
        empty = np.empty(0, dtype=np.int64)
        if self.tree is None or len(self.points) < 2:
            return empty, empty, np.empty(0, dtype=bool)
        r_hi = (g.lambda_ + tol_len) * (1.0 + 1e-9)
        pairs = self.tree.query_pairs(r_hi, output_type="ndarray")
        if len(pairs) == 0:
            return empty, empty, np.empty(0, dtype=bool)
        i, j = pairs[:, 0], pairs[:, 1]
        lam = np.linalg.norm(self.points[i] - self.points[j], axis=1)
        near = np.abs(lam - g.lambda_) <= tol_len
        i, j = i[near], j[near]
        if len(i) == 0:
            return empty, empty, np.empty(0, dtype=bool)

        keep_a, keep_b, keep_sw = [], [], []
        for a, b, switched in ((i, j, False), (j, i, True)):
            gamma, ok = pair_descriptors(self.points[a], self.points[b],
                                         self.vectors[a], self.vectors[b])
            ok &= conditions_cc_mask(g, gamma, tol_len, tol_ang)
            keep_a.append(a[ok])
            keep_b.append(b[ok])
            keep_sw.append(np.full(int(ok.sum()), switched))
        return (np.concatenate(keep_a), np.concatenate(keep_b),
                np.concatenate(keep_sw))

    def extract(self, g: Descriptor, tol_len: float, tol_ang: float) -> list[MatchCandidate]:
        a, b, switched = self.extract_arrays(g, tol_len, tol_ang)
        if len(a) == 0:
            return []
        gamma, _ = pair_descriptors(self.points[a], self.points[b],
                                    self.vectors[a], self.vectors[b])
        return [MatchCandidate(int(a[k]), int(b[k]),
                               SWITCHED if switched[k] else DIRECT, gamma[k])
                for k in range(len(a))]

    def tuple_for(self, cand: MatchCandidate) -> PointVectorTuple:
        return PointVectorTuple(
            self.points[cand.i], self.points[cand.j],
            self.vectors[cand.i], self.vectors[cand.j], self.kind)


def extract_pairs_cc(target, g: Descriptor, tol_len: float,
                     tol_ang: float) -> list[MatchCandidate]:
    """One-shot pair extraction from a curve with estimated tangents."""
    if len(target.segments) == 0:
        return []
    extractor = PairExtractor(target.all_points(), target.all_tangents(), "tangents")
    return extractor.extract(g, tol_len, tol_ang)


# ---------------------------------------------------------------------------
# Serialization (magic "CRPI"; the R-tree is rebuilt on load)
# ---------------------------------------------------------------------------

_MAGIC = b"CRPI"
_VERSION = 1


def save_pair_index(index: PairIndex, path) -> None:
    """Write the index to a binary file; see :func:`load_pair_index`."""
    cfg = json.dumps(index.config.to_dict()).encode()
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<II", _VERSION, len(cfg)))
        f.write(cfg)
        for arr in (index.points, index.normals, index.pair_ij,
                    index.gamma, index.mirrored):
            np.lib.format.write_array(f, np.ascontiguousarray(arr))


def load_pair_index(path) -> PairIndex:
    """Load an index written by :func:`save_pair_index` and rebuild its R-tree."""
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != _MAGIC:
            raise ParseError("not a CRPI pair-index file", path=str(path))
        version, cfg_len = struct.unpack("<II", f.read(8))
        if version != _VERSION:
            raise ParseError(f"unsupported CRPI version {version}", path=str(path))
        try:
            cfg = IndexConfig(**json.loads(f.read(cfg_len).decode()))
            arrays = [np.lib.format.read_array(f) for _ in range(5)]
        except (ValueError, KeyError, TypeError, json.JSONDecodeError) as e:
            raise ParseError(f"corrupt CRPI payload: {e}", path=str(path)) from e
    points, normals, pair_ij, gamma, mirrored = arrays
    return PairIndex(points, normals, pair_ij, gamma, mirrored, cfg)
