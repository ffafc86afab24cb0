"""Closed-form pose estimation from pairs of points with tangents/normals.

A *2-tuple point+vector* is a pair of 3D points, each augmented with a unit
vector: the curve tangent at the point, or the surface normal at the point.
This module provides

* an invariant 4-parameter descriptor ``(lambda, phi_p, phi_q, theta_q)`` of a
  2-tuple (baseline length plus the spherical angles of the two vectors in a
  canonical local frame),
* the closed-form rigid transform that aligns a curve 2-tuple with a matching
  surface 2-tuple (tangents constrained to lie in the normal planes), and the
  analogous solver for same-kind tuples (tangent-to-tangent alignment),
* rotation/translation error metrics used throughout the benchmarks.

All functions are pure; the small value types are frozen dataclasses wrapping
read-only numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    DegenerateBaseline,
    DegenerateElevation,
    InconsistentSecondVector,
    NoConsistentSolution,
    RankDeficientM,
    ZeroVector,
)

__all__ = [
    "PointVectorTuple",
    "Descriptor",
    "RigidTransform",
    "compute_descriptor",
    "pair_descriptors",
    "rotation_aligning",
    "rotation_about_axis",
    "solve_beta_cs",
    "pose_from_match_cs",
    "pose_from_match_cc",
    "rotation_error_deg",
    "translation_error",
    "wrap_angle",
    "canonical_tuple",
]

_UNIT_TOL = 1e-9

TANGENTS = "tangents"
NORMALS = "normals"


def _as_vec3(v) -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(3)
    if not np.all(np.isfinite(a)):
        raise ValueError("vector has non-finite components")
    return a


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


def unit(v) -> np.ndarray:
    """Normalize ``v`` to unit length, raising :class:`ZeroVector` if ~0."""
    v = _as_vec3(v)
    n = np.linalg.norm(v)
    if n < 1e-15:
        raise ZeroVector("cannot normalize a zero vector")
    return v / n


def wrap_angle(a):
    """Wrap angle(s) to the interval (-pi, pi]."""
    a = np.asarray(a, dtype=float)
    w = np.mod(-a + np.pi, 2.0 * np.pi)
    out = np.pi - w
    return float(out) if out.ndim == 0 else out


def circular_diff(a, b):
    """Absolute angular difference on the circle, in [0, pi]."""
    return np.abs(wrap_angle(np.asarray(a, dtype=float) - b))


@dataclass(frozen=True)
class PointVectorTuple:
    """Two 3D points with their unit tangents (curve) or normals (surface)."""

    P: np.ndarray
    Q: np.ndarray
    p: np.ndarray
    q: np.ndarray
    kind: str = TANGENTS

    def __post_init__(self):
        for name in ("P", "Q", "p", "q"):
            object.__setattr__(self, name, _readonly(_as_vec3(getattr(self, name))))
        if self.kind not in (TANGENTS, NORMALS):
            raise ValueError(f"kind must be '{TANGENTS}' or '{NORMALS}'")
        for name in ("p", "q"):
            n = np.linalg.norm(getattr(self, name))
            if abs(n - 1.0) > 1e-6:
                raise ValueError(f"{name} is not unit-norm (|v| = {n:.3g})")

    @property
    def d(self) -> np.ndarray:
        """Baseline vector Q - P."""
        return self.Q - self.P

    @property
    def baseline(self) -> float:
        return float(np.linalg.norm(self.d))

    def swapped(self) -> "PointVectorTuple":
        """The same tuple with the roles of the two points exchanged."""
        return PointVectorTuple(self.Q, self.P, self.q, self.p, self.kind)

    def transformed(self, transform: "RigidTransform") -> "PointVectorTuple":
        R, t = transform.R, transform.t
        return PointVectorTuple(R @ self.P + t, R @ self.Q + t,
                                R @ self.p, R @ self.q, self.kind)


@dataclass(frozen=True)
class Descriptor:
    """Translation/rotation-invariant description of a 2-tuple.

    ``lambda_`` is the baseline length; ``phi_p``/``phi_q`` the elevations of
    the two vectors above the plane orthogonal to the baseline, in
    (-pi/2, pi/2); ``theta_q`` the azimuth of the second vector in the local
    frame whose first-vector azimuth is zero, in (-pi, pi].
    """

    lambda_: float
    phi_p: float
    phi_q: float
    theta_q: float

    def __post_init__(self):
        if not (self.lambda_ > 0 and math.isfinite(self.lambda_)):
            raise ValueError("lambda must be positive and finite")
        half = math.pi / 2
        if not (-half < self.phi_p < half and -half < self.phi_q < half):
            raise ValueError("elevations must lie in (-pi/2, pi/2)")

    def as_array(self) -> np.ndarray:
        return np.array([self.lambda_, self.phi_p, self.phi_q, self.theta_q])


@dataclass(frozen=True)
class RigidTransform:
    """Proper rigid motion: x -> R @ x + t."""

    R: np.ndarray
    t: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        R = np.array(self.R, dtype=float).reshape(3, 3)
        err = np.abs(R.T @ R - np.eye(3)).max()
        if err > 1e-6:
            raise ValueError(f"R is not orthonormal (max |R'R - I| = {err:.3g})")
        if np.linalg.det(R) < 0:
            raise ValueError("R must be a proper rotation (det +1)")
        object.__setattr__(self, "R", _readonly(R))
        object.__setattr__(self, "t", _readonly(_as_vec3(self.t)))

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls(np.eye(3), np.zeros(3))

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Apply to a single point (3,) or an array of points (N, 3)."""
        pts = np.asarray(points, dtype=float)
        return pts @ self.R.T + self.t

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """Return the transform equivalent to applying ``other`` then self."""
        return RigidTransform(self.R @ other.R, self.R @ other.t + self.t)

    def inverse(self) -> "RigidTransform":
        return RigidTransform(self.R.T, -self.R.T @ self.t)

    def matrix(self) -> np.ndarray:
        """4x4 homogeneous matrix."""
        M = np.eye(4)
        M[:3, :3] = self.R
        M[:3, 3] = self.t
        return M


# ---------------------------------------------------------------------------
# Invariant descriptor
# ---------------------------------------------------------------------------

def compute_descriptor(tup: PointVectorTuple, d_min: float = 0.0,
                       elevation_margin: float = 1e-3) -> Descriptor:
    """Invariant descriptor of a 2-tuple.

    Parameters
    ----------
    tup : PointVectorTuple
    d_min : minimum admissible baseline length.
    elevation_margin : minimum angle (rad) each vector must keep from the
        baseline direction; closer-to-parallel configurations leave the
        azimuth undefined and raise :class:`DegenerateElevation`.
    """
    d = tup.d
    lam = float(np.linalg.norm(d))
    if lam <= max(d_min, 1e-12):
        raise DegenerateBaseline(f"baseline {lam:.3g} below minimum {d_min:.3g}")

    cos_margin = math.cos(elevation_margin)
    cp = float(tup.p @ d) / lam
    cq = float(tup.q @ d) / lam
    if abs(cp) > cos_margin or abs(cq) > cos_margin:
        raise DegenerateElevation("tuple vector (nearly) parallel to baseline")

    phi_p = math.pi / 2 - math.acos(max(-1.0, min(1.0, cp)))
    phi_q = math.pi / 2 - math.acos(max(-1.0, min(1.0, cq)))

    qxd = np.cross(tup.q, d)
    pxd = np.cross(tup.p, d)
    c = float(qxd @ pxd) / (np.linalg.norm(qxd) * np.linalg.norm(pxd))
    s = float(tup.p @ np.cross(d, tup.q))
    sign = -1.0 if s < 0 else 1.0
    theta_q = sign * math.acos(max(-1.0, min(1.0, c)))
    return Descriptor(lam, phi_p, phi_q, theta_q)


def pair_descriptors(P, Q, p, q):
    """Vectorized descriptor computation for M pairs.

    Parameters are (M, 3) arrays: first/second points and first/second unit
    vectors. Returns ``(gamma, valid)`` where ``gamma`` is (M, 4) holding
    ``(lambda, phi_p, phi_q, theta_q)`` and ``valid`` flags rows with a
    nonzero baseline and both azimuth cross products well defined. Degeneracy
    thresholds are not applied here; callers gate on baseline/elevation
    explicitly.
    """
    P = np.asarray(P, float)
    Q = np.asarray(Q, float)
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    d = Q - P
    lam = np.linalg.norm(d, axis=1)
    safe = lam > 1e-12
    lam_s = np.where(safe, lam, 1.0)

    cp = np.clip(np.einsum("ij,ij->i", p, d) / lam_s, -1.0, 1.0)
    cq = np.clip(np.einsum("ij,ij->i", q, d) / lam_s, -1.0, 1.0)
    phi_p = np.pi / 2 - np.arccos(cp)
    phi_q = np.pi / 2 - np.arccos(cq)

    qxd = np.cross(q, d)
    pxd = np.cross(p, d)
    nq = np.linalg.norm(qxd, axis=1)
    np_ = np.linalg.norm(pxd, axis=1)
    ok = safe & (nq > 1e-12 * lam_s) & (np_ > 1e-12 * lam_s)
    denom = np.where(ok, nq * np_, 1.0)
    c = np.clip(np.einsum("ij,ij->i", qxd, pxd) / denom, -1.0, 1.0)
    s = np.einsum("ij,ij->i", p, np.cross(d, q))
    theta = np.where(s < 0, -1.0, 1.0) * np.arccos(c)

    gamma = np.stack([lam, phi_p, phi_q, theta], axis=1)
    return gamma, ok


def canonical_tuple(desc: Descriptor, kind: str = TANGENTS) -> PointVectorTuple:
    """Reconstruct the canonical representative of a descriptor.

    Places P at the origin with the baseline along +z and the first vector at
    zero azimuth; any tuple with this descriptor is a rigid motion of the
    result.
    """
    P = np.zeros(3)
    Q = np.array([0.0, 0.0, desc.lambda_])
    p = np.array([0.0, math.cos(desc.phi_p), math.sin(desc.phi_p)])
    q = np.array([
        math.sin(desc.theta_q) * math.cos(desc.phi_q),
        math.cos(desc.theta_q) * math.cos(desc.phi_q),
        math.sin(desc.phi_q),
    ])
    return PointVectorTuple(P, Q, p, q, kind)


# ---------------------------------------------------------------------------
# Rotations
# ---------------------------------------------------------------------------

def _skew(v: np.ndarray) -> np.ndarray:
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def rotation_about_axis(axis, angle: float) -> np.ndarray:
    """Rodrigues rotation matrix about a unit axis."""
    a = unit(axis)
    K = _skew(a)
    return np.eye(3) + math.sin(angle) * K + (1.0 - math.cos(angle)) * (K @ K)


def _least_aligned_axis(v: np.ndarray) -> np.ndarray:
    e = np.zeros(3)
    e[int(np.argmin(np.abs(v)))] = 1.0
    return e


def rotation_aligning(d, d_hat) -> np.ndarray:
    """Rotation taking vector ``d`` onto ``d_hat`` (equal norms assumed).

    The axis is the normal of the plane spanned by the two vectors. For
    antiparallel inputs the axis is undefined; a deterministic unit vector
    orthogonal to ``d`` is used (half-turn about it maps d to -d).
    """
    d = _as_vec3(d)
    d_hat = _as_vec3(d_hat)
    lam = np.linalg.norm(d)
    lam_hat = np.linalg.norm(d_hat)
    if lam < 1e-15 or lam_hat < 1e-15:
        raise ZeroVector("cannot align zero-length vectors")

    cosa = float(d @ d_hat) / (lam * lam_hat)
    cosa = max(-1.0, min(1.0, cosa))
    axis = np.cross(d, d_hat)
    n = np.linalg.norm(axis)
    if n < 1e-12 * lam * lam_hat:
        if cosa > 0:  # already aligned
            return np.eye(3)
        # antiparallel: any axis orthogonal to d works
        axis = np.cross(d, _least_aligned_axis(d))
        return rotation_about_axis(axis, math.pi)
    return rotation_about_axis(axis / n, math.acos(cosa))


# ---------------------------------------------------------------------------
# Curve-vs-surface pose: two rotations + translation
# ---------------------------------------------------------------------------

def solve_beta_cs(tuple_c: PointVectorTuple, tuple_s: PointVectorTuple,
                  R1: np.ndarray, consistency_tol: float | None = None):
    """Angle of the second rotation (about the aligned baseline).

    Builds the 2x3 matrix whose right null space is ``(cos b, sin b, 1)`` up
    to scale, from the constraints that the rotated curve tangents lie in the
    surface normal planes. Returns ``(beta, consistency)`` where
    ``consistency = |cos^2 b + sin^2 b - 1|`` of the null vector scaled to a
    unit third entry. If ``consistency_tol`` is given and exceeded,
    :class:`NoConsistentSolution` is raised.
    """
    d_hat = tuple_s.d
    lam = float(np.linalg.norm(d_hat))
    if lam < 1e-15:
        raise ZeroVector("surface tuple has zero baseline")

    D = np.outer(d_hat, d_hat) / lam**2
    K = _skew(d_hat) / lam
    I = np.eye(3)

    p1 = R1 @ tuple_c.p
    q1 = R1 @ tuple_c.q
    ph, qh = tuple_s.p, tuple_s.q

    M = np.array([
        [p1 @ (I - D) @ ph, -p1 @ K @ ph, p1 @ D @ ph],
        [q1 @ (I - D) @ qh, -q1 @ K @ qh, q1 @ D @ qh],
    ])

    n = np.cross(M[0], M[1])
    scale = np.abs(M).max()
    if scale < 1e-15 or np.linalg.norm(n) < 1e-12 * scale**2:
        raise RankDeficientM("constraint matrix rank < 2; angle not unique")
    if abs(n[2]) < 1e-12 * np.linalg.norm(n):
        raise RankDeficientM("null vector has (numerically) zero third entry")

    n = n / n[2]
    c, s = float(n[0]), float(n[1])
    consistency = abs(c * c + s * s - 1.0)
    if consistency_tol is not None and consistency > consistency_tol:
        raise NoConsistentSolution(
            f"null-space consistency {consistency:.3g} exceeds {consistency_tol:.3g}")
    return math.atan2(s, c), consistency


def pose_from_match_cs(tuple_c: PointVectorTuple, tuple_s: PointVectorTuple,
                       consistency_tol: float = 1e-6) -> RigidTransform:
    """Closed-form pose aligning a curve 2-tuple with a surface 2-tuple.

    The rotation is the composition of the baseline-aligning rotation with a
    rotation about the aligned baseline that drops both tangents into the
    normal planes; the translation follows from the first point
    correspondence. Raises :class:`NoConsistentSolution` when the tuples do
    not match within ``consistency_tol``.
    """
    R1 = rotation_aligning(tuple_c.d, tuple_s.d)
    beta, _ = solve_beta_cs(tuple_c, tuple_s, R1, consistency_tol)
    lam = np.linalg.norm(tuple_s.d)
    R2 = rotation_about_axis(tuple_s.d / lam, beta)
    R = R2 @ R1
    t = tuple_s.P - R @ tuple_c.P
    return RigidTransform(R, t)


# ---------------------------------------------------------------------------
# Same-kind pose: two points plus one vector
# ---------------------------------------------------------------------------

def pose_from_match_cc(tuple_a: PointVectorTuple, tuple_b: PointVectorTuple,
                       second_vector_tol: float = 1e-6) -> RigidTransform:
    """Closed-form pose aligning two same-kind 2-tuples.

    After aligning baselines, the residual rotation about the baseline is
    fixed by aligning the first vectors; since tangents/normals are
    non-oriented, both the direct and the half-turn solution are tried and
    the second vector arbitrates. Raises :class:`InconsistentSecondVector` if
    neither solution aligns the second vectors within ``second_vector_tol``
    (radians).
    """
    if tuple_a.kind != tuple_b.kind:
        raise ValueError("pose_from_match_cc requires same-kind tuples")
    R1 = rotation_aligning(tuple_a.d, tuple_b.d)
    lam = np.linalg.norm(tuple_b.d)
    if lam < 1e-15:
        raise ZeroVector("target tuple has zero baseline")
    z = tuple_b.d / lam

    u = R1 @ tuple_a.p
    u_perp = u - (u @ z) * z
    v_perp = tuple_b.p - (tuple_b.p @ z) * z
    nu, nv = np.linalg.norm(u_perp), np.linalg.norm(v_perp)
    if nu < 1e-12 or nv < 1e-12:
        raise DegenerateElevation("first vector parallel to baseline")
    u_perp /= nu
    v_perp /= nv

    beta = math.atan2(float(z @ np.cross(u_perp, v_perp)), float(u_perp @ v_perp))

    best = None
    for cand in (beta, beta + math.pi):
        R = rotation_about_axis(z, cand) @ R1
        align = abs(float((R @ tuple_a.q) @ tuple_b.q))
        if best is None or align > best[0]:
            best = (align, R)
    align, R = best
    if align < math.cos(second_vector_tol):
        raise InconsistentSecondVector(
            f"second vectors misaligned by {math.degrees(math.acos(min(1.0, align))):.3g} deg")
    t = tuple_b.P - R @ tuple_a.P
    return RigidTransform(R, t)


# ---------------------------------------------------------------------------
# Batched pose solvers (raw ndarrays, used by the search engines)
# ---------------------------------------------------------------------------

def _batch_skew(a: np.ndarray) -> np.ndarray:
    K = np.zeros((len(a), 3, 3))
    K[:, 0, 1] = -a[:, 2]
    K[:, 0, 2] = a[:, 1]
    K[:, 1, 0] = a[:, 2]
    K[:, 1, 2] = -a[:, 0]
    K[:, 2, 0] = -a[:, 1]
    K[:, 2, 1] = a[:, 0]
    return K


def _batch_align(u: np.ndarray, uh: np.ndarray) -> np.ndarray:
    """Rotations taking the unit vector ``u`` onto each row of ``uh``."""
    a = np.cross(u[None, :], uh)
    c = uh @ u
    K = _batch_skew(a)
    denom = np.maximum(1.0 + c, 1e-9)
    R = np.eye(3) + K + (K @ K) / denom[:, None, None]
    flipped = c < -1.0 + 1e-9
    if flipped.any():
        axis = np.cross(u, _least_aligned_axis(u))
        R[flipped] = rotation_about_axis(axis, math.pi)
    return R


def _batch_rot_about(z: np.ndarray, cb: np.ndarray, sb: np.ndarray) -> np.ndarray:
    """Rotations about per-row unit axes ``z`` with cos/sin ``cb``/``sb``."""
    K = _batch_skew(z)
    zz = z[:, :, None] * z[:, None, :]
    return (cb[:, None, None] * np.eye(3) + sb[:, None, None] * K
            + (1.0 - cb)[:, None, None] * zz)


def _batch_pose_cs(Pc, d, pc, qc, Ps, Qs, ph, qh, consistency_tol):
    """Vectorized curve-vs-surface poses for many candidate surface pairs.

    ``Pc``/``d``/``pc``/``qc`` describe the drawn curve tuple (first point,
    baseline, unit tangents); ``Ps``/``Qs``/``ph``/``qh`` are (C, 3) arrays of
    candidate surface points and normals in correspondence order. Returns
    ``(R, t, ok)`` where rows with ``ok`` false failed a degeneracy or
    consistency check. Row-for-row this agrees with
    :func:`pose_from_match_cs` up to floating-point noise.
    """
    Ps = np.asarray(Ps, float)
    Qs = np.asarray(Qs, float)
    ph = np.asarray(ph, float)
    qh = np.asarray(qh, float)
    dh = Qs - Ps
    lamh = np.linalg.norm(dh, axis=1)
    ok = lamh > 1e-12
    lam_safe = np.where(ok, lamh, 1.0)
    uh = dh / lam_safe[:, None]
    u = np.asarray(d, float) / np.linalg.norm(d)

    R1 = _batch_align(u, uh)
    p1 = np.einsum("cij,j->ci", R1, pc)
    q1 = np.einsum("cij,j->ci", R1, qc)

    def _rows(v1, vh):
        vz = np.einsum("ci,ci->c", v1, uh)
        vhz = np.einsum("ci,ci->c", vh, uh)
        m1 = np.einsum("ci,ci->c", v1, vh) - vz * vhz
        m2 = -np.einsum("ci,ci->c", v1, np.cross(uh, vh))
        m3 = vz * vhz
        return np.stack([m1, m2, m3], axis=1)

    M0 = _rows(p1, ph)
    M1 = _rows(q1, qh)
    nvec = np.cross(M0, M1)
    nn = np.linalg.norm(nvec, axis=1)
    scale = np.linalg.norm(M0, axis=1) * np.linalg.norm(M1, axis=1)
    ok &= nn > 1e-12 * np.maximum(scale, 1e-300)
    ok &= np.abs(nvec[:, 2]) > 1e-12 * np.maximum(nn, 1e-300)

    n2 = np.where(np.abs(nvec[:, 2]) > 0, nvec[:, 2], 1.0)
    c = nvec[:, 0] / n2
    s = nvec[:, 1] / n2
    ok &= np.abs(c * c + s * s - 1.0) <= consistency_tol
    r = np.hypot(c, s)
    ok &= r > 1e-12
    r_safe = np.where(r > 0, r, 1.0)

    R2 = _batch_rot_about(uh, c / r_safe, s / r_safe)
    R = R2 @ R1
    t = Ps - np.einsum("cij,j->ci", R, Pc)
    return R, t, ok


def _batch_pose_cc(Pc, d, pc, qc, Ps, Qs, ph, qh, second_vector_tol):
    """Vectorized same-kind poses for many candidate target pairs.

    Baselines are aligned, the residual rotation about the baseline aligns
    the first vectors; vectors are non-oriented so the half-turn alternative
    is kept whenever it aligns the second vectors better. Agrees row-for-row
    with :func:`pose_from_match_cc`.
    """
    Ps = np.asarray(Ps, float)
    Qs = np.asarray(Qs, float)
    ph = np.asarray(ph, float)
    qh = np.asarray(qh, float)
    dh = Qs - Ps
    lamh = np.linalg.norm(dh, axis=1)
    ok = lamh > 1e-12
    lam_safe = np.where(ok, lamh, 1.0)
    uh = dh / lam_safe[:, None]
    u = np.asarray(d, float) / np.linalg.norm(d)

    R1 = _batch_align(u, uh)
    p1 = np.einsum("cij,j->ci", R1, pc)
    u_perp = p1 - np.einsum("ci,ci->c", p1, uh)[:, None] * uh
    v_perp = ph - np.einsum("ci,ci->c", ph, uh)[:, None] * uh
    nu = np.linalg.norm(u_perp, axis=1)
    nv = np.linalg.norm(v_perp, axis=1)
    ok &= (nu > 1e-12) & (nv > 1e-12)
    u_perp /= np.where(nu > 0, nu, 1.0)[:, None]
    v_perp /= np.where(nv > 0, nv, 1.0)[:, None]

    sb = np.einsum("ci,ci->c", uh, np.cross(u_perp, v_perp))
    cb = np.einsum("ci,ci->c", u_perp, v_perp)
    r = np.hypot(cb, sb)
    r_safe = np.where(r > 0, r, 1.0)
    cb /= r_safe
    sb /= r_safe

    Ra = _batch_rot_about(uh, cb, sb) @ R1
    Rb = _batch_rot_about(uh, -cb, -sb) @ R1
    align_a = np.abs(np.einsum("cij,j,ci->c", Ra, qc, qh))
    align_b = np.abs(np.einsum("cij,j,ci->c", Rb, qc, qh))
    use_b = align_b > align_a
    R = np.where(use_b[:, None, None], Rb, Ra)
    align = np.where(use_b, align_b, align_a)
    ok &= align >= math.cos(second_vector_tol)

    t = Ps - np.einsum("cij,j->ci", R, Pc)
    return R, t, ok


# ---------------------------------------------------------------------------
# Error metrics
# ---------------------------------------------------------------------------

def rotation_error_deg(Ra, Rb) -> float:
    """Geodesic angle between two rotations, in degrees."""
    Ra = np.asarray(Ra, float).reshape(3, 3)
    Rb = np.asarray(Rb, float).reshape(3, 3)
    c = (np.trace(Ra.T @ Rb) - 1.0) / 2.0
    return math.degrees(math.acos(max(-1.0, min(1.0, c))))


def translation_error(ta, tb) -> float:
    """Euclidean distance between two translation vectors."""
    return float(np.linalg.norm(_as_vec3(ta) - _as_vec3(tb)))
