"""Shared helpers: random rigid motions and ground-truth tuple matches."""

import numpy as np
import pytest

from curvereg.geometry import (
    NORMALS,
    TANGENTS,
    PointVectorTuple,
    RigidTransform,
)

# keep every generated vector at least this far (in |cos|) from the baseline,
# well inside the library's elevation margin
_MAX_COS = 0.95


def random_rotation(rng):
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def random_rigid(rng, translation_scale=20.0):
    return RigidTransform(random_rotation(rng),
                          rng.uniform(-translation_scale, translation_scale, 3))


def random_unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def unit_away_from(rng, d_hat, max_cos=_MAX_COS):
    """Random unit vector whose angle to d_hat stays clear of 0 and pi."""
    while True:
        v = random_unit(rng)
        if abs(v @ d_hat) < max_cos:
            return v


def orthogonal_unit_away_from(rng, v, d_hat, max_cos=_MAX_COS):
    """Random unit vector orthogonal to v but not (anti)parallel to d_hat."""
    while True:
        n = np.cross(v, rng.normal(size=3))
        norm = np.linalg.norm(n)
        if norm < 1e-6:
            continue
        n /= norm
        if abs(n @ d_hat) < max_cos:
            return n


def random_tuple(rng, kind=TANGENTS, lam_range=(1.0, 20.0)):
    """Non-degenerate random 2-tuple with a well-defined descriptor."""
    P = rng.uniform(-10, 10, 3)
    lam = rng.uniform(*lam_range)
    d_hat = random_unit(rng)
    Q = P + lam * d_hat
    p = unit_away_from(rng, d_hat)
    while True:
        q = unit_away_from(rng, d_hat)
        # azimuth needs both cross products well defined; enforced by the
        # elevation bound already, but keep q distinct from p for variety
        if abs(q @ p) < 0.999:
            return PointVectorTuple(P, Q, p, q, kind)


def make_cs_match(rng):
    """Ground-truth curve/surface match: returns (tuple_c, tuple_s, truth).

    The surface normals are drawn orthogonal to the transformed tangents, so
    ``truth`` drops both tangents into the normal planes exactly.
    """
    tuple_c = random_tuple(rng, TANGENTS)
    truth = random_rigid(rng)
    moved = tuple_c.transformed(truth)
    d_hat = moved.d / np.linalg.norm(moved.d)
    n_p = orthogonal_unit_away_from(rng, moved.p, d_hat)
    n_q = orthogonal_unit_away_from(rng, moved.q, d_hat)
    tuple_s = PointVectorTuple(moved.P, moved.Q, n_p, n_q, NORMALS)
    return tuple_c, tuple_s, truth


def make_cc_match(rng, kind=TANGENTS, flip_p=False, flip_q=False):
    """Ground-truth same-kind match: returns (tuple_a, tuple_b, truth)."""
    tuple_a = random_tuple(rng, kind)
    truth = random_rigid(rng)
    moved = tuple_a.transformed(truth)
    p = -moved.p if flip_p else moved.p
    q = -moved.q if flip_q else moved.q
    tuple_b = PointVectorTuple(moved.P, moved.Q, p, q, kind)
    return tuple_a, tuple_b, truth


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
