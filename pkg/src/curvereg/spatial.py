"""Spatial search structures: a packed 3-D R-tree and point subsampling.

The R-tree is bulk-loaded with sort-tile-recursive packing over numpy arrays:
entries are 3-D keys, leaves are contiguous slices of the packed key array and
internal levels store child bounding boxes. Only axis-aligned box queries are
needed, so the structure is immutable after construction.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial import cKDTree

__all__ = ["RTree3", "farthest_point_sampling"]


class RTree3:
    """Immutable 3-D R-tree over point keys, supporting box queries.

    Parameters
    ----------
    keys : (N, 3) array
        One 3-D key per entry. ``query_box`` returns indices into this array.
    leaf_capacity : int
        Entries per leaf.
    fanout : int
        Children per internal node.
    """

    def __init__(self, keys, leaf_capacity: int = 128, fanout: int = 16):
        keys = np.ascontiguousarray(np.asarray(keys, dtype=float))
        if keys.ndim != 2 or keys.shape[1] != 3:
            raise ValueError("keys must have shape (N, 3)")
        self.n = len(keys)
        self.leaf_capacity = int(leaf_capacity)
        self.fanout = int(fanout)

        if self.n == 0:
            self._perm = np.empty(0, dtype=np.int64)
            self._keys = keys
            self._levels = []
            return

        self._perm = self._str_permutation(keys, self.leaf_capacity)
        self._keys = keys[self._perm]

        # leaf boxes over contiguous chunks of the packed keys
        lo, hi = self._chunk_boxes(self._keys, self.leaf_capacity)
        self._levels = [(lo, hi)]
        while len(lo) > 1:
            lo, hi = self._group_boxes(lo, hi, self.fanout)
            self._levels.append((lo, hi))
        self._levels.reverse()  # root first

    @staticmethod
    def _str_permutation(keys, cap):
        # tile biased toward fine slabs on axis 0: descriptor queries are
        # narrow in the first key (baseline length) and wide in the others
        n = len(keys)
        nleaf = max(1, math.ceil(n / cap))
        sx = max(1, math.ceil(nleaf ** 0.5))
        leaves_per_slab = math.ceil(nleaf / sx)
        sy = max(1, math.ceil(leaves_per_slab ** 0.5))
        slab_size = leaves_per_slab * cap
        run_size = math.ceil(leaves_per_slab / sy) * cap

        order_x = np.argsort(keys[:, 0], kind="stable")
        pos = np.empty(n, dtype=np.int64)
        pos[order_x] = np.arange(n)
        slab = pos // slab_size

        # sort by (slab, y); positions within that order define runs
        order_y = np.lexsort((keys[:, 1], slab))
        pos2 = np.empty(n, dtype=np.int64)
        pos2[order_y] = np.arange(n)
        run = pos2 // run_size

        return np.lexsort((keys[:, 2], run))

    @staticmethod
    def _chunk_boxes(pts, chunk):
        n = len(pts)
        nchunks = math.ceil(n / chunk)
        pad = nchunks * chunk - n
        if pad:
            padded = np.concatenate([pts, np.repeat(pts[-1:], pad, axis=0)])
        else:
            padded = pts
        shaped = padded.reshape(nchunks, chunk, 3)
        return shaped.min(axis=1), shaped.max(axis=1)

    @classmethod
    def _group_boxes(cls, lo, hi, fanout):
        glo, _ = cls._chunk_boxes(lo, fanout)
        _, ghi = cls._chunk_boxes(hi, fanout)
        return glo, ghi

    def query_box(self, lo, hi) -> np.ndarray:
        """Indices of all entries with keys inside [lo, hi] (inclusive)."""
        if self.n == 0:
            return np.empty(0, dtype=np.int64)
        lo = np.asarray(lo, dtype=float).reshape(3)
        hi = np.asarray(hi, dtype=float).reshape(3)

        nodes = np.array([0], dtype=np.int64)
        for level, (blo, bhi) in enumerate(self._levels):
            if level == 0 and len(blo) == 1:
                hit = np.all(bhi[0] >= lo) and np.all(blo[0] <= hi)
                nodes = np.array([0], dtype=np.int64) if hit else np.empty(0, np.int64)
            else:
                # expand current nodes into child ids, then filter by overlap
                child = (nodes[:, None] * self.fanout + np.arange(self.fanout)).ravel()
                child = child[child < len(blo)]
                mask = np.all(bhi[child] >= lo, axis=1) & np.all(blo[child] <= hi, axis=1)
                nodes = child[mask]
            if len(nodes) == 0:
                return np.empty(0, dtype=np.int64)

        # leaves -> contiguous key ranges, merged before one vectorized mask
        cap = self.leaf_capacity
        starts = nodes * cap
        stops = np.minimum(starts + cap, self.n)
        merged = []
        s0, e0 = int(starts[0]), int(stops[0])
        for s, e in zip(starts[1:], stops[1:]):
            if s == e0:
                e0 = int(e)
            else:
                merged.append((s0, e0))
                s0, e0 = int(s), int(e)
        merged.append((s0, e0))

        idx = np.concatenate([np.arange(s, e) for s, e in merged])
        chunk = self._keys[idx]
        m = np.all((chunk >= lo) & (chunk <= hi), axis=1)
        return self._perm[idx[m]]


def farthest_point_sampling(points, m: int, seed=None) -> np.ndarray:
    """Indices of ``m`` points chosen by iterative farthest-point sampling.

    The first point is drawn at random (seeded); each subsequent pick
    maximizes the distance to the already-selected set. Returns all indices
    if ``m >= len(points)``.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if m >= n:
        return np.arange(n, dtype=np.int64)
    rng = np.random.default_rng(seed)
    chosen = np.empty(m, dtype=np.int64)
    chosen[0] = rng.integers(n)
    dist = np.linalg.norm(pts - pts[chosen[0]], axis=1)
    for k in range(1, m):
        chosen[k] = int(np.argmax(dist))
        np.minimum(dist, np.linalg.norm(pts - pts[chosen[k]], axis=1), out=dist)
    return chosen


def knn_indices(points, k: int) -> np.ndarray:
    """(N, k) indices of the k nearest neighbours of each point (self included)."""
    pts = np.asarray(points, dtype=float)
    tree = cKDTree(pts)
    _, idx = tree.query(pts, k=k)
    return np.atleast_2d(idx)
