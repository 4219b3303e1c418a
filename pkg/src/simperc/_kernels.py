"""Compiled grid-bucket kernels: union-find clustering and radius queries."""

from __future__ import annotations

import numpy as np
from numba import njit

# cap on cells per axis; cells may be wider than the radius, never narrower
MAX_CELLS = 1024


def bucket(points: np.ndarray, radius: float):
    """Sort points into a uniform grid whose cells are at least ``radius`` wide.

    Returns ``(order, cell_start, origin, side, shape)`` where ``order`` lists
    point indices cell by cell and ``cell_start`` is the CSR offset array.
    """
    n = len(points)
    if n == 0:
        origin = np.zeros(2)
        return np.empty(0, np.int64), np.zeros(2, np.int64), origin, np.ones(2), (1, 1)
    origin = points.min(axis=0)
    extent = points.max(axis=0) - origin
    side = np.maximum(extent / (MAX_CELLS - 1), radius)
    side = np.where(side > 0, side, 1.0)
    shape = tuple(int(s) for s in np.floor(extent / side).astype(np.int64) + 1)
    cx = np.minimum(((points[:, 0] - origin[0]) / side[0]).astype(np.int64), shape[0] - 1)
    cy = np.minimum(((points[:, 1] - origin[1]) / side[1]).astype(np.int64), shape[1] - 1)
    key = cx * shape[1] + cy
    order = np.argsort(key, kind="stable").astype(np.int64)
    counts = np.bincount(key, minlength=shape[0] * shape[1])
    cell_start = np.zeros(len(counts) + 1, np.int64)
    np.cumsum(counts, out=cell_start[1:])
    return order, cell_start, origin, side, shape


@njit(cache=True, nogil=True)
def _find(parent, i):
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


@njit(cache=True, nogil=True)
def _cluster(points, r2, order, cell_start, ox, oy, sx, sy, nx, ny):
    n = points.shape[0]
    parent = np.arange(n)
    size = np.ones(n, np.int64)
    for i in range(n):
        xi = points[i, 0]
        yi = points[i, 1]
        cx = min(int((xi - ox) / sx), nx - 1)
        cy = min(int((yi - oy) / sy), ny - 1)
        for gx in range(max(cx - 1, 0), min(cx + 2, nx)):
            for gy in range(max(cy - 1, 0), min(cy + 2, ny)):
                c = gx * ny + gy
                for k in range(cell_start[c], cell_start[c + 1]):
                    j = order[k]
                    if j <= i:
                        continue
                    dx = points[j, 0] - xi
                    dy = points[j, 1] - yi
                    if dx * dx + dy * dy <= r2:
                        a = _find(parent, i)
                        b = _find(parent, j)
                        if a != b:
                            if size[a] < size[b]:
                                a, b = b, a
                            parent[b] = a
                            size[a] += size[b]
    # canonical labels: numbered by first appearance in index order
    labels = np.empty(n, np.int64)
    remap = np.full(n, -1, np.int64)
    nlab = 0
    for i in range(n):
        root = _find(parent, i)
        if remap[root] < 0:
            remap[root] = nlab
            nlab += 1
        labels[i] = remap[root]
    return labels, nlab


def cluster_labels(points: np.ndarray, radius: float):
    """Component labels of the graph joining points at distance ``<= radius``."""
    pts = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) == 0:
        return np.empty(0, np.int64), 0
    order, cell_start, origin, side, shape = bucket(pts, radius)
    labels, nlab = _cluster(
        pts, radius * radius, order, cell_start,
        origin[0], origin[1], side[0], side[1], shape[0], shape[1],
    )
    return labels, int(nlab)


@njit(cache=True, nogil=True)
def _any_within(queries, refs, r2, order, cell_start, ox, oy, sx, sy, nx, ny):
    m = queries.shape[0]
    hit = np.zeros(m, np.bool_)
    for q in range(m):
        xq = queries[q, 0]
        yq = queries[q, 1]
        # clipping is 1-Lipschitz, so true neighbours stay within one cell
        fx = (xq - ox) / sx
        fy = (yq - oy) / sy
        cx = int(min(max(fx, 0.0), nx - 1.0))
        cy = int(min(max(fy, 0.0), ny - 1.0))
        found = False
        for gx in range(max(cx - 1, 0), min(cx + 2, nx)):
            if found:
                break
            for gy in range(max(cy - 1, 0), min(cy + 2, ny)):
                if found:
                    break
                c = gx * ny + gy
                for k in range(cell_start[c], cell_start[c + 1]):
                    j = order[k]
                    dx = refs[j, 0] - xq
                    dy = refs[j, 1] - yq
                    if dx * dx + dy * dy <= r2:
                        found = True
                        break
        hit[q] = found
    return hit


def any_within(queries: np.ndarray, refs: np.ndarray, radius: float) -> np.ndarray:
    """For each query point, whether some reference point lies within ``radius`` (inclusive)."""
    q = np.ascontiguousarray(queries, dtype=np.float64).reshape(-1, 2)
    r = np.ascontiguousarray(refs, dtype=np.float64).reshape(-1, 2)
    if len(q) == 0 or len(r) == 0:
        return np.zeros(len(q), bool)
    order, cell_start, origin, side, shape = bucket(r, radius)
    return _any_within(
        q, r, radius * radius, order, cell_start,
        origin[0], origin[1], side[0], side[1], shape[0], shape[1],
    )
