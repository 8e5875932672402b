"""Pure-numpy implementations of the hot kernels. Same contracts as the
compiled versions in _native.pyx; see _kernels for the dispatch."""
from __future__ import annotations

import math

import numpy as np


def greedy_select(pts: np.ndarray, target: int):
    """Greedy farthest-point selection over row vectors.

    pts is (n, k) float64, target the number of rows to pick. The virtual
    anchor is the row mean; each round scans all n rows. Selected rows get
    a -1 sentinel so they can never be re-picked, even among duplicates.

    Returns (indices int64 (target,), anchor_evals, greedy_evals) where the
    eval counts are the number of pairwise distance computations performed:
    exactly n and n * target.
    """
    n = pts.shape[0]
    anchor = pts.mean(axis=0)
    diff = pts - anchor
    min_dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    anchor_evals = n
    greedy_evals = 0
    order = np.empty(target, dtype=np.int64)
    for t in range(target):
        j = int(np.argmax(min_dist))  # first max wins: smallest index on ties
        order[t] = j
        diff = pts - pts[j]
        dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        np.minimum(min_dist, dist, out=min_dist)
        greedy_evals += n
        min_dist[j] = -1.0
    return order, anchor_evals, greedy_evals


def nearest_neighbors(queries: np.ndarray, bank: np.ndarray):
    """Exact nearest neighbor of each query row among the bank rows.

    queries (q, k) and bank (M, k), both float64. Ties resolve to the
    smallest bank index. Returns (distances (q,), indices int64 (q,)).
    """
    nq = queries.shape[0]
    dists = np.empty(nq, dtype=np.float64)
    idxs = np.empty(nq, dtype=np.int64)
    for i in range(nq):
        diff = bank - queries[i]
        d2 = np.einsum("ij,ij->i", diff, diff)
        j = int(np.argmin(d2))
        idxs[i] = j
        dists[i] = math.sqrt(float(d2[j]))
    return dists, idxs
