# Compiled hot kernels. Contracts mirror _kernels_py exactly; both count
# every pairwise distance evaluation they perform.
from libc.math cimport sqrt

import numpy as np


def greedy_select(const double[:, ::1] pts, Py_ssize_t target):
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t k = pts.shape[1]
    cdef Py_ssize_t i, d, t, best
    cdef double acc, diff, bestval
    cdef long long anchor_evals = n
    cdef long long greedy_evals = 0

    anchor_arr = np.zeros(k, dtype=np.float64)
    min_dist_arr = np.empty(n, dtype=np.float64)
    order_arr = np.empty(target, dtype=np.int64)
    cdef double[::1] anchor = anchor_arr
    cdef double[::1] min_dist = min_dist_arr
    cdef long long[::1] order = order_arr

    for i in range(n):
        for d in range(k):
            anchor[d] += pts[i, d]
    for d in range(k):
        anchor[d] /= n

    for i in range(n):
        acc = 0.0
        for d in range(k):
            diff = pts[i, d] - anchor[d]
            acc += diff * diff
        min_dist[i] = sqrt(acc)

    for t in range(target):
        best = 0
        bestval = min_dist[0]
        for i in range(1, n):
            if min_dist[i] > bestval:  # strict: first max wins on ties
                bestval = min_dist[i]
                best = i
        order[t] = best
        for i in range(n):
            acc = 0.0
            for d in range(k):
                diff = pts[i, d] - pts[best, d]
                acc += diff * diff
            acc = sqrt(acc)
            if acc < min_dist[i]:
                min_dist[i] = acc
        greedy_evals += n
        min_dist[best] = -1.0

    return order_arr, int(anchor_evals), int(greedy_evals)


def nearest_neighbors(const double[:, ::1] queries, const double[:, ::1] bank):
    cdef Py_ssize_t nq = queries.shape[0]
    cdef Py_ssize_t m = bank.shape[0]
    cdef Py_ssize_t k = queries.shape[1]
    cdef Py_ssize_t i, j, d, best
    cdef double acc, diff, bestval

    dist_arr = np.empty(nq, dtype=np.float64)
    idx_arr = np.empty(nq, dtype=np.int64)
    cdef double[::1] dist = dist_arr
    cdef long long[::1] idx = idx_arr

    for i in range(nq):
        best = 0
        bestval = -1.0
        for j in range(m):
            acc = 0.0
            for d in range(k):
                diff = bank[j, d] - queries[i, d]
                acc += diff * diff
            if bestval < 0.0 or acc < bestval:  # strict: smallest j on ties
                bestval = acc
                best = j
        dist[i] = sqrt(bestval)
        idx[i] = best

    return dist_arr, idx_arr
