# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: layered BP iterations and PEG edge placement.

Semantics mirror ``_pykernels`` exactly (same IEEE double op order; the
extension is built with -ffp-contract=off so results are bit-identical).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport atanh, fabs, floor, tanh
from libc.stdint cimport int32_t, int64_t, uint8_t, uint64_t
from libc.stdlib cimport free, malloc

cnp.import_array()

BACKEND = "c"

CNU_SUM_PRODUCT = 0
CNU_MIN_SUM = 1
CNU_NORMALIZED_MIN_SUM = 2

LLR_CAP = 30.0

cdef double _LLR_CAP = 30.0
cdef double _PMAX = tanh(0.5 * 30.0)


def iterate_float(int64_t[::1] row_start, int32_t[::1] row_cols, uint8_t[::1] s,
                  double[::1] post, double[::1] msg, int cnu, double factor):
    cdef Py_ssize_t n_rows = row_start.shape[0] - 1
    cdef Py_ssize_t m, i, k, k0, deg, arg1
    cdef double t, a, si, sgn, out, p, suf, min1, min2
    cdef int flip
    cdef double *tbuf
    cdef double *th
    cdef double *pre
    cdef Py_ssize_t max_deg = 0
    for m in range(n_rows):
        if row_start[m + 1] - row_start[m] > max_deg:
            max_deg = row_start[m + 1] - row_start[m]
    tbuf = <double *> malloc(3 * max_deg * sizeof(double))
    if tbuf == NULL:
        raise MemoryError()
    th = tbuf + max_deg
    pre = tbuf + 2 * max_deg
    try:
        for m in range(n_rows):
            k0 = row_start[m]
            deg = row_start[m + 1] - k0
            for i in range(deg):
                k = k0 + i
                tbuf[i] = post[row_cols[k]] - msg[k]
            if cnu == 0:
                for i in range(deg):
                    th[i] = tanh(0.5 * tbuf[i])
                pre[0] = 1.0
                for i in range(1, deg):
                    pre[i] = pre[i - 1] * th[i - 1]
                suf = 1.0
                flip = 1 if s[m] else 0
                for i in range(deg - 1, -1, -1):
                    p = pre[i] * suf
                    if p > _PMAX:
                        p = _PMAX
                    elif p < -_PMAX:
                        p = -_PMAX
                    out = 2.0 * atanh(p)
                    if flip:
                        out = -out
                    k = k0 + i
                    post[row_cols[k]] = tbuf[i] + out
                    msg[k] = out
                    suf = suf * th[i]
            else:
                min1 = _LLR_CAP
                min2 = _LLR_CAP
                arg1 = -1
                sgn = -1.0 if s[m] else 1.0
                for i in range(deg):
                    t = tbuf[i]
                    a = -t if t < 0.0 else t
                    if t < 0.0:
                        sgn = -sgn
                    if a < min1:
                        min2 = min1
                        min1 = a
                        arg1 = i
                    elif a < min2:
                        min2 = a
                for i in range(deg):
                    a = min2 if i == arg1 else min1
                    if cnu == 2:
                        a = factor * a
                    t = tbuf[i]
                    si = -1.0 if t < 0.0 else 1.0
                    out = sgn * si * a
                    k = k0 + i
                    post[row_cols[k]] = t + out
                    msg[k] = out
    finally:
        free(tbuf)


def iterate_fixed(int64_t[::1] row_start, int32_t[::1] row_cols, uint8_t[::1] s,
                  int32_t[::1] post, int32_t[::1] msg, int qmsg, int qacc,
                  int frac_bits, int cnu, double factor):
    cdef Py_ssize_t n_rows = row_start.shape[0] - 1
    cdef Py_ssize_t m, i, k, k0, deg, arg1
    cdef long long t, a, out, v, min1, min2, code
    cdef double scale = <double> (1 << frac_bits)
    cdef double inv_scale = 1.0 / scale
    cdef double p, suf, vr
    cdef int neg, flip
    cdef long long *tbuf
    cdef double *th
    cdef double *pre
    cdef Py_ssize_t max_deg = 0
    for m in range(n_rows):
        if row_start[m + 1] - row_start[m] > max_deg:
            max_deg = row_start[m + 1] - row_start[m]
    tbuf = <long long *> malloc(max_deg * sizeof(long long))
    th = <double *> malloc(2 * max_deg * sizeof(double))
    if tbuf == NULL or th == NULL:
        if tbuf != NULL:
            free(tbuf)
        if th != NULL:
            free(th)
        raise MemoryError()
    pre = th + max_deg
    try:
        for m in range(n_rows):
            k0 = row_start[m]
            deg = row_start[m + 1] - k0
            for i in range(deg):
                k = k0 + i
                t = <long long> post[row_cols[k]] - <long long> msg[k]
                if t > qacc:
                    t = qacc
                elif t < -qacc:
                    t = -qacc
                tbuf[i] = t
            if cnu == 0:
                for i in range(deg):
                    th[i] = tanh(0.5 * (tbuf[i] * inv_scale))
                pre[0] = 1.0
                for i in range(1, deg):
                    pre[i] = pre[i - 1] * th[i - 1]
                suf = 1.0
                flip = 1 if s[m] else 0
                for i in range(deg - 1, -1, -1):
                    p = pre[i] * suf
                    if p > _PMAX:
                        p = _PMAX
                    elif p < -_PMAX:
                        p = -_PMAX
                    vr = 2.0 * atanh(p)
                    if flip:
                        vr = -vr
                    code = <long long> floor(fabs(vr) * scale + 0.5)
                    if code > qmsg:
                        code = qmsg
                    if vr < 0.0:
                        code = -code
                    k = k0 + i
                    t = tbuf[i] + code
                    if t > qacc:
                        t = qacc
                    elif t < -qacc:
                        t = -qacc
                    post[row_cols[k]] = <int32_t> t
                    msg[k] = <int32_t> code
                    suf = suf * th[i]
            else:
                min1 = qmsg
                min2 = qmsg
                arg1 = -1
                neg = 1 if s[m] else 0
                for i in range(deg):
                    t = tbuf[i]
                    a = -t if t < 0 else t
                    if t < 0:
                        neg = neg ^ 1
                    if a < min1:
                        min2 = min1
                        min1 = a
                        arg1 = i
                    elif a < min2:
                        min2 = a
                for i in range(deg):
                    a = min2 if i == arg1 else min1
                    if cnu == 2:
                        a = <long long> (factor * a)
                    t = tbuf[i]
                    if (1 if t < 0 else 0) != neg:
                        out = -a
                    else:
                        out = a
                    k = k0 + i
                    v = t + out
                    if v > qacc:
                        v = qacc
                    elif v < -qacc:
                        v = -qacc
                    post[row_cols[k]] = <int32_t> v
                    msg[k] = <int32_t> out
    finally:
        free(tbuf)
        free(th)


# ---------------------------------------------------------------------------
# PEG construction
# ---------------------------------------------------------------------------

cdef inline uint64_t _mix64(uint64_t x) nogil:
    x = (x ^ (x >> 30)) * <uint64_t> 0xBF58476D1CE4E5B9
    x = (x ^ (x >> 27)) * <uint64_t> 0x94D049BB133111EB
    return x ^ (x >> 31)


def peg_build(int32_t[::1] col_degrees, int32_t[::1] row_targets, int n_rows, seed):
    """Identical selection rule to the Python fallback (see _pykernels)."""
    cdef Py_ssize_t n_cols = col_degrees.shape[0]
    cdef int64_t total_edges = 0
    cdef Py_ssize_t n, j, i, m, c
    for n in range(n_cols):
        total_edges += col_degrees[n]

    out_arr = np.empty(total_edges, dtype=np.int32)
    cdef int32_t[::1] out = out_arr
    # growing adjacency, preallocated to final sizes
    col_ptr_arr = np.zeros(n_cols + 1, dtype=np.int64)
    cdef int64_t[::1] col_ptr = col_ptr_arr
    for n in range(n_cols):
        col_ptr[n + 1] = col_ptr[n] + col_degrees[n]
    cdef int32_t[::1] col_adj = np.empty(total_edges, dtype=np.int32)
    cdef int32_t[::1] col_len = np.zeros(n_cols, dtype=np.int32)

    # rows can exceed their soft capacity targets, so row adjacency grows
    cdef int32_t[::1] row_len = np.zeros(n_rows, dtype=np.int32)
    cdef int32_t[::1] row_cap = np.zeros(n_rows, dtype=np.int32)
    cdef list row_adj = []
    for m in range(n_rows):
        row_adj.append(np.empty(4, dtype=np.int32))
        row_cap[m] = 4

    cdef int32_t[::1] cur = np.zeros(n_rows, dtype=np.int32)
    cdef int32_t[::1] target = np.empty(n_rows, dtype=np.int32)
    for m in range(n_rows):
        target[m] = row_targets[m]

    cdef uint8_t[::1] row_seen = np.zeros(n_rows, dtype=np.uint8)
    cdef uint8_t[::1] col_seen = np.zeros(n_cols, dtype=np.uint8)
    cdef int32_t[::1] rows_a = np.empty(n_rows, dtype=np.int32)
    cdef int32_t[::1] rows_b = np.empty(n_rows, dtype=np.int32)
    cdef int32_t[::1] cols_a = np.empty(n_cols, dtype=np.int32)
    cdef int32_t[::1] cols_b = np.empty(n_cols, dtype=np.int32)
    cdef int32_t[::1] cand = np.empty(n_rows, dtype=np.int32)
    cdef int32_t[::1] ties = np.empty(n_rows, dtype=np.int32)

    cdef uint64_t state = <uint64_t> (int(seed) & ((1 << 64) - 1))
    cdef uint64_t GAMMA = <uint64_t> 0x9E3779B97F4A7C15
    cdef uint64_t rv
    cdef Py_ssize_t n_cand, n_ties, n_front, n_new_rows, n_new_cols, n_last, e
    cdef long long best, sc
    cdef int32_t pick
    cdef int32_t[::1] radj
    cdef int64_t edge_idx = 0

    for n in range(n_cols):
        for j in range(col_degrees[n]):
            # candidate rows
            if j == 0:
                n_cand = n_rows
                for m in range(n_rows):
                    cand[m] = <int32_t> m
            else:
                for m in range(n_rows):
                    row_seen[m] = 0
                for c in range(n_cols):
                    col_seen[c] = 0
                col_seen[n] = 1
                n_front = 1
                cols_a[0] = <int32_t> n
                n_last = 0
                while True:
                    n_new_rows = 0
                    for i in range(n_front):
                        c = cols_a[i]
                        for e in range(col_len[c]):
                            m = col_adj[col_ptr[c] + e]
                            if not row_seen[m]:
                                row_seen[m] = 1
                                rows_a[n_new_rows] = <int32_t> m
                                n_new_rows += 1
                    if n_new_rows == 0:
                        break
                    n_last = n_new_rows
                    for i in range(n_new_rows):
                        rows_b[i] = rows_a[i]
                    n_new_cols = 0
                    for i in range(n_new_rows):
                        m = rows_a[i]
                        radj = row_adj[m]
                        for e in range(row_len[m]):
                            c = radj[e]
                            if not col_seen[c]:
                                col_seen[c] = 1
                                cols_b[n_new_cols] = <int32_t> c
                                n_new_cols += 1
                    if n_new_cols == 0:
                        break
                    for i in range(n_new_cols):
                        cols_a[i] = cols_b[i]
                    n_front = n_new_cols
                n_cand = 0
                for m in range(n_rows):
                    if not row_seen[m]:
                        cand[n_cand] = <int32_t> m
                        n_cand += 1
                if n_cand == 0:
                    # all rows reached: deepest level, ascending
                    for i in range(n_last):
                        cand[i] = rows_b[i]
                    n_cand = n_last
                    _sort_i32(cand, n_cand)
            # max remaining capacity, ties -> seeded pick
            best = 0
            n_ties = 0
            for i in range(n_cand):
                m = cand[i]
                sc = <long long> target[m] - <long long> cur[m]
                if n_ties == 0 or sc > best:
                    best = sc
                    ties[0] = <int32_t> m
                    n_ties = 1
                elif sc == best:
                    ties[n_ties] = <int32_t> m
                    n_ties += 1
            state = state + GAMMA
            rv = _mix64(state)
            pick = ties[rv % <uint64_t> n_ties]

            col_adj[col_ptr[n] + col_len[n]] = pick
            col_len[n] += 1
            if row_len[pick] == row_cap[pick]:
                bigger = np.empty(row_cap[pick] * 2, dtype=np.int32)
                bigger[:row_cap[pick]] = np.asarray(row_adj[pick])
                row_adj[pick] = bigger
                row_cap[pick] = row_cap[pick] * 2
            radj = row_adj[pick]
            radj[row_len[pick]] = <int32_t> n
            row_len[pick] += 1
            cur[pick] += 1
            out[edge_idx] = pick
            edge_idx += 1
    return out_arr


cdef void _sort_i32(int32_t[::1] a, Py_ssize_t n):
    # insertion sort; deepest BFS levels are small
    cdef Py_ssize_t i, j
    cdef int32_t v
    for i in range(1, n):
        v = a[i]
        j = i - 1
        while j >= 0 and a[j] > v:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = v
