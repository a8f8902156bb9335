"""Pure-Python kernels: layered BP iterations and PEG edge placement.

This module is the reference semantics for the compiled extension in
``_ckernels.pyx``. Both must produce bit-identical outputs: every floating
point operation here happens in the same order on IEEE doubles, and the
extension is compiled without FP contraction. The loops are slow; the
compiled backend is preferred automatically when present.
"""

import math

import numpy as np

from .seeding import SplitMix64

BACKEND = "py"

CNU_SUM_PRODUCT = 0
CNU_MIN_SUM = 1
CNU_NORMALIZED_MIN_SUM = 2

#: Magnitude cap for float-mode messages. tanh(LLR_CAP/2) is still < 1.0 in
#: double precision, so atanh of the clamped tanh-product stays finite.
LLR_CAP = 30.0
_PMAX = math.tanh(0.5 * LLR_CAP)


def iterate_float(row_start, row_cols, s, post, msg, cnu, factor):
    """One full layered iteration over all rows, in place (float mode)."""
    n_rows = len(row_start) - 1
    tanh, atanh = math.tanh, math.atanh
    for m in range(n_rows):
        k0 = int(row_start[m])
        k1 = int(row_start[m + 1])
        deg = k1 - k0
        tbuf = [0.0] * deg
        for i in range(deg):
            k = k0 + i
            tbuf[i] = float(post[row_cols[k]]) - float(msg[k])
        if cnu == CNU_SUM_PRODUCT:
            th = [tanh(0.5 * t) for t in tbuf]
            pre = [1.0] * deg
            for i in range(1, deg):
                pre[i] = pre[i - 1] * th[i - 1]
            suf = 1.0
            flip = bool(s[m])
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
            min1 = LLR_CAP
            min2 = LLR_CAP
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
                if cnu == CNU_NORMALIZED_MIN_SUM:
                    a = factor * a
                t = tbuf[i]
                si = -1.0 if t < 0.0 else 1.0
                out = sgn * si * a
                k = k0 + i
                post[row_cols[k]] = t + out
                msg[k] = out


def iterate_fixed(row_start, row_cols, s, post, msg, qmsg, qacc, frac_bits, cnu, factor):
    """One full layered iteration in saturating integer arithmetic.

    ``post``/``msg`` hold integer codes; extrinsic differences and posterior
    sums saturate at +/-qacc, messages at +/-qmsg (qmsg <= qacc).
    """
    n_rows = len(row_start) - 1
    scale = float(1 << frac_bits)
    inv_scale = 1.0 / scale
    tanh, atanh, floor = math.tanh, math.atanh, math.floor
    for m in range(n_rows):
        k0 = int(row_start[m])
        k1 = int(row_start[m + 1])
        deg = k1 - k0
        tbuf = [0] * deg
        for i in range(deg):
            k = k0 + i
            t = int(post[row_cols[k]]) - int(msg[k])
            if t > qacc:
                t = qacc
            elif t < -qacc:
                t = -qacc
            tbuf[i] = t
        if cnu == CNU_SUM_PRODUCT:
            th = [tanh(0.5 * (t * inv_scale)) for t in tbuf]
            pre = [1.0] * deg
            for i in range(1, deg):
                pre[i] = pre[i - 1] * th[i - 1]
            suf = 1.0
            flip = bool(s[m])
            for i in range(deg - 1, -1, -1):
                p = pre[i] * suf
                if p > _PMAX:
                    p = _PMAX
                elif p < -_PMAX:
                    p = -_PMAX
                v = 2.0 * atanh(p)
                if flip:
                    v = -v
                code = int(floor(abs(v) * scale + 0.5))
                if code > qmsg:
                    code = qmsg
                if v < 0.0:
                    code = -code
                k = k0 + i
                t = tbuf[i] + code
                if t > qacc:
                    t = qacc
                elif t < -qacc:
                    t = -qacc
                post[row_cols[k]] = t
                msg[k] = code
                suf = suf * th[i]
        else:
            min1 = qmsg
            min2 = qmsg
            arg1 = -1
            neg = bool(s[m])
            for i in range(deg):
                t = tbuf[i]
                a = -t if t < 0 else t
                if t < 0:
                    neg = not neg
                if a < min1:
                    min2 = min1
                    min1 = a
                    arg1 = i
                elif a < min2:
                    min2 = a
            for i in range(deg):
                a = min2 if i == arg1 else min1
                if cnu == CNU_NORMALIZED_MIN_SUM:
                    a = int(factor * a)  # truncation toward zero, as in hardware
                t = tbuf[i]
                out = -a if (t < 0) != neg else a
                k = k0 + i
                v = t + out
                if v > qacc:
                    v = qacc
                elif v < -qacc:
                    v = -qacc
                post[row_cols[k]] = v
                msg[k] = out


def peg_build(col_degrees, row_targets, n_rows, seed):
    """Progressive edge growth; returns chosen rows flattened column-major.

    For each new edge of column n, a BFS over the current Tanner graph finds
    the rows not reachable from n (or, if all are reachable, the rows at the
    deepest BFS level); among candidates the row with the largest remaining
    degree capacity wins, ties broken by a seeded SplitMix64 pick.
    """
    n_cols = len(col_degrees)
    rng = SplitMix64(seed)
    target = [int(d) for d in row_targets]
    cur = [0] * n_rows
    col_rows = [[] for _ in range(n_cols)]
    row_cols = [[] for _ in range(n_rows)]
    out = []
    all_rows = list(range(n_rows))
    for n in range(n_cols):
        for j in range(int(col_degrees[n])):
            if j == 0:
                cand = all_rows
            else:
                cand = _bfs_candidates(n, col_rows, row_cols, n_rows)
            best = None
            ties = []
            for m in cand:
                sc = target[m] - cur[m]
                if best is None or sc > best:
                    best = sc
                    ties = [m]
                elif sc == best:
                    ties.append(m)
            pick = ties[rng.next_below(len(ties))]
            col_rows[n].append(pick)
            row_cols[pick].append(n)
            cur[pick] += 1
            out.append(pick)
    return np.asarray(out, dtype=np.int32)


def _bfs_candidates(n, col_rows, row_cols, n_rows):
    row_seen = bytearray(n_rows)
    col_seen = bytearray(len(col_rows))
    col_seen[n] = 1
    frontier = [n]
    last_level = []
    while True:
        new_rows = []
        for c in frontier:
            for m in col_rows[c]:
                if not row_seen[m]:
                    row_seen[m] = 1
                    new_rows.append(m)
        if not new_rows:
            break
        last_level = new_rows
        new_cols = []
        for m in new_rows:
            for c2 in row_cols[m]:
                if not col_seen[c2]:
                    col_seen[c2] = 1
                    new_cols.append(c2)
        if not new_cols:
            break
        frontier = new_cols
    unreached = [m for m in range(n_rows) if not row_seen[m]]
    if unreached:
        return unreached
    return sorted(last_level)
