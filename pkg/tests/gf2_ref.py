"""Brute-force GF(2) and inference references used as independent oracles.

Everything here is deliberately naive (dense matrices, exhaustive
enumeration) so it shares no code path with the package implementations
it checks.
"""

import itertools

import numpy as np


def dense(H):
    """ParityCheckMatrix -> dense uint8 array."""
    D = np.zeros((H.n_rows, H.n_cols), dtype=np.uint8)
    for m in range(H.n_rows):
        for n in H.row(m):
            D[m, n] = 1
    return D


def syndrome_dense(D, u):
    return (D @ np.asarray(u, dtype=np.uint8)) % 2


def coset_words(D, s):
    """All words u with D u = s (exhaustive; keep n small)."""
    n = D.shape[1]
    out = []
    for bits in itertools.product((0, 1), repeat=n):
        u = np.array(bits, dtype=np.uint8)
        if np.array_equal(syndrome_dense(D, u), s):
            out.append(u)
    return out


def solutions_on_subset(D, u_base, subset, s):
    """All completions of u_base over the columns in ``subset`` satisfying D u = s."""
    subset = list(subset)
    out = []
    for bits in itertools.product((0, 1), repeat=len(subset)):
        u = np.asarray(u_base, dtype=np.uint8).copy()
        u[subset] = bits
        if np.array_equal(syndrome_dense(D, u), s):
            out.append(u)
    return out


def coset_ml_word(D, s, llr):
    """Most likely coset word under independent-bit LLRs (exhaustive)."""
    best, best_metric = None, -np.inf
    for u in coset_words(D, s):
        metric = -float(np.sum(np.asarray(llr)[u == 1]))
        if metric > best_metric:
            best, best_metric = u, metric
    return best


def exact_posterior_llrs(D, s, llr):
    """Exact per-bit a-posteriori LLRs over the coset, by enumeration."""
    llr = np.asarray(llr, dtype=np.float64)
    n = D.shape[1]
    w0 = np.zeros(n)
    w1 = np.zeros(n)
    found = False
    for u in coset_words(D, s):
        w = np.exp(-float(np.sum(llr[u == 1])))
        found = True
        w1[u == 1] += w
        w0[u == 0] += w
    if not found:
        raise ValueError("empty coset")
    with np.errstate(divide="ignore"):
        return np.log(w0) - np.log(w1)


def has_null_subpattern(D, error_cols):
    """True if some nonzero subset of error_cols sums to zero over GF(2).

    Such patterns are invisible to any syndrome-based check, so exactness
    oracles exclude them when drawing random instances.
    """
    cols = list(error_cols)
    for r in range(1, len(cols) + 1):
        for combo in itertools.combinations(cols, r):
            v = np.zeros(D.shape[0], dtype=np.uint8)
            for c in combo:
                v ^= D[:, c]
            if not v.any():
                return True
    return False
