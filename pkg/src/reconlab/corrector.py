"""Stage two: residual-bit-error erasure by peeling weight-1 rows.

After a failed stage-1 decode, symbols are split by reliability against a
threshold into suspicious (e) and trusted (ē) sets. The trusted part of the
word fixes a residual syndrome s_c = s XOR (syndrome restricted to ē); any
parity row with exactly one suspicious neighbor then forces that neighbor's
bit to s_c[m]. Peeling repeats until no weight-1 rows remain. Success means
the full syndrome matches exactly (re-verified against all of H at the end,
never trusted from the incremental bookkeeping).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .codes import ParityCheckMatrix, as_bits, restricted_syndrome, row_weights_within, syndrome
from .decoder import DecodeOutcome, DecoderConfig, LayeredDecoder, LlrVector
from .errors import PeelLimitError


@dataclass
class CorrectorConfig:
    """Threshold is in LSB units for fixed-point reliabilities, real units in
    float mode. ``max_peel_rounds=None`` derives a cap that only a bug could
    exceed (peeling shrinks e monotonically)."""

    delta: float = 165.0
    max_peel_rounds: int | None = None

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError(f"delta must be positive, got {self.delta}")


@dataclass
class CorrectionOutcome:
    success: bool
    corrected: np.ndarray
    bits_fixed: int
    peel_rounds: int
    residual_suspects: int


def classify(reliabilities, delta: float) -> tuple[np.ndarray, np.ndarray]:
    """Split symbol indices into (e, ē): e gets reliability < delta, ē >= delta."""
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    rel = np.asarray(reliabilities)
    idx = np.arange(rel.shape[0], dtype=np.int64)
    low = rel < delta
    return idx[low], idx[~low]


def residual_syndrome(H: ParityCheckMatrix, u_hat, ebar, s) -> np.ndarray:
    """s_c = s XOR (syndrome of û restricted to the trusted columns ē)."""
    s = as_bits(s, H.n_rows)
    return s ^ restricted_syndrome(H, u_hat, ebar)


def peel(H: ParityCheckMatrix, u_hat, e, ebar, s, cfg: CorrectorConfig,
         trace=None) -> CorrectionOutcome:
    """Erase residual errors in e by resolving weight-1 rows of H_e.

    Weight-1 rows are processed in ascending row index (the assigned values
    are forced, so order affects only traversal). s_c and the e-restricted
    row weights are maintained incrementally.
    """
    s = as_bits(s, H.n_rows)
    u_hat = as_bits(u_hat, H.n_cols).copy()
    e = np.asarray(e, dtype=np.int64)
    ebar = np.asarray(ebar, dtype=np.int64)
    if e.shape[0] + ebar.shape[0] != H.n_cols or (
        e.shape[0] and ebar.shape[0] and np.intersect1d(e, ebar).size
    ):
        raise ValueError("e and ē must partition the columns")

    in_e = np.zeros(H.n_cols, dtype=bool)
    in_e[e] = True
    w_e = row_weights_within(H, e)
    s_c = residual_syndrome(H, u_hat, ebar, s)

    limit = cfg.max_peel_rounds
    if limit is None:
        limit = 2 * (H.n_edges + H.n_rows) + 16

    heap = [int(m) for m in np.nonzero(w_e == 1)[0]]
    heapq.heapify(heap)
    rounds = 0
    fixed = 0
    while heap:
        rounds += 1
        if rounds > limit:
            raise PeelLimitError(f"exceeded max_peel_rounds={limit}")
        m = heapq.heappop(heap)
        if w_e[m] != 1:
            continue  # stale entry
        row = H.row(m)
        n = int(row[in_e[row]][0])
        value = int(s_c[m])
        if trace is not None:
            trace.append((m, n, value))
        u_hat[n] = value
        fixed += 1
        in_e[n] = False
        for mp in H.col(n):
            w_e[mp] -= 1
            if w_e[mp] == 1:
                heapq.heappush(heap, int(mp))
            if value:
                s_c[mp] ^= 1

    success = bool(np.array_equal(syndrome(H, u_hat), s))
    return CorrectionOutcome(
        success=success,
        corrected=u_hat,
        bits_fixed=fixed,
        peel_rounds=rounds,
        residual_suspects=int(in_e.sum()),
    )


def two_stage_decode(H: ParityCheckMatrix, s, llr: LlrVector, dec_cfg: DecoderConfig,
                     cor_cfg: CorrectorConfig, backend=None,
                     decoder: LayeredDecoder | None = None) -> DecodeOutcome:
    """Stage-1 layered decode, then peeling on the stage-1 posteriors if needed.

    A matched stage-1 outcome is returned untouched (stage stays 1); otherwise
    the outcome carries stage 2, the corrected word, and the peel result.
    """
    if decoder is None:
        decoder = LayeredDecoder(H, dec_cfg, backend=backend)
    out = decoder.decode(s, llr)
    if out.syndrome_matched:
        return out
    e, ebar = classify(out.reliabilities, cor_cfg.delta)
    corr = peel(H, out.hard, e, ebar, s, cor_cfg)
    out.stage = 2
    out.hard = corr.corrected
    out.syndrome_matched = corr.success
    out.correction = corr
    return out
