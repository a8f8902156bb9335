"""Monte Carlo reverse-reconciliation trials over a binary-input AWGN channel.

Every trial is keyed by (master_seed, snr_index, frame_index), so sweep
results depend only on the configuration and the master seed, never on
scheduling or parallelism. Bits and noise come from a SplitMix64 counter
stream; Gaussians use the inverse CDF (scipy's ndtri) for portability.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from .codes import ParityCheckMatrix, syndrome
from .corrector import CorrectorConfig, two_stage_decode
from .decoder import DecoderConfig, LayeredDecoder, channel_llrs
from .errors import DimensionError
from .seeding import derive_seed, stream_u64

#: 97.5% normal quantile for Wilson 95% intervals.
WILSON_Z = 1.959963984540054


@dataclass
class FrameTrial:
    seed: int
    snr: float
    u: np.ndarray  # Bob's raw keys
    y: np.ndarray  # Alice's observations


@dataclass
class TrialRecord:
    seed: int
    snr: float
    stage1_matched: bool
    stage2_success: bool
    iterations_used: int
    bits_fixed: int
    undetected_error: bool
    wall_time: float


@dataclass
class FerPoint:
    snr: float
    frames: int
    stage1_failures: int
    stage2_failures: int
    fer_stage1: float
    fer_stage2: float
    ci_lo: float
    ci_hi: float
    mean_iters: float
    mean_bits_fixed: float
    undetected: int


@dataclass
class FerCurve:
    points: list[FerPoint] = field(default_factory=list)

    def snrs(self):
        return [p.snr for p in self.points]


CSV_HEADER = ("snr,frames,stage1_fail,stage2_fail,fer1,fer2,"
              "ci_lo,ci_hi,mean_iters,mean_bits_fixed,undetected")


def wilson_interval(failures: int, n: int, z: float = WILSON_Z) -> tuple[float, float]:
    """Wilson score 95% interval for a binomial proportion."""
    if n <= 0:
        return 0.0, 1.0
    p = failures / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p + z2 / (2 * n)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n))
    return max(0.0, center - half), min(1.0, center + half)


def gen_frame(n: int, snr: float, seed: int) -> FrameTrial:
    """u iid uniform bits; y = (1 - 2u) + gaussian(0, 1/snr)."""
    if snr <= 0:
        raise ValueError(f"snr must be positive, got {snr}")
    words = stream_u64(seed, 2 * n)
    u = (words[:n] >> np.uint64(63)).astype(np.uint8)
    uniforms = ((words[n:] >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    noise = ndtri(uniforms) / math.sqrt(snr)
    y = (1.0 - 2.0 * u.astype(np.float64)) + noise
    return FrameTrial(seed=seed, snr=snr, u=u, y=y)


def run_trial(H: ParityCheckMatrix, trial: FrameTrial, dec_cfg: DecoderConfig,
              cor_cfg: CorrectorConfig | None, backend=None,
              decoder: LayeredDecoder | None = None) -> TrialRecord:
    """syndrome -> channel LLRs -> (two-stage) decode -> record."""
    if H.n_cols != trial.u.shape[0]:
        raise DimensionError(f"matrix has {H.n_cols} columns, frame has {trial.u.shape[0]}")
    t0 = time.perf_counter()
    s = syndrome(H, trial.u)
    llr = channel_llrs(trial.y, trial.snr, dec_cfg.arithmetic)
    if cor_cfg is None:
        dec = decoder if decoder is not None else LayeredDecoder(H, dec_cfg, backend=backend)
        out = dec.decode(s, llr)
    else:
        out = two_stage_decode(H, s, llr, dec_cfg, cor_cfg, backend=backend, decoder=decoder)
    stage1_matched = out.stage == 1 and out.syndrome_matched
    success = out.syndrome_matched
    undetected = bool(success and not np.array_equal(out.hard, trial.u))
    return TrialRecord(
        seed=trial.seed,
        snr=trial.snr,
        stage1_matched=stage1_matched,
        stage2_success=success,
        iterations_used=out.iterations_used,
        bits_fixed=out.correction.bits_fixed if out.correction is not None else 0,
        undetected_error=undetected,
        wall_time=time.perf_counter() - t0,
    )


def _run_block(H, snr, snr_idx, frame_lo, frame_hi, dec_cfg, cor_cfg, master_seed):
    decoder = LayeredDecoder(H, dec_cfg)
    records = []
    for frame_idx in range(frame_lo, frame_hi):
        seed = derive_seed(master_seed, snr_idx, frame_idx)
        trial = gen_frame(H.n_cols, snr, seed)
        rec = run_trial(H, trial, dec_cfg, cor_cfg, decoder=decoder)
        records.append((frame_idx, rec))
    return snr_idx, records


def run_sweep(H: ParityCheckMatrix, snr_list, frames_per_point: int,
              dec_cfg: DecoderConfig, cor_cfg: CorrectorConfig | None,
              master_seed: int, parallelism: int = 1,
              block_size: int = 25) -> FerCurve:
    """Seeded FER sweep; identical output for any parallelism level."""
    if frames_per_point < 1:
        raise ValueError("frames_per_point must be >= 1")
    snr_list = [float(x) for x in snr_list]
    tasks = []
    for snr_idx, snr in enumerate(snr_list):
        for lo in range(0, frames_per_point, block_size):
            hi = min(lo + block_size, frames_per_point)
            tasks.append((H, snr, snr_idx, lo, hi, dec_cfg, cor_cfg, master_seed))

    per_point: list[list] = [[None] * frames_per_point for _ in snr_list]
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            results = pool.map(_run_block_star, tasks)
            for snr_idx, records in results:
                for frame_idx, rec in records:
                    per_point[snr_idx][frame_idx] = rec
    else:
        for task in tasks:
            snr_idx, records = _run_block(*task)
            for frame_idx, rec in records:
                per_point[snr_idx][frame_idx] = rec

    curve = FerCurve()
    for snr_idx, snr in enumerate(snr_list):
        recs = per_point[snr_idx]
        curve.points.append(aggregate_point(snr, recs))
    return curve


def _run_block_star(args):
    return _run_block(*args)


def aggregate_point(snr: float, records) -> FerPoint:
    n = len(records)
    s1_fail = sum(1 for r in records if not r.stage1_matched)
    s2_fail = sum(1 for r in records if not r.stage2_success)
    lo, hi = wilson_interval(s2_fail, n)
    return FerPoint(
        snr=snr,
        frames=n,
        stage1_failures=s1_fail,
        stage2_failures=s2_fail,
        fer_stage1=s1_fail / n,
        fer_stage2=s2_fail / n,
        ci_lo=lo,
        ci_hi=hi,
        mean_iters=sum(r.iterations_used for r in records) / n,
        mean_bits_fixed=sum(r.bits_fixed for r in records) / n,
        undetected=sum(1 for r in records if r.undetected_error),
    )


def curve_to_csv(curve: FerCurve) -> str:
    """Deterministic CSV text (shortest round-trip float formatting)."""
    lines = [CSV_HEADER]
    for p in curve.points:
        lines.append(
            f"{p.snr!r},{p.frames},{p.stage1_failures},{p.stage2_failures},"
            f"{p.fer_stage1!r},{p.fer_stage2!r},{p.ci_lo!r},{p.ci_hi!r},"
            f"{p.mean_iters!r},{p.mean_bits_fixed!r},{p.undetected}"
        )
    return "\n".join(lines) + "\n"
