"""Stage one: layered belief-propagation decoding of a syndrome coset.

The decoder works directly on the target syndrome s: each check-node update
multiplies the sign of its outgoing messages by (-1)**s[m], so the channel
LLRs are used unmodified. Rows are processed in ascending index order within
each iteration and posteriors are updated in place (layered schedule).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .codes import ParityCheckMatrix, as_bits, syndrome
from .errors import DimensionError
from .fixedpoint import FixedFormat, quantize_array

CNU_KINDS = {
    "sum-product": 0,
    "min-sum": 1,
    "normalized-min-sum": 2,
}


@dataclass
class DecoderConfig:
    """Layered decoder knobs.

    ``cnu_kind=None`` resolves to the arithmetic's default: sum-product for
    float, normalized min-sum (factor 0.75) for fixed point. ``acc_bits``
    optionally widens the posterior accumulator beyond the message width.
    """

    t_max: int = 15
    arithmetic: FixedFormat | None = None
    cnu_kind: str | None = None
    nms_factor: float = 0.75
    early_stop: bool = True
    acc_bits: int | None = None

    def __post_init__(self):
        if self.t_max < 1:
            raise ValueError(f"t_max must be >= 1, got {self.t_max}")
        if self.cnu_kind is not None and self.cnu_kind not in CNU_KINDS:
            raise ValueError(f"unknown cnu_kind {self.cnu_kind!r}")
        if not 0.0 < self.nms_factor <= 1.0:
            raise ValueError(f"nms_factor must be in (0, 1], got {self.nms_factor}")
        if self.acc_bits is not None:
            if self.arithmetic is None:
                raise ValueError("acc_bits only applies to fixed-point arithmetic")
            if self.acc_bits < self.arithmetic.total_bits:
                raise ValueError("acc_bits must be >= the format width")

    @property
    def is_fixed(self) -> bool:
        return self.arithmetic is not None

    def resolved_cnu(self) -> str:
        if self.cnu_kind is not None:
            return self.cnu_kind
        return "normalized-min-sum" if self.is_fixed else "sum-product"


@dataclass
class LlrVector:
    """Per-symbol LLRs: float64 values, or int32 codes when fmt is set."""

    values: np.ndarray
    fmt: FixedFormat | None = None

    def __len__(self):
        return self.values.shape[0]


@dataclass
class DecodeOutcome:
    hard: np.ndarray
    reliabilities: np.ndarray
    iterations_used: int
    syndrome_matched: bool
    stage: int = 1
    correction: object | None = None  # CorrectionOutcome, set by two_stage_decode
    posterior: np.ndarray = field(default=None, repr=False)


def channel_llrs(y, snr: float, fmt: FixedFormat | None = None) -> LlrVector:
    """BIAWGN channel LLRs 2*snr*y (bit 0 -> +1, bit 1 -> -1, noise var 1/snr)."""
    if snr <= 0:
        raise ValueError(f"snr must be positive, got {snr}")
    llr = 2.0 * snr * np.asarray(y, dtype=np.float64)
    if fmt is None:
        return LlrVector(llr, None)
    return LlrVector(quantize_array(llr, fmt), fmt)


def hard_decision(llr) -> np.ndarray:
    """Bit = 1 when LLR <= 0, else 0 (zero maps to 1)."""
    values = llr.values if isinstance(llr, LlrVector) else np.asarray(llr)
    return (values <= 0).astype(np.uint8)


def reliability(llr) -> np.ndarray:
    """Elementwise |LLR| (integer codes stay integer in fixed mode)."""
    values = llr.values if isinstance(llr, LlrVector) else np.asarray(llr)
    return np.abs(values)


class LayeredDecoder:
    """Reusable decoder bound to one matrix and one configuration.

    Holds no per-frame state; distinct frames may be decoded concurrently
    from separate instances sharing the same (read-only) matrix.
    """

    def __init__(self, H: ParityCheckMatrix, cfg: DecoderConfig, backend=None):
        self.H = H
        self.cfg = cfg
        self.backend = backend if backend is not None else kernels.get_backend()
        self._cnu = CNU_KINDS[cfg.resolved_cnu()]
        if cfg.is_fixed:
            fmt = cfg.arithmetic
            self._qmsg = fmt.max_code
            acc = cfg.acc_bits if cfg.acc_bits is not None else fmt.total_bits
            self._qacc = (1 << (acc - 1)) - 1

    def decode(self, s, llr: LlrVector, trace=None) -> DecodeOutcome:
        """Run up to t_max layered iterations toward target syndrome s.

        ``trace``, if given, is a list receiving one dict per iteration with
        the unsatisfied-check count (debug aid; does not affect results).
        """
        H, cfg = self.H, self.cfg
        s = as_bits(s, H.n_rows)
        if len(llr) != H.n_cols:
            raise DimensionError(f"LLR length {len(llr)} != n_cols {H.n_cols}")
        fixed = cfg.is_fixed
        if fixed != (llr.fmt is not None):
            raise DimensionError("LLR arithmetic does not match decoder configuration")

        if fixed:
            post = np.array(llr.values, dtype=np.int32)
            msg = np.zeros(H.n_edges, dtype=np.int32)
        else:
            post = np.array(llr.values, dtype=np.float64)
            msg = np.zeros(H.n_edges, dtype=np.float64)

        iters = 0
        matched = self._syndrome_matches(s, post)
        if trace is not None:
            trace.append(self._trace_entry(0, s, post))
        if not (cfg.early_stop and matched):
            # without early_stop the decoder always runs all t_max layers
            matched = False
            while iters < cfg.t_max:
                self._iterate(s, post, msg)
                iters += 1
                if cfg.early_stop or trace is not None or iters == cfg.t_max:
                    matched = self._syndrome_matches(s, post)
                    if trace is not None:
                        trace.append(self._trace_entry(iters, s, post))
                if cfg.early_stop and matched:
                    break

        return DecodeOutcome(
            hard=hard_decision(post),
            reliabilities=np.abs(post),
            iterations_used=iters,
            syndrome_matched=bool(matched),
            stage=1,
            posterior=post,
        )

    def _iterate(self, s, post, msg):
        if self.cfg.is_fixed:
            self.backend.iterate_fixed(
                self.H.row_start, self.H.row_cols, s, post, msg,
                self._qmsg, self._qacc, self.cfg.arithmetic.frac_bits,
                self._cnu, self.cfg.nms_factor,
            )
        else:
            self.backend.iterate_float(
                self.H.row_start, self.H.row_cols, s, post, msg,
                self._cnu, self.cfg.nms_factor,
            )

    def _syndrome_matches(self, s, post) -> bool:
        return bool(np.array_equal(syndrome(self.H, hard_decision(post)), s))

    def _trace_entry(self, it, s, post):
        mism = int(np.count_nonzero(syndrome(self.H, hard_decision(post)) != s))
        rel = np.abs(post)
        return {
            "iteration": it,
            "unsatisfied_checks": mism,
            "min_reliability": float(rel.min()),
            "mean_reliability": float(rel.mean()),
        }


def decode(H: ParityCheckMatrix, s, llr: LlrVector, cfg: DecoderConfig,
           backend=None) -> DecodeOutcome:
    return LayeredDecoder(H, cfg, backend=backend).decode(s, llr)
