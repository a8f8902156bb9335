#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times one layered iteration and a full frame decode for both arithmetic
modes on a generated code, then prints a comparison table. Run with
--quick for a smaller code / fewer repetitions.
"""

import argparse
import time

import numpy as np

from reconlab import codes, kernels, simulate
from reconlab.decoder import DecoderConfig, LayeredDecoder, channel_llrs
from reconlab.fixedpoint import W10
from reconlab.seeding import derive_seed


def time_decodes(H, backend, fmt, frames, snr, t_max):
    cfg = DecoderConfig(t_max=t_max, arithmetic=fmt)
    dec = LayeredDecoder(H, cfg, backend=backend)
    t0 = time.perf_counter()
    matched = 0
    for i in range(frames):
        trial = simulate.gen_frame(H.n_cols, snr, derive_seed(5, 0, i))
        s = codes.syndrome(H, trial.u)
        out = dec.decode(s, channel_llrs(trial.y, snr, fmt))
        matched += out.syndrome_matched
    dt = time.perf_counter() - t0
    return dt, matched


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true", help="smaller code, fewer frames")
    ap.add_argument("--snr", type=float, default=0.8)
    ap.add_argument("--t-max", type=int, default=15)
    args = ap.parse_args()

    n = 1200 if args.quick else 4000
    m = int(0.8 * n)
    frames_c = 20 if args.quick else 50
    frames_py = 2 if args.quick else 3

    # 3n column edges split over m rows as degrees 3 and 4
    rows4 = 3 * n - 3 * m
    dist = codes.DegreeDistribution(col_mult={3: n}, row_mult={3: m - rows4, 4: rows4})
    H = codes.build_peg(dist, n, seed=99, backend=kernels.get_backend("c")
                        if "c" in kernels.available_backends() else None)
    print(f"code: {H} (rate {H.rate:.2f}), snr {args.snr}, t_max {args.t_max}")
    print(f"{'backend':8s} {'mode':6s} {'frames':>6s} {'s/frame':>10s} {'Mbit/s':>8s}")

    results = {}
    for name, mod in sorted(kernels.available_backends().items()):
        frames = frames_c if name == "c" else frames_py
        for fmt, label in ((None, "float"), (W10, "fixed")):
            dt, matched = time_decodes(H, mod, fmt, frames, args.snr, args.t_max)
            per = dt / frames
            results[(name, label)] = per
            print(f"{name:8s} {label:6s} {frames:6d} {per:10.4f} {H.n_cols / per / 1e6:8.2f}"
                  f"   ({matched}/{frames} decoded)")

    for label in ("float", "fixed"):
        if ("c", label) in results and ("py", label) in results:
            speedup = results[("py", label)] / results[("c", label)]
            print(f"compiled speedup, {label} mode: {speedup:.0f}x")


if __name__ == "__main__":
    main()
