"""Command-line harness.

Subcommands: ``sweep`` (seeded FER sweeps from a config file), ``skr``
(finite-size key-rate optimization from an FER-curve CSV), ``gen-code``
(PEG construction from a degree-distribution file), ``throughput``
(hardware-style throughput estimate and eraser budget), ``decode``
(single-frame debug with a per-iteration trace).

Exit codes: 0 success, 1 usage/config error, 2 runtime/data error.
The default output directory is the ``RECONLAB_OUTDIR`` environment
variable when set.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, codes, kernels, simulate, skr as skrmod
from .config import ExperimentConfig, load_experiment
from .corrector import CorrectorConfig, two_stage_decode
from .decoder import DecoderConfig, LayeredDecoder, channel_llrs
from .errors import ConfigError, ReconError
from .fixedpoint import parse_format


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_json(path: Path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _out_dir(flag_value: str | None, cfg_value: str | None, fallback: str) -> Path:
    if flag_value:
        return Path(flag_value)
    if cfg_value:
        return Path(cfg_value)
    base = os.environ.get("RECONLAB_OUTDIR")
    return Path(base) / fallback if base else Path(fallback)


def _load_code(exp: ExperimentConfig) -> codes.ParityCheckMatrix:
    if exp.alist_path is not None:
        try:
            text = Path(exp.alist_path).read_text()
        except OSError as e:
            raise ReconError(f"cannot read code file {exp.alist_path}: {e}") from None
        return codes.load_alist(text)
    try:
        dist_text = Path(exp.dist_path).read_text()
    except OSError as e:
        raise ReconError(f"cannot read distribution file {exp.dist_path}: {e}") from None
    dist = codes.parse_dist_text(dist_text)
    return codes.build_peg(dist, exp.code_n, exp.code_seed)


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def cmd_sweep(args) -> int:
    exp = load_experiment(args.config, args.set or [])
    if args.delta is not None or args.max_peel_rounds is not None:
        for arm in exp.arms:
            if arm.cor_cfg is not None:
                if args.delta is not None:
                    arm.cor_cfg = CorrectorConfig(
                        delta=args.delta, max_peel_rounds=arm.cor_cfg.max_peel_rounds)
                if args.max_peel_rounds is not None:
                    arm.cor_cfg = CorrectorConfig(
                        delta=arm.cor_cfg.delta, max_peel_rounds=args.max_peel_rounds)
    H = _load_code(exp)
    out_dir = _out_dir(args.out, exp.out_dir, "sweep-out")
    out_dir.mkdir(parents=True, exist_ok=True)

    combined = ["arm," + simulate.CSV_HEADER + ",recovery_frac"]
    summary_arms = {}
    timing = {}
    outputs = []
    for arm in exp.arms:
        t0 = time.perf_counter()
        curve = simulate.run_sweep(
            H, exp.snr_list, exp.frames, arm.dec_cfg, arm.cor_cfg,
            exp.master_seed, exp.parallelism,
        )
        elapsed = time.perf_counter() - t0
        csv_text = simulate.curve_to_csv(curve)
        curve_path = out_dir / f"curve_{arm.name}.csv"
        curve_path.write_text(csv_text)
        outputs.append(curve_path)

        points = []
        for p in curve.points:
            recovered = p.stage1_failures - p.stage2_failures
            frac = recovered / p.stage1_failures if p.stage1_failures else ""
            combined.append(
                f"{arm.name},{p.snr!r},{p.frames},{p.stage1_failures},{p.stage2_failures},"
                f"{p.fer_stage1!r},{p.fer_stage2!r},{p.ci_lo!r},{p.ci_hi!r},"
                f"{p.mean_iters!r},{p.mean_bits_fixed!r},{p.undetected},"
                + (f"{frac!r}" if frac != "" else "")
            )
            points.append({
                "snr": p.snr, "frames": p.frames,
                "stage1_failures": p.stage1_failures, "stage2_failures": p.stage2_failures,
                "fer_stage1": p.fer_stage1, "fer_stage2": p.fer_stage2,
                "ci_lo": p.ci_lo, "ci_hi": p.ci_hi,
                "mean_iters": p.mean_iters, "mean_bits_fixed": p.mean_bits_fixed,
                "undetected": p.undetected,
                "recovery_frac": frac if frac != "" else None,
            })
        summary_arms[arm.name] = {
            "arithmetic": str(arm.dec_cfg.arithmetic) if arm.dec_cfg.arithmetic else "float",
            "cnu": arm.dec_cfg.resolved_cnu(),
            "t_max": arm.dec_cfg.t_max,
            "two_stage": arm.cor_cfg is not None,
            "delta": arm.cor_cfg.delta if arm.cor_cfg else None,
            "points": points,
        }
        # measured software throughput; hardware estimates come from `throughput`
        timing[arm.name] = {
            "wall_seconds": elapsed,
            "measured_software_mbps":
                exp.frames * len(exp.snr_list) * H.n_cols / elapsed / 1e6,
        }

    sweep_path = out_dir / "sweep.csv"
    sweep_path.write_text("\n".join(combined) + "\n")
    outputs.append(sweep_path)

    summary_path = out_dir / "summary.json"
    _write_json(summary_path, {
        "tool": "reconlab",
        "version": __version__,
        "kernel_backend": kernels.backend_name(kernels.get_backend()),
        "master_seed": exp.master_seed,
        "config": exp.raw,
        "code": {"n_rows": H.n_rows, "n_cols": H.n_cols, "n_edges": H.n_edges,
                 "rate": H.rate},
        "arms": summary_arms,
    })
    outputs.append(summary_path)

    timing_path = out_dir / "timing.json"
    _write_json(timing_path, timing)

    _write_json(out_dir / "manifest.json", {
        "tool": "reconlab",
        "version": __version__,
        "master_seed": exp.master_seed,
        "config": exp.raw,
        "checksums": {p.name: _sha256(p) for p in outputs},
        "unchecked": ["timing.json"],  # wall-clock data, not reproducible
    })
    print(f"wrote {len(outputs) + 2} files to {out_dir}")
    return 0


# ---------------------------------------------------------------------------
# skr
# ---------------------------------------------------------------------------

def _load_fer_points(path: str, column: str | None):
    try:
        lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    except OSError as e:
        raise ReconError(f"cannot read {path}: {e}") from None
    if not lines:
        raise ReconError(f"{path}: empty CSV")
    header = [h.strip() for h in lines[0].split(",")]
    if "snr" not in header:
        raise ReconError(f"{path}: no 'snr' column in header {header}")
    if column is None:
        for cand in ("fer", "fer2", "fer1"):
            if cand in header:
                column = cand
                break
        else:
            raise ReconError(f"{path}: no fer/fer2/fer1 column in header {header}")
    elif column not in header:
        raise ReconError(f"{path}: no {column!r} column in header {header}")
    i_snr, i_fer = header.index("snr"), header.index(column)
    points = []
    for lineno, ln in enumerate(lines[1:], start=2):
        fields = ln.split(",")
        try:
            points.append((float(fields[i_snr]), float(fields[i_fer])))
        except (ValueError, IndexError):
            raise ReconError(f"{path}: bad row at line {lineno}: {ln!r}") from None
    if len(points) < 2:
        raise ReconError(f"{path}: need at least 2 data rows")
    return points


def cmd_skr(args) -> int:
    p = skrmod.SystemParams(
        distance_km=args.distance,
        code_rate=args.rate,
        excess_noise=args.excess_noise,
        electronic_noise=args.electronic_noise,
        detector_efficiency=args.detector_efficiency,
        attenuation_db_km=args.attenuation,
    )
    q = skrmod.SecurityParams(
        d=args.d, eps_s=args.eps_s, eps_h=args.eps_h,
        block_size=args.block_size,
        key_signals=args.key_signals,
    )
    va_range = (args.va_min, args.va_max)
    if args.compare:
        cand_csv, ref_csv = args.compare
        ref = skrmod.optimize_va(p, q, skrmod.fit_fer(_load_fer_points(ref_csv, args.fer_column)),
                                 va_range, args.grid_points)
        res = skrmod.optimize_va(p, q, skrmod.fit_fer(_load_fer_points(cand_csv, args.fer_column)),
                                 va_range, args.grid_points, reference=ref)
        payload = {
            "params": {"system": vars(p), "security": vars(q)},
            "result": res.to_dict(),
            "reference": ref.to_dict(),
            "gain_vs_reference": res.gain_vs_reference,
        }
    else:
        if not args.fer_csv:
            raise ConfigError("an FER-curve CSV (or --compare A B) is required")
        res = skrmod.optimize_va(p, q, skrmod.fit_fer(_load_fer_points(args.fer_csv, args.fer_column)),
                                 va_range, args.grid_points)
        payload = {
            "params": {"system": vars(p), "security": vars(q)},
            "result": res.to_dict(),
        }
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


# ---------------------------------------------------------------------------
# gen-code / throughput / decode
# ---------------------------------------------------------------------------

def cmd_gen_code(args) -> int:
    try:
        dist_text = Path(args.dist).read_text()
    except OSError as e:
        raise ReconError(f"cannot read distribution file {args.dist}: {e}") from None
    dist = codes.parse_dist_text(dist_text)
    H = codes.build_peg(dist, args.n, args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(codes.save_alist(H))
    _write_json(out.with_suffix(out.suffix + ".manifest.json"), {
        "tool": "reconlab",
        "version": __version__,
        "seed": args.seed,
        "n_cols": H.n_cols,
        "n_rows": H.n_rows,
        "n_edges": H.n_edges,
        "rate": H.rate,
        "checksums": {out.name: _sha256(out)},
    })
    print(f"wrote {out} ({H.n_rows}x{H.n_cols}, {H.n_edges} edges, rate {H.rate:.4f})")
    return 0


def cmd_throughput(args) -> int:
    per_engine = skrmod.throughput(args.f_clock, args.n_ldpc, args.cycles_per_iter, args.t_max)
    budget = skrmod.eraser_budget(args.eraser_cost, args.engines, args.t_max)
    report = {
        "per_engine_bps": per_engine,
        "per_engine_mbps": per_engine / 1e6,
        "engines": args.engines,
        "total_bps": per_engine * args.engines,
        "total_mbps": per_engine * args.engines / 1e6,
        "eraser_budget": budget,
        "note": "hardware estimate from the clock model; software-measured Mbps "
                "are reported separately by `sweep` in timing.json",
    }
    if args.skr_per_pulse is not None:
        report["realtime_skr_bps"] = skrmod.realtime_skr(
            per_engine * args.engines, args.skr_per_pulse)
        report["realtime_skr_mbps"] = report["realtime_skr_bps"] / 1e6
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def cmd_decode(args) -> int:
    try:
        H = codes.load_alist(Path(args.alist).read_text())
    except OSError as e:
        raise ReconError(f"cannot read code file {args.alist}: {e}") from None
    fmt = parse_format(args.arithmetic)
    dec_cfg = DecoderConfig(t_max=args.t_max, arithmetic=fmt,
                            cnu_kind=None if args.cnu == "auto" else args.cnu,
                            nms_factor=args.nms_factor)
    trial = simulate.gen_frame(H.n_cols, args.snr, args.seed)
    s = codes.syndrome(H, trial.u)
    llr = channel_llrs(trial.y, args.snr, fmt)
    decoder = LayeredDecoder(H, dec_cfg)
    trace: list = []
    out = decoder.decode(s, llr, trace=trace)
    for entry in trace:
        print(f"iter {entry['iteration']:3d}: unsatisfied {entry['unsatisfied_checks']:5d}  "
              f"min|LLR| {entry['min_reliability']:10.4f}  mean|LLR| {entry['mean_reliability']:10.4f}")
    correction = None
    if not out.syndrome_matched and args.two_stage:
        from .corrector import classify, peel
        cor_cfg = CorrectorConfig(delta=args.delta, max_peel_rounds=args.max_peel_rounds)
        e, ebar = classify(out.reliabilities, cor_cfg.delta)
        peel_trace: list = []
        correction = peel(H, out.hard, e, ebar, s, cor_cfg, trace=peel_trace)
        print(f"stage 2: |e| = {len(e)}, peeled {correction.bits_fixed} bits in "
              f"{correction.peel_rounds} rounds, residual suspects {correction.residual_suspects}")
        for row, col, value in peel_trace[:args.trace_assignments]:
            print(f"  row {row} forces bit {col} = {value}")
        if len(peel_trace) > args.trace_assignments:
            print(f"  ... {len(peel_trace) - args.trace_assignments} more assignments")
        out.stage = 2
        out.hard = correction.corrected
        out.syndrome_matched = correction.success
    result = {
        "stage": out.stage,
        "syndrome_matched": out.syndrome_matched,
        "iterations_used": out.iterations_used,
        "bit_errors_vs_truth": int(np.count_nonzero(out.hard != trial.u)),
        "bits_fixed": correction.bits_fixed if correction else 0,
        "undetected_error": bool(out.syndrome_matched
                                 and np.count_nonzero(out.hard != trial.u)),
    }
    print(json.dumps(result, indent=2, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="reconlab", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run a seeded FER sweep from a config file")
    p_sweep.add_argument("config", help="flat key=value config file")
    p_sweep.add_argument("--set", action="append", metavar="KEY=VALUE",
                         help="override a config entry (repeatable)")
    p_sweep.add_argument("--out", help="output directory (overrides out.dir)")
    p_sweep.add_argument("--delta", type=float, help="override corrector delta on all arms")
    p_sweep.add_argument("--max-peel-rounds", type=int, help="override peel safety cap")
    p_sweep.set_defaults(func=cmd_sweep)

    p_skr = sub.add_parser("skr", help="optimize the finite-size key rate from an FER CSV")
    p_skr.add_argument("fer_csv", nargs="?", help="CSV with snr and fer columns")
    p_skr.add_argument("--compare", nargs=2, metavar=("CANDIDATE", "REFERENCE"),
                       help="two CSVs; emits the candidate/reference skr ratio")
    p_skr.add_argument("--fer-column", help="CSV column to use (default: fer, fer2, fer1)")
    p_skr.add_argument("--rate", type=float, required=True, help="code rate R")
    p_skr.add_argument("--distance", type=float, required=True, help="fiber length in km")
    p_skr.add_argument("--excess-noise", type=float, default=0.005)
    p_skr.add_argument("--electronic-noise", type=float, default=0.041)
    p_skr.add_argument("--detector-efficiency", type=float, default=0.606)
    p_skr.add_argument("--attenuation", type=float, default=0.2, help="dB/km")
    p_skr.add_argument("--d", type=int, default=32, help="effective alphabet size")
    p_skr.add_argument("--eps-s", type=float, default=1e-10)
    p_skr.add_argument("--eps-h", type=float, default=1e-10)
    p_skr.add_argument("--block-size", type=float, default=1e12, help="N")
    p_skr.add_argument("--key-signals", type=float, default=None, help="K (default N/2)")
    p_skr.add_argument("--va-min", type=float, default=0.5)
    p_skr.add_argument("--va-max", type=float, default=20.0)
    p_skr.add_argument("--grid-points", type=int, default=2000)
    p_skr.add_argument("--out", help="also write the JSON result here")
    p_skr.set_defaults(func=cmd_skr)

    p_gen = sub.add_parser("gen-code", help="build a PEG code from a degree distribution")
    p_gen.add_argument("dist", help="distribution file (col/row degree counts)")
    p_gen.add_argument("--n", type=int, required=True, help="code length (columns)")
    p_gen.add_argument("--seed", type=int, default=1)
    p_gen.add_argument("--out", required=True, help="output alist path")
    p_gen.set_defaults(func=cmd_gen_code)

    p_thr = sub.add_parser("throughput", help="clock-model throughput and eraser budget")
    p_thr.add_argument("--f-clock", type=float, required=True, help="FPGA clock in Hz")
    p_thr.add_argument("--n-ldpc", type=int, required=True, help="code length")
    p_thr.add_argument("--cycles-per-iter", type=float, required=True,
                       help="clock cycles per decoding iteration")
    p_thr.add_argument("--t-max", type=int, required=True)
    p_thr.add_argument("--engines", type=int, default=1, help="parallel decoder engines")
    p_thr.add_argument("--eraser-cost", type=float, default=2.4,
                       help="stage-2 eraser cost in equivalent iterations")
    p_thr.add_argument("--skr-per-pulse", type=float, default=None,
                       help="multiply throughput by this key rate per pulse")
    p_thr.set_defaults(func=cmd_throughput)

    p_dec = sub.add_parser("decode", help="decode one seeded frame with a full trace")
    p_dec.add_argument("--alist", required=True)
    p_dec.add_argument("--snr", type=float, required=True, help="linear snr")
    p_dec.add_argument("--seed", type=int, default=1)
    p_dec.add_argument("--arithmetic", default="float", help="float or fixed:w=10,f=5")
    p_dec.add_argument("--t-max", type=int, default=15)
    p_dec.add_argument("--cnu", default="auto",
                       choices=["auto", "sum-product", "min-sum", "normalized-min-sum"])
    p_dec.add_argument("--nms-factor", type=float, default=0.75)
    p_dec.add_argument("--two-stage", action="store_true")
    p_dec.add_argument("--delta", type=float, default=165.0)
    p_dec.add_argument("--max-peel-rounds", type=int, default=None)
    p_dec.add_argument("--trace-assignments", type=int, default=10)
    p_dec.set_defaults(func=cmd_decode)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    except ReconError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
