"""Composable finite-size secret-key-rate model and throughput estimator.

The Gaussian no-switching (heterodyne) protocol with trusted detector noise:
with V = V_A + 1, transmittance S, channel noise chi_line = 1/S - 1 + eps,
detector noise chi_het = (2 - eta + 2*v_el)/eta and total noise
chi_tot = chi_line + chi_het/S, the per-quadrature SNR is V_A/(1 + chi_tot),
I_AB = log2(1 + snr) (both quadratures), and the Holevo bound chi_BE follows
from the four symplectic eigenvalues of the Gaussian state. The finite-size
key rate per pulse is

    skr = (K/N) * p_ec * (beta*I_AB - chi_BE - Delta_aep/sqrt(K) + theta/K)

with p_ec = 1 - FER, clamped at zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ModelDomainError

LN2 = math.log(2.0)

#: FER values are floored here before fitting in log10 space.
FER_FLOOR = 1e-12


@dataclass
class SystemParams:
    """Channel and detector parameters (shot-noise units; alpha in dB/km)."""

    distance_km: float
    code_rate: float
    excess_noise: float = 0.005
    electronic_noise: float = 0.041
    detector_efficiency: float = 0.606
    attenuation_db_km: float = 0.2

    def __post_init__(self):
        if not 0 < self.detector_efficiency <= 1:
            raise ValueError("detector efficiency must be in (0, 1]")
        if self.excess_noise < 0 or self.electronic_noise < 0:
            raise ValueError("noise parameters must be non-negative")
        if self.attenuation_db_km <= 0:
            raise ValueError("attenuation must be positive")
        if self.distance_km < 0:
            raise ValueError("distance must be non-negative")
        if not 0 < self.code_rate < 1:
            raise ValueError("code rate must be in (0, 1)")


@dataclass
class SecurityParams:
    """Composable-security parameters: alphabet size d, smoothing/hashing
    epsilons, block size N and key signals K."""

    d: int = 32
    eps_s: float = 1e-10
    eps_h: float = 1e-10
    block_size: float = 1e12
    key_signals: float | None = None  # default N/2

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("alphabet size d must be >= 2")
        for name in ("eps_s", "eps_h"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must be in (0, 1)")
        if self.key_signals is None:
            self.key_signals = self.block_size / 2
        if not 1 <= self.key_signals <= self.block_size:
            raise ValueError("need 1 <= K <= N")


@dataclass
class SkrResult:
    va_opt: float
    snr_opt: float
    fer_at_opt: float
    beta: float
    i_ab: float
    chi_be: float
    skr: float
    gain_vs_reference: float | None = None
    warnings: list[str] = field(default_factory=list)
    certificate: tuple | None = None  # (va_grid, skr_grid) evaluated by the optimizer

    def to_dict(self):
        d = {
            "va_opt": self.va_opt,
            "snr_opt": self.snr_opt,
            "fer_at_opt": self.fer_at_opt,
            "beta": self.beta,
            "i_ab": self.i_ab,
            "chi_be": self.chi_be,
            "skr": self.skr,
        }
        if self.gain_vs_reference is not None:
            d["gain_vs_reference"] = self.gain_vs_reference
        if self.warnings:
            d["warnings"] = list(self.warnings)
        return d


def transmittance(alpha_db_km: float, distance_km: float) -> float:
    """S = 10^(-alpha*L/10)."""
    if distance_km < 0:
        raise ValueError("distance must be non-negative")
    return 10.0 ** (-alpha_db_km * distance_km / 10.0)


def _noise_terms(p: SystemParams):
    S = transmittance(p.attenuation_db_km, p.distance_km)
    chi_line = 1.0 / S - 1.0 + p.excess_noise
    chi_het = (2.0 - p.detector_efficiency + 2.0 * p.electronic_noise) / p.detector_efficiency
    chi_tot = chi_line + chi_het / S
    return S, chi_line, chi_het, chi_tot


def channel_snr(va, p: SystemParams):
    """Per-quadrature SNR at modulation variance va (SNU)."""
    va = np.asarray(va, dtype=np.float64)
    if np.any(va <= 0):
        raise ValueError("V_A must be positive")
    _, _, _, chi_tot = _noise_terms(p)
    out = va / (1.0 + chi_tot)
    return float(out) if out.ndim == 0 else out


def mutual_information(va, p: SystemParams):
    snr = channel_snr(va, p)
    return np.log2(1.0 + snr) if np.ndim(snr) else float(np.log2(1.0 + snr))


def _g_entropy(x):
    """G(x) = (x+1)log2(x+1) - x log2 x, G(0) = 0, series below 5e-10."""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    tiny = (x > 0.0) & (x < 5e-10)
    if np.any(tiny):
        xt = x[tiny]
        out[tiny] = (xt - xt * np.log(xt) + 0.5 * xt * xt) / LN2
    rest = x >= 5e-10
    if np.any(rest):
        xr = x[rest]
        out[rest] = (xr + 1.0) * np.log2(xr + 1.0) - xr * np.log2(xr)
    return out


def _symplectic_pair(a, b, what: str):
    """Eigenvalue pair from lambda^2 = (a +/- sqrt(a^2 - 4b))/2."""
    disc = a * a - 4.0 * b
    bad = disc < -1e-9 * np.maximum(1.0, a * a)
    if np.any(bad):
        raise ModelDomainError(f"negative discriminant in {what} eigenvalues")
    disc = np.maximum(disc, 0.0)
    r = np.sqrt(disc)
    lam_sq_hi = 0.5 * (a + r)
    lam_sq_lo = 0.5 * (a - r)
    if np.any(lam_sq_lo < -1e-9):
        raise ModelDomainError(f"negative squared eigenvalue in {what}")
    return np.sqrt(np.maximum(lam_sq_hi, 0.0)), np.sqrt(np.maximum(lam_sq_lo, 0.0))


def _check_lambda(lam, what: str):
    if np.any(lam < 1.0 - 1e-9):
        raise ModelDomainError(f"symplectic eigenvalue < 1 in {what}: min {float(np.min(lam))}")
    return np.maximum(lam, 1.0)


def holevo_bound(va, p: SystemParams):
    """Eve's Holevo information chi_BE at modulation variance va."""
    va_arr = np.asarray(va, dtype=np.float64)
    if np.any(va_arr <= 0):
        raise ValueError("V_A must be positive")
    S, chi_line, chi_het, chi_tot = _noise_terms(p)
    V = va_arr + 1.0

    A = V * V * (1.0 - 2.0 * S) + 2.0 * S + S * S * (V + chi_line) ** 2
    B = (S * (V * chi_line + 1.0)) ** 2
    lam1, lam2 = _symplectic_pair(A, B, "channel state")

    sqrtB = np.sqrt(B)
    denom = S * (V + chi_tot)
    C = (A * chi_het**2 + B + 1.0
         + 2.0 * chi_het * (V * sqrtB + S * (V + chi_line))
         + 2.0 * S * (V * V - 1.0)) / (denom * denom)
    D = ((V + sqrtB * chi_het) / denom) ** 2
    lam3, lam4 = _symplectic_pair(C, D, "conditional state")

    lam1 = _check_lambda(lam1, "channel state")
    lam2 = _check_lambda(lam2, "channel state")
    lam3 = _check_lambda(lam3, "conditional state")
    lam4 = _check_lambda(lam4, "conditional state")

    chi = (_g_entropy((lam1 - 1.0) / 2.0) + _g_entropy((lam2 - 1.0) / 2.0)
           - _g_entropy((lam3 - 1.0) / 2.0) - _g_entropy((lam4 - 1.0) / 2.0))
    chi = np.maximum(chi, 0.0)  # rounding guard; the model keeps chi_BE >= 0
    return float(chi) if chi.ndim == 0 else chi


def beta(code_rate: float, snr) -> float:
    """Reconciliation efficiency R / (0.5*log2(1 + snr))."""
    snr_arr = np.asarray(snr, dtype=np.float64)
    if np.any(snr_arr <= 0):
        raise ValueError("snr must be positive")
    out = code_rate / (0.5 * np.log2(1.0 + snr_arr))
    return float(out) if out.ndim == 0 else out


def delta_aep(d: int, p_ec, eps_s: float):
    """Asymptotic-equipartition penalty 4*log2(sqrt(d)+2)*sqrt(log2(18/(p_ec^2 eps_s^4)))."""
    if d < 2:
        raise ValueError("d must be >= 2")
    if not 0 < eps_s < 1:
        raise ValueError("eps_s must be in (0, 1)")
    p_ec_arr = np.asarray(p_ec, dtype=np.float64)
    if np.any(p_ec_arr <= 0) or np.any(p_ec_arr > 1):
        raise ValueError("p_ec must be in (0, 1]")
    arg = np.log2(18.0 / (p_ec_arr**2 * eps_s**4))
    if np.any(arg <= 0):
        raise ValueError("log argument must be positive")
    out = 4.0 * math.log2(math.sqrt(d) + 2.0) * np.sqrt(arg)
    return float(out) if out.ndim == 0 else out


def theta(p_ec, eps_s: float, eps_h: float):
    """theta = log2[p_ec (1 - eps_s^2/3)] + 2 log2(sqrt(2) eps_h)."""
    p_ec_arr = np.asarray(p_ec, dtype=np.float64)
    if np.any(p_ec_arr <= 0):
        raise ValueError("p_ec must be positive")
    if not 0 < eps_s < 1 or not 0 < eps_h < 1:
        raise ValueError("eps_s and eps_h must be in (0, 1)")
    out = np.log2(p_ec_arr * (1.0 - eps_s**2 / 3.0)) + 2.0 * math.log2(math.sqrt(2.0) * eps_h)
    return float(out) if out.ndim == 0 else out


def skr_finite(fer, snr, va, p: SystemParams, q: SecurityParams):
    """Finite-size key rate in bits per pulse; fer = 1 short-circuits to 0."""
    fer_arr = np.asarray(fer, dtype=np.float64)
    if np.any(fer_arr < 0) or np.any(fer_arr > 1):
        raise ValueError("fer must be in [0, 1]")
    scalar = fer_arr.ndim == 0 and np.ndim(snr) == 0 and np.ndim(va) == 0
    fer_arr = np.atleast_1d(fer_arr)
    snr_arr = np.atleast_1d(np.asarray(snr, dtype=np.float64))
    va_arr = np.atleast_1d(np.asarray(va, dtype=np.float64))
    fer_arr, snr_arr, va_arr = np.broadcast_arrays(fer_arr, snr_arr, va_arr)

    p_ec = 1.0 - fer_arr
    alive = p_ec > 0.0
    out = np.zeros(fer_arr.shape, dtype=np.float64)
    if np.any(alive):
        pe = p_ec[alive]
        sn = snr_arr[alive]
        va_a = va_arr[alive]
        K = q.key_signals
        N = q.block_size
        b = beta(p.code_rate, sn)
        i_ab = np.log2(1.0 + sn)
        chi = holevo_bound(va_a, p)
        inner = (b * i_ab - chi - delta_aep(q.d, pe, q.eps_s) / math.sqrt(K)
                 + theta(pe, q.eps_s, q.eps_h) / K)
        out[alive] = np.maximum(0.0, (K / N) * pe * inner)
    return float(out[0]) if scalar else out


@dataclass
class FerFit:
    """Monotone non-increasing FER-vs-SNR interpolant.

    Piecewise-cubic (PCHIP) in log10(fer) after a pool-adjacent-violators
    pass enforces non-increasing order. Queries below the sampled range
    return 1 (conservative); above it, the smallest observed fer.
    """

    snr: np.ndarray
    fer: np.ndarray
    _interp: PchipInterpolator = field(repr=False)
    fer_min: float

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.empty_like(x)
        below = x < self.snr[0]
        above = x > self.snr[-1]
        inside = ~below & ~above
        out[below] = 1.0
        out[above] = self.fer_min
        if np.any(inside):
            out[inside] = np.clip(10.0 ** self._interp(x[inside]), 0.0, 1.0)
        return float(out[0]) if scalar else out


def _pav_non_increasing(values, weights):
    """Pool adjacent violators for a non-increasing target (averages in place)."""
    vals = list(map(float, values))
    wts = list(map(float, weights))
    blocks = []  # (value, weight, count)
    for v, w in zip(vals, wts):
        blocks.append([v, w, 1])
        while len(blocks) >= 2 and blocks[-2][0] < blocks[-1][0]:
            v2, w2, c2 = blocks.pop()
            v1, w1, c1 = blocks.pop()
            merged = (v1 * w1 + v2 * w2) / (w1 + w2)
            blocks.append([merged, w1 + w2, c1 + c2])
    out = []
    for v, _, c in blocks:
        out.extend([v] * c)
    return np.asarray(out)


def fit_fer(points) -> FerFit:
    """Build a FerFit from (snr, fer) samples (>= 2 distinct snr values)."""
    pts = sorted((float(s), float(f)) for s, f in points)
    if not pts:
        raise ValueError("need at least 2 points")
    # merge exact-duplicate snr values by averaging log10(fer)
    merged: list[tuple[float, float, int]] = []
    for s, f in pts:
        if f < 0 or f > 1:
            raise ValueError(f"fer {f} outside [0, 1]")
        lf = math.log10(max(f, FER_FLOOR))
        if merged and merged[-1][0] == s:
            s0, lf0, c0 = merged[-1]
            merged[-1] = (s0, (lf0 * c0 + lf) / (c0 + 1), c0 + 1)
        else:
            merged.append((s, lf, 1))
    if len(merged) < 2:
        raise ValueError("need at least 2 points with distinct snr")
    snr = np.array([m[0] for m in merged])
    logf = _pav_non_increasing([m[1] for m in merged], [m[2] for m in merged])
    interp = PchipInterpolator(snr, logf, extrapolate=False)
    fer = np.minimum(10.0**logf, 1.0)
    return FerFit(snr=snr, fer=fer, _interp=interp, fer_min=float(fer.min()))


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(fun, a: float, b: float, iters: int = 90):
    """Deterministic golden-section maximization on [a, b]."""
    h = b - a
    c = b - _INV_PHI * h
    d = a + _INV_PHI * h
    fc, fd = fun(c), fun(d)
    best_x, best_f = (c, fc) if fc >= fd else (d, fd)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            h = b - a
            c = b - _INV_PHI * h
            fc = fun(c)
            if fc > best_f:
                best_x, best_f = c, fc
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + _INV_PHI * h
            fd = fun(d)
            if fd > best_f:
                best_x, best_f = d, fd
        if h <= 1e-13 * max(1.0, abs(b)):
            break
    return best_x, best_f


def optimize_va(p: SystemParams, q: SecurityParams, fit: FerFit,
                va_range: tuple[float, float] = (0.5, 20.0),
                grid_points: int = 2000,
                reference: SkrResult | None = None) -> SkrResult:
    """Maximize skr over V_A: dense grid, then golden-section refinement
    around the best cell. The evaluated grid is kept as a certificate."""
    lo, hi = float(va_range[0]), float(va_range[1])
    if not (0 < lo < hi):
        raise ValueError(f"va_range must be positive and ordered, got {va_range}")
    if grid_points < 3:
        raise ValueError("grid_points must be >= 3")

    vas = np.linspace(lo, hi, grid_points)
    snrs = channel_snr(vas, p)
    fers = fit(snrs)
    skrs = skr_finite(fers, snrs, vas, p, q)

    warnings = []
    if snrs[-1] < fit.snr[0] or snrs[0] > fit.snr[-1]:
        warnings.append(
            "fitted FER samples lie outside the achievable snr range; clamped fit in use"
        )

    i = int(np.argmax(skrs))
    a = vas[max(0, i - 1)]
    b = vas[min(grid_points - 1, i + 1)]

    def objective(va):
        snr = channel_snr(va, p)
        return skr_finite(fit(snr), snr, va, p, q)

    va_g, skr_g = _golden_max(objective, float(a), float(b))
    if skr_g >= skrs[i]:
        va_best = float(va_g)
    else:
        va_best = float(vas[i])

    snr_best = channel_snr(va_best, p)
    fer_best = fit(snr_best)
    skr_best = skr_finite(fer_best, snr_best, va_best, p, q)
    beta_best = beta(p.code_rate, snr_best)
    if beta_best > 1.0:
        warnings.append(f"reconciliation efficiency beta = {beta_best:.4f} exceeds 1")
    result = SkrResult(
        va_opt=va_best,
        snr_opt=float(snr_best),
        fer_at_opt=float(fer_best),
        beta=beta_best,
        i_ab=float(np.log2(1.0 + snr_best)),
        chi_be=float(holevo_bound(va_best, p)),
        skr=float(skr_best),
        warnings=warnings,
        certificate=(vas, skrs),
    )
    if reference is not None:
        result.gain_vs_reference = (
            result.skr / reference.skr if reference.skr > 0 else math.inf
        )
    return result


def throughput(f_clock_hz: float, n_ldpc: int, cycles_per_iteration: float,
               t_max: int) -> float:
    """Single-engine decoding throughput f_c * N / (D * t_max) in bits/s."""
    if min(f_clock_hz, n_ldpc, cycles_per_iteration, t_max) <= 0:
        raise ValueError("all throughput inputs must be positive")
    return f_clock_hz * n_ldpc / (cycles_per_iteration * t_max)


def eraser_budget(eraser_cost_iterations: float, engines: int, t_max: int) -> dict:
    """One eraser serves ``engines`` decoders iff cost*engines <= t_max."""
    if eraser_cost_iterations < 0 or engines < 1 or t_max < 1:
        raise ValueError("invalid eraser budget inputs")
    used = eraser_cost_iterations * engines
    return {
        "eraser_cost_iterations": eraser_cost_iterations,
        "engines": engines,
        "t_max": t_max,
        "used_iterations": used,
        "satisfied": used <= t_max,
    }


def realtime_skr(ec_throughput_bps: float, skr_per_pulse: float) -> float:
    """Real-time secret-key rate: error-correction throughput x key rate/pulse."""
    if ec_throughput_bps < 0 or skr_per_pulse < 0:
        raise ValueError("inputs must be non-negative")
    return ec_throughput_bps * skr_per_pulse
