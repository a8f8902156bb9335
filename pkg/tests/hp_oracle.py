"""High-precision scalar oracle for the key-rate formulas.

A fully independent implementation on mpmath (60 significant digits),
written from the model definitions rather than from the package code.
Used by the acceptance suite to bound the double-precision error of
reconlab.skr.
"""

import mpmath as mp

mp.mp.dps = 60


def transmittance(alpha, L):
    return mp.power(10, -mp.mpf(alpha) * mp.mpf(L) / 10)


def noise_terms(eps, v_el, eta, alpha, L):
    S = transmittance(alpha, L)
    chi_line = 1 / S - 1 + mp.mpf(eps)
    chi_het = (2 - mp.mpf(eta) + 2 * mp.mpf(v_el)) / mp.mpf(eta)
    chi_tot = chi_line + chi_het / S
    return S, chi_line, chi_het, chi_tot


def channel_snr(va, eps, v_el, eta, alpha, L):
    _, _, _, chi_tot = noise_terms(eps, v_el, eta, alpha, L)
    return mp.mpf(va) / (1 + chi_tot)


def g_entropy(x):
    x = mp.mpf(x)
    if x <= 0:
        return mp.mpf(0)
    return (x + 1) * mp.log(x + 1, 2) - x * mp.log(x, 2)


def holevo_bound(va, eps, v_el, eta, alpha, L):
    S, chi_line, chi_het, chi_tot = noise_terms(eps, v_el, eta, alpha, L)
    V = mp.mpf(va) + 1
    A = V**2 * (1 - 2 * S) + 2 * S + S**2 * (V + chi_line) ** 2
    B = (S * (V * chi_line + 1)) ** 2
    lam1 = mp.sqrt((A + mp.sqrt(A**2 - 4 * B)) / 2)
    lam2 = mp.sqrt((A - mp.sqrt(A**2 - 4 * B)) / 2)
    sB = mp.sqrt(B)
    den = S * (V + chi_tot)
    C = (A * chi_het**2 + B + 1 + 2 * chi_het * (V * sB + S * (V + chi_line))
         + 2 * S * (V**2 - 1)) / den**2
    D = ((V + sB * chi_het) / den) ** 2
    lam3 = mp.sqrt((C + mp.sqrt(C**2 - 4 * D)) / 2)
    lam4 = mp.sqrt((C - mp.sqrt(C**2 - 4 * D)) / 2)
    chi = (g_entropy((lam1 - 1) / 2) + g_entropy((lam2 - 1) / 2)
           - g_entropy((lam3 - 1) / 2) - g_entropy((lam4 - 1) / 2))
    return max(chi, mp.mpf(0))


def beta(R, snr):
    return mp.mpf(R) / (mp.log(1 + mp.mpf(snr), 2) / 2)


def delta_aep(d, p_ec, eps_s):
    d, p_ec, eps_s = mp.mpf(d), mp.mpf(p_ec), mp.mpf(eps_s)
    return 4 * mp.log(mp.sqrt(d) + 2, 2) * mp.sqrt(mp.log(18 / (p_ec**2 * eps_s**4), 2))


def theta(p_ec, eps_s, eps_h):
    p_ec, eps_s, eps_h = mp.mpf(p_ec), mp.mpf(eps_s), mp.mpf(eps_h)
    return mp.log(p_ec * (1 - eps_s**2 / 3), 2) + 2 * mp.log(mp.sqrt(2) * eps_h, 2)


def skr_finite(fer, snr, va, R, eps, v_el, eta, alpha, L, d, eps_s, eps_h, N, K):
    p_ec = 1 - mp.mpf(fer)
    if p_ec <= 0:
        return mp.mpf(0)
    i_ab = mp.log(1 + mp.mpf(snr), 2)
    inner = (beta(R, snr) * i_ab
             - holevo_bound(va, eps, v_el, eta, alpha, L)
             - delta_aep(d, p_ec, eps_s) / mp.sqrt(mp.mpf(K))
             + theta(p_ec, eps_s, eps_h) / mp.mpf(K))
    return max(mp.mpf(0), (mp.mpf(K) / mp.mpf(N)) * p_ec * inner)
