"""Standalone reference evaluation of the Peplinski (1995) soil dielectric model.

Written as a literal transcription with scalar ``math`` so it shares no code
with the package.  Run it directly to print fixture values:

    python3 tests/oracles/peplinski_oracle.py
"""
import cmath
import math

EPS0 = 8.854187817e-12
C0 = 299792458.0
MU0 = 4e-7 * math.pi


def peplinski(mv, clay, sand, rho_b, rho_s, f_hz, temp_c=20.0):
    # water (Debye), temperature-dependent static permittivity and relaxation
    ew_inf = 4.9
    ew_0 = 88.045 - 0.4147 * temp_c + 6.295e-4 * temp_c**2 + 1.075e-5 * temp_c**3
    two_pi_tau = 1.1109e-10 - 3.824e-12 * temp_c + 6.938e-14 * temp_c**2 - 5.096e-16 * temp_c**3
    wt = f_hz * two_pi_tau
    sigma = 0.0467 + 0.2204 * rho_b - 0.4111 * sand + 0.6614 * clay
    efw_r = ew_inf + (ew_0 - ew_inf) / (1 + wt**2)
    efw_i = wt * (ew_0 - ew_inf) / (1 + wt**2) + sigma / (2 * math.pi * EPS0 * f_hz) * (rho_s - rho_b) / (rho_s * mv)

    alpha = 0.65
    beta_r = 1.2748 - 0.519 * sand - 0.152 * clay
    beta_i = 1.33797 - 0.603 * sand - 0.166 * clay
    eps_s = (1.01 + 0.44 * rho_s) ** 2 - 0.062

    er = (1 + rho_b / rho_s * (eps_s**alpha - 1) + mv**beta_r * efw_r**alpha - mv) ** (1 / alpha)
    er = 1.15 * er - 0.68
    ei = (mv**beta_i * efw_i**alpha) ** (1 / alpha)
    return er, ei


def propagation(er, ei, f_hz):
    # gamma = sqrt(j w mu (sigma + j w eps)) = sqrt(-w^2 mu eps0 (er - j ei))
    w = 2 * math.pi * f_hz
    g = cmath.sqrt(-(w**2) * MU0 * EPS0 * complex(er, -ei))
    if g.real < 0:
        g = -g
    return g.real, g.imag


def fresnel_loss_db(er, ei):
    """Normal-incidence power transmission, via wave impedances."""
    eta0 = math.sqrt(MU0 / EPS0)
    eta_s = eta0 / cmath.sqrt(complex(er, -ei))
    # air -> soil
    t = 2 * eta_s / (eta0 + eta_s)
    t_as = abs(t) ** 2 * (1 / eta_s.conjugate()).real / (1 / eta0)
    # soil -> air
    t = 2 * eta0 / (eta0 + eta_s)
    t_sa = abs(t) ** 2 * (1 / eta0) / (1 / eta_s.conjugate()).real
    return max(0.0, -10 * math.log10(t_as)), max(0.0, -10 * math.log10(t_sa))


def underground_db(a, b, d):
    if d == 0:
        return 0.0
    lam = 2 * math.pi / b
    return max(0.0, 20 * math.log10(4 * math.pi * d / lam)) + 8.686 * a * d


def aboveground_db(d, f_hz, gamma):
    lam = C0 / f_hz
    return max(0.0, 20 * math.log10(4 * math.pi / lam) + 10 * gamma * math.log10(d))


def composite_db(h, dep, x, f_hz, soil, direction, gamma=3.0):
    er, ei = peplinski(*soil, f_hz)
    a, b = propagation(er, ei, f_hz)
    d_ag = math.hypot(x, h)
    d_ug = dep
    dl, ul = fresnel_loss_db(er, ei)
    return aboveground_db(d_ag, f_hz, gamma) + underground_db(a, b, d_ug) + (dl if direction == "AG2UG" else ul)


def grid_powers(link, soil, h, dep, f_hz, x):
    """Tag and reader power (dBm) on an array of horizontal offsets, monostatic.

    ``link`` is a dict with keys p_t, g_t, g_r, g_tag, m, gamma.  Vectorised
    with numpy but re-derived from the scalar formulas above.
    """
    import numpy as np

    er, ei = peplinski(*soil, f_hz)
    a, b = propagation(er, ei, f_hz)
    dl_refr, ul_refr = fresnel_loss_db(er, ei)
    d_ag = np.hypot(x, h)
    d_ug = np.full_like(d_ag, dep)
    lam = C0 / f_hz
    ag = np.maximum(0.0, 20 * np.log10(4 * np.pi / lam) + 10 * link["gamma"] * np.log10(d_ag))
    ug = np.maximum(0.0, 20 * np.log10(2 * b * d_ug)) + 8.686 * a * d_ug
    tag = link["p_t"] + link["g_t"] + link["g_tag"] - (ag + ug + dl_refr)
    reader_gain = link["g_tag"] + link["g_r"] + 10 * np.log10(link["m"])
    return tag, ag + ug + ul_refr, reader_gain


def grid_scan(power, threshold, step=1e-3):
    """Last grid offset (m) whose power still meets ``threshold``; None if none do."""
    import numpy as np

    ok = np.flatnonzero(power >= threshold)
    if ok.size == 0 or ok[-1] == power.size - 1:
        return None
    return ok[-1] * step


if __name__ == "__main__":
    f = 915e6
    soil = (0.15, 0.30, 0.50, 1.5, 2.66)
    er, ei = peplinski(*soil, f)
    print("eps", repr(er), repr(ei))
    a, b = propagation(er, ei, f)
    print("alpha beta", repr(a), repr(b))
    print("ug 0.025", repr(underground_db(a, b, 0.025)))
    print("fresnel", fresnel_loss_db(er, ei))
    for d in ("AG2UG", "UG2AG"):
        print("composite", d, repr(composite_db(0.3, 0.025, 1.0, f, soil, d)))
    for mv in (0.05, 0.25):
        print("eps", mv, peplinski(mv, 0.30, 0.50, 1.5, 2.66, f))
