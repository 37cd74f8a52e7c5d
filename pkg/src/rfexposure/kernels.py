"""Hot numeric kernels: path-loss functional forms, LOS probabilities,
linear-domain mixing/averaging and nearest-site search.

Every kernel exists twice: a vectorized numpy version (``*_np``) and an
explicit-loop numba version (``*_nb``).  :func:`get_backend` returns a
namespace of one family; the module-level names dispatch to the backend
chosen at import time (see :mod:`rfexposure._accel`).

Path-loss kernels share one signature::

    kernel(d2d, d3d, fc_ghz, h_bs, h_ut, params) -> ndarray

with ``d2d``/``d3d`` 1-D float64 arrays in metres and ``params`` a float64
vector whose layout is fixed per form (see ``FORM_PARAMETERS``).
"""
import math
from types import SimpleNamespace

import numpy as np

from ._accel import USE_NUMBA, njit

SPEED_OF_LIGHT = 299792458.0

# Ordered coefficient names per functional form; the model file stores them
# by name and the propagation module packs them in this order.
FORM_PARAMETERS = {
    "dual_slope_breakpoint": ("a", "b_near", "c_freq", "b_far", "e_bp", "h_e"),
    "log_distance": ("a", "b", "c_freq", "e_hut", "h_ref", "f_scale"),
    "rma_los": ("h_building",),
    "rma_nlos": ("h_building", "street_width"),
    "cost231_hata": ("a", "b_hbs", "c", "d_freq", "e_hms", "f_hbs", "g_hms", "C"),
    "cost_wi_nlos": ("a", "b", "c0", "c1", "f_ref"),
    "free_space": (),
}

LOS_FORM_PARAMETERS = {
    "los_prob_mixed_exp": ("d1", "d2"),
    "los_prob_uma": ("d1", "d2"),
    "los_prob_exp": ("d0", "scale"),
}


# ---------------------------------------------------------------- numpy ----

def dual_slope_breakpoint_np(d2d, d3d, fc, h_bs, h_ut, p):
    a, b_near, c_freq, b_far, e_bp, h_e = p
    d_bp = 4.0 * (h_bs - h_e) * (h_ut - h_e) * fc * 1e9 / SPEED_OF_LIGHT
    near = a + b_near * np.log10(d3d) + c_freq * np.log10(fc)
    far = (a + b_far * np.log10(d3d) + c_freq * np.log10(fc)
           - e_bp * np.log10(d_bp ** 2 + (h_bs - h_ut) ** 2))
    return np.where(d2d <= d_bp, near, far)


def log_distance_np(d2d, d3d, fc, h_bs, h_ut, p):
    a, b, c_freq, e_hut, h_ref, f_scale = p
    return (a + b * np.log10(d3d) + c_freq * np.log10(fc * f_scale)
            + e_hut * (h_ut - h_ref)) + 0.0 * d2d


def _rma_pl1_np(d3d, fc, h):
    return (20.0 * np.log10(40.0 * np.pi * d3d * fc / 3.0)
            + min(0.03 * h ** 1.72, 10.0) * np.log10(d3d)
            - min(0.044 * h ** 1.72, 14.77)
            + 0.002 * np.log10(h) * d3d)


def rma_los_np(d2d, d3d, fc, h_bs, h_ut, p):
    h = p[0]
    d_bp = 2.0 * np.pi * h_bs * h_ut * fc * 1e9 / SPEED_OF_LIGHT
    near = _rma_pl1_np(d3d, fc, h)
    far = _rma_pl1_np(np.float64(d_bp), fc, h) + 40.0 * np.log10(d3d / d_bp)
    return np.where(d2d <= d_bp, near, far)


def rma_nlos_np(d2d, d3d, fc, h_bs, h_ut, p):
    h, w = p
    return (161.04 - 7.1 * np.log10(w) + 7.5 * np.log10(h)
            - (24.37 - 3.7 * (h / h_bs) ** 2) * np.log10(h_bs)
            + (43.42 - 3.1 * np.log10(h_bs)) * (np.log10(d3d) - 3.0)
            + 20.0 * np.log10(fc)
            - (3.2 * np.log10(11.75 * h_ut) ** 2 - 4.97)) + 0.0 * d2d


def cost231_hata_np(d2d, d3d, fc, h_bs, h_ut, p):
    a, b_hbs, c, d_freq, e_hms, f_hbs, g_hms, C = p
    f_mhz = fc * 1000.0
    return ((a - b_hbs * np.log10(h_bs)) * np.log10(d3d / 1000.0) + c
            + (d_freq - e_hms * h_ut) * np.log10(f_mhz)
            - f_hbs * np.log10(h_bs) + g_hms * h_ut + C) + 0.0 * d2d


def cost_wi_nlos_np(d2d, d3d, fc, h_bs, h_ut, p):
    a, b, c0, c1, f_ref = p
    f_mhz = fc * 1000.0
    return (a + b * np.log10(d3d) + (c0 + c1 * f_mhz / f_ref) * np.log10(f_mhz)) + 0.0 * d2d


def free_space_np(d2d, d3d, fc, h_bs, h_ut, p):
    return 20.0 * np.log10(4.0 * np.pi * d3d * fc * 1e9 / SPEED_OF_LIGHT) + 0.0 * d2d


def los_prob_mixed_exp_np(d2d, h_ut, p):
    d1, d2 = p
    safe = np.maximum(d2d, d1)
    prob = d1 / safe + np.exp(-safe / d2) * (1.0 - d1 / safe)
    return np.where(d2d <= d1, 1.0, prob)


def los_prob_uma_np(d2d, h_ut, p):
    d1, d2 = p
    base = los_prob_mixed_exp_np(d2d, h_ut, p)
    c_hut = 0.0 if h_ut <= 13.0 else ((h_ut - 13.0) / 10.0) ** 1.5
    boost = 1.0 + c_hut * 1.25 * (d2d / 100.0) ** 3 * np.exp(-d2d / 150.0)
    return np.where(d2d <= d1, 1.0, base * boost)


def los_prob_exp_np(d2d, h_ut, p):
    d0, scale = p
    return np.where(d2d <= d0, 1.0, np.exp(-(d2d - d0) / scale))


def mix_linear_np(pl_los, pl_nlos, p_los):
    # factor out the LOS term; pl_nlos >= pl_los keeps the exponent <= 0
    gap = pl_nlos - pl_los
    mixed = pl_los - 10.0 * np.log10(p_los + (1.0 - p_los) * 10.0 ** (-gap / 10.0))
    mixed = np.where(p_los >= 1.0, pl_los, mixed)
    return np.where(p_los <= 0.0, pl_nlos, mixed)


def mean_linear_db_np(values_db):
    top = np.max(values_db)
    return top + 10.0 * np.log10(np.mean(10.0 ** ((values_db - top) / 10.0)))


def nearest_site_np(ues, sites):
    diff = ues[:, None, :] - sites[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=2))
    idx = np.argmin(dist, axis=1)
    return idx, dist[np.arange(ues.shape[0]), idx]


# ---------------------------------------------------------------- numba ----

@njit(cache=True)
def dual_slope_breakpoint_nb(d2d, d3d, fc, h_bs, h_ut, p):
    a, b_near, c_freq, b_far, e_bp, h_e = p[0], p[1], p[2], p[3], p[4], p[5]
    d_bp = 4.0 * (h_bs - h_e) * (h_ut - h_e) * fc * 1e9 / SPEED_OF_LIGHT
    bp_term = e_bp * math.log10(d_bp * d_bp + (h_bs - h_ut) * (h_bs - h_ut))
    lf = c_freq * math.log10(fc)
    out = np.empty(d3d.size)
    for i in range(d3d.size):
        if d2d[i] <= d_bp:
            out[i] = a + b_near * math.log10(d3d[i]) + lf
        else:
            out[i] = a + b_far * math.log10(d3d[i]) + lf - bp_term
    return out


@njit(cache=True)
def log_distance_nb(d2d, d3d, fc, h_bs, h_ut, p):
    const = p[0] + p[2] * math.log10(fc * p[5]) + p[3] * (h_ut - p[4])
    out = np.empty(d3d.size)
    for i in range(d3d.size):
        out[i] = const + p[1] * math.log10(d3d[i])
    return out


@njit(cache=True)
def _rma_pl1_nb(d, fc, h):
    return (20.0 * math.log10(40.0 * math.pi * d * fc / 3.0)
            + min(0.03 * h ** 1.72, 10.0) * math.log10(d)
            - min(0.044 * h ** 1.72, 14.77)
            + 0.002 * math.log10(h) * d)


@njit(cache=True)
def rma_los_nb(d2d, d3d, fc, h_bs, h_ut, p):
    h = p[0]
    d_bp = 2.0 * math.pi * h_bs * h_ut * fc * 1e9 / SPEED_OF_LIGHT
    pl_bp = _rma_pl1_nb(d_bp, fc, h)
    out = np.empty(d3d.size)
    for i in range(d3d.size):
        if d2d[i] <= d_bp:
            out[i] = _rma_pl1_nb(d3d[i], fc, h)
        else:
            out[i] = pl_bp + 40.0 * math.log10(d3d[i] / d_bp)
    return out


@njit(cache=True)
def rma_nlos_nb(d2d, d3d, fc, h_bs, h_ut, p):
    h, w = p[0], p[1]
    lh = math.log10(11.75 * h_ut)
    const = (161.04 - 7.1 * math.log10(w) + 7.5 * math.log10(h)
             - (24.37 - 3.7 * (h / h_bs) ** 2) * math.log10(h_bs)
             + 20.0 * math.log10(fc) - (3.2 * lh * lh - 4.97))
    slope = 43.42 - 3.1 * math.log10(h_bs)
    out = np.empty(d3d.size)
    for i in range(d3d.size):
        out[i] = const + slope * (math.log10(d3d[i]) - 3.0)
    return out


@njit(cache=True)
def cost231_hata_nb(d2d, d3d, fc, h_bs, h_ut, p):
    f_mhz = fc * 1000.0
    slope = p[0] - p[1] * math.log10(h_bs)
    const = (p[2] + (p[3] - p[4] * h_ut) * math.log10(f_mhz)
             - p[5] * math.log10(h_bs) + p[6] * h_ut + p[7])
    out = np.empty(d3d.size)
    for i in range(d3d.size):
        out[i] = slope * math.log10(d3d[i] / 1000.0) + const
    return out


@njit(cache=True)
def cost_wi_nlos_nb(d2d, d3d, fc, h_bs, h_ut, p):
    f_mhz = fc * 1000.0
    const = p[0] + (p[2] + p[3] * f_mhz / p[4]) * math.log10(f_mhz)
    out = np.empty(d3d.size)
    for i in range(d3d.size):
        out[i] = const + p[1] * math.log10(d3d[i])
    return out


@njit(cache=True)
def free_space_nb(d2d, d3d, fc, h_bs, h_ut, p):
    k = 4.0 * math.pi * fc * 1e9 / SPEED_OF_LIGHT
    out = np.empty(d3d.size)
    for i in range(d3d.size):
        out[i] = 20.0 * math.log10(k * d3d[i])
    return out


@njit(cache=True)
def los_prob_mixed_exp_nb(d2d, h_ut, p):
    d1, d2 = p[0], p[1]
    out = np.empty(d2d.size)
    for i in range(d2d.size):
        d = d2d[i]
        if d <= d1:
            out[i] = 1.0
        else:
            out[i] = d1 / d + math.exp(-d / d2) * (1.0 - d1 / d)
    return out


@njit(cache=True)
def los_prob_uma_nb(d2d, h_ut, p):
    d1, d2 = p[0], p[1]
    c_hut = 0.0 if h_ut <= 13.0 else ((h_ut - 13.0) / 10.0) ** 1.5
    out = np.empty(d2d.size)
    for i in range(d2d.size):
        d = d2d[i]
        if d <= d1:
            out[i] = 1.0
        else:
            base = d1 / d + math.exp(-d / d2) * (1.0 - d1 / d)
            out[i] = base * (1.0 + c_hut * 1.25 * (d / 100.0) ** 3 * math.exp(-d / 150.0))
    return out


@njit(cache=True)
def los_prob_exp_nb(d2d, h_ut, p):
    d0, scale = p[0], p[1]
    out = np.empty(d2d.size)
    for i in range(d2d.size):
        if d2d[i] <= d0:
            out[i] = 1.0
        else:
            out[i] = math.exp(-(d2d[i] - d0) / scale)
    return out


@njit(cache=True)
def mix_linear_nb(pl_los, pl_nlos, p_los):
    out = np.empty(pl_los.size)
    for i in range(pl_los.size):
        p = p_los[i]
        if p >= 1.0:
            out[i] = pl_los[i]
        elif p <= 0.0:
            out[i] = pl_nlos[i]
        else:
            gap = pl_nlos[i] - pl_los[i]
            out[i] = pl_los[i] - 10.0 * math.log10(p + (1.0 - p) * 10.0 ** (-gap / 10.0))
    return out


@njit(cache=True)
def mean_linear_db_nb(values_db):
    top = values_db[0]
    for i in range(1, values_db.size):
        if values_db[i] > top:
            top = values_db[i]
    acc = 0.0
    for i in range(values_db.size):
        acc += 10.0 ** ((values_db[i] - top) / 10.0)
    return top + 10.0 * math.log10(acc / values_db.size)


@njit(cache=True)
def nearest_site_nb(ues, sites):
    n = ues.shape[0]
    idx = np.empty(n, dtype=np.int64)
    best = np.empty(n)
    for i in range(n):
        best_d = np.inf
        best_j = 0
        for j in range(sites.shape[0]):
            dx = ues[i, 0] - sites[j, 0]
            dy = ues[i, 1] - sites[j, 1]
            dz = ues[i, 2] - sites[j, 2]
            d = math.sqrt(dx * dx + dy * dy + dz * dz)
            if d < best_d:  # strict: ties keep the lowest index
                best_d = d
                best_j = j
        idx[i] = best_j
        best[i] = best_d
    return idx, best


# ------------------------------------------------------------- dispatch ----

_NAMES = (
    "dual_slope_breakpoint", "log_distance", "rma_los", "rma_nlos",
    "cost231_hata", "cost_wi_nlos", "free_space",
    "los_prob_mixed_exp", "los_prob_uma", "los_prob_exp",
    "mix_linear", "mean_linear_db", "nearest_site",
)


def get_backend(name=None):
    """Return the kernel family ``"numba"`` or ``"numpy"`` as a namespace.

    ``None`` selects the process default.
    """
    if name is None:
        name = "numba" if USE_NUMBA else "numpy"
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown kernel backend {name!r}")
    suffix = "_nb" if name == "numba" else "_np"
    g = globals()
    ns = SimpleNamespace(name=name, **{n: g[n + suffix] for n in _NAMES})
    ns.pathloss = {form: getattr(ns, form) for form in FORM_PARAMETERS}
    ns.los = {form: getattr(ns, form) for form in LOS_FORM_PARAMETERS}
    return ns


BACKEND = get_backend()
