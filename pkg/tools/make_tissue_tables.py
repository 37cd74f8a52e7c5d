"""Regenerate the shipped tissue-data files from the Gabriel 4-Cole-Cole model.

    python tools/make_tissue_tables.py

Dry-skin parameters are those of the IFAC-CNR / Gabriel et al. (1996)
parametric model.  The power transmission coefficient is the Fresnel
transmittance of a planar air/skin interface for perpendicular (TE)
polarization; m(phi) is left at 1.0 pending a sourced table.
"""
import json
import math
from pathlib import Path

import numpy as np

EPS0 = 8.8541878128e-12
C0 = 299792458.0

# ef, (delta_eps, tau_s, alpha) x 4, sigma_ionic
DRY_SKIN = {
    "ef": 4.0,
    "poles": [(32.0, 7.234e-12, 0.0), (1100.0, 32.481e-9, 0.20),
              (0.0, 159.155e-6, 0.20), (0.0, 15.915e-3, 0.20)],
    "sigma": 0.0002,
}
SKIN_DENSITY = 1109.0  # kg/m^3, IT'IS tissue database v4.1, skin
ANGLES = list(range(0, 90, 5))

OUT = Path(__file__).resolve().parents[1] / "src" / "rfexposure" / "data" / "tissue"


def cole_cole(f_hz, p=DRY_SKIN):
    w = 2 * math.pi * f_hz
    eps = complex(p["ef"])
    for d_eps, tau, alpha in p["poles"]:
        eps += d_eps / (1 + (1j * w * tau) ** (1 - alpha))
    return eps + p["sigma"] / (1j * w * EPS0)


def te_transmission(eps, angle_deg):
    ci = math.cos(math.radians(angle_deg))
    st = math.sin(math.radians(angle_deg))
    root = np.sqrt(complex(eps) - st * st)
    gamma = (ci - root) / (ci + root)
    return 1.0 - abs(gamma) ** 2


def build(freq_ghz, name):
    f = freq_ghz * 1e9
    eps = cole_cole(f)
    # eps = eps' - j eps'' with this engineering sign convention
    eps_re, eps_im = eps.real, -eps.imag
    sigma = 2 * math.pi * f * EPS0 * eps_im
    k = 2 * math.pi * f / C0 * np.sqrt(complex(eps_re, -eps_im))
    delta = 1.0 / abs(k.imag)
    doc = {
        "name": name,
        "version": "2026.10-1",
        "tissue": "skin (dry)",
        "frequency_ghz": freq_ghz,
        "rho": SKIN_DENSITY,
        "sigma": round(sigma, 6),
        "delta": round(delta, 9),
        "epsilon_re": round(eps_re, 4),
        "epsilon_im": round(eps_im, 4),
        "transmission": [[a, round(te_transmission(complex(eps_re, -eps_im), a), 6)]
                         for a in ANGLES],
        "m_factor": [[a, 1.0] for a in ANGLES],
        "m_factor_sourced": False,
        "sources": [
            "epsilon*: Gabriel, Lau & Gabriel (1996) 4-Cole-Cole dry-skin parameters "
            "(IFAC-CNR dielectric database), evaluated at frequency_ghz",
            "sigma: 2*pi*f*eps0*epsilon_im (effective conductivity)",
            "delta: 1/alpha, alpha = Im of the plane-wave propagation constant in the "
            "tissue (field amplitude 1/e depth)",
            "rho: IT'IS Foundation tissue properties database v4.1, skin density",
            "transmission: 1 - |Gamma_TE(angle)|^2 at a planar air/skin interface",
            "m_factor: placeholder 1.0 at all angles (not yet sourced)",
        ],
    }
    return doc


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for freq, name in [(28.0, "skin_dry_28ghz"), (1.9, "skin_dry_1p9ghz")]:
        path = OUT / f"{name}.json"
        path.write_text(json.dumps(build(freq, name), indent=2) + "\n", encoding="utf-8")
        print("wrote", path)


if __name__ == "__main__":
    main()
